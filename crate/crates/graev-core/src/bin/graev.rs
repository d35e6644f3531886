fn main() -> std::process::ExitCode {
    graev_core::cli::main()
}
