fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(format!("{crate_dir}/include/graev.h"));
        }
        Err(e) => {
            // Header generation must not break `cargo build` for downstream
            // users without cbindgen's toolchain requirements.
            println!("cargo:warning=cbindgen failed: {e}");
        }
    }
}
