//! Command-line front end.
//!
//! One command per process; all input is UTF-8 text in the line-oriented
//! format implemented by [`crate::parse`] (normative schema:
//! `docs/file-format.md`). Every printed value is an exact rational.
//!
//! Exit codes: `0` success, `1` mathematical validation failure, `2`
//! parse/usage error.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::alphabet::Alphabet;
use crate::combinatorics::{
    build_balanced_evaluation_tree, canonical_label, enumerate_reduced_forms, evaluate, is_trivial,
    nf_inv, nf_mul, validate_evaluation_tree,
};
use crate::free::{
    build_symmetrized_space, enumerate_matches, graev_norm_free, FLetter, Strategy,
    SymmetrizedSpace,
};
use crate::group::{validate_group, validate_tsi_metric, CheckReport};
use crate::hnn::{check_diam_criterion, hnn_construct, hnn_necessary_condition, t_degree};
use crate::parse::{parse_amalgam_word, parse_file, parse_t_word, InputFile, ParseError};
use crate::product::{
    graev_norm_with, rho, to_multipliable, to_simple, to_slim, GraevResult, NormStrategy,
};
use crate::rational::Rat;
use crate::sin::{
    check_bilipschitz_on_subgroup, check_interleaving, circle_induced_conjugacy, extend_norm,
    heisenberg_obstruction, interleave_families, validate_bk_metric, validate_norm_table,
};
use crate::words::Word;

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    /// Prose report.
    Human,
    /// Stable `key=value` records, one per line.
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum StrategyFlag {
    /// Minimize over reduced forms with symmetric companions.
    Symmetric,
    /// Exhaustive minimum over bounded-length multipliable pairs.
    Brute,
    /// Run both and require agreement.
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum FreeStrategyFlag {
    /// Interval dynamic programming over non-crossing matches.
    Dp,
    /// Full enumeration of non-crossing matches.
    Enumerate,
    /// Run both and require agreement.
    Both,
}

#[derive(Parser, Debug)]
#[command(
    name = "graev",
    about = "Exact Graev metrics on free products, amalgams, and HNN extensions",
    version
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: Format,
    /// Random seed; recorded in every report that uses randomness.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate every declaration in the file (groups, metrics, subgroups,
    /// embeddings, spaces, families, HNN data).
    Validate { file: String },
    /// Graev distance between two words over the amalgam declared in FILE.
    Dist {
        file: String,
        f: String,
        g: String,
        #[arg(long, value_enum, default_value = "symmetric")]
        strategy: StrategyFlag,
        /// Length bound for the brute-force strategy (default: length + 2).
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Graev norm of a word, with its minimizing witness pair.
    Norm {
        file: String,
        f: String,
        #[arg(long, value_enum, default_value = "symmetric")]
        strategy: StrategyFlag,
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Run the cost-preserving reduction chain on a pair (alpha, zeta):
    /// multipliable, then slim, then simple, printing the cost at each stage.
    Reduce { file: String, alpha: String, zeta: String },
    /// All reduced forms of the element spelled by a word.
    ReducedForms { file: String, f: String },
    /// Balanced evaluation tree of a trivial word, with validation verdict.
    Tree { file: String, zeta: String },
    /// Non-crossing matches of [1, n]: count (a Motzkin number) and list.
    Matches { n: usize },
    /// Graev distance in the free group over the pointed space named SPACE.
    FreeDist {
        file: String,
        space: String,
        u: String,
        v: String,
        #[arg(long, value_enum, default_value = "dp")]
        strategy: FreeStrategyFlag,
    },
    /// Cross-check the symmetric-enumeration norm against brute force.
    Oracle {
        file: String,
        f: String,
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Queries about the HNN extension declared in FILE.
    Hnn {
        #[command(subcommand)]
        query: HnnQuery,
    },
    /// Metric induced by the Birkhoff-Kakutani family declared in FILE.
    BkMetric {
        file: String,
        /// Which family declaration to use (in file order).
        #[arg(long, default_value = "0")]
        index: usize,
    },
    /// Extend a subgroup norm to the whole group by infimal convolution.
    ExtendNorm {
        file: String,
        /// Subgroup carrying the partial norm.
        sub: String,
        /// Norm table whose values on the subgroup are the norm to extend.
        na: String,
        /// Dominating norm table on the whole group.
        ng: String,
    },
    /// Interleave neighborhood families of two groups along a common
    /// subgroup (paired by the file's embed line) and check the
    /// containments and the bi-Lipschitz bound.
    Interleave {
        file: String,
        /// Subgroup of the first group (must have an embed line).
        sub: String,
    },
    /// Verify the discrete Heisenberg commutator identity and report the
    /// unbounded distortion ratio.
    Heisenberg {
        #[arg(long, default_value = "10")]
        n_max: i64,
    },
    /// Decide whether two rotations of the circle are conjugate by an
    /// isometry inducing the identity on a common finite orbit.
    CircleConj { g1: Rat, g2: Rat },
}

#[derive(Subcommand, Debug)]
pub enum HnnQuery {
    /// Distance between two stable-letter words in the HNN extension.
    Dist {
        file: String,
        f: String,
        g: String,
        #[arg(long)]
        max_length: Option<usize>,
        /// Cap on the t-degree of the words explored.
        #[arg(long, default_value = "2")]
        t_degree: i64,
    },
    /// Compare the induced and intrinsic metrics on G * tAt^-1: equality
    /// when diam A is at most K, a quantified gap otherwise.
    CheckDiam { file: String },
    /// Check the necessary bound d(a, phi(a)) <= 2K for all a in A.
    Necessary {
        file: String,
        #[arg(long)]
        max_length: Option<usize>,
        #[arg(long, default_value = "2")]
        t_degree: i64,
    },
}

/// A failed run: the exit code (1 or 2) and the message for stderr.
#[derive(Debug)]
pub struct CliFailure {
    pub code: u8,
    pub msg: String,
}

fn usage(msg: impl Into<String>) -> CliFailure {
    CliFailure { code: 2, msg: msg.into() }
}

fn mathfail(msg: impl Into<String>) -> CliFailure {
    CliFailure { code: 1, msg: msg.into() }
}

impl From<ParseError> for CliFailure {
    fn from(e: ParseError) -> Self {
        usage(e.to_string())
    }
}

fn load(path: &str) -> Result<InputFile, CliFailure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read `{path}`: {e}")))?;
    Ok(parse_file(&text)?)
}

fn report_lines(out: &mut String, format: Format, name: &str, r: &CheckReport) {
    match format {
        Format::Human => {
            out.push_str(&format!("{name}: {}", r.render()));
        }
        Format::Records => {
            out.push_str(&format!(
                "check name={name} passed={}\n",
                if r.passed { "true" } else { "false" }
            ));
            for line in &r.details {
                out.push_str(&format!("detail name={name} text={line}\n"));
            }
        }
    }
}

fn word_display<A: Alphabet>(sys: &A, w: &Word<A::Letter>) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    w.letters().iter().map(|l| sys.display(l)).collect::<Vec<_>>().join(" ")
}

fn norm_result<A: Alphabet>(
    out: &mut String,
    format: Format,
    sys: &A,
    what: &str,
    r: &GraevResult<A::Letter>,
) {
    match format {
        Format::Human => {
            out.push_str(&format!("{what} = {}\n", r.value));
            out.push_str(&format!("  witness alpha: {}\n", word_display(sys, &r.alpha)));
            out.push_str(&format!("  witness zeta:  {}\n", word_display(sys, &r.zeta)));
            out.push_str(&format!(
                "  strategy: {} ({} candidates)\n",
                r.strategy, r.candidates
            ));
        }
        Format::Records => {
            out.push_str(&format!(
                "result kind={what} value={} strategy={} candidates={}\n",
                r.value, r.strategy, r.candidates
            ));
            out.push_str(&format!("witness alpha={}\n", word_display(sys, &r.alpha)));
            out.push_str(&format!("witness zeta={}\n", word_display(sys, &r.zeta)));
        }
    }
}

fn strategy_of(flag: StrategyFlag, max_length: Option<usize>, len: usize) -> NormStrategy {
    let bound = max_length.unwrap_or(len + 2);
    match flag {
        StrategyFlag::Symmetric => NormStrategy::Symmetric,
        StrategyFlag::Brute => NormStrategy::BruteForce { max_len: bound },
        StrategyFlag::Both => NormStrategy::Both { max_len: bound },
    }
}

fn parse_free_word(
    sym: &SymmetrizedSpace,
    text: &str,
) -> Result<Word<FLetter>, CliFailure> {
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        let (body, invert) = match token.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (token, false),
        };
        let idx = sym
            .space
            .point_index(body)
            .ok_or_else(|| usage(format!("unknown point `{body}`")))?;
        letters.push(sym.letter(if invert { FLetter::Inv(idx) } else { FLetter::Point(idx) }));
    }
    Ok(Word::new(letters))
}

fn seed_header(out: &mut String, format: Format, seed: Option<u64>) {
    if let Some(s) = seed {
        match format {
            Format::Human => out.push_str(&format!("seed: {s}\n")),
            Format::Records => out.push_str(&format!("seed value={s}\n")),
        }
    }
}

/// Run one command, returning the full stdout text or a failure.
pub fn execute(cli: Cli) -> Result<String, CliFailure> {
    let format = cli.format;
    let mut out = String::new();
    seed_header(&mut out, format, cli.seed);
    match cli.command {
        Command::Validate { file } => {
            let input = load(&file)?;
            let mut reports: Vec<(String, CheckReport)> = Vec::new();
            for g in &input.groups {
                reports.push((format!("group {} table", g.name), validate_group(&g.table)));
                reports.push((format!("group {} metric", g.name), validate_tsi_metric(g)));
            }
            for s in &input.spaces {
                reports.push((format!("space {}", s.name), s.validate()));
            }
            for sd in input.subgroups.iter() {
                let r = match input.subgroup(&sd.name) {
                    Ok(_) => CheckReport::pass(),
                    Err(e) => CheckReport::fail(e.to_string()),
                };
                reports.push((format!("subgroup {}", sd.name), r));
            }
            if !input.groups.is_empty() {
                let r = match input.build_amalgam() {
                    Ok(sys) => sys.check(),
                    Err(e) => CheckReport::fail(e.to_string()),
                };
                reports.push(("amalgam".into(), r));
            }
            for (i, _) in input.families.iter().enumerate() {
                let r = match input.build_family(i) {
                    Ok(fam) => validate_bk_metric(&fam, &fam.metric()),
                    Err(e) => CheckReport::fail(e.to_string()),
                };
                reports.push((format!("family {i}"), r));
            }
            for nd in &input.norms {
                let r = match input.build_norm_table(&nd.name) {
                    Ok((gi, nt)) => validate_norm_table(&input.groups[gi], &nt, false),
                    Err(e) => CheckReport::fail(e.to_string()),
                };
                reports.push((format!("normtable {}", nd.name), r));
            }
            if input.hnn.is_some() {
                let r = match input.build_hnn() {
                    Ok(sys) => sys.validate(),
                    Err(e) => CheckReport::fail(e.to_string()),
                };
                reports.push(("hnn".into(), r));
            }
            let mut failed = false;
            for (name, r) in &reports {
                failed |= !r.passed;
                report_lines(&mut out, format, name, r);
            }
            if failed {
                return Err(mathfail(out));
            }
        }
        Command::Dist { file, f, g, strategy, max_length } => {
            let sys = load(&file)?.build_amalgam()?;
            let wf = parse_amalgam_word(&sys, &f)?;
            let wg = parse_amalgam_word(&sys, &g)?;
            let h = nf_mul(&sys, &evaluate(&sys, &wf), &nf_inv(&sys, &evaluate(&sys, &wg)));
            let r = graev_norm_with(&sys, &h, strategy_of(strategy, max_length, h.len()))
                .map_err(|e| mathfail(e.to_string()))?;
            norm_result(&mut out, format, &sys, "dist", &r);
        }
        Command::Norm { file, f, strategy, max_length } => {
            let sys = load(&file)?.build_amalgam()?;
            let nf = evaluate(&sys, &parse_amalgam_word(&sys, &f)?);
            let r = graev_norm_with(&sys, &nf, strategy_of(strategy, max_length, nf.len()))
                .map_err(|e| mathfail(e.to_string()))?;
            norm_result(&mut out, format, &sys, "norm", &r);
        }
        Command::Reduce { file, alpha, zeta } => {
            let sys = load(&file)?.build_amalgam()?;
            let a = parse_amalgam_word(&sys, &alpha)?;
            let z = parse_amalgam_word(&sys, &zeta)?;
            if a.len() != z.len() {
                return Err(usage("alpha and zeta must have the same length"));
            }
            if !is_trivial(&sys, &z) {
                return Err(mathfail(format!(
                    "zeta is not trivial; it evaluates to {}",
                    word_display(&sys, &evaluate(&sys, &z).0)
                )));
            }
            let mut stage = |name: &str, a: &Word<_>, z: &Word<_>| match format {
                Format::Human => out.push_str(&format!(
                    "{name}: cost {}\n  alpha: {}\n  zeta:  {}\n",
                    rho(&sys, a, z),
                    word_display(&sys, a),
                    word_display(&sys, z)
                )),
                Format::Records => out.push_str(&format!(
                    "stage name={name} cost={} alpha={} zeta={}\n",
                    rho(&sys, a, z),
                    word_display(&sys, a),
                    word_display(&sys, z)
                )),
            };
            stage("input", &a, &z);
            let (a1, z1) = to_multipliable(&sys, &a, &z);
            stage("multipliable", &a1, &z1);
            let tree = build_balanced_evaluation_tree(&sys, &z1, &canonical_label(&sys, &z1))
                .map_err(|e| mathfail(e.to_string()))?;
            let (a2, z2) =
                to_slim(&sys, (a1, z1), &tree).map_err(|e| mathfail(e.to_string()))?;
            stage("slim", &a2, &z2);
            let tree2 = build_balanced_evaluation_tree(&sys, &z2, &canonical_label(&sys, &z2))
                .map_err(|e| mathfail(e.to_string()))?;
            let (a3, z3) =
                to_simple(&sys, (a2, z2), &tree2).map_err(|e| mathfail(e.to_string()))?;
            stage("simple", &a3, &z3);
        }
        Command::ReducedForms { file, f } => {
            let sys = load(&file)?.build_amalgam()?;
            let nf = evaluate(&sys, &parse_amalgam_word(&sys, &f)?);
            let forms = enumerate_reduced_forms(&sys, &nf);
            match format {
                Format::Human => {
                    out.push_str(&format!("{} reduced forms\n", forms.len()));
                    for w in &forms {
                        out.push_str(&format!("  {}\n", word_display(&sys, w)));
                    }
                }
                Format::Records => {
                    out.push_str(&format!("count value={}\n", forms.len()));
                    for w in &forms {
                        out.push_str(&format!("form word={}\n", word_display(&sys, w)));
                    }
                }
            }
        }
        Command::Tree { file, zeta } => {
            let sys = load(&file)?.build_amalgam()?;
            let z = parse_amalgam_word(&sys, &zeta)?;
            if !is_trivial(&sys, &z) {
                return Err(mathfail(format!(
                    "zeta is not trivial; it evaluates to {}",
                    word_display(&sys, &evaluate(&sys, &z).0)
                )));
            }
            let label = canonical_label(&sys, &z);
            let tree = build_balanced_evaluation_tree(&sys, &z, &label)
                .map_err(|e| mathfail(e.to_string()))?;
            out.push_str(&tree.render());
            let verdict = validate_evaluation_tree(&sys, &z, &label, &tree, true);
            report_lines(&mut out, format, "tree", &verdict);
            if !verdict.passed {
                return Err(mathfail(out));
            }
        }
        Command::Matches { n } => {
            let ms = enumerate_matches(n).map_err(|e| usage(e.to_string()))?;
            match format {
                Format::Human => {
                    out.push_str(&format!("{} non-crossing matches of [1, {n}]\n", ms.len()));
                    for m in &ms {
                        out.push_str(&format!("  {m}\n"));
                    }
                }
                Format::Records => {
                    out.push_str(&format!("count value={}\n", ms.len()));
                    for m in &ms {
                        out.push_str(&format!("match theta={m}\n"));
                    }
                }
            }
        }
        Command::FreeDist { file, space, u, v, strategy } => {
            let input = load(&file)?;
            let sp = input
                .spaces
                .iter()
                .find(|s| s.name == space)
                .ok_or_else(|| usage(format!("no space named `{space}`")))?;
            let sym = build_symmetrized_space(sp);
            let wu = parse_free_word(&sym, &u)?;
            let wv = parse_free_word(&sym, &v)?;
            let strat = match strategy {
                FreeStrategyFlag::Dp => Strategy::Dp,
                FreeStrategyFlag::Enumerate => Strategy::Enumerate,
                FreeStrategyFlag::Both => Strategy::Both,
            };
            let w = sym.mul_inv(&wu, &wv);
            let witness =
                graev_norm_free(&sym, &w, strat).map_err(|e| mathfail(e.to_string()))?;
            match format {
                Format::Human => {
                    out.push_str(&format!("dist = {}\n", witness.value));
                    out.push_str(&format!("  witness match: {}\n", witness.theta));
                }
                Format::Records => {
                    out.push_str(&format!(
                        "result kind=free-dist value={} theta={}\n",
                        witness.value, witness.theta
                    ));
                }
            }
        }
        Command::Oracle { file, f, max_length } => {
            let sys = load(&file)?.build_amalgam()?;
            let nf = evaluate(&sys, &parse_amalgam_word(&sys, &f)?);
            let bound = max_length.unwrap_or(nf.len() + 2);
            let r = graev_norm_with(&sys, &nf, NormStrategy::Both { max_len: bound })
                .map_err(|e| mathfail(e.to_string()))?;
            norm_result(&mut out, format, &sys, "norm", &r);
            match format {
                Format::Human => out.push_str("oracle: strategies agree\n"),
                Format::Records => out.push_str("check name=oracle passed=true\n"),
            }
        }
        Command::Hnn { query } => match query {
            HnnQuery::Dist { file, f, g, max_length, t_degree: cap } => {
                let system = load(&file)?.build_hnn()?;
                let group = system.group.clone();
                let scale = system.k;
                let hg = hnn_construct(system, cap).map_err(|e| mathfail(e.to_string()))?;
                let wf = parse_t_word(&group, &f)?;
                let wg = parse_t_word(&group, &g)?;
                if t_degree(&wf) > cap || t_degree(&wg) > cap {
                    return Err(usage(format!("word exceeds the t-degree cap {cap}")));
                }
                let bound = max_length.unwrap_or(wf.len() + wg.len() + 2);
                let r = hg
                    .distance(&wf, &wg, bound)
                    .map_err(|e| mathfail(e.to_string()))?;
                let alph = crate::hnn::StableAlphabet::new(group, cap, scale);
                norm_result(&mut out, format, &alph, "dist", &r);
            }
            HnnQuery::CheckDiam { file } => {
                let input = load(&file)?;
                let def = input
                    .hnn
                    .clone()
                    .ok_or_else(|| usage("the file declares no hnn section"))?;
                let group = input.group(&def.base)?.clone();
                let (_, a) = input.subgroup(&def.a)?;
                let r = check_diam_criterion(&group, &a, def.k);
                report_lines(&mut out, format, "check-diam", &r);
                if !r.passed {
                    return Err(mathfail(out));
                }
            }
            HnnQuery::Necessary { file, max_length, t_degree: cap } => {
                let system = load(&file)?.build_hnn()?;
                let hg = hnn_construct(system.clone(), cap)
                    .map_err(|e| mathfail(e.to_string()))?;
                let bound = max_length.unwrap_or(4);
                let r = hnn_necessary_condition(&system, |a, b| {
                    let wa = Word::new(vec![crate::hnn::TLetter::G(a)]);
                    let wb = Word::new(vec![crate::hnn::TLetter::G(b)]);
                    hg.distance(&wa, &wb, bound)
                        .map(|r| r.value)
                        .unwrap_or_else(|_| system.group.d(a, b))
                });
                report_lines(&mut out, format, "necessary", &r);
                if !r.passed {
                    return Err(mathfail(out));
                }
            }
        },
        Command::BkMetric { file, index } => {
            let input = load(&file)?;
            let fam = input.build_family(index)?;
            let d = fam.metric();
            let names = &fam.group.elements;
            match format {
                Format::Human => {
                    out.push_str(&format!("metric of family {index} on {}\n", fam.group.name));
                    for (i, row) in d.iter().enumerate() {
                        let cells: Vec<String> = row.iter().map(Rat::to_string).collect();
                        out.push_str(&format!("  {}: {}\n", names[i], cells.join(" ")));
                    }
                }
                Format::Records => {
                    for (i, row) in d.iter().enumerate() {
                        for (j, v) in row.iter().enumerate() {
                            out.push_str(&format!("d x={} y={} value={v}\n", names[i], names[j]));
                        }
                    }
                }
            }
            let verdict = validate_bk_metric(&fam, &d);
            report_lines(&mut out, format, "bk-metric", &verdict);
            if !verdict.passed {
                return Err(mathfail(out));
            }
        }
        Command::ExtendNorm { file, sub, na, ng } => {
            let input = load(&file)?;
            let (gi, subgroup) = input.subgroup(&sub)?;
            let (gna, na_table) = input.build_norm_table(&na)?;
            let (gng, ng_table) = input.build_norm_table(&ng)?;
            if gna != gi || gng != gi {
                return Err(usage("the norm tables must live on the subgroup's group"));
            }
            let group = &input.groups[gi];
            let pairs: Vec<(usize, Rat)> =
                subgroup.members.iter().map(|&m| (m, na_table.at(m))).collect();
            let extended = extend_norm(group, &subgroup, &pairs, &ng_table)
                .map_err(|e| mathfail(e.to_string()))?;
            match format {
                Format::Human => {
                    out.push_str("extended norm:\n");
                    for (k, name) in group.elements.iter().enumerate() {
                        out.push_str(&format!("  N({name}) = {}\n", extended.at(k)));
                    }
                }
                Format::Records => {
                    for (k, name) in group.elements.iter().enumerate() {
                        out.push_str(&format!("norm element={name} value={}\n", extended.at(k)));
                    }
                }
            }
            let verdict =
                validate_norm_table(group, &extended, subgroup.is_normal(group));
            report_lines(&mut out, format, "extend-norm", &verdict);
            if !verdict.passed {
                return Err(mathfail(out));
            }
        }
        Command::Interleave { file, sub } => {
            let input = load(&file)?;
            let (g1i, a1) = input.subgroup(&sub)?;
            let embed = input
                .embeds
                .iter()
                .find(|e| e.sub == sub)
                .ok_or_else(|| usage(format!("no embed line for subgroup `{sub}`")))?;
            let g2i = input
                .groups
                .iter()
                .position(|g| g.name == embed.into)
                .ok_or_else(|| usage(format!("no group named `{}`", embed.into)))?;
            let (g1, g2) = (&input.groups[g1i], &input.groups[g2i]);
            let iso: Result<Vec<(usize, usize)>, CliFailure> = embed
                .pairs
                .iter()
                .map(|(x, y)| {
                    let xi = g1
                        .element_index(x)
                        .ok_or_else(|| usage(format!("`{x}` not in `{}`", g1.name)))?;
                    let yi = g2
                        .element_index(y)
                        .ok_or_else(|| usage(format!("`{y}` not in `{}`", g2.name)))?;
                    Ok((xi, yi))
                })
                .collect();
            let iso = iso?;
            let image: Vec<usize> = iso.iter().map(|&(_, y)| y).collect();
            let a2 = crate::group::Subgroup::new(format!("{sub}'"), g2, image)
                .map_err(|e| usage(e.to_string()))?;
            let (f1, f2) = interleave_families(g1, g2, &a1, &a2, &iso)
                .map_err(|e| mathfail(e.to_string()))?;
            let show = |out: &mut String, which: &str, f: &crate::sin::BKFamily| {
                for (k, level) in f.levels.iter().enumerate() {
                    let names: Vec<&str> =
                        level.iter().map(|&x| f.group.elements[x].as_str()).collect();
                    match format {
                        Format::Human => out.push_str(&format!(
                            "  {which} level {k}: {}\n",
                            names.join(" ")
                        )),
                        Format::Records => out.push_str(&format!(
                            "level family={which} index={k} members={}\n",
                            names.join(",")
                        )),
                    }
                }
            };
            if format == Format::Human {
                out.push_str("interleaved families:\n");
            }
            show(&mut out, &f1.group.name, &f1);
            show(&mut out, &f2.group.name, &f2);
            let containments = check_interleaving(&f1, &f2, &a1, &a2, &iso);
            report_lines(&mut out, format, "containments", &containments);
            let lipschitz = check_bilipschitz_on_subgroup(&f1, &f2, &a1, &iso);
            report_lines(&mut out, format, "bi-lipschitz", &lipschitz);
            if !containments.passed || !lipschitz.passed {
                return Err(mathfail(out));
            }
        }
        Command::Heisenberg { n_max } => {
            let r = heisenberg_obstruction(n_max);
            report_lines(&mut out, format, "heisenberg", &r);
            if !r.passed {
                return Err(mathfail(out));
            }
        }
        Command::CircleConj { g1, g2 } => {
            let (conjugate, reason) = circle_induced_conjugacy(g1, g2);
            match format {
                Format::Human => out.push_str(&format!(
                    "{}: {reason}\n",
                    if conjugate { "conjugate" } else { "not conjugate" }
                )),
                Format::Records => out.push_str(&format!(
                    "result kind=circle-conj conjugate={conjugate} reason={reason}\n"
                )),
            }
        }
    }
    Ok(out)
}

/// Binary entry point. Prints the report to stdout (or the failure to
/// stderr) and exits with the documented code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprint!("{}", f.msg);
            if !f.msg.ends_with('\n') {
                eprintln!();
            }
            ExitCode::from(f.code)
        }
    }
}
