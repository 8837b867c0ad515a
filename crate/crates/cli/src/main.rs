use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use gtlab_core::diagonal::{bound_family, filter_escape};
use gtlab_core::diagram::{emit_diagram, DiagramFormat};
use gtlab_core::gtrelations::{family_property, relation_eval, witness_valid, FamilyProperty, Label};
use gtlab_core::morphisms::{
    builtin_morphism, interval_split_witness, sampled_invariance_check, sampled_law_check, Arrow,
};
use gtlab_core::sample::seeded_rng;
use gtlab_core::unions::{
    cyclic_action, exhaustion_check, footnote_grid, orbit_max_phi0, F_chain_report, Grid,
};
use gtlab_core::{Element, EpdFun, UpSet};

#[derive(Parser)]
#[command(name = "gtlab", version, about = "Desk-scale checks for Borel cardinal invariant properties")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Evaluate relations, family properties and witnesses.
    #[command(subcommand)]
    Relations(RelationsCmd),
    /// Check Galois-Tukey morphisms.
    #[command(subcommand)]
    Morphism(MorphismCmd),
    /// Diagonalization constructions.
    #[command(subcommand)]
    Diag(DiagCmd),
    /// Equivalence-relation grids.
    #[command(subcommand)]
    Unions(UnionsCmd),
    /// Emit the implication diagram.
    Diagram {
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum RelationsCmd {
    /// Decide A(challenge, response) for a label; operands are JSON literals.
    Eval { label: String, challenge: String, response: String },
    /// Decide a family property of a JSON list of sets.
    Family {
        property: String,
        #[arg(long)]
        input: PathBuf,
    },
    /// Check that ψ witnesses a property against a family.
    Witness {
        label: String,
        /// JSON literal for ψ.
        #[arg(long)]
        psi: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum MorphismCmd {
    /// Sampled law and invariance check of a builtin morphism.
    Check {
        arrow: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum DiagCmd {
    /// Common eventual bound of a JSON list of functions.
    Bound {
        #[arg(long)]
        input: PathBuf,
    },
    /// Escape set for a JSON list of infinite sets.
    Escape {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 16)]
        steps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Interval-splitting witness for a JSON list of infinite sets.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GridKind {
    Footnote,
    Random,
}

#[derive(Subcommand)]
enum UnionsCmd {
    /// Build a grid and run the exhaustion pipeline on it.
    Demo {
        #[arg(long, value_enum, default_value = "footnote")]
        grid: GridKind,
        #[arg(long = "K", default_value_t = 16)]
        k: usize,
        #[arg(long = "R", default_value_t = 4)]
        r: usize,
        #[arg(long = "M", default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Check a single ψ vector against a grid read from JSON.
    Exhaust {
        #[arg(long)]
        input: PathBuf,
        /// JSON array, one column index per row.
        #[arg(long)]
        psi: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

/// Usage or input problem; failed checks are reported as `Ok(false)`.
enum Failure {
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<bool, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(v: &T) {
    println!("{}", serde_json::to_string(v).expect("serializable"));
}

fn relations(cmd: RelationsCmd) -> CmdResult {
    match cmd {
        RelationsCmd::Eval { label, challenge, response } => {
            let label: Label = label.parse()?;
            let c: Element = serde_json::from_str(&challenge)?;
            let r: Element = serde_json::from_str(&response)?;
            println!("{}", relation_eval(label, &c, &r)?);
            Ok(true)
        }
        RelationsCmd::Family { property, input } => {
            let phi: FamilyProperty = property.parse()?;
            let family: Vec<UpSet> = read_json(&input)?;
            let holds = family_property(phi, &family)?;
            println!("{holds}");
            Ok(holds)
        }
        RelationsCmd::Witness { label, psi, input, json } => {
            let label: Label = label.parse()?;
            let psi: Element = serde_json::from_str(&psi)?;
            let family: Vec<Element> = read_json(&input)?;
            let v = witness_valid(label, &psi, &family)?;
            if json {
                print_json(&v);
            } else if let Some(o) = &v.offense {
                println!("invalid: {o:?}");
            } else {
                println!("valid");
            }
            Ok(v.valid)
        }
    }
}

fn morphism(cmd: MorphismCmd) -> CmdResult {
    let MorphismCmd::Check { arrow, samples, seed, json } = cmd;
    let arrow: Arrow = arrow.parse()?;
    let m = builtin_morphism(arrow);
    let mut rng = seeded_rng(seed);
    let law = sampled_law_check(&m, samples, &mut rng)?;
    let seeds = samples.div_ceil(10).max(1);
    let inv = sampled_invariance_check(&m, seeds, 10, &mut rng)?;
    let passed = law.passed && inv.passed;
    if json {
        print_json(&json!({
            "arrow": arrow,
            "passed": passed,
            "violations": law.violations,
            "invariance_violations": inv.violations,
            "samples_run": law.samples_run,
            "mutations_run": inv.samples_run,
        }));
    } else {
        println!(
            "{arrow}: law {} ({} pairs, {} violations); invariance {} ({} mutations, {} violations)",
            verdict(law.passed),
            law.samples_run,
            law.violations.len(),
            verdict(inv.passed),
            inv.samples_run,
            inv.violations.len()
        );
        for (b, a) in law.violations.iter().take(5) {
            println!("  law violation: b = {b}, a = {a}");
        }
        for (b, b2) in inv.violations.iter().take(5) {
            println!("  invariance violation: b = {b}, b' = {b2}");
        }
    }
    Ok(passed)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "passed"
    } else {
        "FAILED"
    }
}

fn diag(cmd: DiagCmd) -> CmdResult {
    match cmd {
        DiagCmd::Bound { input } => {
            let family: Vec<EpdFun> = read_json(&input)?;
            print_json(&bound_family(&family)?);
            Ok(true)
        }
        DiagCmd::Escape { input, steps, json } => {
            let family: Vec<UpSet> = read_json(&input)?;
            let r = filter_escape(&family, steps)?;
            let ok = r.verify(&family);
            if json {
                print_json(&json!({ "result": r, "certificate": ok }));
            } else {
                println!("sides: {:?}", r.sides);
                println!("escape: {:?}", r.escape);
                println!("certificate: {}", verdict(ok));
            }
            Ok(ok)
        }
        DiagCmd::Split { input, json } => {
            let family: Vec<UpSet> = read_json(&input)?;
            let r = interval_split_witness(&family)?;
            let ok = r.verify(&family);
            if json {
                print_json(&json!({ "result": r, "certificate": ok }));
            } else {
                println!("bound: {}", r.bound);
                println!("endpoints: {:?}", r.lambda.endpoints_upto(16));
                match &r.witness {
                    Some(w) => println!("witness: {w:?}"),
                    None => println!("witness: prefix only ({} stages)", r.lambda.stages),
                }
                println!("certificate: {}", verdict(ok));
            }
            Ok(ok)
        }
    }
}

fn unions(cmd: UnionsCmd) -> CmdResult {
    match cmd {
        UnionsCmd::Demo { grid, k, r, m, seed, json } => {
            let mut rng = seeded_rng(seed);
            let (g, footnote) = match grid {
                GridKind::Footnote => {
                    let f = footnote_grid(k, r, m)?;
                    (f.grid.clone(), Some(f))
                }
                GridKind::Random => (Grid::random(&mut rng, k, r, m), None),
            };
            let action = cyclic_action(&mut rng, g.top());
            let psi = orbit_max_phi0(&g, &action);
            let chain = F_chain_report(&g, &psi)?;
            let witnessed = footnote.as_ref().is_none_or(|f| f.all_witnessed());
            let ok = chain.holds() && witnessed;
            if json {
                print_json(&json!({
                    "carrier": g.carrier(),
                    "rows": g.rows(),
                    "cols": g.cols(),
                    "f_chain": chain,
                    "non_inclusions": footnote.as_ref().map(|f| &f.non_inclusions),
                    "passed": ok,
                }));
            } else {
                println!("grid: {} points, {} rows, {} columns", g.carrier(), g.rows(), g.cols());
                println!(
                    "F chain: increasing {}, within rows {}, union = E {}",
                    chain.increasing, chain.within_rows, chain.union_equals_top
                );
                if let Some(f) = &footnote {
                    for w in &f.non_inclusions {
                        match w.witness {
                            Some((a, b)) => {
                                println!("E_{}^0 ⊄ E_{}^{}: {a:?} ~ {b:?}", w.n, w.k, w.m)
                            }
                            None => println!("E_{}^0 ⊆ E_{}^{}: no witness", w.n, w.k, w.m),
                        }
                    }
                }
                println!("{}", verdict(ok));
            }
            Ok(ok)
        }
        UnionsCmd::Exhaust { input, psi, json } => {
            let g: Grid = read_json(&input)?;
            let psi: Vec<usize> = serde_json::from_str(&psi)?;
            let rep = exhaustion_check(&g, &psi)?;
            if json {
                print_json(&rep);
            } else {
                println!(
                    "{} related pairs; settles at row {} of {}; union covers E: {}",
                    rep.pairs, rep.settle_index, rep.truncation, rep.union_covers
                );
                if let Some(v) = &rep.first_violation {
                    println!("first violation: ({}, {}) at row {}: {:?}", v.x, v.y, v.row, v.kind);
                }
                println!("{}", verdict(rep.passed));
            }
            Ok(rep.passed)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    match cli.verb {
        Verb::Relations(c) => relations(c),
        Verb::Morphism(c) => morphism(c),
        Verb::Diag(c) => diag(c),
        Verb::Unions(c) => unions(c),
        Verb::Diagram { format } => {
            let f = match format {
                Format::Dot => DiagramFormat::Dot,
                Format::Json => DiagramFormat::Json,
            };
            print!("{}", emit_diagram(f));
            if f == DiagramFormat::Json {
                println!();
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
