//! Command-line front end: exact expansions, genus enumeration, Bernoulli
//! numbers, and p-power congruence verification with deterministic,
//! machine-readable output.
//!
//! Exit codes: 0 = success / verified; 1 = verification ran and came out
//! negative (the report with witnesses is still printed); 2 = usage or
//! input error; 3 = internal consistency failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde::Serialize;

use siegel::bernoulli::{bernoulli_number, generalized_bernoulli, irregular_indices};
use siegel::chars::QuadCharacter;
use siegel::eisenstein::{eis_deg1, eis_deg2};
use siegel::exact::{rat, Rational};
use siegel::hecke::up_theta_decompose;
use siegel::padic::{verify_main_theorem, verify_up_fixed, VerificationReport};
use siegel::qexp::QExpansion;
use siegel::quadforms::{
    enumerate_classes, genus_partition, proper_class_count, repr_count, Gram,
};
use siegel::theta::theta_qexp;
use siegel::{Error, Result};

const EXIT_OK: u8 = 0;
const EXIT_NOT_VERIFIED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

/// Trace bound on which `verify up-theta` checks the decomposition identity
/// coefficient by coefficient.
const UP_THETA_CHECK_BOUND: i64 = 4;

#[derive(Parser)]
#[command(
    name = "siegel",
    version = siegel::VERSION,
    about = "Exact Siegel-Eisenstein and theta expansions with p-power congruence verification",
    arg_required_else_help = false
)]
struct Cli {
    /// Write the standard verification outputs as golden files into DIR, then exit.
    #[arg(long, value_name = "DIR")]
    seed_fixtures: Option<PathBuf>,

    /// Worker threads (0 = all cores). Results are identical for every choice.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    /// Coefficient-by-coefficient formula (any supported weight).
    Primitive,
    /// Shortcut through the weight-4 theta series; only valid for weight 4.
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier expansion of the normalized Eisenstein series (JSON).
    Eisenstein {
        /// Degree of the series: 1 or 2.
        #[arg(long)]
        degree: usize,
        /// Weight k.
        #[arg(long)]
        weight: u32,
        /// Include all keys T with tr(T) <= B.
        #[arg(long, value_name = "B")]
        trace_bound: i64,
        /// Computation route.
        #[arg(long, value_enum, default_value = "primitive")]
        route: Route,
    },
    /// Theta series of a positive definite even form read from a Gram file (JSON).
    Theta {
        /// JSON file {"rank": n, "twice_gram": [[...], ...]} storing the doubled matrix.
        #[arg(long, value_name = "FILE")]
        gram: PathBuf,
        /// Degree of the expansion (1-4).
        #[arg(long)]
        degree: usize,
        /// Include all keys T with tr(T) <= B.
        #[arg(long, value_name = "B")]
        trace_bound: i64,
    },
    /// Genus-level computations.
    Genus {
        #[command(subcommand)]
        command: GenusCommand,
    },
    /// Bernoulli number B_k, optionally twisted by a quadratic character (JSON).
    Bernoulli {
        #[arg(long)]
        k: u64,
        /// Character selector "p:P" for the quadratic character attached to the prime P.
        #[arg(long, value_name = "p:P")]
        chi: Option<String>,
    },
    /// Whether p is a regular prime, with the smallest irregular index if not (JSON).
    Regular {
        #[arg(long)]
        p: u64,
    },
    /// Verification runs; exit code 0 means verified, 1 means refuted.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
}

#[derive(Subcommand)]
enum GenusCommand {
    /// Enumerate unimodular classes of even positive definite forms, grouped into genera.
    Enumerate {
        /// Size of the forms: 2 or 4.
        #[arg(long)]
        rank: usize,
        /// Determinant of the doubled matrix.
        #[arg(long)]
        det2: i64,
        /// Keep only forms whose level divides this number.
        #[arg(long)]
        level_divides: i64,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Compare the stage-m expansion against the limit combination of genus theta series.
    Main {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        j: u8,
        #[arg(long)]
        p: u64,
        /// Target congruence precision p^m.
        #[arg(long)]
        m: u32,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_name = "B")]
        trace_bound: i64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check that the stage-m expansion is fixed by U(p) to order m.
    Up {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        j: u8,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_name = "B")]
        trace_bound: i64,
    },
    /// Decompose theta|U(p)^e over lower-level theta series and check the
    /// integrality and vanishing pattern of the coefficient matrix.
    UpTheta {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        p: u64,
        /// Level exponent: the input theta series have level p^e.
        #[arg(long)]
        e: u32,
        /// Degree of the expansions on which the identity is checked.
        #[arg(long)]
        degree: usize,
    },
}

#[derive(Serialize)]
struct GenusClassOut {
    epsilon: u64,
    twice_gram: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct GenusOut {
    classes: Vec<GenusClassOut>,
    det2: i128,
    level: i64,
    mass: String,
}

#[derive(Serialize)]
struct GenusEnumerateOut {
    class_count: usize,
    det2: i64,
    genera: Vec<GenusOut>,
    level_divides: i64,
    proper_class_count: u64,
    rank: usize,
}

#[derive(Serialize)]
struct BernoulliOut {
    chi: Option<String>,
    k: u64,
    value: String,
}

#[derive(Serialize)]
struct RegularOut {
    p: u64,
    regular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    smallest_irregular_index: Option<u64>,
}

#[derive(Serialize)]
struct UpThetaFormOut {
    level: i64,
    twice_gram: Vec<Vec<i64>>,
}

#[derive(Serialize)]
struct UpThetaOut {
    alpha: Vec<Vec<String>>,
    checked_degree: usize,
    checked_trace_bound: i64,
    deep_levels_vanish: bool,
    e: u32,
    forms: Vec<UpThetaFormOut>,
    identity_holds: bool,
    integral: bool,
    p: u64,
    rank: usize,
    verified: bool,
}

fn rows(g: &Gram) -> Vec<Vec<i64>> {
    (0..g.rank).map(|i| g.entries[i * g.rank..(i + 1) * g.rank].to_vec()).collect()
}

/// Writes one output line, dying with the conventional SIGPIPE status when
/// the downstream consumer has closed the pipe (e.g. `siegel ... | head`).
fn print_line(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{s}").is_err() {
        std::process::exit(141);
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("output serialization cannot fail")
}

fn read_gram(path: &Path) -> Result<Gram> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("invalid Gram file {}: {e}", path.display())))
}

fn eisenstein_expansion(degree: usize, weight: u32, trace_bound: i64, route: Route) -> Result<QExpansion> {
    match route {
        Route::Primitive => match degree {
            1 => eis_deg1(weight, trace_bound),
            2 => eis_deg2(weight, trace_bound),
            _ => Err(Error::Unsupported(format!(
                "Eisenstein expansions implemented for degrees 1 and 2, got {degree}"
            ))),
        },
        Route::Oracle => {
            if weight != 4 {
                return Err(Error::InvalidArgument(format!(
                    "the oracle route goes through the weight-4 theta series; got weight {weight}"
                )));
            }
            theta_qexp(&siegel::quadforms::e8_twice_gram(), degree, trace_bound)
        }
    }
}

fn genus_enumerate(rank: usize, det2: i64, level_divides: i64) -> Result<GenusEnumerateOut> {
    let forms = enumerate_classes(rank, det2, level_divides)?;
    let genera = genus_partition(&forms)?;
    Ok(GenusEnumerateOut {
        class_count: forms.len(),
        det2,
        genera: genera
            .iter()
            .map(|g| GenusOut {
                classes: g
                    .classes
                    .iter()
                    .map(|c| GenusClassOut { epsilon: c.epsilon, twice_gram: rows(&c.form) })
                    .collect(),
                det2: g.det2,
                level: g.level,
                mass: g.mass().to_string(),
            })
            .collect(),
        level_divides,
        proper_class_count: proper_class_count(&forms),
        rank,
    })
}

fn bernoulli_value(k: u64, chi: Option<&str>) -> Result<BernoulliOut> {
    let value = match chi {
        None => bernoulli_number(k),
        Some(spec) => {
            let p: u64 = spec
                .strip_prefix("p:")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "character selector must look like p:7, got {spec}"
                    ))
                })?;
            generalized_bernoulli(k, &QuadCharacter::chi_p(p)?)
        }
    };
    Ok(BernoulliOut { chi: chi.map(str::to_string), k, value: value.to_string() })
}

fn regular_report(p: u64) -> Result<RegularOut> {
    let indices = irregular_indices(p)?;
    Ok(RegularOut {
        p,
        regular: indices.is_empty(),
        smallest_irregular_index: indices.first().copied(),
    })
}

fn up_theta_report(rank: usize, p: u64, e: u32, degree: usize) -> Result<UpThetaOut> {
    let d = up_theta_decompose(rank, p, e)?;
    let mut integral = true;
    let mut deep_levels_vanish = true;
    for row in &d.alpha {
        for (t, a) in row.iter().enumerate() {
            if !a.denom().is_one() {
                integral = false;
            }
            if d.levels[t] > p as i64 && !a.is_zero() {
                deep_levels_vanish = false;
            }
        }
    }
    // Check theta(S_i)|U(p)^e = sum_j alpha[i][j] theta(S_j) coefficient by
    // coefficient on all degree-`degree` keys up to the fixed trace bound.
    let pe = (p as i64).pow(e);
    let mut identity_holds = true;
    let keys = QExpansion::keys(degree, UP_THETA_CHECK_BOUND)?;
    for (i, s) in d.forms.iter().enumerate() {
        for t in &keys {
            let lhs = rat(repr_count(s, &t.scale(pe)) as i64);
            let mut rhs = Rational::zero();
            for (j, f) in d.forms.iter().enumerate() {
                rhs += &d.alpha[i][j] * rat(repr_count(f, t) as i64);
            }
            if lhs != rhs {
                identity_holds = false;
            }
        }
    }
    Ok(UpThetaOut {
        alpha: d
            .alpha
            .iter()
            .map(|row| row.iter().map(|a| a.to_string()).collect())
            .collect(),
        checked_degree: degree,
        checked_trace_bound: UP_THETA_CHECK_BOUND,
        deep_levels_vanish,
        e,
        forms: d
            .forms
            .iter()
            .zip(&d.levels)
            .map(|(f, &level)| UpThetaFormOut { level, twice_gram: rows(f) })
            .collect(),
        identity_holds,
        integral,
        p,
        rank,
        verified: integral && deep_levels_vanish && identity_holds,
    })
}

fn report_exit(report: &VerificationReport, format: Format) -> u8 {
    match format {
        Format::Json => print_line(&report.to_json()),
        Format::Tsv => print_line(&report.to_tsv()),
    }
    if report.verified {
        EXIT_OK
    } else {
        EXIT_NOT_VERIFIED
    }
}

/// Golden outputs of the standard verification runs, for regression diffing.
fn seed_fixtures(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", dir.display())))?;
    let write = |name: &str, content: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, content.as_bytes())
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
        print_line(&path.display().to_string());
        Ok(())
    };
    write("eisenstein_deg2_w4_b4.json", eis_deg2(4, 4)?.to_json())?;
    write(
        "theta_e8_deg2_b4.json",
        theta_qexp(&siegel::quadforms::e8_twice_gram(), 2, 4)?.to_json(),
    )?;
    for p in [7u64, 11, 23] {
        let r = verify_main_theorem(1, 1, p, 1, 2, 5)?;
        write(&format!("verify_main_k1_j1_p{p}_m1_deg2_b5.json"), r.to_json())?;
        if p == 7 {
            write("verify_main_k1_j1_p7_m1_deg2_b5.tsv", r.to_tsv())?;
        }
    }
    write("verify_main_k1_j1_p7_m2_deg2_b5.json", verify_main_theorem(1, 1, 7, 2, 2, 5)?.to_json())?;
    write("verify_main_k2_j0_p7_m1_deg2_b4.json", verify_main_theorem(2, 0, 7, 1, 2, 4)?.to_json())?;
    for degree in [1usize, 2] {
        let r = verify_up_fixed(1, 1, 7, 1, degree, 14)?;
        write(&format!("verify_up_k1_j1_p7_m1_deg{degree}_b14.json"), r.to_json())?;
    }
    for e in [1u32, 2] {
        let r = up_theta_report(2, 7, e, 2)?;
        write(&format!("up_theta_rank2_p7_e{e}_deg2.json"), json(&r))?;
    }
    write("genus_rank2_det7_level7.json", json(&genus_enumerate(2, 7, 7)?))?;
    write("genus_rank4_det49_level7.json", json(&genus_enumerate(4, 49, 7)?))?;
    Ok(())
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Eisenstein { degree, weight, trace_bound, route } => {
            let e = eisenstein_expansion(degree, weight, trace_bound, route)?;
            print_line(&e.to_json());
            Ok(EXIT_OK)
        }
        Command::Theta { gram, degree, trace_bound } => {
            let s = read_gram(&gram)?;
            let e = theta_qexp(&s, degree, trace_bound)?;
            print_line(&e.to_json());
            Ok(EXIT_OK)
        }
        Command::Genus { command: GenusCommand::Enumerate { rank, det2, level_divides } } => {
            print_line(&json(&genus_enumerate(rank, det2, level_divides)?));
            Ok(EXIT_OK)
        }
        Command::Bernoulli { k, chi } => {
            print_line(&json(&bernoulli_value(k, chi.as_deref())?));
            Ok(EXIT_OK)
        }
        Command::Regular { p } => {
            print_line(&json(&regular_report(p)?));
            Ok(EXIT_OK)
        }
        Command::Verify { command } => match command {
            VerifyCommand::Main { k, j, p, m, degree, trace_bound, format } => {
                let r = verify_main_theorem(k, j, p, m, degree, trace_bound)?;
                Ok(report_exit(&r, format))
            }
            VerifyCommand::Up { k, j, p, m, degree, trace_bound } => {
                let r = verify_up_fixed(k, j, p, m, degree, trace_bound)?;
                Ok(report_exit(&r, Format::Json))
            }
            VerifyCommand::UpTheta { rank, p, e, degree } => {
                let r = up_theta_report(rank, p, e, degree)?;
                print_line(&json(&r));
                Ok(if r.verified { EXIT_OK } else { EXIT_NOT_VERIFIED })
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(msg) = siegel::configure_threads(n) {
            eprintln!("error: cannot configure {n} threads: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    if let Some(dir) = cli.seed_fixtures {
        return match seed_fixtures(&dir) {
            Ok(()) => ExitCode::from(EXIT_OK),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code_for(&e))
            }
        };
    }
    let Some(command) = cli.command else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(EXIT_USAGE);
    };
    match run(command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Inconsistent(_) => EXIT_INTERNAL,
        Error::InvalidArgument(_) | Error::Unsupported(_) => EXIT_USAGE,
    }
}
