use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cubic_rings::algebra::{BranchCase, CubicAlgebra};
use cubic_rings::classify::classify;
use cubic_rings::duality::dual_report;
use cubic_rings::error::Error;
use cubic_rings::families::{make_family, recognize, Chart, FamilyDescriptor, Subscript};
use cubic_rings::ideals::{iso_classes_checked, iso_classes_with_window, ClassCensus};
use cubic_rings::lattice::{Lattice, LatticeJson};
use cubic_rings::overrings::{brute_force_overrings, closed_form_lattices};
use cubic_rings::series::RingConfig;
use cubic_rings::verify::{self, Check, DEFAULT_PREC};

#[derive(Parser)]
#[command(name = "cubic-rings", version, about = "Cubic orders over F_p[[t]]: over-rings, duals, ideal classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Shape of the maximal order: 1r, 1u, 2r, 2u or 3.
    #[arg(long, value_parser = parse_case)]
    case: Option<BranchCase>,
    /// Residue characteristic, a prime at least 5.
    #[arg(long)]
    p: Option<u32>,
    /// Working precision N of D = F_p[t]/t^N.
    #[arg(long, default_value_t = DEFAULT_PREC)]
    prec: usize,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named order and print its lattice.
    MkOrder {
        #[command(flatten)]
        common: Common,
        /// Descriptor as JSON, or @file.
        #[arg(long, conflicts_with_all = ["kind", "m", "k", "rho", "l", "q", "a"])]
        family: Option<String>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        rho: Option<u32>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        q: Option<u32>,
        /// Residue digits of the parameter, lowest first.
        #[arg(long, value_delimiter = ',')]
        a: Option<Vec<u32>>,
        #[arg(long)]
        alt: bool,
        #[arg(long, default_value_t = 0)]
        branch: usize,
    },
    /// All over-rings of A_m.
    Overrings {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: u32,
        /// List the exhaustive scan instead of the closed form.
        #[arg(long)]
        oracle: bool,
    },
    /// Trace dual of an order, compared with the closed form.
    Dual {
        #[command(flatten)]
        common: Common,
        /// Lattice or descriptor as JSON, or @file, or - for standard input.
        #[arg(long)]
        order: String,
    },
    /// Locality, embedding dimension and singularity type.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: String,
    },
    /// Isomorphism classes of ideals of an order.
    IdealClasses {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: String,
        /// Scan down to t^w A; at least the conductor exponent.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Class counts over several primes and their growth degree.
    ParEstimate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', default_value = "5,7,11,13")]
        primes: Vec<u32>,
    },
    /// Run one acceptance check, or all of them.
    Verify {
        /// Check name (thm-overrings, procedure, edim, duality, gorenstein,
        /// ideal-classes, par-growth, foundations), its number, or "all".
        check: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u32>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Am,
    Jm,
    C,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_case(s: &str) -> Result<BranchCase, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Envelope(String),
    Verification(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Envelope(_) | Error::Precision(_) => Failure::Envelope(e.to_string()),
            Error::ClassificationFailure(_) => Failure::Verification(e.to_string()),
            Error::Config(_)
            | Error::InvalidDescriptor(_)
            | Error::Parse(_)
            | Error::Precondition(_)
            | Error::NotPlaneCurve(_)
            | Error::NotLocal(_)
            | Error::NotContained(_)
            | Error::NonUnit(_)
            | Error::DegenerateLattice { .. } => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Verification(m) => (1, m),
                Failure::Internal(m) => (1, m),
                Failure::Usage(m) => (2, m),
                Failure::Envelope(m) => (3, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn config(common: &Common) -> Result<RingConfig, Failure> {
    Ok(RingConfig::new(common.p.unwrap_or(5), common.prec)?)
}

fn algebra(common: &Common, case: BranchCase) -> Result<Arc<CubicAlgebra>, Failure> {
    Ok(Arc::new(CubicAlgebra::new(config(common)?, case)?))
}

fn require_case(common: &Common) -> Result<BranchCase, Failure> {
    common.case.ok_or_else(|| Failure::Usage("--case is required".into()))
}

/// Inline JSON, `@path`, or `-` for standard input.
fn read_arg(text: &str) -> Result<String, Failure> {
    if text == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else if let Some(path) = text.strip_prefix('@') {
        Ok(fs::read_to_string(path)?)
    } else {
        Ok(text.to_string())
    }
}

fn parse_descriptor(text: &str) -> Result<FamilyDescriptor, Failure> {
    let d: FamilyDescriptor =
        serde_json::from_str(&read_arg(text)?).map_err(|e| Failure::Usage(format!("bad descriptor: {e}")))?;
    d.validate()?;
    Ok(d)
}

/// An order given either by its lattice or by its name.
fn load_order(text: &str, common: &Common) -> Result<Lattice, Failure> {
    let raw = read_arg(text)?;
    let value: serde_json::Value = serde_json::from_str(&raw).map_err(|e| Failure::Usage(format!("bad JSON: {e}")))?;
    if value.get("hnf").is_some() {
        let j: LatticeJson = serde_json::from_value(value).map_err(|e| Failure::Usage(format!("bad lattice: {e}")))?;
        return Ok(Lattice::from_json(&j, None)?);
    }
    let order = value.get("order").cloned();
    if let Some(order) = order {
        // output of mk-order
        return load_order(&order.to_string(), common);
    }
    let d: FamilyDescriptor =
        serde_json::from_value(value).map_err(|e| Failure::Usage(format!("bad descriptor: {e}")))?;
    d.validate()?;
    if common.case.is_some_and(|c| c != d.case) {
        return Err(Failure::Usage("--case disagrees with the descriptor".into()));
    }
    Ok(make_family(&algebra(common, d.case)?, &d)?)
}

fn emit<T: Serialize>(common: &Common, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    write_out(common, &(text + "\n"))
}

fn write_out(common: &Common, text: &str) -> Outcome {
    match &common.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct NamedOrder {
    descriptor: FamilyDescriptor,
    order: Lattice,
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::MkOrder { common, family, kind, m, k, rho, l, q, a, alt, branch } => {
            let d = match family {
                Some(text) => parse_descriptor(&text)?,
                None => {
                    let case = require_case(&common)?;
                    let kind = kind.ok_or_else(|| Failure::Usage("give --family or --kind".into()))?;
                    let need = |v: Option<u32>, name: &str| {
                        v.ok_or_else(|| Failure::Usage(format!("--{name} is required for this kind")))
                    };
                    let d = match kind {
                        KindArg::Am => FamilyDescriptor::am(case, need(m, "m")?),
                        KindArg::Jm => FamilyDescriptor::jm(case, need(m, "m")?),
                        KindArg::C => {
                            let sub = match (rho, l, q) {
                                (Some(r), None, None) => Subscript::Rho(r),
                                (None, Some(l), Some(q)) => Subscript::Pair { l, q },
                                _ => return Err(Failure::Usage("give either --rho or both --l and --q".into())),
                            };
                            FamilyDescriptor::shifted(case, k.unwrap_or(0), sub, a.unwrap_or_default())
                                .with_chart(if alt { Chart::Alt } else { Chart::Main })
                                .with_branch(branch)
                        }
                    };
                    d.validate()?;
                    d
                }
            };
            let order = make_family(&algebra(&common, d.case)?, &d)?;
            emit(&common, &NamedOrder { descriptor: d.canonical(), order })
        }
        Command::Overrings { common, m, oracle } => {
            let a = algebra(&common, require_case(&common)?)?;
            let lattices =
                if oracle { brute_force_overrings(&a, m as usize)? } else { closed_form_lattices(&a, m as usize)? };
            let named = lattices
                .into_iter()
                .map(|order| Ok(NamedOrder { descriptor: recognize(&order)?, order }))
                .collect::<Result<Vec<_>, Error>>()?;
            emit(&common, &named)
        }
        Command::Dual { common, order } => {
            let b = load_order(&order, &common)?;
            emit(&common, &dual_report(&b)?)
        }
        Command::Classify { common, order } => {
            let b = load_order(&order, &common)?;
            emit(&common, &classify(&b)?)
        }
        Command::IdealClasses { common, order, window, format } => {
            let c = load_order(&order, &common)?;
            let census = match window {
                Some(w) => iso_classes_with_window(&c, w)?,
                None => iso_classes_checked(&c)?,
            };
            match format {
                Format::Json => emit(&common, &census),
                Format::Csv => write_out(&common, &census_csv(&census)?),
            }
        }
        Command::ParEstimate { common, family, primes } => {
            let d = parse_descriptor(&family)?;
            let row = verify::growth_row(&d.to_string(), &d, None, &primes, common.prec)?;
            emit(&common, &row)
        }
        Command::Verify { check, common, m, primes, seed } => {
            let checks: Vec<Check> = if check == "all" { Check::ALL.to_vec() } else { vec![check.parse()?] };
            let mut reports = Vec::new();
            let mut ok = true;
            for c in checks {
                let mut scope = c.default_scope();
                if let Some(case) = common.case {
                    scope.cases = vec![case];
                }
                if let Some(p) = common.p {
                    scope.primes = vec![p];
                }
                if let Some(ps) = &primes {
                    scope.primes = ps.clone();
                }
                if let Some(m) = m {
                    scope.ms = vec![m];
                }
                scope.prec = common.prec;
                scope.seed = seed;
                let report = verify::run(c, &scope)?;
                for line in &report.lines {
                    println!("{line}");
                }
                for f in &report.failures {
                    println!("failure: {f}");
                }
                println!("{}", report.verdict());
                ok &= report.passed;
                reports.push(report);
            }
            if let Some(path) = &common.out {
                let text = serde_json::to_string_pretty(&reports).map_err(|e| Failure::Internal(e.to_string()))?;
                fs::write(path, text + "\n")?;
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Verification("verification failed".into()))
            }
        }
    }
}

fn census_csv(census: &ClassCensus) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::Internal(e.to_string());
    w.write_record(["class", "tag", "colength", "size", "multiplier_ring", "representative"]).map_err(err)?;
    for (i, k) in census.classes.iter().enumerate() {
        let ring = recognize(&k.multiplier_ring).map(|d| d.to_string()).unwrap_or_else(|_| "?".into());
        let rep =
            serde_json::to_string(&k.representative.to_json().hnf).map_err(|e| Failure::Internal(e.to_string()))?;
        w.write_record([
            i.to_string(),
            k.tag.to_string(),
            k.representative.colength().to_string(),
            k.size.to_string(),
            ring,
            rep,
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))
}
