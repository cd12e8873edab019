//! `genvar`: JSON in, JSON out front end to the generic-variable workbench.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use genvar::acceptance::{Golden, Suite, CRITERIA};
use genvar::affine::generic_variable_affine;
use genvar::candecomp::Oracles;
use genvar::ccmap::{cc_of_object, DecoratedRep, GenericEngine};
use genvar::config::{default_prime_pool, Budgets, Config};
use genvar::kronecker::{base_change, build_basis, independence_check, positivity_report, BasisKind};
use genvar::mutation::{enumerate_cluster_variables, laurent_check};
use genvar::{DimVector, Error, Quiver, Result};

#[derive(Parser, Debug)]
#[command(name = "genvar", version, about = "Generic variables of acyclic cluster algebras")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Quiver JSON file, or one of: kronecker, A<n>, affine-A2
    #[arg(long, global = true)]
    quiver: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Comma-separated primes for point counting (default: primes 5..199)
    #[arg(long, global = true, value_delimiter = ',')]
    primes: Option<Vec<u64>>,
    /// Enumeration cap per point-counting call
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Oracle samples per prime
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Generic-representative attempts
    #[arg(long, global = true)]
    retries: Option<usize>,
    /// Write the JSON document here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cluster variables reachable within a mutation depth
    MutateEnumerate {
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Caldero-Chapoton character of a (decorated) representation
    CcMap {
        /// Representation JSON file
        #[arg(long)]
        rep: PathBuf,
    },
    /// Certified generic variable X_d
    GenericVar {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        dim: Vec<i64>,
    },
    /// Canonical decomposition of a dimension vector
    CanonicalDecomp {
        #[arg(long, value_delimiter = ',')]
        dim: Vec<i64>,
        /// auto, search or affine
        #[arg(long, default_value = "auto")]
        method: String,
    },
    /// Generic variable on an affine quiver with its structure tag
    AffineGeneric {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        dim: Vec<i64>,
    },
    /// Kronecker basis elements with denominators in [-bound, bound]^2
    KroneckerBases {
        #[arg(long, default_value = "G")]
        family: String,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Base change between imaginary layers of two Kronecker families
    BaseChange {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long, default_value_t = 7)]
        size: usize,
    },
    /// Exact linear independence of a Kronecker family in a box
    Independence {
        #[arg(long, default_value = "G")]
        family: String,
        #[arg(long, default_value_t = 4)]
        bound: i64,
    },
    /// Runs the acceptance suite
    Selftest {
        /// Directory holding sz_to_g.json and cz_to_g.json
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Comma-separated criterion numbers (default: all)
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((doc, code)) => match emit(&doc, cli.common.out.as_deref()) {
            Ok(()) => ExitCode::from(code),
            Err(e) => fail(&e),
        },
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    let doc = json!({ "error": e.to_string(), "exit_code": e.exit_code() });
    eprintln!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    ExitCode::from(e.exit_code() as u8)
}

fn emit(doc: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config(c: &Common) -> Result<Config> {
    let mut budgets = Budgets::default();
    if let Some(b) = c.budget {
        budgets.enumeration_cap = b;
    }
    if let Some(s) = c.samples {
        budgets.oracle_samples = s;
    }
    if let Some(r) = c.retries {
        budgets.retry_limit = r;
    }
    let prime_pool = match &c.primes {
        Some(p) => {
            if let Some(bad) = p.iter().find(|&&x| x < 5 || !genvar::linalg::is_prime(x)) {
                return Err(Error::InvalidInput(format!("{bad} is not a prime >= 5")));
            }
            let mut p = p.clone();
            p.sort_unstable();
            p.dedup();
            p
        }
        None => default_prime_pool(),
    };
    Ok(Config {
        seed: c.seed,
        prime_pool,
        budgets,
    })
}

fn config_json(c: &Config) -> Value {
    let b = &c.budgets;
    json!({
        "seed": c.seed,
        "primes": c.prime_pool,
        "budgets": {
            "enumeration_cap": b.enumeration_cap,
            "oracle_samples": b.oracle_samples,
            "oracle_primes": b.oracle_primes,
            "retry_limit": b.retry_limit,
            "agreement": b.agreement,
            "summand_attempts": b.summand_attempts,
        },
    })
}

fn load_quiver(arg: Option<&str>) -> Result<Quiver> {
    let arg = arg.ok_or_else(|| Error::InvalidInput("--quiver is required".into()))?;
    let path = Path::new(arg);
    if path.exists() {
        return Quiver::from_json(&read_json(path)?);
    }
    match arg.to_ascii_lowercase().as_str() {
        "kronecker" => Ok(Quiver::kronecker()),
        "affine-a2" => Ok(Quiver::affine_a2()),
        s => match s.strip_prefix('a').and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if n >= 1 => Ok(Quiver::linear_a(n)),
            _ => Err(Error::InvalidInput(format!("{arg:?} is neither a file nor a known quiver"))),
        },
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn dim(q: &Quiver, d: &[i64]) -> Result<DimVector> {
    if d.len() != q.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: q.vertex_count(),
            found: d.len(),
        });
    }
    Ok(DimVector::from(d))
}

fn run(cli: &Cli) -> Result<(Value, u8)> {
    let cfg = config(&cli.common)?;
    let quiver = || load_quiver(cli.common.quiver.as_deref());
    let (name, inputs, result, code) = match &cli.command {
        Command::MutateEnumerate { depth } => {
            let q = quiver()?;
            let t = enumerate_cluster_variables(&q, *depth)?;
            let report = laurent_check(&t);
            let inputs = json!({ "quiver": q.to_json(), "depth": depth });
            let result = json!({ "table": t.to_json(), "laurent": report.to_json() });
            ("mutate-enumerate", inputs, result, 0)
        }
        Command::CcMap { rep } => {
            let q = quiver()?;
            let raw = read_json(rep)?;
            let obj = DecoratedRep::from_json(&q, &raw)?;
            let x = cc_of_object(&obj, &cfg.prime_pool, cfg.budgets.enumeration_cap)?;
            let inputs = json!({ "quiver": q.to_json(), "rep": obj.to_json() });
            let result = json!({
                "value": x.to_json(),
                "den": x.denominator_vector()?.to_json(),
                "dim_cluster": obj.dim_cluster().to_json(),
            });
            ("cc-map", inputs, result, 0)
        }
        Command::GenericVar { dim: d } => {
            let q = quiver()?;
            let d = dim(&q, d)?;
            let g = GenericEngine::new(&q, &cfg).generic_variable(&d)?;
            let inputs = json!({ "quiver": q.to_json(), "dim": d.to_json() });
            ("generic-var", inputs, g.to_json(), 0)
        }
        Command::CanonicalDecomp { dim: d, method } => {
            let q = quiver()?;
            let d = dim(&q, d)?;
            let o = Oracles::new(&q, &cfg);
            let c = match method.as_str() {
                "auto" => o.decompose(&d)?,
                "search" => o.canonical_decomposition(&d)?,
                "affine" => o.canonical_decomposition_affine(&d)?,
                m => return Err(Error::InvalidInput(format!("unknown method {m:?} (auto, search, affine)"))),
            };
            if !c.certificate.verify(&d)? {
                return Err(Error::Consistency(format!("certificate for {d} does not re-verify")));
            }
            let inputs = json!({ "quiver": q.to_json(), "dim": d.to_json(), "method": method });
            ("canonical-decomp", inputs, c.to_json(), 0)
        }
        Command::AffineGeneric { dim: d } => {
            let q = quiver()?;
            let d = dim(&q, d)?;
            let engine = GenericEngine::new(&q, &cfg);
            let a = generic_variable_affine(&engine, &d)?;
            let inputs = json!({ "quiver": q.to_json(), "dim": d.to_json() });
            ("affine-generic", inputs, a.to_json(), 0)
        }
        Command::KroneckerBases { family, nmax, bound } => {
            let kind: BasisKind = family.parse()?;
            let f = kronecker_family(kind, *nmax, *bound, &cfg)?;
            let inputs = json!({ "family": kind.to_string(), "nmax": nmax, "bound": bound });
            ("kronecker-bases", inputs, f.to_json(), 0)
        }
        Command::BaseChange { from, to, size } => {
            let (a, b): (BasisKind, BasisKind) = (from.parse()?, to.parse()?);
            let m = base_change(a, b, *size)?;
            let inv = m.inverse()?;
            let inputs = json!({ "from": a.to_string(), "to": b.to_string(), "size": size });
            let result = json!({
                "matrix": m.to_json(),
                "inverse": inv.to_json(),
                "positivity": positivity_report(&m).to_json(),
            });
            ("base-change", inputs, result, 0)
        }
        Command::Independence { family, bound } => {
            let kind: BasisKind = family.parse()?;
            let f = kronecker_family(kind, *bound as usize, *bound, &cfg)?;
            let report = independence_check(&f, &DimVector::new(vec![*bound, *bound]));
            let inputs = json!({ "family": kind.to_string(), "bound": bound });
            let code = if report.independent() { 0 } else { 4 };
            ("independence", inputs, report.to_json(), code)
        }
        Command::Selftest { golden, only } => {
            let g = match golden {
                Some(dir) => Golden::from_dir(dir)?,
                None => Golden::builtin()?,
            };
            let ids: Vec<usize> = only.clone().unwrap_or_else(|| (1..=CRITERIA.len()).collect());
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CRITERIA.len()) {
                return Err(Error::InvalidInput(format!("no criterion {bad}")));
            }
            let suite = Suite::new(cfg.clone(), g);
            let mut results = Vec::new();
            for i in ids {
                let r = suite.run(i);
                eprintln!("{}", r.line());
                results.push(r);
            }
            let passed = results.iter().all(|r| r.passed);
            let inputs = json!({ "golden": golden.as_ref().map(|p| p.display().to_string()) });
            let result = json!({
                "passed": passed,
                "criteria": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            ("selftest", inputs, result, if passed { 0 } else { 4 })
        }
    };
    let doc = json!({
        "command": name,
        "inputs": inputs,
        "config": config_json(&cfg),
        "result": result,
    });
    Ok((doc, code))
}

fn kronecker_family(kind: BasisKind, nmax: usize, bound: i64, cfg: &Config) -> Result<genvar::kronecker::BasisFamily> {
    if bound < 0 {
        return Err(Error::InvalidInput("bound must be nonnegative".into()));
    }
    let k = Quiver::kronecker();
    let table = enumerate_cluster_variables(&k, 2 * bound as usize + 4)?;
    let lo = DimVector::new(vec![-bound, -bound]);
    let hi = DimVector::new(vec![bound, bound]);
    build_basis(kind, nmax, &lo, &hi, &table, &cfg.prime_pool)
}
