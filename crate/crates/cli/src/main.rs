use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use lambda_orders::algebra::{component_fields, LambdaAlgebra};
use lambda_orders::arith::is_prime;
use lambda_orders::factorization::{FrobActionPresentation, Verdict};
use lambda_orders::json::{int_to_string, rat_to_string};
use lambda_orders::lattice::{index, relative_index, IntLattice};
use lambda_orders::monoid::MSet;
use lambda_orders::orders::{
    group_ring_lattice, maximal_order, maximal_order_in, power_basis_order, prime_bound_from_env, verify_order,
};
use lambda_orders::selftest::{run_all, Fault, Options};

/// Writes a line to stdout, ignoring a closed pipe.
macro_rules! outln {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

const MAX_DEMO_LEVEL: u64 = 60;
const MAX_DEMO_PRIME: u64 = 7;

#[derive(Parser)]
#[command(
    name = "lambda-orders",
    version,
    about = "Integral models and maximal Λ-orders of finite étale Λ-rings over Q"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a Frobenius-action presentation extends to a monoid action
    Analyze {
        /// presentation JSON file, or - for stdin
        input: String,
    },
    /// Compute and verify the maximal Λ-order of a (Z/r)°-set
    MaximalOrder {
        /// set JSON file ({"level", "size", "action"}), or - for stdin
        input: String,
    },
    /// Print a worked example
    Demo {
        name: DemoName,
        #[arg(long, default_value_t = 8)]
        r: u64,
        #[arg(long, default_value_t = 2)]
        p: u64,
    },
    /// Run the acceptance checks
    Selftest {
        /// fast subset
        #[arg(long)]
        quick: bool,
        /// corrupt an internal table to confirm the failure is reported
        #[arg(long, value_enum)]
        inject_fault: Option<FaultName>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoName {
    TheoremB,
    GroupRing,
    Counterexample,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultName {
    Cyclotomic,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

enum Outcome {
    Yes,
    No,
}

fn read_json(path: &str) -> Result<Value, CliError> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    }
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn emit(v: &Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn prime_bound() -> Result<u64, CliError> {
    prime_bound_from_env().map_err(|e| CliError::Input(e.to_string()))
}

fn analyze(input: &str) -> Result<Outcome, CliError> {
    let raw = read_json(input)?;
    let presentation = FrobActionPresentation::from_json(&raw).map_err(|e| CliError::Input(e.to_string()))?;
    let verdict = presentation.check_factors();
    match &verdict {
        Verdict::Factors { r, mset } => {
            let reduced = mset.minimal_level();
            emit(&json!({
                "factors": true,
                "r": reduced.level().get(),
                "r_criterion": r,
                "mset": reduced,
                "unit_condition": "automatic from the presentation's default rule",
            }));
            Ok(Outcome::Yes)
        }
        Verdict::DoesNotFactor(_) => {
            emit(&verdict.to_json());
            Ok(Outcome::No)
        }
    }
}

fn maximal_order_cmd(input: &str) -> Result<Outcome, CliError> {
    let raw = read_json(input)?;
    let s: MSet = serde_json::from_value(raw).map_err(|e| CliError::Input(e.to_string()))?;
    let bound = prime_bound()?;
    let k = Arc::new(LambdaAlgebra::from_mset(&s));
    let order = maximal_order_in(k.clone());
    let report = verify_order(&order, bound);
    let naive = IntLattice::standard(k.dim());
    let naive_index = relative_index(&naive, order.lattice()).map(|q| rat_to_string(&q));
    let fields: Vec<Value> = component_fields(&s)
        .into_iter()
        .map(|f| json!({"orbit": f.orbit, "degree": f.degree, "conductor": f.conductor}))
        .collect();
    emit(&json!({
        "level": k.level(),
        "dimension": k.dim(),
        "basis": order.lattice().to_json(),
        "index_over_naive": naive_index,
        "component_fields": fields,
        "verification": report.to_json(),
    }));
    if report.passes() {
        Ok(Outcome::Yes)
    } else {
        Err(CliError::Internal("computed maximal order failed verification".into()))
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "OK"
    } else {
        "FAILED"
    }
}

fn demo_theorem_b(r: u64) -> Result<Outcome, CliError> {
    if !(1..=MAX_DEMO_LEVEL).contains(&r) {
        return Err(CliError::Input(format!("--r must be between 1 and {MAX_DEMO_LEVEL}")));
    }
    let s = MSet::regular(lambda_orders::monoid::Level::new(r).expect("positive"));
    let m = maximal_order(&s);
    let z = power_basis_order(r).map_err(|e| CliError::Internal(e.to_string()))?;
    let equal = m.lattice() == z.lattice();
    let report = verify_order(&m, prime_bound()?);
    outln!("regular set of level {r}: algebra of dimension {}", m.algebra().dim());
    outln!("maximal order equals ℤ[μ_{r}]: {}", ok(equal));
    outln!(
        "Λ-order checks (primes up to {}): {}",
        report.prime_bound,
        ok(report.passes())
    );
    emit(&json!({
        "r": r,
        "equals_group_ring": equal,
        "maximal_order": m.lattice().to_json(),
        "verification": report.to_json(),
    }));
    if equal && report.passes() {
        Ok(Outcome::Yes)
    } else {
        Err(CliError::Internal("demo verification failed".into()))
    }
}

fn demo_group_ring(p: u64) -> Result<Outcome, CliError> {
    if !is_prime(p) || p > MAX_DEMO_PRIME {
        return Err(CliError::Input(format!("--p must be a prime at most {MAX_DEMO_PRIME}")));
    }
    let g = group_ring_lattice(p).map_err(|e| CliError::Internal(e.to_string()))?;
    let k = &g.algebra;
    let scalar = lambda_orders::scalar::rat(p as i64);
    let times = |v: &[lambda_orders::Rat]| v.iter().map(|x| x * &scalar).collect::<Vec<_>>();
    let psi_ok = k.psi(p, &g.x) == times(k.unit());
    let square_ok = k.mul(&g.x, &g.x) == times(&g.x);
    let m = maximal_order_in(k.clone());
    let in_max = m.lattice().contains(&g.x);
    let in_group_ring = g.lattice.contains(&g.x);
    let idx = index(&g.lattice, m.lattice()).map_err(|e| CliError::Internal(e.to_string()))?;
    let divisible = (&idx % lambda_orders::Int::from(p)) == lambda_orders::Int::from(0);
    outln!("characters of (Z/{p})^2 at level {p}: algebra of dimension {}", k.dim());
    outln!("x = sum of the group elements: {p} at the trivial character, 0 elsewhere");
    outln!("ψ_{p}(x) = {p}·1: {}", ok(psi_ok));
    outln!("x² = {p}x: {}", ok(square_ok));
    outln!("x in the maximal order: {}", if in_max { "yes" } else { "no" });
    outln!("x in the group ring: {}", if in_group_ring { "yes" } else { "no" });
    outln!(
        "index of the group ring in the maximal order: {idx} (divisible by {p}: {})",
        ok(divisible)
    );
    emit(&json!({
        "p": p,
        "psi_p_x_equals_p": psi_ok,
        "x_squared_equals_px": square_ok,
        "x_in_maximal_order": in_max,
        "x_in_group_ring": in_group_ring,
        "index": int_to_string(&idx),
        "group_ring": g.lattice.to_json(),
        "maximal_order": m.lattice().to_json(),
    }));
    if psi_ok && square_ok && in_max && !in_group_ring && divisible {
        Ok(Outcome::Yes)
    } else {
        Err(CliError::Internal("demo verification failed".into()))
    }
}

fn demo_counterexample() -> Result<Outcome, CliError> {
    let swap = FrobActionPresentation::new(2, 1, BTreeMap::new(), BTreeMap::from([(2, vec![1, 0])]))
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let verdict = swap.check_factors();
    outln!("two points, every unit acts trivially, Frobenius at 2 swaps them");
    outln!("presentation: {}", swap.to_json());
    match &verdict {
        Verdict::DoesNotFactor(w) => {
            let witness = &verdict.to_json()["witness"];
            let point = w.point.map(|t| format!(" at point {t}")).unwrap_or_default();
            outln!(
                "no integral model: at d = {}, p = {} (conductor {}) the clause {} fails{point}",
                w.d,
                w.p,
                w.c_d,
                witness["clause"]
            );
        }
        Verdict::Factors { .. } => outln!("unexpectedly factors"),
    }
    emit(&json!({"presentation": swap.to_json(), "verdict": verdict.to_json()}));
    if verdict.factors() {
        Err(CliError::Internal("counterexample factored".into()))
    } else {
        Ok(Outcome::Yes)
    }
}

fn selftest(quick: bool, fault: Option<FaultName>) -> Result<Outcome, CliError> {
    let opts = Options {
        quick,
        prime_bound: prime_bound()?,
        fault: fault.map(|FaultName::Cyclotomic| Fault::CorruptCyclotomicTable),
    };
    let results = run_all(&opts);
    for r in &results {
        outln!("{}", r.line());
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.module).collect();
    outln!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        Ok(Outcome::Yes)
    } else {
        Err(CliError::Internal(format!("selftest failed in: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Analyze { input } => analyze(&input),
        Command::MaximalOrder { input } => maximal_order_cmd(&input),
        Command::Demo { name, r, p } => match name {
            DemoName::TheoremB => demo_theorem_b(r),
            DemoName::GroupRing => demo_group_ring(p),
            DemoName::Counterexample => demo_counterexample(),
        },
        Command::Selftest { quick, inject_fault } => selftest(quick, inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(Outcome::Yes)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::No)) => ExitCode::from(3),
        Ok(Err(e)) => {
            eprintln!("lambda-orders: {e}");
            ExitCode::from(match e {
                CliError::Input(_) => 2,
                CliError::Internal(_) => 1,
            })
        }
        Err(_) => ExitCode::from(1),
    }
}
