//! `loewy`: command-line front end for factor-chain ODE analysis.
//!
//! Subcommands: `expand`, `painleve`, `factor-linear`, `classify`,
//! `verify`, `growth`. Input is a file path, inline JSON, or stdin (`-`);
//! output is a single JSON object (line-delimited in `--batch` mode).
//! Exit codes: 0 success, 1 I/O or parse failure, 2 domain error (with a
//! machine-readable error object on stdout).

mod schema;

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use loewy_core::classify2::{classify, instantiate, ClassificationReport};
use loewy_core::expr::jet2;
use loewy_core::growth::{hayman_check, pole_source, GrowthError};
use loewy_core::operator::{expand_chain, format_chain, FactorChain};
use loewy_core::painleve::{
    genericity_test, indicial_data, laurent_expand, leading_balances,
};
use loewy_core::scalar::Complex64;
use loewy_core::verify::{residual, Verdict, VerifyError};

use schema::*;

#[derive(Parser)]
#[command(
    name = "loewy",
    version,
    about = "Factor-chain ODE analysis: expansion, Fuchs indices, solution families, growth"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input: a file path, inline JSON (starts with '{'), or '-' for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Pretty-print the JSON output.
    #[arg(long)]
    pretty: bool,
    /// Treat the input as line-delimited JSON, one request per line.
    #[arg(long)]
    batch: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a factor chain into its differential polynomial.
    Expand(InputArgs),
    /// Leading balances, Fuchs indices, Laurent recursion, genericity.
    Painleve {
        #[command(flatten)]
        io: InputArgs,
        /// Bound for the nonnegative-integer index search.
        #[arg(long, default_value_t = 64)]
        jmax: i64,
        /// Laurent expansion depth per balance.
        #[arg(long, default_value_t = 8)]
        depth: i64,
    },
    /// Factor a constant-coefficient linear ODE into a chain.
    FactorLinear(InputArgs),
    /// Classify the meromorphic solutions of a second-order chain.
    Classify(InputArgs),
    /// Check a family instantiation against the expanded chain.
    Verify {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Real part of the sampling annulus center.
        #[arg(long, default_value_t = 0.0)]
        center_re: f64,
        /// Imaginary part of the sampling annulus center.
        #[arg(long, default_value_t = 0.0)]
        center_im: f64,
    },
    /// Nevanlinna growth curve of a family instantiation.
    Growth {
        #[command(flatten)]
        io: InputArgs,
        #[arg(long, default_value_t = 2.0)]
        rmin: f64,
        #[arg(long, default_value_t = 16.0)]
        rmax: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        #[arg(long, default_value_t = 512)]
        quad_points: usize,
        /// Emit an aligned plain-text table instead of JSON.
        #[arg(long)]
        table: bool,
    },
}

enum Failure {
    Parse(String),
    Domain { kind: &'static str, message: String },
}

impl Failure {
    fn domain(kind: &'static str, message: impl Into<String>) -> Self {
        Failure::Domain { kind, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain { kind, message }) => {
            let body = ErrorOut {
                error: ErrorBody { kind: kind.to_string(), message },
            };
            println!("{}", serde_json::to_string(&body).expect("serialize error"));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let io = match &cli.command {
        Command::Expand(io) | Command::FactorLinear(io) | Command::Classify(io) => io.clone(),
        Command::Painleve { io, .. } | Command::Verify { io, .. } | Command::Growth { io, .. } => {
            io.clone()
        }
    };
    let raw = read_input(&io.input)?;
    if io.batch {
        for line in raw.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            dispatch(&cli.command, line, &io)?;
        }
        Ok(())
    } else {
        dispatch(&cli.command, raw.trim(), &io)
    }
}

fn read_input(spec: &str) -> Result<String, Failure> {
    if spec == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Failure::Parse(format!("stdin: {e}")))?;
        return Ok(buf);
    }
    if spec.trim_start().starts_with('{') {
        return Ok(spec.to_string());
    }
    std::fs::read_to_string(spec).map_err(|e| Failure::Parse(format!("{spec}: {e}")))
}

fn parse_json<T: serde::de::DeserializeOwned>(raw: &str) -> Result<T, Failure> {
    serde_json::from_str(raw).map_err(|e| Failure::Parse(format!("invalid input JSON: {e}")))
}

fn emit<T: Serialize>(value: &T, pretty: bool) -> Result<(), Failure> {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| Failure::Parse(format!("serialize: {e}")))?;
    println!("{text}");
    Ok(())
}

fn dispatch(command: &Command, raw: &str, io: &InputArgs) -> Result<(), Failure> {
    match command {
        Command::Expand(_) => cmd_expand(raw, io),
        Command::Painleve { jmax, depth, .. } => cmd_painleve(raw, io, *jmax, *depth),
        Command::FactorLinear(_) => cmd_factor_linear(raw, io),
        Command::Classify(_) => cmd_classify(raw, io),
        Command::Verify { samples, seed, tol, center_re, center_im, .. } => {
            cmd_verify(raw, io, *samples, *seed, *tol, Complex64::new(*center_re, *center_im))
        }
        Command::Growth { rmin, rmax, steps, quad_points, table, .. } => {
            cmd_growth(raw, io, *rmin, *rmax, *steps, *quad_points, *table)
        }
    }
}

fn parse_chain(raw: &str, policy: NumeralPolicy) -> Result<FactorChain, Failure> {
    let chain_in: ChainIn = parse_json(raw)?;
    chain_in.to_chain(policy).map_err(Failure::Parse)
}

fn cmd_expand(raw: &str, io: &InputArgs) -> Result<(), Failure> {
    let chain = parse_chain(raw, NumeralPolicy::ExactOnly)?;
    let poly = expand_chain(&chain)
        .map_err(|e| Failure::domain("empty-chain", e.to_string()))?;
    let mut terms: Vec<TermOut> = poly
        .monomials()
        .map(|m| TermOut {
            index: m.index.clone(),
            coeff: ComplexOut::from_exact(&m.coeff),
            weight: m.weight(),
        })
        .collect();
    terms.sort_by(|a, b| a.index.cmp(&b.index));
    emit(
        &ExpandOut {
            order: poly.order(),
            chain: format_chain(&chain),
            terms,
            rendered: format!("{poly}"),
        },
        io.pretty,
    )
}

fn cmd_painleve(raw: &str, io: &InputArgs, jmax: i64, depth: i64) -> Result<(), Failure> {
    let chain = parse_chain(raw, NumeralPolicy::ExactOnly)?;
    let poly = expand_chain(&chain)
        .map_err(|e| Failure::domain("empty-chain", e.to_string()))?;
    let balances = leading_balances(&poly);
    let mut balance_outs = Vec::with_capacity(balances.len());
    for bal in &balances {
        let data = indicial_data(&poly, bal)
            .map_err(|e| Failure::domain("painleve", e.to_string()))?;
        let laurent = laurent_expand(&poly, bal, depth)
            .map_err(|e| Failure::domain("painleve", e.to_string()))?;
        balance_outs.push(balance_out(&data, &laurent));
    }
    let a: Vec<_> = chain.factors.iter().map(|f| f.a.clone()).collect();
    let verdict = genericity_test(&a, jmax);
    emit(
        &PainleveOut {
            order: poly.order(),
            balances: balance_outs,
            genericity: genericity_out(&verdict),
            depth,
        },
        io.pretty,
    )
}

fn cmd_factor_linear(raw: &str, io: &InputArgs) -> Result<(), Failure> {
    let ode_in: LinearOdeIn = parse_json(raw)?;
    let ode = ode_in
        .to_ode(NumeralPolicy::ExactOnly)
        .map_err(Failure::Parse)?;
    let chain = loewy_core::linfact::factor_linear(&ode)
        .map_err(|e| Failure::domain("root-finding", e.to_string()))?;
    emit(&ChainOut::from_chain(&chain), io.pretty)
}

fn classify_chain(chain: &FactorChain) -> Result<ClassificationReport, Failure> {
    if chain.order() != 2 {
        return Err(Failure::domain(
            "wrong-order",
            format!("classification needs a second-order chain, got order {}", chain.order()),
        ));
    }
    Ok(classify(
        &chain.alpha,
        &chain.factors[0].a,
        &chain.factors[0].b,
        &chain.factors[1].a,
        &chain.factors[1].b,
    ))
}

fn cmd_classify(raw: &str, io: &InputArgs) -> Result<(), Failure> {
    let chain = parse_chain(raw, NumeralPolicy::ExactOnly)?;
    let report = classify_chain(&chain)?;
    emit(
        &ClassifyOut {
            chain: ChainOut::from_chain(&chain),
            case_path: report.case_path.clone(),
            completeness: report.completeness.label(),
            families: report.families.iter().map(family_out).collect(),
        },
        io.pretty,
    )
}

fn find_family<'r>(
    report: &'r ClassificationReport,
    tag: &str,
) -> Result<&'r loewy_core::classify2::SolutionFamily, Failure> {
    report
        .families
        .iter()
        .find(|f| f.case_tag == tag)
        .ok_or_else(|| {
            let known: Vec<&str> = report.families.iter().map(|f| f.case_tag.as_str()).collect();
            Failure::domain(
                "unknown-family",
                format!("no family '{tag}' for this chain; available: {}", known.join(", ")),
            )
        })
}

fn cmd_verify(
    raw: &str,
    io: &InputArgs,
    samples: usize,
    seed: u64,
    tol: f64,
    center: Complex64,
) -> Result<(), Failure> {
    let request: FamilyRequestIn = parse_json(raw)?;
    let chain = request
        .chain
        .to_chain(NumeralPolicy::ExactOnly)
        .map_err(Failure::Parse)?;
    let report = classify_chain(&chain)?;
    let family = find_family(&report, &request.family)?;
    let assignment = request.assignment_exact().map_err(Failure::Parse)?;
    let inst = instantiate(family, &assignment)
        .map_err(|e| Failure::domain("instantiate", e.to_string()))?;
    let result = residual(&chain, &inst.expr, samples, seed, tol, center).map_err(|e| match e {
        VerifyError::Obstructed => Failure::domain("obstructed", e.to_string()),
        VerifyError::Inconclusive { .. } => Failure::domain("inconclusive", e.to_string()),
        other => Failure::domain("verify", other.to_string()),
    })?;
    emit(
        &VerifyOut {
            family: request.family.clone(),
            verdict: match result.verdict {
                Verdict::Pass => "Pass",
                Verdict::Fail => "Fail",
            },
            max_relative_residual: result.max_relative_residual,
            tolerance: result.tolerance,
            pole_skips: result.pole_skips,
            samples_used: result.sample_points.len(),
            sample_points: result.sample_points.iter().map(|z| c64_pair(*z)).collect(),
        },
        io.pretty,
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_growth(
    raw: &str,
    io: &InputArgs,
    rmin: f64,
    rmax: f64,
    steps: usize,
    quad_points: usize,
    table: bool,
) -> Result<(), Failure> {
    if !(rmin > 0.0 && rmax > rmin) || steps < 6 {
        return Err(Failure::Parse(String::from(
            "growth needs 0 < rmin < rmax and at least 6 steps",
        )));
    }
    let request: FamilyRequestIn = parse_json(raw)?;
    let chain = request
        .chain
        .to_chain(NumeralPolicy::ExactOnly)
        .map_err(Failure::Parse)?;
    let report = classify_chain(&chain)?;
    let family = find_family(&report, &request.family)?;
    let assignment = request.assignment_exact().map_err(Failure::Parse)?;
    let inst = instantiate(family, &assignment)
        .map_err(|e| Failure::domain("instantiate", e.to_string()))?;
    let source = pole_source(&family.pole, &inst.bindings)
        .map_err(|e| Failure::domain("growth", e.to_string()))?;
    // sanity: the expression must evaluate somewhere before we integrate it
    let _ = jet2(&inst.expr);
    let radii: Vec<f64> = (0..steps)
        .map(|i| rmin + (rmax - rmin) * i as f64 / (steps - 1) as f64)
        .collect();
    let curve = hayman_check(&inst.expr, &source, &radii, quad_points).map_err(|e| match e {
        GrowthError::PoleCluster { .. } => Failure::domain("pole-cluster", e.to_string()),
        other => Failure::domain("growth", other.to_string()),
    })?;
    if table {
        println!("{:>10} {:>14} {:>14} {:>14}", "r", "m(r)", "N(r)", "T(r)");
        for i in 0..curve.radii.len() {
            println!(
                "{:>10.4} {:>14.6} {:>14.6} {:>14.6}",
                curve.radii[i], curve.m_values[i], curve.n_values[i], curve.t_values[i]
            );
        }
        return Ok(());
    }
    emit(
        &GrowthOut {
            family: request.family.clone(),
            radii: curve.radii.clone(),
            m_values: curve.m_values.clone(),
            n_values: curve.n_values.clone(),
            t_values: curve.t_values.clone(),
            rho1: curve.fitted_order.map(|(r1, _)| r1),
            rho2: curve.fitted_order.map(|(_, r2)| r2),
            hayman_b: curve.hayman_fit.map(|(b, _)| b),
            hayman_c: curve.hayman_fit.map(|(_, c)| c),
            subexponential: curve.subexponential,
            consistent_with_bound: curve.consistent_with_bound,
        },
        io.pretty,
    )
}
