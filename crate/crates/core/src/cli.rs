//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a check failed or a query is undefined, 2 usage
//! or I/O errors. `PREFCALC_SEED` fixes every random trial.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;

use crate::axioms::{
    check_associativity, check_complement_rule, check_complementarity, BinaryCombiner, UnaryRegrade,
};
use crate::curves::UtilityCurve;
use crate::domain::{eval_domain, measure, mobius_masses, AttributeSpace};
use crate::engine::{conditional_utility, Evaluator};
use crate::error::Error;
use crate::expr::simplify;
use crate::gen::random_expr;
use crate::identities::run_identity_suite;
use crate::model_file::{export_grid_csv, format_significant, load_model};
use crate::syntax::parse;

pub const SEED_VAR: &str = "PREFCALC_SEED";
const DEFAULT_SEED: u64 = 20_040_601;
const SIG_DIGITS: usize = 12;
/// Evaluator-versus-oracle tolerance, relative to `max(1, |oracle|)`.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "prefcalc",
    version,
    about = "Algebra of preferences and utility inference"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ExprArg {
    /// Expression, e.g. "x=3 | ~y=2 . z=1"
    #[arg(value_name = "EXPR", required_unless_present = "expr")]
    positional: Option<String>,
    /// Expression given as a flag instead of positionally
    #[arg(long, conflicts_with = "positional")]
    expr: Option<String>,
}

impl ExprArg {
    fn text(&self) -> &str {
        self.expr
            .as_deref()
            .or(self.positional.as_deref())
            .unwrap_or_default()
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the canonical form of an expression
    Parse {
        #[command(flatten)]
        expr: ExprArg,
    },
    /// Utility of an expression under a model
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        expr: ExprArg,
    },
    /// Conditional utility U(EXPR | GIVEN)
    Cond {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        given: String,
        #[command(flatten)]
        expr: ExprArg,
    },
    /// Check the algebra identities on random atoms and spaces
    Identities {
        #[arg(long, default_value_t = 2)]
        attrs: usize,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Compare the evaluator with the grid oracle on random expressions
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Export the joint utility grid as CSV
    Grid {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the associativity and complementarity checks
    Axioms {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
}

/// Entry point used by the binary: reads the seed from the environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let seed = std::env::var(SEED_VAR).ok();
    run_with_seed(args, seed.as_deref(), out, err)
}

pub fn run_with_seed<I, T>(
    args: I,
    seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let seed = match seed.map(|s| s.trim().parse::<u64>()) {
        None => DEFAULT_SEED,
        Some(Ok(s)) => s,
        Some(Err(_)) => {
            let _ = writeln!(err, "error: {SEED_VAR} must be a decimal integer");
            return 2;
        }
    };
    match dispatch(cli.command, seed, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UndefinedConditional(_) | Error::InvalidModel(_) => 1,
        _ => 2,
    }
}

fn dispatch(command: Command, seed: u64, out: &mut dyn Write) -> Result<i32, Error> {
    let io = |source: std::io::Error| Error::Io {
        path: "<stdout>".into(),
        source,
    };
    match command {
        Command::Parse { expr } => {
            let e = parse(expr.text())?;
            writeln!(out, "{}", simplify(&e)).map_err(io)?;
            Ok(0)
        }
        Command::Eval { model, expr } => {
            let model = load_model(&model)?;
            let e = parse(expr.text())?;
            let u = Evaluator::new(&model).eval(&e)?;
            writeln!(out, "{}", format_significant(u, SIG_DIGITS)).map_err(io)?;
            Ok(0)
        }
        Command::Cond { model, given, expr } => {
            let model = load_model(&model)?;
            let a = parse(expr.text())?;
            let g = parse(&given)?;
            let u = conditional_utility(&a, &g, &model)?;
            writeln!(out, "{}", format_significant(u, SIG_DIGITS)).map_err(io)?;
            Ok(0)
        }
        Command::Identities {
            attrs,
            levels,
            trials,
        } => {
            let mut rng = StdRng::seed_from_u64(seed);
            let reports = run_identity_suite(&mut rng, attrs, levels, trials)?;
            let mut all = true;
            for r in &reports {
                all &= r.passed();
                writeln!(
                    out,
                    "{} {} ({} trials, {} canonical and {} domain failures)",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.trials,
                    r.canonical_failures,
                    r.domain_failures
                )
                .map_err(io)?;
                if let Some(f) = &r.first_failure {
                    writeln!(out, "    first failure: {}", f.join("  vs  ")).map_err(io)?;
                }
            }
            Ok(if all { 0 } else { 1 })
        }
        Command::Verify {
            model,
            trials,
            depth,
        } => verify(&model, trials, depth, seed, out),
        Command::Grid { model, out: path } => {
            let model = load_model(&model)?;
            let csv = export_grid_csv(&model)?;
            std::fs::write(&path, csv).map_err(|source| Error::Io {
                path: path.display().to_string(),
                source,
            })?;
            writeln!(
                out,
                "wrote {} grid points to {}",
                model.space().cell_count(),
                path.display()
            )
            .map_err(io)?;
            Ok(0)
        }
        Command::Axioms { trials } => axioms(trials, seed, out),
    }
}

fn verify(
    path: &Path,
    trials: usize,
    depth: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let io = |source: std::io::Error| Error::Io {
        path: "<stdout>".into(),
        source,
    };
    let model = load_model(path)?;
    let masses = mobius_masses(&model)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut ev = Evaluator::new(&model);
    let mut worst: f64 = 0.0;
    let mut worst_expr = None;
    for _ in 0..trials {
        let e = random_expr(&mut rng, model.space(), depth.max(1));
        let oracle = measure(&eval_domain(&e, model.space())?, &masses)?;
        let got = ev.eval(&e)?;
        let rel = (got - oracle).abs() / oracle.abs().max(1.0);
        if rel > worst || worst_expr.is_none() {
            worst = worst.max(rel);
            worst_expr = Some(e);
        }
    }
    let ok = worst <= VERIFY_TOL;
    writeln!(
        out,
        "{} {trials} expressions, max relative error {:.1e} (tolerance {VERIFY_TOL:e})",
        if ok { "PASS" } else { "FAIL" },
        worst
    )
    .map_err(io)?;
    if let (false, Some(e)) = (ok, worst_expr) {
        writeln!(out, "    worst: {e}").map_err(io)?;
    }
    Ok(if ok { 0 } else { 1 })
}

fn axioms(trials: usize, seed: u64, out: &mut dyn Write) -> Result<i32, Error> {
    let io = |source: std::io::Error| Error::Io {
        path: "<stdout>".into(),
        source,
    };
    let mut all = true;
    let mut line = |ok: bool, text: String, out: &mut dyn Write| -> Result<(), Error> {
        all &= ok;
        writeln!(out, "{} {text}", if ok { "PASS" } else { "FAIL" }).map_err(io)
    };

    for (f, expect_associative) in [
        (BinaryCombiner::product(), true),
        (BinaryCombiner::probabilistic_sum(), true),
        (BinaryCombiner::mean(), false),
    ] {
        let r = check_associativity(&f, trials, 1e-12, seed);
        let detail = match r.counterexample {
            None => format!("associative over {} triples", r.samples),
            Some(c) => format!(
                "not associative: ({}, {}, {}) gives {} vs {}",
                c.x, c.y, c.z, c.right_nested, c.left_nested
            ),
        };
        line(
            r.passed == expect_associative,
            format!("F = {}: {detail}", f.name),
            out,
        )?;
    }

    for (s, expect_pass, expect_trivial) in [
        (UnaryRegrade::complement(), true, false),
        (UnaryRegrade::identity(), true, true),
        (UnaryRegrade::reciprocal(), false, false),
    ] {
        let r = check_complementarity(&s, trials, 1e-15, seed);
        let mut detail = format!(
            "{:?}, max |S(S(u)) - u| = {:.1e}",
            r.monotonicity, r.max_involution_error
        );
        if r.trivial {
            detail.push_str(", trivial (S is the identity)");
        }
        if let Some(&(u, su)) = r.range_violations.first() {
            detail.push_str(&format!(
                ", {} range violation(s), e.g. S({u}) = {su}",
                r.range_violations.len()
            ));
        }
        line(
            r.passed == expect_pass && r.trivial == expect_trivial,
            format!("S = {}: {detail}", s.name),
            out,
        )?;
    }

    // Complement rule through the evaluator on a fixed product model.
    let space = Arc::new(AttributeSpace::new(vec![
        ("x", vec![0.0, 1.0, 2.0, 3.0, 4.0]),
        ("y", vec![0.0, 1.0, 2.0, 3.0, 4.0]),
    ])?);
    let model = crate::curves::product_model(
        vec![
            UtilityCurve::exponential(0.5, 0.0, 4.0)?,
            UtilityCurve::power(1.5, 0.0, 4.0)?,
        ],
        space.clone(),
        "axioms",
    )?;
    let mut rng = StdRng::seed_from_u64(seed);
    let exprs: Vec<_> = (0..200).map(|_| random_expr(&mut rng, &space, 5)).collect();
    let r = check_complement_rule(&UnaryRegrade::complement(), &model, &exprs, 1e-15)?;
    line(
        r.passed,
        format!(
            "U(e) = 1 - U(~e) on {} expressions, max deviation {:.1e}",
            exprs.len(),
            r.max_deviation
        ),
        out,
    )?;
    Ok(if all { 0 } else { 1 })
}
