//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input, 2 non-convergence or failed
//! verification. Data goes to stdout, diagnostics to stderr.

use crate::coherent::{photon_distribution, CSLabel};
use crate::continuum::{
    continuum_husimi, continuum_moment, continuum_p_function, nu_function, PConvention,
};
use crate::error::Error;
use crate::kcore::MLParams;
use crate::measure::{verify_resolution, MomentReport};
use crate::mlfunc::{ml_eval, ml_laplace, ml_laplace_quadrature, EvalConfig};
use crate::output::{map, Field, OutputRecord, Table};
use crate::quadrature::QuadratureSpec;
use crate::special::gamma;
use crate::thermal::{husimi_q, p_function, partition_quadratic, ThermalConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAILED: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mlcs",
    version,
    about = "Generalized Mittag-Leffler evaluation and coherent-state numerics"
)]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the generalized Mittag-Leffler function at a real argument.
    MlEval(MlEvalArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Tabulate a quantity over a grid of |z|^2.
    Scan(ScanArgs),
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    gamma: f64,
    /// The k parameter.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    kpar: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<MLParams, Error> {
        MLParams::new(self.alpha, self.beta, self.gamma, self.kpar)
    }

    fn record(&self, inputs: &mut BTreeMap<String, Field>) {
        inputs.insert("alpha".into(), self.alpha.into());
        inputs.insert("beta".into(), self.beta.into());
        inputs.insert("gamma".into(), self.gamma.into());
        inputs.insert("kpar".into(), self.kpar.into());
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct MlEvalArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
    #[arg(long, default_value_t = 1e-12)]
    rel_tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_terms: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Suite {
    Resolution,
    MomentsContinuum,
    Laplace,
    Ansatz,
}

impl Suite {
    fn tolerance(self) -> f64 {
        match self {
            Suite::Resolution => 1e-6,
            Suite::MomentsContinuum => 1e-7,
            Suite::Laplace => 1e-8,
            Suite::Ansatz => 1e-5,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Resolution => "resolution",
            Suite::MomentsContinuum => "moments-continuum",
            Suite::Laplace => "laplace",
            Suite::Ansatz => "ansatz",
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    #[command(flatten)]
    params: ParamArgs,
    /// Largest moment order for `resolution`.
    #[arg(long, default_value_t = 10)]
    s_max: u32,
    /// Laplace variables for `laplace`.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2.0, 3.0, 5.0])]
    s: Vec<f64>,
    /// Moment orders for `moments-continuum`.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.5, 1.0, 2.5, 7.0])]
    energies: Vec<f64>,
    #[arg(long = "A", default_value_t = 1.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long = "B", default_value_t = 0.05, allow_hyphen_values = true)]
    b: f64,
    #[arg(long = "betaB", default_value_t = 1.0, allow_hyphen_values = true)]
    beta_b: f64,
    #[arg(long = "J", default_value_t = 8)]
    j: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    /// Photon-number distribution at |z|^2 = --abs-z2.
    Pn,
    /// Husimi Q of the thermal state.
    Husimi,
    /// P function of the thermal state.
    Pfn,
    /// The nu-function.
    Nu,
    /// Continuum Husimi distribution.
    HusimiCont,
    /// Continuum P function.
    PCont,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, value_enum)]
    quantity: Quantity,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x_min: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    x_max: f64,
    #[arg(long, default_value_t = 11)]
    x_steps: usize,
    /// |z|^2 for the photon-number distribution.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    abs_z2: f64,
    #[arg(long = "betaB", default_value_t = 1.0, allow_hyphen_values = true)]
    beta_b: f64,
    /// Continuum P function with the growing exponent sign.
    #[arg(long = "growing-p")]
    growing_p: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// What a command produced: text for stdout, an optional one-line stderr
/// diagnostic, and the exit code.
struct Outcome {
    stdout: String,
    stderr: Option<String>,
    code: i32,
}

fn fail(e: &Error) -> Outcome {
    let code = match e {
        Error::Domain(_) => EXIT_INPUT,
        _ => EXIT_FAILED,
    };
    Outcome {
        stdout: String::new(),
        stderr: Some(format!("error: {e}")),
        code,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let rendered = e.render().to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("error: invalid arguments");
            let _ = writeln!(err, "{line}");
            return EXIT_INPUT;
        }
    };
    let outcome = match &cli.command {
        Command::MlEval(a) => cmd_ml_eval(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Scan(a) => cmd_scan(a),
    };
    let _ = out.write_all(outcome.stdout.as_bytes());
    if let Some(msg) = outcome.stderr {
        let _ = writeln!(err, "{msg}");
    }
    outcome.code
}

fn cmd_ml_eval(a: &MlEvalArgs) -> Outcome {
    let params = match a.params.build() {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let cfg = match EvalConfig::new(a.rel_tol, a.max_terms) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if !a.z.is_finite() {
        return fail(&Error::Domain("z must be finite".into()));
    }
    let mut inputs = BTreeMap::new();
    a.params.record(&mut inputs);
    inputs.insert("z".into(), a.z.into());
    inputs.insert("rel_tol".into(), a.rel_tol.into());
    inputs.insert("max_terms".into(), a.max_terms.into());

    let (value, terms, tail, converged, diag) = match ml_eval(&params, a.z, &cfg) {
        Ok(r) => (r.value, r.terms_used, r.tail_bound, true, None),
        Err(Error::NonConvergence {
            partial,
            tail,
            terms,
        }) => (
            partial,
            terms,
            tail,
            false,
            Some(format!("series did not converge within {terms} terms")),
        ),
        Err(e) => return fail(&e),
    };
    let code = if converged { EXIT_OK } else { EXIT_FAILED };
    let stdout = match a.format {
        Format::Json => {
            let results = map([
                ("value", Field::Num(value)),
                ("terms_used", terms.into()),
                ("tail_bound", Field::Num(tail)),
                ("converged", converged.into()),
            ]);
            let mut rec = OutputRecord::new("ml-eval", inputs, Field::Map(results));
            rec.diagnostics.extend(diag.clone());
            rec.to_json()
        }
        Format::Csv => {
            let mut t = Table::new(&["z", "value", "terms_used", "tail_bound", "converged"]);
            t.push(vec![
                a.z.into(),
                value.into(),
                terms.into(),
                tail.into(),
                converged.into(),
            ]);
            t.to_csv()
        }
    };
    Outcome {
        stdout,
        stderr: diag.map(|d| format!("error: {d}")),
        code,
    }
}

fn report_field(r: &MomentReport) -> BTreeMap<String, Field> {
    map([
        ("s_values", Field::from(r.s_values.clone())),
        ("lhs", Field::from(r.lhs.clone())),
        ("rhs", Field::from(r.rhs.clone())),
        ("max_rel_err", Field::Num(r.max_rel_err)),
    ])
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let quad = QuadratureSpec::default();
    let cfg = EvalConfig::default();
    let tol = a.suite.tolerance();
    let mut inputs = BTreeMap::new();
    inputs.insert("suite".into(), a.suite.name().into());

    let result: Result<(MomentReport, BTreeMap<String, Field>), Error> = (|| match a.suite {
        Suite::Resolution => {
            let params = a.params.build()?;
            a.params.record(&mut inputs);
            inputs.insert("s_max".into(), a.s_max.into());
            Ok((verify_resolution(&params, a.s_max, &quad)?, BTreeMap::new()))
        }
        Suite::MomentsContinuum => {
            inputs.insert("energies".into(), Field::from(a.energies.clone()));
            let mut lhs = Vec::new();
            let mut rhs = Vec::new();
            for &e in &a.energies {
                lhs.push(continuum_moment(e, &quad)?);
                rhs.push(gamma(e + 1.0));
            }
            Ok((
                MomentReport::from_sides(a.energies.clone(), lhs, rhs),
                BTreeMap::new(),
            ))
        }
        Suite::Laplace => {
            let params = a.params.build()?;
            a.params.record(&mut inputs);
            inputs.insert("s".into(), Field::from(a.s.clone()));
            let mut lhs = Vec::new();
            let mut rhs = Vec::new();
            for &s in &a.s {
                rhs.push(ml_laplace(&params, s, &cfg)?);
                lhs.push(ml_laplace_quadrature(&params, s, &cfg, &quad)?.value);
            }
            Ok((
                MomentReport::from_sides(a.s.clone(), lhs, rhs),
                BTreeMap::new(),
            ))
        }
        Suite::Ansatz => {
            inputs.insert("A".into(), a.a.into());
            inputs.insert("B".into(), a.b.into());
            inputs.insert("betaB".into(), a.beta_b.into());
            inputs.insert("J".into(), a.j.into());
            let t = ThermalConfig::quadratic(a.beta_b, a.a, a.b, a.j)?;
            let r = partition_quadratic(&t)?;
            let extra = map([
                ("terms", Field::from(r.terms.clone())),
                ("error_by_j", Field::from(r.error_by_j.clone())),
                ("optimal_truncation", r.optimal_truncation.into()),
                ("diverging", r.diverging.into()),
            ]);
            let report =
                MomentReport::from_sides(vec![a.j as f64], vec![r.ansatz.value], vec![r.direct]);
            Ok((report, extra))
        }
    })();

    let (report, extra) = match result {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let passed = report.max_rel_err <= tol;
    let mut results = report_field(&report);
    results.extend(extra);
    results.insert("tolerance".into(), tol.into());
    results.insert("passed".into(), passed.into());
    let mut rec = OutputRecord::new(
        &format!("verify {}", a.suite.name()),
        inputs,
        Field::Map(results),
    );
    let stderr = if passed {
        None
    } else {
        let msg = format!(
            "verification failed: max_rel_err {:e} exceeds tolerance {:e}",
            report.max_rel_err, tol
        );
        rec.diagnostics.push(msg.clone());
        Some(format!("error: {msg}"))
    };
    Outcome {
        stdout: rec.to_json(),
        stderr,
        code: if passed { EXIT_OK } else { EXIT_FAILED },
    }
}

fn grid(a: &ScanArgs) -> Result<Vec<f64>, Error> {
    let bad = |m: &str| Err(Error::Domain(format!("inconsistent grid: {m}")));
    if !(a.x_min.is_finite() && a.x_max.is_finite()) {
        return bad("bounds must be finite");
    }
    if a.x_min < 0.0 {
        return bad("--x-min must be non-negative");
    }
    match a.x_steps {
        0 => bad("--x-steps must be positive"),
        1 if a.x_min == a.x_max => Ok(vec![a.x_min]),
        1 => bad("a single step needs --x-min equal to --x-max"),
        n if a.x_max > a.x_min => {
            let h = (a.x_max - a.x_min) / (n - 1) as f64;
            Ok((0..n)
                .map(|i| {
                    if i + 1 == n {
                        a.x_max
                    } else {
                        a.x_min + i as f64 * h
                    }
                })
                .collect())
        }
        _ => bad("--x-max must exceed --x-min"),
    }
}

fn cmd_scan(a: &ScanArgs) -> Outcome {
    let quad = QuadratureSpec::default();
    let cfg = EvalConfig::default();
    let mut inputs = BTreeMap::new();
    let name = a
        .quantity
        .to_possible_value()
        .expect("named")
        .get_name()
        .to_string();
    inputs.insert("quantity".into(), name.clone().into());

    let result: Result<(Table, Vec<String>), Error> = (|| {
        if a.quantity == Quantity::Pn {
            let params = a.params.build()?;
            a.params.record(&mut inputs);
            inputs.insert("abs_z2".into(), a.abs_z2.into());
            if !(a.abs_z2 >= 0.0) || !a.abs_z2.is_finite() {
                return Err(Error::Domain("abs-z2 must be non-negative".into()));
            }
            let d = photon_distribution(CSLabel::real(a.abs_z2.sqrt())?, &params, &cfg)?;
            let mut t = Table::new(&["n", "p"]);
            for (n, p) in d.probabilities.iter().enumerate() {
                t.push(vec![n.into(), (*p).into()]);
            }
            return Ok((
                t,
                vec![format!("discarded tail mass below {:e}", d.tail_mass)],
            ));
        }
        let xs = grid(a)?;
        inputs.insert("x_min".into(), a.x_min.into());
        inputs.insert("x_max".into(), a.x_max.into());
        inputs.insert("x_steps".into(), a.x_steps.into());
        let mut t = Table::new(&["x", "value"]);
        let mut diagnostics = Vec::new();
        match a.quantity {
            Quantity::Husimi | Quantity::Pfn => {
                let params = a.params.build()?;
                a.params.record(&mut inputs);
                inputs.insert("betaB".into(), a.beta_b.into());
                let thermal = ThermalConfig::linear_from_params(a.beta_b, &params)?;
                for &x in &xs {
                    let z = CSLabel::real(x.sqrt())?;
                    let v = if a.quantity == Quantity::Husimi {
                        husimi_q(z, &params, &thermal, &cfg)?
                    } else {
                        p_function(z, &params, &thermal)?
                    };
                    t.push(vec![x.into(), v.into()]);
                }
            }
            Quantity::Nu => {
                for &x in &xs {
                    t.push(vec![x.into(), nu_function(x, &quad)?.into()]);
                }
            }
            Quantity::HusimiCont => {
                inputs.insert("betaB".into(), a.beta_b.into());
                for &x in &xs {
                    let v = continuum_husimi(CSLabel::real(x.sqrt())?, a.beta_b, &quad)?;
                    t.push(vec![x.into(), v.into()]);
                }
            }
            Quantity::PCont => {
                inputs.insert("betaB".into(), a.beta_b.into());
                inputs.insert("growing_p".into(), a.growing_p.into());
                let conv = if a.growing_p {
                    PConvention::Growing
                } else {
                    PConvention::Decaying
                };
                if a.growing_p {
                    diagnostics
                        .push("growing convention: the distribution grows with |z|^2".into());
                }
                for &x in &xs {
                    let v = continuum_p_function(CSLabel::real(x.sqrt())?, a.beta_b, conv)?;
                    t.push(vec![x.into(), v.into()]);
                }
            }
            Quantity::Pn => unreachable!("handled above"),
        }
        Ok((t, diagnostics))
    })();

    let (table, diagnostics) = match result {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let stdout = match a.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut rec = OutputRecord::new(&format!("scan {name}"), inputs, table.to_field());
            rec.diagnostics = diagnostics;
            rec.to_json()
        }
    };
    Outcome {
        stdout,
        stderr: None,
        code: EXIT_OK,
    }
}
