//! Command-line front end. `run` parses arguments, executes one subcommand and
//! returns the process exit code: 0 success, 1 a false verdict under --assert
//! (or a failed check/sweep), 2 bad input.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::clinalg::{Cplx, Vec2};
use crate::distances::distance;
use crate::error::Error;
use crate::geometry::{noncircular_witness, nonconvex_witness, separating_polynomial_seeded};
use crate::interpolation::{
    identity_regressions, build_interpolant, default_nu, default_q, interpolate, jn_interpolant, k_alpha, nu_window,
    z_nu,
};
use crate::membership::{
    in_b_gamma_with, in_g_with, in_gamma_with, in_tilde_g_with, in_tilde_gamma_with, CondId, Options, Select,
};
use crate::mobius::CPoint;
use crate::schwarz::{check_all_with, k_rho, lift, schur_certificates_with, SchwarzProblem};
use crate::suites;

#[derive(Debug, Parser)]
#[command(name = "polydisc", version, about = "Membership, Schwarz lemma, interpolation and distances on G_n and G~_n")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Circle grid for sup-norm scans
    #[arg(long, global = true, default_value_t = 4096)]
    pub grid: usize,
    /// Boundary band for verdicts
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub band: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sample count for sweeps and sampled checks
    #[arg(long, global = true, default_value_t = 10000)]
    pub samples: usize,
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Exit 1 when the verdict is false
    #[arg(long = "assert", global = true)]
    pub assert_verdict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetArg {
    TildeG,
    TildeGamma,
    G,
    Gamma,
    BGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    Nonconvex,
    Noncircular,
    Separating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Membership,
    Schwarz,
    DOracle,
    Forward,
    Interpolation,
    Pinch,
    Separation,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Membership report for one point
    Membership {
        #[arg(long, value_enum, default_value = "tilde-g")]
        set: SetArg,
        /// Point as inline JSON, a file path, or - for stdin
        #[arg(long)]
        point: String,
        /// Report a single condition (C2..C10, C3p, ...)
        #[arg(long)]
        cond: Option<String>,
        /// Circle samples for the zero search behind C2
        #[arg(long, default_value_t = 0)]
        torus_grid: usize,
    },
    /// Schwarz lemma conditions for maps 0 -> 0, lambda0 -> y
    Schwarz {
        #[arg(long)]
        point: String,
        /// lambda0 as [re, im]
        #[arg(long)]
        lambda0: String,
        /// Only this condition (2..=11)
        #[arg(long)]
        cond: Option<u8>,
    },
    /// Build an interpolating disc and optionally evaluate it
    Interpolate {
        #[arg(long)]
        point: String,
        #[arg(long)]
        lambda0: String,
        /// Free parameter nu (default: 1)
        #[arg(long)]
        nu: Option<f64>,
        /// alpha as [[re, im], [re, im]] (default: bottom of the K form)
        #[arg(long)]
        alpha: Option<String>,
        /// Points to evaluate at, as [[re, im], ...]
        #[arg(long)]
        eval: Option<String>,
        /// Build the extremal disc when ||Phi|| = |lambda0|
        #[arg(long)]
        allow_marginal: bool,
    },
    /// Caratheodory / Lempert distance from 0 to a point of J_n
    Distance {
        #[arg(long)]
        point: String,
        /// Report tanh of each distance instead
        #[arg(long)]
        mobius_scale: bool,
    },
    /// Non-convexity, non-circularity or separation witnesses
    Witness {
        #[arg(long, value_enum)]
        kind: WitnessKind,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Target for --kind separating
        #[arg(long)]
        point: Option<String>,
    },
    /// Seeded oracle sweeps
    Oracle {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Dimensions to sweep (default depends on the suite)
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
    },
    /// CSV of G~_n / G_n verdicts over a (Re y_1, Im y_1) grid
    PlotSlice {
        /// Base point; y_1 is replaced by the grid value
        #[arg(long)]
        point: String,
        /// Override q, as [re, im]
        #[arg(long)]
        q: Option<String>,
        /// Half-width of the square (default n)
        #[arg(long)]
        extent: Option<f64>,
        /// Grid points per axis
        #[arg(long, default_value_t = 101)]
        res: usize,
    },
    /// Closed-form identities and the equivalence suites
    Regress {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

/// Failure of a run: bad input (exit 2) or a computation error (exit 1).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Input { .. } | Error::Domain(_) | Error::Precondition(_) | Error::NonHermitian(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Failed(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_source(src: &str) -> CliResult<String> {
    let t = src.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(src).map_err(|e| CliError::Input(format!("cannot read `{src}`: {e}")))
}

/// Parse JSON, naming the offending field on failure.
pub fn parse_json<T: DeserializeOwned>(what: &str, src: &str) -> CliResult<T> {
    let text = read_source(src)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { what.to_string() } else { format!("{what}.{path}") };
        CliError::Input(format!("invalid input in field `{field}`: {}", e.inner()))
    })
}

fn parse_point(src: &str) -> CliResult<CPoint> {
    parse_json("point", src)
}

fn parse_cplx(what: &str, src: &str) -> CliResult<Cplx> {
    let z: Cplx = parse_json(what, src)?;
    if !z.is_finite() {
        return Err(CliError::Input(format!("invalid input in field `{what}`: non-finite")));
    }
    Ok(z)
}

fn check_common(c: &Common) -> CliResult<()> {
    if c.grid < 8 {
        return Err(CliError::Input("invalid input in field `grid`: must be at least 8".into()));
    }
    if !(c.band > 0.0 && c.band <= 1e-3) {
        return Err(CliError::Input("invalid input in field `band`: must lie in (0, 1e-3]".into()));
    }
    if c.samples == 0 {
        return Err(CliError::Input("invalid input in field `samples`: must be at least 1".into()));
    }
    Ok(())
}

/// Output of one command: the report text and whether its verdict held.
pub struct Outcome {
    pub text: String,
    pub verdict: bool,
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn report<T: Serialize>(v: &T, verdict: bool) -> Outcome {
    Outcome { text: pretty(v), verdict }
}

/// Execute a parsed command without touching stdout.
pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let c = &cli.common;
    check_common(c)?;
    let opts = Options { band: c.band, torus_grid: 0 };
    match &cli.command {
        Command::Membership { set, point, cond, torus_grid } => {
            let y = parse_point(point)?;
            let sel = match cond {
                Some(s) => Select::One(CondId::parse(s)?),
                None => Select::All,
            };
            let opts = Options { torus_grid: *torus_grid, ..opts };
            if *set == SetArg::BGamma {
                let v = in_b_gamma_with(&y, &opts)?;
                return Ok(report(&json!({"point": y, "set_id": "BGamma", "verdict": v}), v));
            }
            if !matches!(sel, Select::All) && matches!(set, SetArg::G | SetArg::Gamma) {
                return Err(CliError::Input("invalid input in field `cond`: only for --set tilde-g / tilde-gamma".into()));
            }
            let rep = match set {
                SetArg::TildeG => in_tilde_g_with(&y, sel, &opts)?,
                SetArg::TildeGamma => in_tilde_gamma_with(&y, sel, &opts)?,
                SetArg::G => in_g_with(&y, &opts)?,
                SetArg::Gamma => in_gamma_with(&y, &opts)?,
                SetArg::BGamma => unreachable!(),
            };
            Ok(report(&rep, rep.verdict))
        }
        Command::Schwarz { point, lambda0, cond } => {
            let y = parse_point(point)?;
            let lam = parse_cplx("lambda0", lambda0)?;
            let p = SchwarzProblem::new(lam, y)?;
            let margins = match cond {
                Some(k) => vec![crate::schwarz::check_condition_with(&p, *k, c.band)?],
                None => check_all_with(&p, c.band)?,
            };
            let verdict = margins.iter().all(|m| m.holds);
            let out = json!({
                "problem": p,
                "verdict": verdict,
                "conditions": margins,
                "certificates": schur_certificates_with(&p, c.band)?,
                "lifted": lift(&p),
            });
            Ok(report(&out, verdict))
        }
        Command::Interpolate { point, lambda0, nu, alpha, eval, allow_marginal } => {
            let y = parse_point(point)?;
            let lam = parse_cplx("lambda0", lambda0)?;
            let f = if nu.is_some() || alpha.is_some() {
                let swapped = y.n == 3 && y.y(2).norm() > y.y(1).norm();
                if swapped {
                    return Err(CliError::Input(
                        "invalid input in field `point`: explicit nu/alpha need |y_2| <= |y_1|".into(),
                    ));
                }
                let nu = match nu {
                    Some(v) => *v,
                    None => default_nu(nu_window(&y, lam)?),
                };
                let z = z_nu(&y, lam, nu)?;
                let a: Vec2 = match alpha {
                    Some(s) => parse_json("alpha", s)?,
                    None => k_alpha(&k_rho(&z, lam.norm())?)?,
                };
                let q0 = if z.a22.norm() <= 1e-14 { crate::clinalg::Mat2::zero() } else { default_q(&z, &a, lam)? };
                build_interpolant(&y, lam, nu, a, q0)?
            } else if *allow_marginal {
                jn_interpolant(&y, lam, true)?
            } else if y.n == 3 {
                interpolate(&y, lam)?
            } else {
                jn_interpolant(&y, lam, false)?
            };
            let pts: Vec<Cplx> = match eval {
                Some(s) => parse_json("eval", s)?,
                None => Vec::new(),
            };
            let values = pts.iter().map(|&l| f.eval(l)).collect::<Result<Vec<_>, _>>()?;
            let v = f.verify(c.samples.min(100_000), c.seed)?;
            let out = json!({"disc": f, "evaluations": pts.iter().zip(&values).map(|(l, p)| json!({"lambda": l, "value": p})).collect::<Vec<_>>(), "verification": v});
            Ok(report(&out, v.passed()))
        }
        Command::Distance { point, mobius_scale } => {
            let y = parse_point(point)?;
            let d = distance(&y, c.grid)?;
            let ok = d.consistent(1e-9);
            let d = if *mobius_scale { d.mobius_scale() } else { d };
            Ok(report(&d, ok))
        }
        Command::Witness { kind, n, point } => match kind {
            WitnessKind::Nonconvex => {
                let (a, b, m) = nonconvex_witness(*n)?;
                Ok(report(&json!({"a": a, "b": b, "midpoint": m}), true))
            }
            WitnessKind::Noncircular => {
                let (y, iy) = noncircular_witness(*n)?;
                Ok(report(&json!({"y": y, "iy": iy}), true))
            }
            WitnessKind::Separating => {
                let src = point
                    .as_deref()
                    .ok_or_else(|| CliError::Input("invalid input in field `point`: required for separating".into()))?;
                let y = parse_point(src)?;
                let f = separating_polynomial_seeded(&y, c.samples, c.seed)?;
                let ok = f.value_at_target > 1.0 && f.sup_bound <= 1.0 + 1e-9;
                Ok(report(&f, ok))
            }
        },
        Command::Oracle { suite, n } => {
            let reports = run_suites(*suite, n, c);
            let ok = reports.iter().all(|r| r.passed());
            Ok(report(&reports, ok))
        }
        Command::PlotSlice { point, q, extent, res } => {
            let mut y = parse_point(point)?;
            if let Some(s) = q {
                let qn = y.n - 1;
                y.coords[qn] = parse_cplx("q", s)?;
            }
            let r = extent.unwrap_or(y.n as f64);
            if !(r > 0.0 && r.is_finite()) || *res < 2 {
                return Err(CliError::Input("invalid input in field `extent`/`res`".into()));
            }
            Ok(Outcome { text: plot_slice(&y, r, *res, &opts)?, verdict: true })
        }
        Command::Regress { trials } => {
            let app = identity_regressions(*trials, c.seed)?;
            let app_ok = app.worst() <= 1e-9;
            let reports = run_suites(SuiteArg::Membership, &[], c)
                .into_iter()
                .chain(run_suites(SuiteArg::Schwarz, &[], c))
                .collect::<Vec<_>>();
            let ok = app_ok && reports.iter().all(|r| r.passed());
            Ok(report(&json!({"identities": app, "suites": reports}), ok))
        }
    }
}

fn run_suites(suite: SuiteArg, dims: &[usize], c: &Common) -> Vec<suites::SuiteReport> {
    let pick = |default: &[usize]| if dims.is_empty() { default.to_vec() } else { dims.to_vec() };
    let s = c.samples;
    let mut out = Vec::new();
    let all = suite == SuiteArg::All;
    if all || suite == SuiteArg::Membership {
        out.extend(pick(&[2, 3, 4, 5, 6]).into_iter().map(|n| suites::membership_equivalence(n, s, c.seed)));
    }
    if all || suite == SuiteArg::Schwarz {
        out.extend(pick(&[3, 4, 5]).into_iter().map(|n| suites::schwarz_equivalence(n, s, c.seed)));
    }
    if all || suite == SuiteArg::DOracle {
        out.push(suites::d_oracle(s, c.seed, c.grid.max(8192), 1e-4));
    }
    if all || suite == SuiteArg::Forward {
        out.extend(pick(&[2, 3, 4, 5, 6]).into_iter().map(|n| suites::forward_soundness(n, s, c.seed)));
    }
    if all || suite == SuiteArg::Interpolation {
        out.push(suites::interpolation_suite(s, c.seed, 200));
    }
    if all || suite == SuiteArg::Pinch {
        out.extend(pick(&[2, 3, 5]).into_iter().map(|n| suites::pinch_suite(n, s, c.seed, c.grid.max(8192))));
    }
    if all || suite == SuiteArg::Separation {
        out.push(suites::separation_suite(s, c.seed, 1000));
    }
    out
}

/// CSV rows re,im,in_tilde_g,in_g over [-r, r]^2 for the y_1 coordinate.
pub fn plot_slice(base: &CPoint, r: f64, res: usize, opts: &Options) -> crate::error::Result<String> {
    let mut s = String::from("re,im,in_tilde_g,in_g\n");
    let step = 2.0 * r / (res - 1) as f64;
    for i in 0..res {
        for k in 0..res {
            let z = Cplx::new(-r + step * k as f64, -r + step * i as f64);
            let mut y = base.clone();
            y.coords[0] = z;
            let a = in_tilde_g_with(&y, Select::All, opts)?.verdict;
            let b = in_g_with(&y, opts)?.verdict;
            writeln!(s, "{},{},{},{}", z.re, z.im, a as u8, b as u8).expect("string write");
        }
    }
    Ok(s)
}

/// Parse `args`, run, write the output and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(j) = cli.common.jobs {
        // ignore the error if a pool already exists (repeated calls in tests)
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let out = match execute(&cli) {
        Ok(o) => o,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            return 2;
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let written = match &cli.common.output {
        Some(p) => std::fs::write(p, &out.text).map_err(|e| e.to_string()),
        None => std::io::stdout().write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 2;
    }
    if cli.common.assert_verdict && !out.verdict {
        1
    } else {
        0
    }
}

/// Parse a report emitted by `execute` back into JSON, for round-trip checks.
pub fn reparse(text: &str) -> serde_json::Result<Value> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> CliResult<Outcome> {
        let mut v = vec!["polydisc"];
        v.extend_from_slice(args);
        execute(&Cli::try_parse_from(v).unwrap())
    }

    const STRICT_POINT: &str = r#"{"n":3,"coords":[[2.5,0],[1.25,0],[0.5,0]]}"#;
    const FAMILY_POINT: &str = r#"{"n":3,"coords":[[1.5,0],[0.75,0],[0.5,0]]}"#;

    #[test]
    fn membership_examples() {
        let a = exec(&["membership", "--set", "tilde-g", "--point", STRICT_POINT]).ok().unwrap();
        assert!(a.verdict);
        let b = exec(&["membership", "--set", "g", "--point", STRICT_POINT]).ok().unwrap();
        assert!(!b.verdict);
        assert!(reparse(&a.text).is_ok());
    }

    #[test]
    fn distance_example() {
        let d = exec(&["distance", "--point", FAMILY_POINT]).ok().unwrap();
        let v = reparse(&d.text).unwrap();
        let cf = v["closed_form"].as_f64().unwrap();
        assert_eq!(format!("{cf:.7}"), "1.0986123");
    }

    #[test]
    fn bad_input_names_field() {
        let e = exec(&["membership", "--point", r#"{"n":3,"coords":[[1,0],["x",0],[0,0]]}"#]);
        match e {
            Err(CliError::Input(msg)) => assert!(msg.contains("coords[1]"), "{msg}"),
            _ => panic!("expected an input error"),
        }
        let e = exec(&["membership", "--point", r#"{"coords":[[1,0],[0,0]]}"#]);
        assert!(matches!(e, Err(CliError::Input(m)) if m.contains("n")));
        assert!(matches!(exec(&["--band", "0.5", "membership", "--point", STRICT_POINT]), Err(CliError::Input(_))));
        assert!(matches!(exec(&["--grid", "4", "distance", "--point", FAMILY_POINT]), Err(CliError::Input(_))));
    }

    #[test]
    fn deterministic() {
        let args = ["--samples", "300", "--seed", "4", "oracle", "--suite", "membership", "--n", "3"];
        assert_eq!(exec(&args).ok().unwrap().text, exec(&args).ok().unwrap().text);
    }

    #[test]
    fn slice_csv() {
        let o = exec(&["plot-slice", "--point", FAMILY_POINT, "--res", "5"]).ok().unwrap();
        let lines: Vec<&str> = o.text.lines().collect();
        assert_eq!(lines[0], "re,im,in_tilde_g,in_g");
        assert_eq!(lines.len(), 26);
    }

    #[test]
    fn interpolate_command() {
        let y = r#"{"n":3,"coords":[[1.35,0],[0.675,0],[0.45,0]]}"#;
        let o = exec(&["--samples", "200", "interpolate", "--point", y, "--lambda0", "[-0.8,0]", "--eval", "[[0,0],[-0.8,0]]"])
            .ok()
            .unwrap();
        assert!(o.verdict);
        let v = reparse(&o.text).unwrap();
        assert_eq!(v["evaluations"].as_array().unwrap().len(), 2);
        let m = exec(&["interpolate", "--point", FAMILY_POINT, "--lambda0", "[-0.8,0]"]);
        assert!(matches!(m, Err(CliError::Failed(s)) if s.contains("marginal")));
    }
}
