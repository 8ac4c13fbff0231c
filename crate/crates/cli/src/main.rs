use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Map, Number, Value};

use wkbdet::actions::{action_binomial, action_large_v, action_numeric, action_quartic};
use wkbdet::functional::{
    assemble_audit, audit_point, large_v_factorization, wronskian_residual, AUDIT_LADDER,
};
use wkbdet::phase::transition_phases;
use wkbdet::spectral::{det_complex, harmonic_det, log_det, DeterminantValue, Parity, RecessiveOptions};
use wkbdet::stokes::{critical_angle, emit_figure_data, read_panel, FigureParams};
use wkbdet::{Error, RegularizedAction64, Result, TrinomialMomentum64};

#[derive(Parser)]
#[command(name = "wkbdet", version, about = "Regularized actions, spectral determinants and Stokes geometry")]
struct Cli {
    /// Directory for file outputs; JSON lines are also copied to `<command>.jsonl` there.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical action of `(u q^N + v q^M + lambda)^{1/2}`.
    Action(ActionArgs),
    /// Spectral determinant by parity.
    Det(DetArgs),
    /// Residual of the Wronskian identity between a problem and its conjugate.
    Wronskian(WronskianArgs),
    /// Large-v factorization ratios, or the transition audit with `--audit`.
    Asymp(AsympArgs),
    /// Stokes curves dataset, the six-panel figure set, or the critical angle.
    Stokes(StokesArgs),
}

#[derive(Args, Clone)]
struct Problem {
    #[arg(long = "N")]
    n: u32,
    #[arg(long = "M", default_value_t = 0)]
    m: u32,
    #[arg(long, default_value_t = 1.0)]
    u: f64,
    /// `re` or `re,im`; repeat for a sweep.
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    v: Vec<Complex64>,
    /// `re` or `re,im`; repeat for a sweep.
    #[arg(long, value_parser = parse_complex, default_value = "0")]
    lambda: Vec<Complex64>,
}

#[derive(Copy, Clone, ValueEnum)]
enum ActionMethodArg {
    Auto,
    Closed,
    Numeric,
    Asymptotic,
}

#[derive(Args)]
struct ActionArgs {
    #[command(flatten)]
    p: Problem,
    #[arg(long, value_enum, default_value = "auto")]
    method: ActionMethodArg,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Copy, Clone, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
    Both,
}

#[derive(Copy, Clone, ValueEnum)]
enum DetMethodArg {
    Auto,
    Spectral,
    Ode,
    Harmonic,
}

#[derive(Args)]
struct DetArgs {
    #[command(flatten)]
    p: Problem,
    #[arg(long, value_enum, default_value = "both")]
    parity: ParityArg,
    #[arg(long, value_enum, default_value = "auto")]
    method: DetMethodArg,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct WronskianArgs {
    #[command(flatten)]
    p: Problem,
    /// Sweep `|v|` over these moduli keeping `arg v`.
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
}

#[derive(Args)]
struct AsympArgs {
    #[command(flatten)]
    p: Problem,
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<f64>>,
    /// Run the transition audit at `v = |v| e^{-i pi/(2j)}` over the ladder.
    #[arg(long)]
    audit: bool,
}

#[derive(Args)]
struct StokesArgs {
    #[arg(long = "N")]
    n: u32,
    #[arg(long = "M")]
    m: u32,
    #[arg(long, default_value_t = 5.0)]
    absv: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Write the six figure panels instead of one diagram.
    #[arg(long)]
    figure: bool,
    /// Bisect the angle where the curve S unlinks from `q = +inf`.
    #[arg(long)]
    critical: bool,
    #[arg(long, default_value = "panel")]
    label: String,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let f = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(f(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(f(re)?, f(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format!("{x:.16e}").parse::<Number>().expect("formatted float"))
    } else {
        Value::Null
    }
}

fn cnum(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

fn inputs(n: u32, m: u32, u: f64, v: Complex64, lambda: Complex64) -> Value {
    json!({"N": n, "M": m, "u": num(u), "v": cnum(v), "lambda": cnum(lambda)})
}

fn points(p: &Problem) -> Vec<(Complex64, Complex64)> {
    p.v.iter().flat_map(|&v| p.lambda.iter().map(move |&l| (v, l))).collect()
}

/// `M = N` names the pure power: the middle coefficient joins `u`.
fn momentum(p: &Problem, v: Complex64, lambda: Complex64) -> Result<TrinomialMomentum64> {
    if p.m == p.n {
        if v.im != 0.0 {
            return Err(Error::Domain("M = N needs real v".into()));
        }
        return TrinomialMomentum64::new(p.n, 0, p.u + v.re, Complex64::new(0.0, 0.0), lambda);
    }
    TrinomialMomentum64::new(p.n, p.m, p.u, v, lambda)
}

fn real_nonneg(z: Complex64, name: &str) -> Result<f64> {
    if z.im != 0.0 || z.re < 0.0 {
        return Err(Error::Domain(format!("{name} must be real and non-negative here, got {z}")));
    }
    Ok(z.re)
}

fn closed_action(t: &TrinomialMomentum64) -> Result<RegularizedAction64> {
    let (v, lam) = (t.v(), t.lambda());
    if t.n() == 4 && t.m() == 2 && t.u() == 1.0 && v.im == 0.0 && lam.im == 0.0 && v.re >= 0.0 && lam.re >= 0.0 {
        return action_quartic(v.re, lam.re);
    }
    if t.m() == 0 || v.norm() == 0.0 {
        return action_binomial(t.u(), v + lam, t.n(), 0);
    }
    if lam.norm() == 0.0 {
        return action_binomial(t.u(), v, t.n(), t.m());
    }
    Err(Error::Unsupported("no closed form for these parameters; use --method numeric".into()))
}

fn cmd_action(a: &ActionArgs) -> Vec<Result<Value>> {
    points(&a.p)
        .par_iter()
        .map(|&(v, lam)| {
            let t = momentum(&a.p, v, lam)?;
            let r = match a.method {
                ActionMethodArg::Closed => closed_action(&t)?,
                ActionMethodArg::Numeric => action_numeric(&t, a.tol)?,
                ActionMethodArg::Asymptotic => {
                    if t.u() != 1.0 {
                        return Err(Error::Domain("asymptotic form needs u = 1".into()));
                    }
                    action_large_v(t.n(), t.m(), real_nonneg(lam, "lambda")?, real_nonneg(v, "v")?)?
                }
                ActionMethodArg::Auto => match closed_action(&t) {
                    Err(Error::Unsupported(_)) => action_numeric(&t, a.tol)?,
                    other => other?,
                },
            };
            Ok(json!({
                "inputs": inputs(t.n(), t.m(), t.u(), t.v(), t.lambda()),
                "method": serde_json::to_value(r.method).expect("enum"),
                "value": cnum(r.value),
                "residue": cnum(r.residue),
                "error_estimate": num(r.error_estimate),
            }))
        })
        .collect()
}

fn det_record(t: &TrinomialMomentum64, lambda: Complex64, d: &DeterminantValue) -> Value {
    json!({
        "inputs": inputs(t.n(), t.m(), t.u(), t.v(), lambda),
        "parity": serde_json::to_value(d.parity).expect("enum"),
        "method": serde_json::to_value(d.method).expect("enum"),
        "value": cnum(d.value),
        "log_value": cnum(d.log_value),
        "error_estimate": num(d.error_estimate),
    })
}

fn one_det(a: &DetArgs, v: Complex64, lam: Complex64, parity: Parity) -> Result<Value> {
    let t = momentum(&a.p, v, lam)?;
    let real = t.v().im == 0.0 && lam.im == 0.0 && lam.re >= 0.0;
    let harmonic = t.n() == 2 && (t.m() == 0 || t.v().norm() == 0.0);
    let method = match a.method {
        DetMethodArg::Auto if harmonic && t.u() == 1.0 => DetMethodArg::Harmonic,
        DetMethodArg::Auto if real && t.v().re >= 0.0 => DetMethodArg::Spectral,
        DetMethodArg::Auto => DetMethodArg::Ode,
        m => m,
    };
    let d = match method {
        DetMethodArg::Harmonic => {
            if !harmonic || t.u() != 1.0 {
                return Err(Error::Domain("the closed form covers q^2 + lambda only".into()));
            }
            harmonic_det(parity, lam + t.v())
        }
        DetMethodArg::Spectral => {
            let base = t.with_lambda(Complex64::new(0.0, 0.0));
            log_det(&base, parity, real_nonneg(lam, "lambda")?, a.tol)?
        }
        _ => det_complex(&t, parity, RecessiveOptions::default())?,
    };
    Ok(det_record(&t, lam, &d))
}

fn cmd_det(a: &DetArgs) -> Vec<Result<Value>> {
    let parities: &[Parity] = match a.parity {
        ParityArg::Even => &[Parity::Even],
        ParityArg::Odd => &[Parity::Odd],
        ParityArg::Both => &[Parity::Even, Parity::Odd],
    };
    let jobs: Vec<_> =
        points(&a.p).into_iter().flat_map(|(v, l)| parities.iter().map(move |&p| (v, l, p))).collect();
    jobs.par_iter().map(|&(v, l, p)| one_det(a, v, l, p)).collect()
}

fn laddered(p: &Problem, ladder: &Option<Vec<f64>>) -> Vec<(Complex64, Complex64)> {
    match ladder {
        None => points(p),
        Some(moduli) => {
            let arg = p.v.first().map_or(0.0, |v| v.arg());
            moduli
                .iter()
                .flat_map(|&r| p.lambda.iter().map(move |&l| (Complex64::from_polar(r, arg), l)))
                .collect()
        }
    }
}

fn cmd_wronskian(a: &WronskianArgs) -> Vec<Result<Value>> {
    laddered(&a.p, &a.ladder)
        .par_iter()
        .map(|&(v, lam)| {
            let t = momentum(&a.p, v, lam)?;
            let w = wronskian_residual(&t)?;
            Ok(json!({
                "inputs": inputs(t.n(), t.m(), t.u(), t.v(), t.lambda()),
                "lhs": cnum(w.lhs),
                "rhs": cnum(w.rhs),
                "residual": cnum(w.residual),
                "relative": num(w.relative),
                "error_estimate": num(w.error_estimate),
            }))
        })
        .collect()
}

fn cmd_asymp(a: &AsympArgs) -> Vec<Result<Value>> {
    if a.p.u != 1.0 {
        return vec![Err(Error::Domain("large-v forms take u = 1".into()))];
    }
    if a.audit {
        let lam = a.p.lambda[0];
        let ladder = a.ladder.clone().unwrap_or_else(|| AUDIT_LADDER.to_vec());
        let pts: Vec<Result<_>> = ladder.par_iter().map(|&r| audit_point(a.p.n, a.p.m, lam, r)).collect();
        let mut ok = Vec::new();
        let mut out = Vec::new();
        for p in pts {
            match p {
                Ok(p) => {
                    out.push(Ok(json!({
                        "modulus": num(p.modulus),
                        "v": cnum(p.v),
                        "v1": cnum(p.v1),
                        "Lambda": cnum(p.big_lambda),
                        "Lambda1": cnum(p.big_lambda1),
                        "bracket": cnum(p.bracket),
                        "target": cnum(p.target),
                        "deviation": num(p.deviation),
                        "term_deviation": [num(p.term_deviation[0]), num(p.term_deviation[1])],
                        "action_sum": cnum(p.action_sum),
                        "action_sum_expected": cnum(p.action_sum_expected),
                        "anomaly_sum": cnum(p.anomaly_sum),
                        "anomaly_sum_expected": cnum(p.anomaly_sum_expected),
                    })));
                    ok.push(p);
                }
                Err(e) => out.push(Err(e)),
            }
        }
        if out.iter().all(|r| r.is_ok()) {
            let audit = assemble_audit(a.p.n, a.p.m, lam, ok);
            let phases = transition_phases(a.p.n, a.p.m);
            out.push(Ok(json!({
                "N": a.p.n,
                "M": a.p.m,
                "phases_hold": phases.all_hold(),
                "phases": serde_json::to_value(&phases).expect("phases"),
                "converged": audit.converged,
            })));
        }
        return out;
    }
    laddered(&a.p, &a.ladder)
        .par_iter()
        .map(|&(v, lam)| {
            let f = large_v_factorization(a.p.n, a.p.m, lam, v)?;
            Ok(json!({
                "inputs": inputs(a.p.n, a.p.m, 1.0, v, lam),
                "Lambda": cnum(f.big_lambda),
                "action": cnum(f.action),
                "anomaly": cnum(f.anomaly),
                "log_predicted": [cnum(f.log_predicted[0]), cnum(f.log_predicted[1])],
                "log_computed": [cnum(f.log_computed[0]), cnum(f.log_computed[1])],
                "ratio": [cnum(f.ratio[0]), cnum(f.ratio[1])],
            }))
        })
        .collect()
}

fn cmd_stokes(a: &StokesArgs, out: &Path) -> Vec<Result<Value>> {
    let run = || -> Result<Vec<Value>> {
        if a.critical {
            let c = critical_angle(a.n, a.m, a.absv, a.lambda)?;
            return Ok(vec![json!({
                "N": a.n,
                "M": a.m,
                "absv": num(a.absv),
                "lambda": num(a.lambda),
                "theta_critical": num(c.theta),
                "closed_form": num(c.closed_form),
                "bracket": num(c.bracket),
                "small_lambda": c.small_lambda,
            })]);
        }
        let params = if a.figure {
            FigureParams { modulus: a.absv, ..FigureParams::figure_one(a.n, a.m) }
        } else {
            FigureParams { n: a.n, m: a.m, modulus: a.absv, panels: vec![(a.label.clone(), a.theta, a.lambda)] }
        };
        let paths = emit_figure_data(&params, out)?;
        paths
            .iter()
            .map(|p| {
                let d = read_panel(p)?;
                let mut rec = Map::new();
                rec.insert("manifest".into(), json!(p.display().to_string()));
                rec.insert("theta".into(), num(d.theta));
                rec.insert("lambda".into(), cnum(d.lambda));
                rec.insert("turning_points".into(), json!(d.turning_points.len()));
                rec.insert("curves".into(), json!(d.curves.len()));
                rec.insert("linked".into(), json!(d.curves.iter().filter(|c| c.linked_to_plus_infinity).count()));
                rec.insert("s_linked".into(), json!(d.s_curve.map(|k| d.curves[k].linked_to_plus_infinity)));
                Ok(Value::Object(rec))
            })
            .collect()
    };
    match run() {
        Ok(v) => v.into_iter().map(Ok).collect(),
        Err(e) => vec![Err(e)],
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("WKBDET_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // a second initialization only happens in tests; ignore it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let (name, results) = match &cli.cmd {
        Cmd::Action(a) => ("action", cmd_action(a)),
        Cmd::Det(a) => ("det", cmd_det(a)),
        Cmd::Wronskian(a) => ("wronskian", cmd_wronskian(a)),
        Cmd::Asymp(a) => ("asymp", cmd_asymp(a)),
        Cmd::Stokes(a) => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("stokes"));
            ("stokes", cmd_stokes(a, &dir))
        }
    };
    let mut lines = String::new();
    let mut code = 0;
    for r in results {
        match r {
            Ok(v) => {
                lines.push_str(&serde_json::to_string(&v).expect("json"));
                lines.push('\n');
            }
            Err(e) => {
                eprintln!("error: {e}");
                if code == 0 {
                    code = e.exit_code();
                }
            }
        }
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    if lock.write_all(lines.as_bytes()).is_err() {
        return ExitCode::from(1);
    }
    if let Some(dir) = &cli.out {
        let write = fs::create_dir_all(dir).and_then(|_| fs::write(dir.join(format!("{name}.jsonl")), &lines));
        if let Err(e) = write {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code as u8)
}
