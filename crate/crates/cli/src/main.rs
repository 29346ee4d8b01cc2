mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};
use tauquant::calculus::{
    band_residual, changevar_leading, compose_expansion, convert_quantization, dual_quantization, parametrix,
    reduce_amplitude, DualKind, ExpansionResult,
};
use tauquant::discretize::GridFunction;
use tauquant::estimates::{cv_bound, cv_bound_symbol, garding_check, operator_norm, CvBox, NormMethod};
use tauquant::heisenberg::{check_symmetry, midpoint, symmetry_tau, HeisPoint, TauMethod, Variant};
use tauquant::quantize::{apply, op_amplitude, op_symbol, OperatorMatrix};
use tauquant::symbol::ComplexSymbol;

use job::{need, usage, Job, Outcome};

#[derive(Parser)]
#[command(name = "tauquant", version, about = "Tau-quantized pseudo-differential operators on periodic grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the matrix of a tau-quantized symbol.
    Quantize(Job),
    /// Assemble the matrix of an amplitude.
    Amplitude(Job),
    /// Apply a matrix (or a quantized symbol) to a grid function.
    Apply(Job),
    /// Symbol and quantizing function of the adjoint.
    Adjoint(Job),
    /// Symbol and quantizing function of the transpose.
    Transpose(Job),
    /// Expansion of a product of two quantized operators.
    Compose(Job),
    /// Change of quantization by asymptotic expansion.
    Convert(Job),
    /// Left parametrix of an elliptic symbol.
    Parametrix(Job),
    /// Operator norm of a matrix or quantized symbol.
    Norm(Job),
    /// Calderon-Vaillancourt derivative bound of an amplitude.
    CvBound(Job),
    /// Fit and verify the Garding inequality.
    Garding(Job),
    /// Admissibility diagnostics for a quantizing function.
    CheckTau(Job),
    /// Amplitude reduction by integration by parts in k.
    ReduceAmplitude(Job),
    /// Leading symbol after the change of variables, with a numerical check.
    Changevar(Job),
    /// Exact computations in the Heisenberg group.
    Heisenberg {
        action: HeisAction,
        #[command(flatten)]
        job: Job,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HeisAction {
    Tau,
    Midpoint,
    Symcheck,
}

enum Output {
    Matrix(PathBuf, OperatorMatrix),
    Function(PathBuf, GridFunction),
    Json(Option<PathBuf>, Value),
    Line(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command).and_then(emit) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = f.to_string().replace('\n', " ");
            eprintln!("{}: {msg}", f.code());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn emit(outputs: Vec<Output>) -> Outcome<()> {
    for o in outputs {
        match o {
            Output::Matrix(p, a) => a.write(&p)?,
            Output::Function(p, u) => u.write(&p)?,
            Output::Json(path, v) => {
                let text = serde_json::to_string_pretty(&v).expect("report serializes") + "\n";
                match path {
                    Some(p) => std::fs::write(&p, text).map_err(tauquant::Error::from)?,
                    None => print!("{text}"),
                }
            }
            Output::Line(s) => println!("{s}"),
        }
    }
    Ok(())
}

fn run(cmd: Command) -> Outcome<Vec<Output>> {
    match cmd {
        Command::Quantize(j) => quantize(j.resolve("quantize")?),
        Command::Amplitude(j) => amplitude(j.resolve("amplitude")?),
        Command::Apply(j) => apply_cmd(j.resolve("apply")?),
        Command::Adjoint(j) => dual(j.resolve("adjoint")?, DualKind::Adjoint),
        Command::Transpose(j) => dual(j.resolve("transpose")?, DualKind::Transpose),
        Command::Compose(j) => compose(j.resolve("compose")?),
        Command::Convert(j) => convert(j.resolve("convert")?),
        Command::Parametrix(j) => parametrix_cmd(j.resolve("parametrix")?),
        Command::Norm(j) => norm(j.resolve("norm")?),
        Command::CvBound(j) => cv(j.resolve("cv-bound")?),
        Command::Garding(j) => garding(j.resolve("garding")?),
        Command::CheckTau(j) => check_tau(j.resolve("check-tau")?),
        Command::ReduceAmplitude(j) => reduce(j.resolve("reduce-amplitude")?),
        Command::Changevar(j) => changevar(j.resolve("changevar")?),
        Command::Heisenberg { action, job } => heisenberg(action, job.resolve("heisenberg")?),
    }
}

fn symbol_json(s: &ComplexSymbol) -> Value {
    json!({ "re": s.re.to_string(), "im": s.im.to_string() })
}

fn opnorm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().cloned().fold(0.0, f64::max)
}

fn summary(a: &OperatorMatrix, path: &std::path::Path) -> Output {
    Output::Line(format!("wrote {}x{} operator to {}", a.size(), a.size(), path.display()))
}

fn quantize(j: Job) -> Outcome<Vec<Output>> {
    let (s, t, g) = (j.symbol()?, j.tau()?, j.need_grid()?);
    let out = need(&j.out, "--out")?.clone();
    let a = op_symbol(&s, &t, &g)?;
    Ok(vec![summary(&a, &out), Output::Matrix(out, a)])
}

fn amplitude(j: Job) -> Outcome<Vec<Output>> {
    let (a, g) = (j.amplitude()?, j.need_grid()?);
    let out = need(&j.out, "--out")?.clone();
    let m = op_amplitude(&a, &g)?;
    Ok(vec![summary(&m, &out), Output::Matrix(out, m)])
}

/// The operator named by `--matrix`, or else by `--symbol`/`--tau`/`--grid`.
fn operator(j: &Job) -> Outcome<OperatorMatrix> {
    if j.matrix.is_some() {
        let p = j.input_file(&j.matrix, "--matrix")?;
        return Ok(OperatorMatrix::read(&p)?);
    }
    if j.symbol.is_none() {
        return usage("give --matrix or --symbol with --tau and --grid");
    }
    let (s, t, g) = (j.symbol()?, j.tau()?, j.need_grid()?);
    Ok(op_symbol(&s, &t, &g)?)
}

fn apply_cmd(j: Job) -> Outcome<Vec<Output>> {
    let input = j.input_file(&j.input, "--in")?;
    let out = need(&j.out, "--out")?.clone();
    let u = GridFunction::read(&input)?;
    let a = operator(&j)?;
    let v = apply(&a, &u)?;
    Ok(vec![Output::Function(out, v)])
}

fn dual(j: Job, kind: DualKind) -> Outcome<Vec<Output>> {
    let (s, t) = (j.symbol()?, j.tau()?);
    let grid = j.grid()?;
    if j.out.is_some() && grid.is_none() {
        return usage("--out needs --grid");
    }
    let (ds, dt) = dual_quantization(&s, &t, kind);
    let mut outputs = Vec::new();
    let mut rep = json!({ "symbol": symbol_json(&ds), "tau": dt.name() });
    if let Some(g) = grid {
        let a = op_symbol(&s, &t, &g)?;
        let b = op_symbol(&ds, &dt, &g)?;
        let reference = match kind {
            DualKind::Adjoint => a.adjoint(),
            DualKind::Transpose => a.transpose(),
        };
        rep["defect"] = json!(opnorm(&(&b.matrix - &reference.matrix)));
        if let Some(p) = &j.out {
            outputs.push(Output::Matrix(p.clone(), b));
        }
    }
    outputs.push(Output::Json(j.report.clone(), rep));
    Ok(outputs)
}

fn expansion_report(r: &ExpansionResult) -> Value {
    let mut v = r.to_json();
    // closed-form symbol only exists for constant coefficients
    if let Ok(s) = r.symbol_sum() {
        v["symbol"] = symbol_json(&s);
    }
    v
}

fn compose(j: Job) -> Outcome<Vec<Output>> {
    let (s1, t1, s2) = (j.symbol()?, j.tau()?, j.symbol2()?);
    let t2 = j.tau_named(&j.tau2, "--tau2")?;
    let t3 = match &j.tau3 {
        Some(_) => j.tau_named(&j.tau3, "--tau3")?,
        None => t1.clone(),
    };
    let grid = j.grid()?;
    let r = compose_expansion(&s1, &t1, &s2, &t2, &t3, j.order.unwrap_or(2), j.taylor.unwrap_or(1))?;
    let mut rep = expansion_report(&r);
    if let Some(g) = grid {
        let product = op_symbol(&s1, &t1, &g)?.matrix * op_symbol(&s2, &t2, &g)?.matrix;
        rep["defect"] = json!(opnorm(&(op_amplitude(&r.amplitude_sum(), &g)?.matrix - &product)));
        if let Ok(s) = r.symbol_sum() {
            rep["closed_form_defect"] = json!(opnorm(&(op_symbol(&s, &t3, &g)?.matrix - &product)));
        }
    }
    Ok(vec![Output::Json(j.report.clone(), rep)])
}

fn convert(j: Job) -> Outcome<Vec<Output>> {
    let s = j.symbol()?;
    let from = j.tau_named(&j.from, "--from")?;
    let to = j.tau_named(&j.to, "--to")?;
    let grid = j.grid()?;
    let r = convert_quantization(&s, &from, &to, j.order.unwrap_or(2), j.taylor.unwrap_or(1))?;
    let mut rep = expansion_report(&r);
    if let Some(g) = grid {
        let reference = op_symbol(&s, &from, &g)?.matrix;
        // the truncated expansion before integration by parts in k
        rep["defect"] = json!(opnorm(&(op_amplitude(&r.amplitude_sum(), &g)?.matrix - &reference)));
        if let Ok(b) = r.symbol_sum() {
            rep["closed_form_defect"] = json!(opnorm(&(op_symbol(&b, &to, &g)?.matrix - &reference)));
        }
    }
    Ok(vec![Output::Json(j.report.clone(), rep)])
}

fn parametrix_cmd(j: Job) -> Outcome<Vec<Output>> {
    let (s, t) = (j.symbol()?, j.tau()?);
    let m = *need(&j.m, "--m")?;
    let r0 = j.r0.unwrap_or(1.0);
    let grid = j.grid()?;
    if j.out.is_some() && grid.is_none() {
        return usage("--out needs --grid");
    }
    let p = parametrix(&s, &t, m, j.order.unwrap_or(2), r0)?;
    let mut rep = json!({
        "kappa": symbol_json(&p.kappa),
        "kappa_kn": symbol_json(&p.kappa_kn),
        "report": p.report,
    });
    let mut outputs = Vec::new();
    if let Some(g) = grid {
        let (lo, hi) = (2.0 * r0, g.band() / 2.0);
        rep["residual"] = json!(band_residual(&p.kappa, &s, &t, &g, lo, hi)?);
        rep["residual_band"] = json!([lo, hi]);
        if let Some(path) = &j.out {
            outputs.push(Output::Matrix(path.clone(), op_symbol(&p.kappa, &t, &g)?));
        }
    }
    outputs.push(Output::Json(j.report.clone(), rep));
    Ok(outputs)
}

fn norm(j: Job) -> Outcome<Vec<Output>> {
    let method = NormMethod::parse(j.method.as_deref().unwrap_or("power"))?;
    let a = operator(&j)?;
    let r = operator_norm(&a, method)?;
    Ok(vec![Output::Json(j.report.clone(), json!(r))])
}

fn cv(j: Job) -> Outcome<Vec<Output>> {
    let bx = match &j.cv_box {
        Some(spec) => {
            let v: Vec<f64> = spec
                .split(',')
                .map(|p| tauquant::discretize::parse_length(p.trim()))
                .collect::<tauquant::Result<_>>()?;
            match v[..] {
                [x, y, k] => CvBox { x, y, k },
                _ => return usage(format!("--box expects x,y,k, got `{spec}`")),
            }
        }
        None => CvBox::default(),
    };
    let samples = j.samples.unwrap_or(1024);
    let r = if j.amplitude.is_some() {
        cv_bound(&j.amplitude()?, j.dim()?, &bx, samples)?
    } else {
        let (s, t) = (j.symbol()?, j.tau()?);
        cv_bound_symbol(&s, &t, &bx, samples)?
    };
    Ok(vec![Output::Json(j.report.clone(), json!(r))])
}

fn garding(j: Job) -> Outcome<Vec<Output>> {
    let (s, t, g) = (j.symbol()?, j.tau()?, j.need_grid()?);
    let m = *need(&j.m, "--m")?;
    let r = garding_check(&s, &t, m, j.s.unwrap_or(0.0), &g)?;
    Ok(vec![Output::Json(j.report.clone(), json!(r))])
}

fn check_tau(j: Job) -> Outcome<Vec<Output>> {
    let t = j.tau()?;
    let r = t.check_admissible(j.halfwidth.unwrap_or(5.0), j.samples.unwrap_or(2000))?;
    Ok(vec![Output::Json(j.report.clone(), json!(r))])
}

fn reduce(j: Job) -> Outcome<Vec<Output>> {
    let a = j.amplitude()?;
    let r = reduce_amplitude(&a, j.n_red.unwrap_or(1), j.dim()?)?;
    Ok(vec![Output::Json(j.report.clone(), json!({ "amplitude": symbol_json(&r) }))])
}

fn changevar(j: Job) -> Outcome<Vec<Output>> {
    let (s, t, g) = (j.symbol()?, j.tau()?, j.need_grid()?);
    let (b0, r) = changevar_leading(&s, &t, &g)?;
    Ok(vec![Output::Json(j.report.clone(), json!({ "b0": symbol_json(&b0), "report": r }))])
}

fn heisenberg(action: HeisAction, j: Job) -> Outcome<Vec<Output>> {
    let variant: Variant = j.group.as_deref().unwrap_or("standard").parse()?;
    let p = HeisPoint::parse(variant, need(&j.point, "--point")?)?;
    let method = match j.method.as_deref().unwrap_or("closed") {
        "closed" => TauMethod::Closed,
        "integral" => TauMethod::Integral,
        other => return usage(format!("unknown method `{other}` (closed, integral)")),
    };
    let mut outputs = Vec::new();
    match action {
        HeisAction::Tau => {
            let t = symmetry_tau(&p, method)?;
            outputs.push(Output::Line(t.to_string()));
        }
        HeisAction::Symcheck => outputs.push(Output::Line(check_symmetry(&p)?.to_string())),
        HeisAction::Midpoint => {
            let q = HeisPoint::parse(variant, need(&j.point2, "--point2")?)?;
            let m = midpoint(&p, &q)?;
            outputs.push(Output::Line(m.point.to_string()));
            if let Some(path) = &j.report {
                outputs.push(Output::Json(Some(path.clone()), json!(m)));
            }
        }
    }
    Ok(outputs)
}
