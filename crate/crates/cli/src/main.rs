//! Command-line front end: parses a run configuration, dispatches to the
//! library and emits JSON or CSV.
//!
//! Exit status: 0 on success, 1 on input or domain errors, 2 on numerical
//! solver failures. Errors are printed to stderr as one line of JSON.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{Emitter, Format};
use serde_json::json;
use shadowrt::asympt::{verify, AngleSpec, VerifyOptions};
use shadowrt::filling::{dual_slope, neg_cf, rt_filled, SurgeryPresentation};
use shadowrt::fsl::{rt_fsl, Finding, FslPresentation};
use shadowrt::geometry::{find_critical_point, torsion, SolverOptions, SystemPotential};
use shadowrt::qarith::{Precision, RootContext};
use shadowrt::sixj::{cached_evaluator, SixjEvaluator};
use shadowrt::Error;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

/// Entries kept by the 6j cache of each run.
const CACHE_CAPACITY: usize = 1 << 16;

#[derive(Parser, Debug)]
#[command(
    name = "shadowrt",
    version,
    about = "Relative RT invariants of fundamental shadow links and their asymptotics"
)]
struct Cli {
    /// Worker threads for parallel sums (default: all cores).
    #[arg(long, global = true, env = "SHADOWRT_THREADS")]
    threads: Option<usize>,

    /// Accumulator precision for log-space sums.
    #[arg(long, global = true, value_enum, default_value_t = PrecisionArg::Double)]
    precision: PrecisionArg,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantum 6j-symbol at q = exp(2πi/r).
    Sixj {
        #[arg(long)]
        r: i64,
        /// Six even colors.
        #[arg(long, value_delimiter = ',', required = true)]
        colors: Vec<u32>,
        #[arg(long, default_value = "sum")]
        method: String,
    },
    /// Invariant of the unfilled fundamental shadow link.
    RtFsl {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: i64,
        /// One even color per component.
        #[arg(long, value_delimiter = ',')]
        colors: Vec<u32>,
        #[arg(long, default_value = "sum")]
        method: String,
    },
    /// Invariant of the filled pair described by the presentation's surgery.
    RtFilled {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: i64,
        /// One even color per component, in component order.
        #[arg(long, value_delimiter = ',')]
        colors: Vec<u32>,
        #[arg(long, default_value = "sum")]
        method: String,
    },
    /// Negative continued fraction and dual slope of p/q.
    Cf {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_slope)]
        slope: (i64, i64),
    },
    /// Critical point of the potential: volume, Chern-Simons value, holonomies.
    GeomSolve(GeomArgs),
    /// Adjoint twisted torsion at the geometric solution.
    Torsion(GeomArgs),
    /// Invariant sequence over a range of r compared with the prediction.
    Verify {
        #[command(flatten)]
        geom: GeomArgs,
        #[arg(long)]
        r_min: u32,
        #[arg(long)]
        r_max: u32,
        #[arg(long, default_value = "sum")]
        method: String,
    },
}

#[derive(Args, Debug)]
struct GeomArgs {
    #[arg(long)]
    input: PathBuf,
    /// Target angle (β on filled, α on unfilled components) in radians, one
    /// per component; overrides --cone-angle.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    /// Common cone angle θ; every target is set to π + θ/2.
    #[arg(long, default_value_t = 0.1)]
    cone_angle: f64,
    /// Signs E_i (±1), one per filled component; default all +1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    signs: Option<Vec<i8>>,
    /// Solve outside the small-angle gate.
    #[arg(long)]
    force: bool,
}

fn parse_slope(s: &str) -> Result<(i64, i64), String> {
    let (p, q) = s.split_once('/').ok_or_else(|| format!("slope {s:?} is not of the form p/q"))?;
    let p = p.trim().parse::<i64>().map_err(|e| format!("numerator: {e}"))?;
    let q = q.trim().parse::<i64>().map_err(|e| format!("denominator: {e}"))?;
    Ok((p, q))
}

/// Failure of a run, classified for the exit status.
enum Failure {
    Lib(Error),
    Schema(Vec<Finding>),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_solver_failure() => 2,
            _ => 1,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Failure::Lib(e) => {
                let mut v = json!({ "error": e.code(), "message": e.to_string() });
                if let Error::Parse { line, column, .. } = e {
                    v["line"] = json!(line);
                    v["column"] = json!(column);
                }
                v
            }
            Failure::Schema(findings) => json!({
                "error": "invalid_presentation",
                "code": findings[0].code(),
                "path": findings[0].path(),
                "message": findings[0].to_string(),
                "findings": findings.iter().map(|f| json!({"code": f.code(), "path": f.path()})).collect::<Vec<_>>(),
            }),
            Failure::Usage(msg) => json!({ "error": "usage", "message": msg }),
        }
    }
}

type RunResult = Result<(), Failure>;

fn load(path: &PathBuf) -> Result<FslPresentation, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let p = FslPresentation::from_json(&text)?;
    let errors: Vec<Finding> = p.validate().into_iter().filter(|f| !f.is_warning()).collect();
    if !errors.is_empty() {
        return Err(Failure::Schema(errors));
    }
    Ok(p)
}

fn evaluator(method: &str, precision: Precision) -> Result<Arc<dyn SixjEvaluator>, Failure> {
    Ok(cached_evaluator(method, precision, CACHE_CAPACITY)?)
}

fn angles(args: &GeomArgs, p: &FslPresentation) -> Result<AngleSpec, Failure> {
    let targets = match &args.angles {
        Some(a) if a.len() != p.n => {
            return Err(Failure::Usage(format!("expected {} angles, got {}", p.n, a.len())))
        }
        Some(a) => a.clone(),
        None => vec![PI + args.cone_angle / 2.0; p.n],
    };
    Ok(AngleSpec { targets })
}

fn signs(args: &GeomArgs, s: &SurgeryPresentation) -> Result<Vec<i8>, Failure> {
    let e = args.signs.clone().unwrap_or_else(|| vec![1; s.filled.len()]);
    if e.len() != s.filled.len() || e.iter().any(|&x| x != 1 && x != -1) {
        return Err(Failure::Usage(format!("expected {} signs of ±1, got {:?}", s.filled.len(), e)));
    }
    Ok(e)
}

fn solver_options(args: &GeomArgs) -> SolverOptions {
    SolverOptions { force: args.force, ..SolverOptions::default() }
}

/// Splits per-component colors into filled and unfilled lists.
fn split_colors(
    p: &FslPresentation,
    s: &SurgeryPresentation,
    colors: &[u32],
) -> Result<(Vec<u32>, Vec<u32>), Failure> {
    if colors.len() != p.n {
        return Err(Failure::Usage(format!("expected {} colors, got {}", p.n, colors.len())));
    }
    let n_i = s.filled.iter().map(|&i| colors[i]).collect();
    let m_j = s.unfilled(p.n).iter().map(|&j| colors[j]).collect();
    Ok((n_i, m_j))
}

fn run(cli: &Cli) -> RunResult {
    let precision: Precision = cli.precision.into();
    let out = Emitter::new(cli.format, cli.output.clone());
    match &cli.command {
        Command::Sixj { r, colors, method } => {
            let ctx = RootContext::new(*r)?;
            let m: [u32; 6] =
                colors.as_slice().try_into().map_err(|_| Failure::Usage("need six colors".into()))?;
            let v = evaluator(method, precision)?.evaluate(&ctx, m)?;
            out.value(json!({ "r": r, "colors": colors, "method": method }), v)?;
        }
        Command::RtFsl { input, r, colors, method } => {
            let p = load(input)?;
            let ctx = RootContext::new(*r)?;
            let v = rt_fsl(&ctx, &p, colors, evaluator(method, precision)?.as_ref())?;
            out.value(json!({ "r": r, "colors": colors, "method": method }), v)?;
        }
        Command::RtFilled { input, r, colors, method } => {
            let p = load(input)?;
            let s = SurgeryPresentation::from_presentation(&p)?;
            let ctx = RootContext::new(*r)?;
            let (n_i, m_j) = split_colors(&p, &s, colors)?;
            let eval = evaluator(method, precision)?;
            let v = rt_filled(&ctx, &p, &s, &n_i, &m_j, eval.as_ref(), precision)?;
            out.value(
                json!({ "r": r, "colors": colors, "method": method, "warnings": v.warnings }),
                v.value,
            )?;
        }
        Command::Cf { slope: (p, q) } => {
            let d = dual_slope(*p, *q)?;
            let a = neg_cf(*p, *q)?;
            out.record(&json!({
                "p": p, "q": q, "expansion": a, "p_prime": d.p_prime, "q_prime": d.q_prime,
            }))?;
        }
        Command::GeomSolve(args) | Command::Torsion(args) => {
            let p = load(&args.input)?;
            let s = SurgeryPresentation::from_presentation(&p)?;
            let spec = angles(args, &p)?;
            let g = SystemPotential::new(&p, &s, signs(args, &s)?, spec.cone(&s))?;
            let sol = find_critical_point(&g, &solver_options(args))?;
            if matches!(cli.command, Command::Torsion(_)) {
                let t = torsion(&g, &sol)?;
                out.torsion(&sol, &t)?;
            } else {
                out.solution(&sol, &s)?;
            }
        }
        Command::Verify { geom, r_min, r_max, method } => {
            if r_min > r_max {
                return Err(Failure::Usage(format!("--r-min {r_min} exceeds --r-max {r_max}")));
            }
            let p = load(&geom.input)?;
            let s = SurgeryPresentation::from_presentation(&p)?;
            let spec = angles(geom, &p)?;
            let first = (*r_min).max(5) | 1;
            let rs: Vec<u32> = (first..=*r_max).step_by(2).collect();
            let opts = VerifyOptions { solver: solver_options(geom), precision, ..VerifyOptions::default() };
            let eval = evaluator(method, precision)?;
            let rep = verify(&p, &s, &signs(geom, &s)?, &spec, &rs, eval.as_ref(), &opts)?;
            out.report(&rep)?;
        }
    }
    Ok(())
}

fn fail(f: &Failure) -> ExitCode {
    eprintln!("{}", f.to_json());
    ExitCode::from(f.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return fail(&Failure::Usage(first.to_string()));
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return fail(&Failure::Usage("--threads must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&Failure::Usage(format!("thread pool: {e}")));
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => fail(&f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_parsing() {
        assert_eq!(parse_slope("5/3"), Ok((5, 3)));
        assert_eq!(parse_slope("-7 / 2"), Ok((-7, 2)));
        assert!(parse_slope("5").is_err());
        assert!(parse_slope("a/3").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
