use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use henon_core::dynamics::{self, EscapeOptions, SliceSpec};
use henon_core::ideal::{self, AnalysisError, MembershipSummary};
use henon_core::input::{composition_to_json, parse_composition_exact, parse_composition_float, InputError};
use henon_core::model::{expected_multiplier_leading, fixed_point_system, span_profile_check, ModelError};
use henon_core::poly::{parse_rational, CancelToken, PolyError};
use henon_core::sampling::{random_composition, SampleSpec};
use henon_core::solver::{self, SolveError, SolveOptions};
use henon_core::{Coeff, GaussRat, HenonComposition};

const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser)]
#[command(name = "henon", version, about = "Fixed points and Green functions of compositions of generalized Hénon maps")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Abort algebraic computations after this many seconds.
    #[arg(long, global = true)]
    timeout_secs: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Composition file (JSON).
    #[arg(long, short)]
    input: PathBuf,
    /// Conjugate so that factor K (1-based) comes first.
    #[arg(long, value_name = "K", default_value_t = 1)]
    rotate: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print the fixed-point system φ_1, …, φ_n.
    System {
        #[command(flatten)]
        input: InputArgs,
        /// One polynomial per line instead of JSON.
        #[arg(long)]
        text: bool,
    },
    /// Check that {φ_1, …, φ_n} is a Gröbner basis.
    Groebner {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Reduce Φ = λ² - λ·tr(M_n) + δ by the system.
    PhiCheck {
        #[command(flatten)]
        input: InputArgs,
        /// Multiplier λ as "re" or "re,im" (rationals); defaults to d.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Reduce (y_1 - α)Φ by the system.
    ShiftedPhiCheck {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value = "0")]
        alpha: String,
    },
    /// Verify the one-step division identity for (y_j - α)((p')^J + h).
    Lemma52 {
        #[command(flatten)]
        input: InputArgs,
        /// Index set J, 1-based, comma separated; defaults to all factors.
        #[arg(long, value_delimiter = ',')]
        set: Vec<usize>,
        /// j ∈ J, 1-based; defaults to the smallest element of J.
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, default_value = "0")]
        alpha: String,
        /// Use h = 0 instead of a random element of H_J.
        #[arg(long)]
        zero_h: bool,
    },
    /// Expand M_n and Φ over the symbols P_j = p_j'(y_j) and check which
    /// products occur.
    Span {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Solve for all fixed points and classify them.
    Fixpoints {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        #[arg(long, default_value_t = 1e-6)]
        cluster_radius: f64,
    },
    /// Group fixed points by multiplier pair over random compositions.
    Prop51Scan {
        /// Scan this composition instead of random samples.
        #[arg(long, short)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        factors: usize,
        #[arg(long, value_delimiter = ',', default_value = "2")]
        degrees: Vec<usize>,
        /// Bound on each |δ_j|; must be at most 1.
        #[arg(long, default_value_t = 0.9)]
        delta_bound: f64,
        #[arg(long, default_value_t = 1e-6)]
        multiplier_tolerance: f64,
    },
    /// Evaluate G⁺ and G⁻ at a point.
    Green {
        #[command(flatten)]
        input: InputArgs,
        /// x_re,x_im,y_re,y_im
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        point: Vec<f64>,
        #[command(flatten)]
        escape: EscapeArgs,
    },
    /// Rasterize G⁺ on a real 2-plane in C².
    Render {
        #[command(flatten)]
        input: InputArgs,
        /// Slice specification (JSON); overrides the flags below.
        #[arg(long)]
        slice: Option<PathBuf>,
        /// Origin x_re,x_im,y_re,y_im.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0,0,0")]
        origin: Vec<f64>,
        /// Which real coordinates the u and v axes follow.
        #[arg(long, value_enum, default_value_t = Plane::XreYre)]
        plane: Plane,
        /// u_min,u_max,v_min,v_max
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-3,3,-3,3")]
        extent: Vec<f64>,
        /// WIDTHxHEIGHT
        #[arg(long, default_value = "64x64")]
        resolution: String,
        #[arg(long)]
        pgm: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        escape: EscapeArgs,
    },
}

#[derive(Args, Clone)]
struct EscapeArgs {
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-10)]
    green_tolerance: f64,
    #[arg(long)]
    escape_radius: Option<f64>,
}

impl EscapeArgs {
    fn options(&self) -> Result<EscapeOptions, CliError> {
        let opts = EscapeOptions {
            max_iterations: self.max_iterations,
            tolerance: self.green_tolerance,
            escape_radius: self.escape_radius,
        };
        opts.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(opts)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Plane {
    /// u = Re x, v = Re y
    XreYre,
    /// u = Re y, v = Im y
    YreYim,
    /// u = Re x, v = Im x
    XreXim,
}

enum CliError {
    Validation(String),
    Internal(String),
    Violation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 1,
            CliError::Violation(_) => 3,
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Poly(PolyError::Cancelled) => CliError::Internal("timed out".into()),
            AnalysisError::IndexSet(_) | AnalysisError::NotInSpan(_) | AnalysisError::Model(_) => {
                CliError::Validation(e.to_string())
            }
            AnalysisError::Poly(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Internal(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T, InputError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn rotated<C: Coeff>(comp: HenonComposition<C>, rotate: usize) -> Result<HenonComposition<C>, CliError> {
    if rotate == 0 || rotate > comp.len() {
        return Err(CliError::Validation(format!("--rotate must be in 1..={}, got {rotate}", comp.len())));
    }
    Ok(comp.rotate(rotate - 1)?)
}

fn load_exact(args: &InputArgs) -> Result<HenonComposition<GaussRat>, CliError> {
    let text = read_file(&args.input)?;
    rotated(with_path(&args.input, parse_composition_exact(&text))?, args.rotate)
}

fn load_float(args: &InputArgs) -> Result<HenonComposition<Complex64>, CliError> {
    let text = read_file(&args.input)?;
    rotated(with_path(&args.input, parse_composition_float(&text))?, args.rotate)
}

fn parse_scalar(name: &str, text: &str) -> Result<GaussRat, CliError> {
    let bad = |e: &dyn std::fmt::Display| CliError::Validation(format!("--{name}: {e}"));
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(GaussRat::real(parse_rational(re).map_err(|e| bad(&e))?)),
        [re, im] => Ok(GaussRat::new(
            parse_rational(re).map_err(|e| bad(&e))?,
            parse_rational(im).map_err(|e| bad(&e))?,
        )),
        _ => Err(bad(&"expected \"re\" or \"re,im\"")),
    }
}

fn point_arg(name: &str, v: &[f64]) -> Result<[Complex64; 2], CliError> {
    match v {
        [a, b, c, d] if v.iter().all(|x| x.is_finite()) => Ok([Complex64::new(*a, *b), Complex64::new(*c, *d)]),
        _ => Err(CliError::Validation(format!("--{name} needs four finite numbers x_re,x_im,y_re,y_im"))),
    }
}

fn input_json(args: &InputArgs) -> Value {
    json!({ "input": args.input.display().to_string(), "rotate": args.rotate })
}

fn report(operation: &str, seed: u64, options: Value, result: Value) -> Value {
    json!({ "operation": operation, "seed": seed, "options": options, "result": result })
}

fn cancel_token(timeout: Option<u64>) -> CancelToken {
    match timeout {
        None => CancelToken::never(),
        Some(secs) => {
            let token = CancelToken::new();
            let t = token.clone();
            std::thread::spawn(move || {
                std::thread::sleep(Duration::from_secs(secs));
                t.cancel();
            });
            token
        }
    }
}

fn sample_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lambda_or_degree(lambda: &Option<String>, comp: &HenonComposition<GaussRat>) -> Result<GaussRat, CliError> {
    match lambda {
        Some(text) => parse_scalar("lambda", text),
        None => Ok(GaussRat::from_i64(comp.degree() as i64)),
    }
}

struct Outcome {
    body: String,
    failure: Option<CliError>,
}

impl Outcome {
    fn json(v: Value) -> Self {
        Outcome {
            body: serde_json::to_string_pretty(&v).expect("json") + "\n",
            failure: None,
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let seed = cli.seed;
    let cancel = cancel_token(cli.timeout_secs);
    match &cli.command {
        Command::System { input, text } => {
            let comp = load_exact(input)?;
            let system: Vec<String> = fixed_point_system(&comp).iter().map(ToString::to_string).collect();
            if *text {
                return Ok(Outcome {
                    body: system.iter().map(|s| format!("{s}\n")).collect(),
                    failure: None,
                });
            }
            Ok(Outcome::json(report(
                "fixed_point_system",
                seed,
                input_json(input),
                json!({
                    "n": comp.len(),
                    "degree": comp.degree(),
                    "jacobian": comp.jacobian().to_string(),
                    "composition": composition_to_json(&comp),
                    "system": system,
                    "warnings": comp.warnings(),
                }),
            )))
        }
        Command::Groebner { input } => {
            let comp = load_exact(input)?;
            let rep = ideal::verify_groebner_system(&comp, &cancel)?;
            Ok(Outcome::json(report(
                "verify_groebner_system",
                seed,
                input_json(input),
                json!({
                    "is_groebner": rep.is_groebner,
                    "pairs_checked": rep.pairs_checked,
                    "failing_pair": rep.failing_pair.map(|(a, b)| [a + 1, b + 1]),
                    "witness_remainder": rep.witness_remainder.map(|p| p.to_string()),
                }),
            )))
        }
        Command::PhiCheck { input, lambda } => {
            let comp = load_exact(input)?;
            let lambda = lambda_or_degree(lambda, &comp)?;
            let rep = ideal::phi_membership(&comp, &lambda, &cancel)?;
            let (lm, lc) = expected_multiplier_leading(&comp, &lambda);
            let mut options = input_json(input);
            options["lambda"] = json!(lambda.to_string());
            Ok(Outcome::json(report(
                "phi_membership",
                seed,
                options,
                json!({
                    "membership": MembershipSummary::from(&rep),
                    "expected_leading_monomial": lm.to_string(),
                    "expected_leading_coefficient": lc.to_string(),
                    "warnings": comp.warnings(),
                }),
            )))
        }
        Command::ShiftedPhiCheck { input, lambda, alpha } => {
            let comp = load_exact(input)?;
            let lambda = lambda_or_degree(lambda, &comp)?;
            let alpha = parse_scalar("alpha", alpha)?;
            let rep = ideal::shifted_phi_membership(&comp, &lambda, &alpha, &cancel)?;
            let mut options = input_json(input);
            options["lambda"] = json!(lambda.to_string());
            options["alpha"] = json!(alpha.to_string());
            Ok(Outcome::json(report(
                "shifted_phi_membership",
                seed,
                options,
                json!({ "membership": MembershipSummary::from(&rep), "warnings": comp.warnings() }),
            )))
        }
        Command::Lemma52 {
            input,
            set,
            index,
            alpha,
            zero_h,
        } => {
            let comp = load_exact(input)?;
            let n = comp.len();
            let set: Vec<usize> = if set.is_empty() { (1..=n).collect() } else { set.clone() };
            if let Some(bad) = set.iter().find(|&&k| k == 0 || k > n) {
                return Err(CliError::Validation(format!("--set: index {bad} not in 1..={n}")));
            }
            let j = index.unwrap_or_else(|| *set.iter().min().expect("nonempty"));
            if j == 0 || j > n {
                return Err(CliError::Validation(format!("--index: {j} not in 1..={n}")));
            }
            let alpha = parse_scalar("alpha", alpha)?;
            let zero_based: Vec<usize> = set.iter().map(|k| k - 1).collect();
            let h = if *zero_h {
                henon_core::ExactPoly::zero(n)
            } else {
                let mut rng = sample_rng(seed);
                ideal::random_span_element(&mut rng, n, &zero_based)
            };
            let rep = ideal::peel_identity_verify(&comp, &zero_based, j - 1, &alpha, &h)?;
            let mut options = input_json(input);
            options["set"] = json!(set);
            options["index"] = json!(j);
            options["alpha"] = json!(alpha.to_string());
            options["zero_h"] = json!(zero_h);
            let p = |poly: &henon_core::ExactPoly| poly.to_text_with("P");
            Ok(Outcome::json(report(
                "peel_identity_verify",
                seed,
                options,
                json!({
                    "h": p(&h),
                    "lhs": rep.lhs.to_string(),
                    "a": rep.a.to_string(),
                    "b": rep.b.to_string(),
                    "eta": rep.eta.to_string(),
                    "mu": rep.mu.to_string(),
                    "rho1": p(&rep.rho1),
                    "rho2": p(&rep.rho2),
                    "difference": rep.difference.to_string(),
                    "identity_holds": rep.identity_holds,
                    "lhs_leading_monomial": rep.lhs_leading.to_string(),
                    "a_phi_leading_monomial": rep.a_phi_leading.to_string(),
                    "leading_match": rep.leading_match,
                }),
            )))
        }
        Command::Span { input, lambda } => {
            let comp = load_exact(input)?;
            let lambda = lambda_or_degree(lambda, &comp)?;
            let rep = span_profile_check(&comp, &lambda);
            let mut options = input_json(input);
            options["lambda"] = json!(lambda.to_string());
            Ok(Outcome::json(report("span_profile_check", seed, options, serde_json::to_value(rep).expect("json"))))
        }
        Command::Fixpoints {
            input,
            tolerance,
            cluster_radius,
        } => {
            if !(*tolerance > 0.0) || !(*cluster_radius > 0.0) {
                return Err(CliError::Validation("--tolerance and --cluster-radius must be positive".into()));
            }
            let comp = load_exact(input)?;
            let opts = SolveOptions {
                tolerance: *tolerance,
                cluster_radius: *cluster_radius,
                seed,
            };
            let records = solver::solve_fixed_points(&comp, &opts)?;
            let total: usize = records.iter().map(|r| r.multiplicity).sum();
            let mut options = input_json(input);
            options["tolerance"] = json!(tolerance);
            options["cluster_radius"] = json!(cluster_radius);
            Ok(Outcome::json(report(
                "solve_fixed_points",
                seed,
                options,
                json!({
                    "degree": comp.degree(),
                    "jacobian": comp.jacobian().to_string(),
                    "total_multiplicity": total,
                    "fixed_points": records,
                }),
            )))
        }
        Command::Prop51Scan {
            input,
            samples,
            factors,
            degrees,
            delta_bound,
            multiplier_tolerance,
        } => grouping_scan(seed, input.as_deref(), *samples, *factors, degrees, *delta_bound, *multiplier_tolerance),
        Command::Green { input, point, escape } => {
            let comp = load_float(input)?;
            let q = point_arg("point", point)?;
            let opts = escape.options()?;
            let gp = dynamics::green_plus(&comp, q, &opts);
            let gm = dynamics::green_minus(&comp, q, &opts);
            let mut options = input_json(input);
            options["point"] = json!(point);
            options["escape"] = serde_json::to_value(opts).expect("json");
            Ok(Outcome::json(report(
                "green",
                seed,
                options,
                json!({
                    "filtration_radius": dynamics::filtration_radius(&comp),
                    "backward_filtration_radius": dynamics::backward_filtration_radius(&comp),
                    "green_plus": gp,
                    "green_plus_tail_ratio": gp.tail_ratio(),
                    "green_minus": gm,
                    "green_minus_tail_ratio": gm.tail_ratio(),
                }),
            )))
        }
        Command::Render {
            input,
            slice,
            origin,
            plane,
            extent,
            resolution,
            pgm,
            csv,
            escape,
        } => {
            let comp = load_float(input)?;
            let opts = escape.options()?;
            let spec = match slice {
                Some(path) => serde_json::from_str::<SliceSpec>(&read_file(path)?).map_err(|e| {
                    CliError::Validation(format!("{}: invalid slice at line {}, column {}: {e}", path.display(), e.line(), e.column()))
                })?,
                None => slice_from_flags(origin, *plane, extent, resolution)?,
            };
            spec.validate().map_err(|e| CliError::Validation(e.to_string()))?;
            let raster = dynamics::render_slice(&comp, &spec, &opts).map_err(|e| CliError::Validation(e.to_string()))?;
            if let Some(path) = pgm {
                fs::write(path, raster.to_pgm()).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
            }
            if let Some(path) = csv {
                fs::write(path, raster.to_csv()).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
            }
            let zeros = raster.values.iter().filter(|&&v| v == 0.0).count();
            let max = raster.values.iter().copied().fold(0.0, f64::max);
            let mut options = input_json(input);
            options["slice"] = serde_json::to_value(&spec).expect("json");
            options["escape"] = serde_json::to_value(opts).expect("json");
            options["pgm"] = json!(pgm.as_ref().map(|p| p.display().to_string()));
            options["csv"] = json!(csv.as_ref().map(|p| p.display().to_string()));
            Ok(Outcome::json(report(
                "render_slice",
                seed,
                options,
                json!({
                    "width": raster.width,
                    "height": raster.height,
                    "zero_pixels": zeros,
                    "max_value": max,
                }),
            )))
        }
    }
}

fn slice_from_flags(origin: &[f64], plane: Plane, extent: &[f64], resolution: &str) -> Result<SliceSpec, CliError> {
    let origin = point_arg("origin", origin)?;
    let extent: [f64; 4] = extent
        .try_into()
        .map_err(|_| CliError::Validation("--extent needs four numbers u_min,u_max,v_min,v_max".into()))?;
    let res = resolution
        .split_once('x')
        .and_then(|(w, h)| Some([w.trim().parse().ok()?, h.trim().parse().ok()?]))
        .ok_or_else(|| CliError::Validation(format!("--resolution: expected WIDTHxHEIGHT, got {resolution:?}")))?;
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let (axis_u, axis_v) = match plane {
        Plane::XreYre => ([one, zero], [zero, one]),
        Plane::YreYim => ([zero, one], [zero, i]),
        Plane::XreXim => ([one, zero], [i, zero]),
    };
    Ok(SliceSpec {
        origin,
        axis_u,
        axis_v,
        extent,
        resolution: res,
    })
}

fn grouping_scan(
    seed: u64,
    input: Option<&Path>,
    samples: usize,
    factors: usize,
    degrees: &[usize],
    delta_bound: f64,
    tolerance: f64,
) -> Result<Outcome, CliError> {
    if !(delta_bound > 0.0 && delta_bound <= 1.0) {
        return Err(CliError::Validation(format!("--delta-bound must be in (0, 1], got {delta_bound}")));
    }
    if factors == 0 || degrees.is_empty() || degrees.iter().any(|&d| d < 2) {
        return Err(CliError::Validation("--factors must be positive and every degree at least 2".into()));
    }
    let mut notes = Vec::new();
    let comps: Vec<HenonComposition<GaussRat>> = match input {
        Some(path) => {
            let mut comp = with_path(path, parse_composition_exact(&read_file(path)?))?;
            if comp.len() == 1 {
                comp = comp.repeated(3);
                notes.push("single-factor input cubed: scanning f∘f∘f".to_string());
            }
            vec![comp]
        }
        None => {
            let mut rng = sample_rng(seed);
            let spec = SampleSpec {
                factors,
                degrees: degrees.to_vec(),
                delta_bound,
                ..SampleSpec::default()
            };
            (0..samples).map(|_| random_composition(&mut rng, &spec)).collect()
        }
    };
    let results: Vec<Value> = comps
        .par_iter()
        .enumerate()
        .map(|(k, comp)| {
            let opts = SolveOptions {
                seed: seed.wrapping_add(k as u64),
                ..SolveOptions::default()
            };
            match solver::scan_multiplier_grouping(comp, &opts, tolerance) {
                Ok((records, rep)) => json!({
                    "sample": k + 1,
                    "composition": composition_to_json(comp),
                    "fixed_points": records.len(),
                    "report": rep,
                }),
                Err(e) => json!({
                    "sample": k + 1,
                    "composition": composition_to_json(comp),
                    "error": e.to_string(),
                }),
            }
        })
        .collect();
    let field = |v: &Value, k: &str| v["report"][k].clone();
    let applicable = results.iter().filter(|v| field(v, "applicable") == json!(true)).count();
    let violations = results.iter().filter(|v| field(v, "violation") == json!(true)).count();
    let errors = results.iter().filter(|v| v.get("error").is_some()).count();
    let max_group = results.iter().filter_map(|v| field(v, "largest_group").as_u64()).max();
    let options = json!({
        "input": input.map(|p| p.display().to_string()),
        "samples": samples,
        "factors": factors,
        "degrees": degrees,
        "delta_bound": delta_bound,
        "multiplier_tolerance": tolerance,
    });
    let body = report(
        "scan_multiplier_grouping",
        seed,
        options,
        json!({
            "notes": notes,
            "scanned": results.len(),
            "applicable": applicable,
            "inapplicable": results.len() - applicable - errors,
            "solver_failures": errors,
            "violations": violations,
            "max_group_size": max_group,
            "samples": results,
        }),
    );
    let mut out = Outcome::json(body);
    if violations > 0 {
        out.failure = Some(CliError::Violation(format!("{violations} sample(s) violate the multiplier-group bound")));
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run(&cli).and_then(|out| {
        match &cli.output {
            Some(path) => {
                fs::write(path, &out.body).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?
            }
            None => print!("{}", out.body),
        }
        match out.failure {
            Some(f) => Err(f),
            None => Ok(()),
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (kind, msg) = match &e {
                CliError::Validation(m) => ("invalid input", m),
                CliError::Internal(m) => ("error", m),
                CliError::Violation(m) => ("violation", m),
            };
            eprintln!("henon: {kind}: {msg}");
            ExitCode::from(e.code())
        }
    }
}
