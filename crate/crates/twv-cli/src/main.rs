//! `twv`: twisted Alexander invariants of knot and link groups under
//! symmetric-power lifts of parabolic SL(2,ℂ) representations, and the
//! hyperbolic volume estimates they carry.
//!
//! Subcommands: `verify` (check a document), `invariant` (print polynomials
//! or a value), `volume` (estimator series with table and CSV output), and
//! `examples` (built-in inputs). Exit codes are stable: 0 success, 1
//! mathematical failure, 2 input or schema failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use twistvol::document::{InputDocument, ResolvedDocument, RunConfig};
use twistvol::fixtures;
use twistvol::invariant::{limit_value, twisted_invariant};
use twistvol::laurent::{try_divide_exact, LaurentPoly};
use twistvol::rep::{lift_rep, verify_rep, SignAssignment};
use twistvol::scalar::{Complex, Dd, Real};
use twistvol::volume::{
    assemble_row, float_deflation_tolerance, float_point_value, run_series_auto,
    run_series_float, Mode, RowStatus, SeriesResult, SeriesSpec,
};
use twistvol::words::validate_presentation;

/// Exit code for mathematical failures (residuals, degenerate values).
const EXIT_MATH: u8 = 1;
/// Exit code for input and schema failures.
const EXIT_INPUT: u8 = 2;

/// Default residual tolerance for representation verification.
const VERIFY_TOLERANCE: f64 = 1e-9;

/// Relative threshold below which a printed coefficient part is dropped as
/// floating-point noise.
const PRINT_NOISE: f64 = 1e-9;

#[derive(Parser)]
#[command(
    name = "twv",
    version,
    about = "Twisted Alexander invariants and hyperbolic volume estimates \
             for knot and link groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a document: schema, presentation, and representation residuals.
    Verify(VerifyArgs),
    /// Print a twisted invariant's polynomials or its value at a point.
    Invariant(InvariantArgs),
    /// Run a volume-estimate series over lift degrees.
    Volume(VolumeArgs),
    /// List built-in examples or write their input documents.
    Examples(ExamplesArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Input document path, or a built-in example name.
    input: String,
    /// Lift degree to verify at.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Sign assignment, one +/- per component (default: document's, else all +).
    #[arg(long)]
    signs: Option<String>,
    /// Residual tolerance.
    #[arg(long, default_value_t = VERIFY_TOLERANCE)]
    tolerance: f64,
    /// Scalar backend: auto, f64, or dd (default: TWV_PRECISION, else auto).
    #[arg(long)]
    precision: Option<String>,
}

#[derive(Args)]
struct InvariantArgs {
    /// Input document path, or a built-in example name.
    input: String,
    /// Lift degree (1 prints the untwisted case through the same pipeline).
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Sign assignment, one +/- per component (default: document's, else all +).
    #[arg(long)]
    signs: Option<String>,
    /// What to print: `poly` (numerator and denominator) or `value`.
    #[arg(long, default_value = "poly")]
    print: String,
    /// Evaluation point for `--print value`: `1`, `-1`, a decimal, `re,im`,
    /// or `unit:FRAC` for exp(2πi·FRAC).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    at: String,
    /// Scalar backend: auto, f64, or dd (default: TWV_PRECISION, else auto).
    #[arg(long)]
    precision: Option<String>,
}

#[derive(Args)]
struct VolumeArgs {
    /// Input document path, or a built-in example name.
    input: String,
    /// Largest lift degree (default: document's run config, else 30).
    #[arg(long)]
    nmax: Option<usize>,
    /// Degree parity: even, odd, or both.
    #[arg(long)]
    parity: Option<String>,
    /// Evaluation point: `1`, `-1`, or (with --exploratory) a decimal,
    /// `re,im`, or `unit:FRAC` for exp(2πi·FRAC).
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
    /// Value-extraction mode: ratio, plain, or tilde.
    #[arg(long)]
    mode: Option<String>,
    /// Sign assignment, one +/- per component (default: document's, else all +).
    #[arg(long)]
    signs: Option<String>,
    /// Append a sequence-accelerated extrapolation row.
    #[arg(long)]
    accel: bool,
    /// Scalar backend: auto, f64, or dd (default: TWV_PRECISION, else auto).
    #[arg(long)]
    precision: Option<String>,
    /// Also write the series as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Allow evaluation points other than t = ±1. Convergence to the volume
    /// is only established at ±1; other points are conjectural territory.
    #[arg(long)]
    exploratory: bool,
}

#[derive(Args)]
struct ExamplesArgs {
    #[command(subcommand)]
    action: ExamplesCmd,
}

#[derive(Subcommand)]
enum ExamplesCmd {
    /// List the built-in examples.
    List,
    /// Write an example's input documents (all branches) as .twv files.
    Emit {
        /// Example name, e.g. `figure8`.
        name: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
}

/// A command failure: the exit code plus a message for stderr.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn math_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_MATH,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Cmd::Verify(args) => cmd_verify(&args),
        Cmd::Invariant(args) => cmd_invariant(&args),
        Cmd::Volume(args) => cmd_volume(&args),
        Cmd::Examples(args) => cmd_examples(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing.
// ---------------------------------------------------------------------------

/// Scalar backend selection.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Precision {
    Auto,
    F64,
    DoubleDouble,
}

impl Precision {
    fn parse(s: &str) -> Result<Precision, Failure> {
        match s {
            "auto" => Ok(Precision::Auto),
            "f64" => Ok(Precision::F64),
            "dd" => Ok(Precision::DoubleDouble),
            other => Err(input_error(format!(
                "unknown precision `{other}` (auto|f64|dd)"
            ))),
        }
    }
}

/// Resolves the precision from flag, document config, environment, default.
fn pick_precision(flag: &Option<String>, config: &Option<RunConfig>) -> Result<Precision, Failure> {
    if let Some(s) = flag {
        return Precision::parse(s);
    }
    if let Some(s) = config.as_ref().and_then(|c| c.precision.as_deref()) {
        return Precision::parse(s);
    }
    match std::env::var("TWV_PRECISION") {
        Ok(v) => match v.as_str() {
            "f64" => Ok(Precision::F64),
            "dd" => Ok(Precision::DoubleDouble),
            other => Err(input_error(format!(
                "TWV_PRECISION must be `f64` or `dd`, got `{other}`"
            ))),
        },
        Err(_) => Ok(Precision::Auto),
    }
}

/// Loads a document from a file path, a built-in example name, or a built-in
/// document stem (e.g. `figure8-conj`).
fn load_document(input: &str) -> Result<InputDocument, Failure> {
    for fixture in fixtures::all() {
        for (stem, doc) in fixture.documents {
            if stem == input {
                return Ok(doc);
            }
        }
    }
    let text = std::fs::read_to_string(input).map_err(|e| {
        let names: Vec<String> = fixtures::all()
            .iter()
            .flat_map(|f| f.documents.iter().map(|(s, _)| s.clone()))
            .collect();
        input_error(format!(
            "cannot read `{input}`: {e} (and it is not a built-in example: {})",
            names.join(", ")
        ))
    })?;
    InputDocument::parse(&text).map_err(|e| input_error(e.to_string()))
}

/// Resolves a document at precision `R`, mapping failures to input errors.
fn resolve<R: Real>(doc: &InputDocument) -> Result<ResolvedDocument<R>, Failure> {
    doc.resolve::<R>().map_err(|e| input_error(e.to_string()))
}

/// Applies a `--signs` override against the resolved default.
fn pick_signs(
    resolved_default: &SignAssignment,
    flag: &Option<String>,
    components: usize,
) -> Result<SignAssignment, Failure> {
    match flag {
        None => Ok(resolved_default.clone()),
        Some(s) => {
            let parsed = SignAssignment::parse(s).map_err(|e| input_error(e.to_string()))?;
            if parsed.len() != components {
                return Err(input_error(format!(
                    "sign string `{s}` covers {} components, input has {components}",
                    parsed.len()
                )));
            }
            Ok(parsed)
        }
    }
}

/// An evaluation point: one of the two theorem-backed points, or elsewhere.
enum PointSpec {
    PlusOne,
    MinusOne,
    Other(f64, f64),
}

impl PointSpec {
    fn parse(text: &str) -> Result<PointSpec, Failure> {
        let t = text.trim();
        match t {
            "1" | "+1" => return Ok(PointSpec::PlusOne),
            "-1" => return Ok(PointSpec::MinusOne),
            _ => {}
        }
        if let Some(frac) = t.strip_prefix("unit:") {
            let f = f64::parse_decimal(frac)
                .ok_or_else(|| input_error(format!("`{frac}` is not a decimal fraction")))?;
            let z = Complex::<f64>::unit_at(f);
            return Ok(PointSpec::Other(z.re, z.im));
        }
        if let Some((re, im)) = t.split_once(',') {
            let re = f64::parse_decimal(re.trim())
                .ok_or_else(|| input_error(format!("`{re}` is not a decimal literal")))?;
            let im = f64::parse_decimal(im.trim())
                .ok_or_else(|| input_error(format!("`{im}` is not a decimal literal")))?;
            return Ok(PointSpec::Other(re, im));
        }
        let re = f64::parse_decimal(t).ok_or_else(|| {
            input_error(format!(
                "cannot parse point `{t}` (use 1, -1, a decimal, re,im, or unit:FRAC)"
            ))
        })?;
        if re == 1.0 {
            Ok(PointSpec::PlusOne)
        } else if re == -1.0 {
            Ok(PointSpec::MinusOne)
        } else {
            Ok(PointSpec::Other(re, 0.0))
        }
    }

    fn at<R: Real>(&self) -> Complex<R> {
        match *self {
            PointSpec::PlusOne => Complex::from_f64(1.0, 0.0),
            PointSpec::MinusOne => Complex::from_f64(-1.0, 0.0),
            PointSpec::Other(re, im) => Complex::from_f64(re, im),
        }
    }
}

/// Formats a float with `digits` significant digits; plain decimal in a
/// readable magnitude range, scientific outside it.
fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if mag < -4 || mag > 15 {
        return format!("{x:.*e}", digits - 1);
    }
    let dec = (digits as i32 - 1 - mag).max(0) as usize;
    format!("{x:.dec$}")
}

/// `"s"` when a count is not 1.
fn plural(count: usize) -> &'static str {
    if count == 1 {
        ""
    } else {
        "s"
    }
}

/// CSV-escapes a field (quotes when separators or quotes appear).
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let doc = load_document(&args.input)?;
    let precision = pick_precision(&args.precision, &doc.config)?;
    match precision {
        Precision::DoubleDouble => verify_at::<Dd>(&doc, args),
        _ => verify_at::<f64>(&doc, args),
    }
}

fn verify_at<R: Real>(doc: &InputDocument, args: &VerifyArgs) -> Result<(), Failure> {
    let r = resolve::<R>(doc)?;
    let signs = pick_signs(&r.signs, &args.signs, r.presentation.component_count)?;
    println!(
        "document: {} ({} generator{}, {} relator{}, {} component{})",
        doc.name,
        r.presentation.generators.len(),
        plural(r.presentation.generators.len()),
        r.presentation.relators.len(),
        plural(r.presentation.relators.len()),
        r.presentation.component_count,
        plural(r.presentation.component_count)
    );
    for w in &r.warnings {
        println!("warning: {w}");
    }
    let validation = validate_presentation(&r.presentation, &r.alpha);
    println!("presentation checks:\n{validation}");
    let lifted = lift_rep(args.n, &r.presentation, &r.rep, &signs)
        .map_err(|e| input_error(e.to_string()))?;
    let report = verify_rep(&r.presentation, &lifted, args.tolerance);
    println!(
        "representation at degree {} (signs {signs}, {}): {report}",
        args.n,
        R::NAME
    );
    if validation.passed() && report.passed() {
        println!("verify: pass");
        Ok(())
    } else {
        Err(math_error("verification failed; see the report above"))
    }
}

// ---------------------------------------------------------------------------
// invariant
// ---------------------------------------------------------------------------

fn cmd_invariant(args: &InvariantArgs) -> Result<(), Failure> {
    let doc = load_document(&args.input)?;
    let precision = pick_precision(&args.precision, &doc.config)?;
    match precision {
        Precision::DoubleDouble => invariant_at::<Dd>(&doc, args),
        _ => invariant_at::<f64>(&doc, args),
    }
}

fn invariant_at<R: Real>(doc: &InputDocument, args: &InvariantArgs) -> Result<(), Failure> {
    let r = resolve::<R>(doc)?;
    let signs = pick_signs(&r.signs, &args.signs, r.presentation.component_count)?;
    let lifted = lift_rep(args.n, &r.presentation, &r.rep, &signs)
        .map_err(|e| input_error(e.to_string()))?;
    let inv = twisted_invariant(&r.presentation, &r.alpha, &lifted)
        .map_err(|e| math_error(e.to_string()))?;
    println!(
        "{}: degree {}, signs {signs}, scalar {}",
        doc.name,
        args.n,
        R::NAME
    );
    match args.print.as_str() {
        "poly" => {
            println!(
                "numerator:   {}",
                format_poly(&unit_normalized(&inv.numerator))
            );
            println!(
                "denominator: {}",
                format_poly(&unit_normalized(&inv.denominator))
            );
            let tol = float_deflation_tolerance::<R>();
            match try_divide_exact(&inv.numerator, &inv.denominator, tol) {
                Some(q) => println!(
                    "invariant:   {} (exact quotient)",
                    format_poly(&unit_normalized(&q))
                ),
                None => println!(
                    "invariant:   numerator/denominator (no exact polynomial quotient)"
                ),
            }
            println!(
                "(unit-normalized: lowest exponent 0, leading coefficient \
                 positive; everything is defined up to a unit ±t^p)"
            );
            Ok(())
        }
        "value" => {
            let point = PointSpec::parse(&args.at)?;
            let at: Complex<R> = point.at();
            let tol = float_deflation_tolerance::<R>();
            let v = limit_value(&inv.numerator, &inv.denominator, at, tol)
                .map_err(|e| math_error(e.to_string()))?;
            println!(
                "value at t = {}: {} (zero order {})",
                args.at.trim(),
                format_complex(v.value.re.to_f64(), v.value.im.to_f64()),
                v.zero_order
            );
            let modulus = v.value.abs().to_f64();
            println!(
                "|value| = {}, log|value| = {}",
                fmt_num(modulus),
                fmt_num(v.value.ln_abs_f64())
            );
            println!("(defined up to ±t^p; the modulus is canonical on |t| = 1)");
            Ok(())
        }
        other => Err(input_error(format!(
            "unknown print form `{other}` (poly|value)"
        ))),
    }
}

/// Shifts the lowest exponent to 0 and flips the sign so the leading (highest
/// exponent) coefficient has positive real part, falling back to positive
/// imaginary part when the real part is negligible.
fn unit_normalized<R: Real>(p: &LaurentPoly<R>) -> LaurentPoly<R> {
    if p.is_zero() {
        return LaurentPoly::zero();
    }
    let shifted = p.shift(-p.lo());
    let lead = shifted.coeff(shifted.hi());
    let (re, im, mag) = (lead.re.to_f64(), lead.im.to_f64(), lead.abs().to_f64());
    let negate = if re.abs() > PRINT_NOISE * mag {
        re < 0.0
    } else {
        im < 0.0
    };
    if negate {
        shifted.neg()
    } else {
        shifted
    }
}

/// Formats one float for display: noise-trimmed 12 significant digits.
fn fmt_num(x: f64) -> String {
    let s = sig(x, 12);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Formats a complex number like `3`, `-2i`, or `(4+2i)`.
fn format_complex(re: f64, im: f64) -> String {
    let mag = (re * re + im * im).sqrt();
    let re_live = re.abs() > PRINT_NOISE * mag && mag > 0.0;
    let im_live = im.abs() > PRINT_NOISE * mag && mag > 0.0;
    match (re_live, im_live) {
        (_, false) => fmt_num(re),
        (false, true) => format!("{}i", fmt_num(im)),
        (true, true) => {
            let sign = if im < 0.0 { "-" } else { "+" };
            format!("({}{sign}{}i)", fmt_num(re), fmt_num(im.abs()))
        }
    }
}

/// Formats a Laurent polynomial in descending powers of `t`.
fn format_poly<R: Real>(p: &LaurentPoly<R>) -> String {
    let cleaned = p.clamp(R::from_f64(
        p.max_coeff_abs().to_f64() * PRINT_NOISE * 1e-1,
    ));
    if cleaned.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for exp in (cleaned.lo()..=cleaned.hi()).rev() {
        let c = cleaned.coeff(exp);
        if c.is_zero() {
            continue;
        }
        let (re, im) = (c.re.to_f64(), c.im.to_f64());
        let mag = c.abs().to_f64();
        let re_live = re.abs() > PRINT_NOISE * mag;
        let im_live = im.abs() > PRINT_NOISE * mag;
        // Pure real or pure imaginary coefficients carry their sign into the
        // separator; mixed coefficients print inside parentheses.
        let (negative, body) = match (re_live, im_live) {
            (true, true) => (false, format_complex(re, im)),
            (false, true) => (im < 0.0, format!("{}i", fmt_num(im.abs()))),
            _ => (re < 0.0, fmt_num(re.abs())),
        };
        let body = match (body.as_str(), exp) {
            (_, 0) => body,
            ("1", 1) => "t".to_string(),
            ("1", _) => format!("t^{exp}"),
            (_, 1) => format!("{body}t"),
            _ => format!("{body}t^{exp}"),
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
            out.push_str(&body);
        } else {
            out.push_str(if negative { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// volume
// ---------------------------------------------------------------------------

fn cmd_volume(args: &VolumeArgs) -> Result<(), Failure> {
    let doc = load_document(&args.input)?;
    let config = doc.config.clone();
    let precision = pick_precision(&args.precision, &config)?;
    let pick = |flag: &Option<String>, from_config: Option<&String>| -> Option<String> {
        flag.clone().or_else(|| from_config.cloned())
    };

    let nmax = args
        .nmax
        .or(config.as_ref().and_then(|c| c.n_max))
        .unwrap_or(30);
    if nmax < 2 {
        return Err(input_error("nmax must be at least 2"));
    }
    let parity = pick(&args.parity, config.as_ref().and_then(|c| c.parity.as_ref()))
        .unwrap_or_else(|| "both".to_string());
    let n_values: Vec<usize> = (2..=nmax)
        .filter(|n| match parity.as_str() {
            "both" => true,
            "even" => n % 2 == 0,
            "odd" => n % 2 == 1,
            _ => true,
        })
        .collect();
    match parity.as_str() {
        "both" | "even" | "odd" => {}
        other => {
            return Err(input_error(format!(
                "unknown parity `{other}` (even|odd|both)"
            )))
        }
    }
    let mode_text = pick(&args.mode, config.as_ref().and_then(|c| c.mode.as_ref()))
        .unwrap_or_else(|| "ratio".to_string());
    let mode = Mode::from_str(&mode_text).map_err(input_error)?;
    let at_text = pick(&args.at, config.as_ref().and_then(|c| c.point.as_ref()))
        .unwrap_or_else(|| "1".to_string());
    let point = PointSpec::parse(&at_text)?;

    let resolved = resolve::<f64>(&doc)?;
    let signs = pick_signs(&resolved.signs, &args.signs, resolved.presentation.component_count)?;

    let (result, point_label) = match point {
        PointSpec::PlusOne | PointSpec::MinusOne => {
            let p = if matches!(point, PointSpec::PlusOne) { 1 } else { -1 };
            let spec = SeriesSpec {
                n_values,
                signs: signs.clone(),
                mode,
                point: p,
                accel: args.accel,
            };
            let result = match precision {
                Precision::Auto => {
                    let images: Vec<_> = (0..resolved.presentation.generators.len())
                        .map(|g| resolved.rep.image(g).clone())
                        .collect();
                    run_series_auto(&resolved.presentation, &resolved.alpha, &images, &spec)
                        .map_err(|e| input_error(e.to_string()))?
                }
                Precision::F64 => run_series_float(
                    &resolved.presentation,
                    &resolved.alpha,
                    &resolved.rep,
                    &spec,
                ),
                Precision::DoubleDouble => {
                    let rdd = resolve::<Dd>(&doc)?;
                    run_series_float(&rdd.presentation, &rdd.alpha, &rdd.rep, &spec)
                }
            };
            (result, p.to_string())
        }
        PointSpec::Other(re, im) => {
            if !args.exploratory {
                return Err(input_error(format!(
                    "point `{at_text}` is not ±1; convergence is only established \
                     at t = ±1 — pass --exploratory to evaluate there anyway"
                )));
            }
            println!(
                "conjectural: estimates at t = {at_text} are exploratory; the \
                 convergence statement covers t = ±1 only"
            );
            let result = match precision {
                Precision::DoubleDouble => {
                    let rdd = resolve::<Dd>(&doc)?;
                    exploratory_series::<Dd>(&rdd, &signs, &n_values, mode, re, im, args.accel)
                }
                _ => exploratory_series::<f64>(&resolved, &signs, &n_values, mode, re, im, args.accel),
            };
            (result, at_text.clone())
        }
    };

    print_series(&doc.name, mode, &point_label, &result, args.accel);
    if let Some(path) = &args.csv {
        let csv = series_csv(&result, &point_label);
        std::fs::write(path, csv)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
        println!("csv written: {}", path.display());
    }
    if result.rows.iter().any(|r| r.status.is_ok()) {
        Ok(())
    } else {
        Err(math_error("no series row succeeded"))
    }
}

/// Runs an exploratory series at an off-±1 point on the floating pipeline.
fn exploratory_series<R: Real>(
    r: &ResolvedDocument<R>,
    signs: &SignAssignment,
    n_values: &[usize],
    mode: Mode,
    re: f64,
    im: f64,
    accel: bool,
) -> SeriesResult {
    let at = Complex::<R>::from_f64(re, im);
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let start = Instant::now();
        let outcome = float_point_value(
            &r.presentation,
            &r.alpha,
            &r.rep,
            signs,
            n,
            mode,
            at,
        );
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        rows.push(assemble_row(
            n,
            signs.to_string(),
            mode,
            0,
            outcome,
            runtime_ms,
        ));
    }
    let accelerated = if accel {
        let finite: Vec<f64> = rows
            .iter()
            .filter(|r| r.status.is_ok() && r.estimator.is_finite())
            .map(|r| r.estimator)
            .collect();
        twistvol::volume::aitken(&finite)
    } else {
        None
    };
    SeriesResult {
        engine: R::NAME,
        rows,
        accelerated,
    }
}

/// Prints the series table in 6-significant-digit style.
fn print_series(
    name: &str,
    mode: Mode,
    point_label: &str,
    result: &SeriesResult,
    accel_requested: bool,
) {
    let sign_label = result
        .rows
        .first()
        .map(|r| r.sign.clone())
        .unwrap_or_default();
    println!(
        "{name}: mode {mode}, signs {sign_label}, t = {point_label}, engine {}",
        result.engine
    );
    println!(
        "{:>4}  {:>12}  {:>14}  {:>10}  {:>10}  status",
        "n", "estimator", "log|value|", "zero-order", "time-ms"
    );
    for row in &result.rows {
        match &row.status {
            RowStatus::Ok => println!(
                "{:>4}  {:>12}  {:>14}  {:>10}  {:>10}  ok",
                row.n,
                sig(row.estimator, 6),
                sig(row.modulus_log, 6),
                row.zero_order,
                sig(row.runtime_ms, 4),
            ),
            RowStatus::Failed(msg) => println!(
                "{:>4}  {:>12}  {:>14}  {:>10}  {:>10}  failed: {msg}",
                row.n,
                "-",
                "-",
                row.zero_order,
                sig(row.runtime_ms, 4),
            ),
        }
    }
    if let Some(a) = result.accelerated {
        println!("extrapolated (derived, not a reference value): {}", sig(a, 6));
    } else if accel_requested {
        println!("extrapolation unavailable (needs three successful rows with distinct differences)");
    }
}

/// Renders the series as CSV with 12-significant-digit numeric fields.
fn series_csv(result: &SeriesResult, point_label: &str) -> String {
    let mut out = String::from(
        "n,parity,sign,mode,point,modulus_log,estimator,zero_order,runtime_ms,status\n",
    );
    for row in &result.rows {
        let parity = if row.n % 2 == 0 { "even" } else { "odd" };
        let status = match &row.status {
            RowStatus::Ok => "ok".to_string(),
            RowStatus::Failed(msg) => format!("failed: {msg}"),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.n,
            parity,
            csv_field(&row.sign),
            row.mode,
            csv_field(point_label),
            sig(row.modulus_log, 12),
            sig(row.estimator, 12),
            row.zero_order,
            sig(row.runtime_ms, 12),
            csv_field(&status),
        );
    }
    out
}

// ---------------------------------------------------------------------------
// examples
// ---------------------------------------------------------------------------

fn cmd_examples(args: &ExamplesArgs) -> Result<(), Failure> {
    match &args.action {
        ExamplesCmd::List => {
            for fixture in fixtures::all() {
                let stems: Vec<String> =
                    fixture.documents.iter().map(|(s, _)| s.clone()).collect();
                println!(
                    "{}: {} (documents: {})",
                    fixture.name,
                    fixture.summary,
                    stems.join(", ")
                );
            }
            Ok(())
        }
        ExamplesCmd::Emit { name, dir } => {
            let fixture = fixtures::by_name(name).ok_or_else(|| {
                let names: Vec<&str> = fixtures::all().iter().map(|f| f.name).collect();
                input_error(format!(
                    "unknown example `{name}` (available: {})",
                    names.join(", ")
                ))
            })?;
            std::fs::create_dir_all(dir)
                .map_err(|e| input_error(format!("cannot create {}: {e}", dir.display())))?;
            for (stem, doc) in &fixture.documents {
                let path = dir.join(format!("{stem}.twv"));
                std::fs::write(&path, doc.emit())
                    .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}
