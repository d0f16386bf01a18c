//! Hyperbolic volume estimation from towers of twisted invariants.
//!
//! For a tower of symmetric-power lifts, the growth rate of the invariant's
//! modulus at t = ±1 recovers the manifold volume: the estimator at degree n
//! is 4π·ln|value|/n². Three ways of extracting a finite value from the
//! numerator/denominator pair are supported: `ratio` divides the invariant by
//! a fixed low-degree member of the same tower before taking the limit
//! (cross-multiplying first, so root cancellation happens exactly), `plain`
//! takes the limit of the pair as it stands, and `tilde` rescales odd
//! degrees by the meridian factors ∏(t^{a(ℓ)} − 1) so even and odd degrees
//! approach the same normalization.
//!
//! Every request runs through one of two interchangeable engines: the exact
//! quadratic-integer engine when the representation is recognized (root
//! orders are then certified, not estimated), or the floating pipeline at a
//! selectable precision. Rows record their own failures so one degenerate
//! degree never aborts a series.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use crate::exact::{BigQuad, ExactEngine, ExactPoly};
use crate::invariant::{limit_value, twisted_invariant};
use crate::laurent::LaurentPoly;
use crate::matrix::CMatrix;
use crate::rep::{lift_rep, RepError, SignAssignment, Sl2Rep};
use crate::scalar::{Complex, Real};
use crate::words::{AlphaMap, Presentation};

/// How a finite value is extracted from the numerator/denominator pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Divide by the degree-2 (even n) or degree-3 (odd n) tower member.
    Ratio,
    /// Limit of the pair as it stands.
    Plain,
    /// Odd degrees rescaled by ∏(t^{a(ℓ)} − 1); even degrees as in `plain`.
    Tilde,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Ratio => "ratio",
            Mode::Plain => "plain",
            Mode::Tilde => "tilde",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "ratio" => Ok(Mode::Ratio),
            "plain" => Ok(Mode::Plain),
            "tilde" => Ok(Mode::Tilde),
            other => Err(format!("unknown mode `{other}` (ratio|plain|tilde)")),
        }
    }
}

/// A requested series of degrees with one sign assignment, mode, and point.
#[derive(Clone, Debug)]
pub struct SeriesSpec {
    /// Degrees to evaluate, in order.
    pub n_values: Vec<usize>,
    /// Sign assignment of the lift, one sign per link component.
    pub signs: SignAssignment,
    /// Value-extraction mode.
    pub mode: Mode,
    /// Evaluation point, +1 or −1.
    pub point: i64,
    /// Whether to append a sequence-accelerated extrapolation.
    pub accel: bool,
}

/// Outcome of one row; failures carry a message and leave the series running.
#[derive(Clone, Debug)]
pub enum RowStatus {
    /// The value was extracted.
    Ok,
    /// The row failed; the message says why.
    Failed(String),
}

impl RowStatus {
    /// True for successful rows.
    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Ok => f.write_str("ok"),
            RowStatus::Failed(msg) => write!(f, "failed: {msg}"),
        }
    }
}

/// One degree of a series.
#[derive(Clone, Debug)]
pub struct SeriesRow {
    /// Lift degree.
    pub n: usize,
    /// Sign assignment, as a +/− string.
    pub sign: String,
    /// Extraction mode of the row.
    pub mode: Mode,
    /// Evaluation point (±1).
    pub point: i64,
    /// Natural log of the extracted value's modulus (NaN when the row failed).
    pub modulus_log: f64,
    /// Volume estimate 4π·modulus_log/n².
    pub estimator: f64,
    /// Certified or measured root-order surplus of the value at the point.
    pub zero_order: i64,
    /// Wall-clock time spent on the row.
    pub runtime_ms: f64,
    /// Row outcome.
    pub status: RowStatus,
}

/// A completed series.
#[derive(Clone, Debug)]
pub struct SeriesResult {
    /// Engine that produced the rows: "exact", "f64", or "dd".
    pub engine: &'static str,
    /// One row per requested degree.
    pub rows: Vec<SeriesRow>,
    /// Aitken-extrapolated estimator from the last three successful rows
    /// (derived, not a reference value); present only when requested.
    pub accelerated: Option<f64>,
}

/// Tower member a degree is divided by in `ratio` mode: 2 for even n, 3 for
/// odd n, matching the parity of the degree.
pub fn base_degree(n: usize) -> usize {
    if n % 2 == 0 {
        2
    } else {
        3
    }
}

/// The volume estimator 4π·ln|value|/n² at degree n.
pub fn volume_estimate(n: usize, modulus_log: f64) -> f64 {
    4.0 * std::f64::consts::PI * modulus_log / (n * n) as f64
}

/// Aitken Δ² extrapolation of the last three entries; `None` when fewer than
/// three entries exist or the second difference vanishes.
pub fn aitken(estimates: &[f64]) -> Option<f64> {
    if estimates.len() < 3 {
        return None;
    }
    let [e0, e1, e2] = [
        estimates[estimates.len() - 3],
        estimates[estimates.len() - 2],
        estimates[estimates.len() - 1],
    ];
    let d1 = e2 - e1;
    let d2 = (e2 - e1) - (e1 - e0);
    if d2 == 0.0 || !d2.is_finite() {
        return None;
    }
    Some(e2 - d1 * d1 / d2)
}

/// Deflation tolerance of the floating path: ε^(2/3) of the format balances
/// accumulated determinant rounding against genuine root structure.
pub fn float_deflation_tolerance<R: Real>() -> f64 {
    R::epsilon().to_f64().powf(2.0 / 3.0)
}

/// True when the mode rescales this degree by the meridian factors.
fn tilde_correction(mode: Mode, n: usize) -> bool {
    mode == Mode::Tilde && n % 2 == 1
}

/// Finishes one series row from a computed `(ln-modulus, zero-order)` pair.
/// A valid estimate needs a finite, nonzero value, so a certified surplus
/// zero (or a non-finite log-modulus) becomes a failed row that still
/// reports the measured zero order.
pub fn assemble_row(
    n: usize,
    sign: String,
    mode: Mode,
    point: i64,
    outcome: Result<(f64, i64), String>,
    runtime_ms: f64,
) -> SeriesRow {
    let (zero_order, outcome) = match outcome {
        Ok((_, zero_order)) if zero_order > 0 => {
            let hint = match (mode, point) {
                (Mode::Plain, 1) => {
                    "; odd degrees carry forced roots at t = 1 — ratio or tilde mode divides them out"
                }
                (Mode::Tilde, 1) => "; the parity correction should have cancelled every forced root",
                (Mode::Ratio, 1) => "; the base-degree roots were expected to cancel exactly",
                _ => "",
            };
            (
                zero_order,
                Err(format!(
                    "value vanishes to order {zero_order} at t = {point}{hint}"
                )),
            )
        }
        Ok((modulus_log, zero_order)) if !modulus_log.is_finite() => (
            zero_order,
            Err(format!("value modulus at t = {point} is zero or not finite")),
        ),
        Ok(pair) => (pair.1, Ok(pair)),
        Err(msg) => (0, Err(msg)),
    };
    match outcome {
        Ok((modulus_log, zero_order)) => SeriesRow {
            n,
            sign,
            mode,
            point,
            modulus_log,
            estimator: volume_estimate(n, modulus_log),
            zero_order,
            runtime_ms,
            status: RowStatus::Ok,
        },
        Err(msg) => SeriesRow {
            n,
            sign,
            mode,
            point,
            modulus_log: f64::NAN,
            estimator: f64::NAN,
            zero_order,
            runtime_ms,
            status: RowStatus::Failed(msg),
        },
    }
}

// ---------------------------------------------------------------------------
// Exact engine path.
// ---------------------------------------------------------------------------

struct ExactPairCache<'e> {
    engine: &'e ExactEngine,
    signs: SignAssignment,
    pairs: BTreeMap<usize, Result<(ExactPoly, ExactPoly), String>>,
}

impl<'e> ExactPairCache<'e> {
    fn pair(&mut self, n: usize) -> Result<(ExactPoly, ExactPoly), String> {
        self.pairs
            .entry(n)
            .or_insert_with(|| {
                self.engine
                    .num_den(n, &self.signs)
                    .map_err(|e| e.to_string())
            })
            .clone()
    }
}

/// Natural log of the modulus of a BigQuad ratio.
fn ln_ratio(ring: crate::exact::QuadRing, num: &BigQuad, den: &BigQuad) -> f64 {
    num.ln_modulus(ring) - den.ln_modulus(ring)
}

fn exact_row_value(
    cache: &mut ExactPairCache<'_>,
    n: usize,
    mode: Mode,
    point: i64,
) -> Result<(f64, i64), String> {
    let engine = cache.engine;
    let ring = engine.ring();
    // Fast path at −1: one determinant per prime instead of a full
    // interpolation, available whenever no deflation is needed.
    if point == -1 && !tilde_correction(mode, n) {
        let fast = match mode {
            Mode::Ratio => {
                let vn = engine
                    .point_values_at(n, &cache.signs, -1)
                    .map_err(|e| e.to_string())?;
                let vb = engine
                    .point_values_at(base_degree(n), &cache.signs, -1)
                    .map_err(|e| e.to_string())?;
                match (vn, vb) {
                    (Some((an, ad)), Some((bn, bd))) => {
                        let p = an.mul(&bd, ring);
                        let q = ad.mul(&bn, ring);
                        Some(ln_ratio(ring, &p, &q))
                    }
                    _ => None,
                }
            }
            Mode::Plain | Mode::Tilde => engine
                .point_values_at(n, &cache.signs, -1)
                .map_err(|e| e.to_string())?
                .map(|(vn, vd)| ln_ratio(ring, &vn, &vd)),
        };
        if let Some(ln) = fast {
            return Ok((ln, 0));
        }
        // A vanishing value needs certified orders: fall through.
    }
    let (num, den) = cache.pair(n)?;
    let den = if tilde_correction(mode, n) {
        let alpha = engine.alpha();
        let mut corrected = den;
        for &a in &alpha.per_component {
            corrected = corrected.mul(&ExactPoly::t_power_minus_one(ring, a));
        }
        corrected
    } else {
        den
    };
    let (p, q) = match mode {
        Mode::Ratio => {
            let (bn, bd) = cache.pair(base_degree(n))?;
            (num.mul(&bd), den.mul(&bn))
        }
        Mode::Plain | Mode::Tilde => (num, den),
    };
    if q.is_zero() {
        return Err("denominator vanishes identically".to_string());
    }
    let (qp, mp) = p.deflate_pm1(point);
    let (qq, mq) = q.deflate_pm1(point);
    let zero_order = mp as i64 - mq as i64;
    if zero_order < 0 {
        return Err(format!("pole of order {} at t = {point}", -zero_order));
    }
    if qp.is_zero() || zero_order > 0 {
        return Ok((f64::NEG_INFINITY, zero_order.max(0)));
    }
    let vn = qp.eval_pm1(point);
    let vd = qq.eval_pm1(point);
    Ok((ln_ratio(ring, &vn, &vd), zero_order))
}

/// Runs a series on the exact engine. The point must be ±1.
pub fn run_series_exact(engine: &ExactEngine, spec: &SeriesSpec) -> SeriesResult {
    assert!(
        spec.point == 1 || spec.point == -1,
        "exact series evaluate at t = ±1 only"
    );
    let mut cache = ExactPairCache {
        engine,
        signs: spec.signs.clone(),
        pairs: BTreeMap::new(),
    };
    let mut rows = Vec::with_capacity(spec.n_values.len());
    for &n in &spec.n_values {
        let start = Instant::now();
        let outcome = exact_row_value(&mut cache, n, spec.mode, spec.point);
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        rows.push(assemble_row(
            n,
            spec.signs.to_string(),
            spec.mode,
            spec.point,
            outcome,
            runtime_ms,
        ));
    }
    finish("exact", rows, spec.accel)
}

// ---------------------------------------------------------------------------
// Floating engine path.
// ---------------------------------------------------------------------------

struct FloatPairCache<'a, R: Real> {
    presentation: &'a Presentation,
    alpha: &'a AlphaMap,
    rep: &'a Sl2Rep<R>,
    signs: SignAssignment,
    pairs: BTreeMap<usize, Result<(LaurentPoly<R>, LaurentPoly<R>), String>>,
}

impl<R: Real> FloatPairCache<'_, R> {
    fn pair(&mut self, n: usize) -> Result<(LaurentPoly<R>, LaurentPoly<R>), String> {
        let (presentation, alpha, rep, signs) = (self.presentation, self.alpha, self.rep, &self.signs);
        self.pairs
            .entry(n)
            .or_insert_with(|| {
                let lifted = lift_rep(n, presentation, rep, signs).map_err(|e| e.to_string())?;
                let inv =
                    twisted_invariant(presentation, alpha, &lifted).map_err(|e| e.to_string())?;
                Ok((inv.numerator, inv.denominator))
            })
            .clone()
    }
}

fn float_row_value<R: Real>(
    cache: &mut FloatPairCache<'_, R>,
    n: usize,
    mode: Mode,
    at: Complex<R>,
) -> Result<(f64, i64), String> {
    let (num, den) = cache.pair(n)?;
    let den = if tilde_correction(mode, n) {
        let mut corrected = den;
        for &a in &cache.alpha.per_component {
            let factor =
                LaurentPoly::monomial(a, Complex::one()).sub(&LaurentPoly::<R>::one());
            corrected = corrected.mul(&factor);
        }
        corrected
    } else {
        den
    };
    let (p, q) = match mode {
        Mode::Ratio => {
            let (bn, bd) = cache.pair(base_degree(n))?;
            (num.mul(&bd), den.mul(&bn))
        }
        Mode::Plain | Mode::Tilde => (num, den),
    };
    let tol = float_deflation_tolerance::<R>();
    let value = limit_value(&p, &q, at, tol).map_err(|e| e.to_string())?;
    Ok((value.value.ln_abs_f64(), value.zero_order))
}

/// One row of the floating pipeline at an arbitrary complex point: assembles
/// the mode's pair at degree `n` and returns `(ln-modulus, zero_order)`.
///
/// Convergence statements cover t = ±1 only; values elsewhere on the unit
/// circle are exploratory.
pub fn float_point_value<R: Real>(
    presentation: &Presentation,
    alpha: &AlphaMap,
    rep: &Sl2Rep<R>,
    signs: &SignAssignment,
    n: usize,
    mode: Mode,
    at: Complex<R>,
) -> Result<(f64, i64), String> {
    let mut cache = FloatPairCache {
        presentation,
        alpha,
        rep,
        signs: signs.clone(),
        pairs: BTreeMap::new(),
    };
    float_row_value(&mut cache, n, mode, at)
}

/// Runs a series on the floating pipeline at scalar precision R.
pub fn run_series_float<R: Real>(
    presentation: &Presentation,
    alpha: &AlphaMap,
    rep: &Sl2Rep<R>,
    spec: &SeriesSpec,
) -> SeriesResult {
    assert!(
        spec.point == 1 || spec.point == -1,
        "series evaluate at t = ±1; use direct evaluation for other points"
    );
    let mut cache = FloatPairCache {
        presentation,
        alpha,
        rep,
        signs: spec.signs.clone(),
        pairs: BTreeMap::new(),
    };
    let at = Complex::from_f64(spec.point as f64, 0.0);
    let mut rows = Vec::with_capacity(spec.n_values.len());
    for &n in &spec.n_values {
        let start = Instant::now();
        let outcome = float_row_value(&mut cache, n, spec.mode, at);
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        rows.push(assemble_row(
            n,
            spec.signs.to_string(),
            spec.mode,
            spec.point,
            outcome,
            runtime_ms,
        ));
    }
    finish(R::NAME, rows, spec.accel)
}

/// Picks the exact engine when the images are recognized over a supported
/// ring, falling back to the binary64 floating pipeline.
pub fn run_series_auto(
    presentation: &Presentation,
    alpha: &AlphaMap,
    images: &[CMatrix<f64>],
    spec: &SeriesSpec,
) -> Result<SeriesResult, RepError> {
    if let Some(engine) = ExactEngine::try_new(presentation, alpha, images) {
        return Ok(run_series_exact(&engine, spec));
    }
    let rep = Sl2Rep::new(images.to_vec())?;
    Ok(run_series_float(presentation, alpha, &rep, spec))
}

fn finish(engine: &'static str, rows: Vec<SeriesRow>, accel: bool) -> SeriesResult {
    let accelerated = if accel {
        let finite: Vec<f64> = rows
            .iter()
            .filter(|r| r.status.is_ok() && r.estimator.is_finite())
            .map(|r| r.estimator)
            .collect();
        aitken(&finite)
    } else {
        None
    };
    SeriesResult {
        engine,
        rows,
        accelerated,
    }
}
