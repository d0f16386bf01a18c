//! SL(2,ℂ) representations of link groups, their symmetric-power lifts, and
//! consistency checks on both.
//!
//! The degree-n symmetric power acts on binary forms of degree n−1: column j
//! of σₙ(A), for A = [[a,b],[c,d]], holds the coefficients of
//! (d·x − b·y)^{n−1−j}·(−c·x + a·y)^j over the basis x^{n−1−i}y^i. This is
//! the dual-variables convention: σ₂(A) = (A⁻¹)ᵀ, and σₙ is a homomorphism
//! with det σₙ(A) = 1 whenever det A = 1.

use thiserror::Error;

use crate::matrix::CMatrix;
use crate::scalar::{Complex, Real};
use crate::words::{Presentation, Word};

/// Errors from representation construction and lifting.
#[derive(Debug, Error)]
pub enum RepError {
    /// A generator image was not 2×2.
    #[error("generator image must be 2×2, got {got}×{got}")]
    NotTwoByTwo {
        /// Actual size supplied.
        got: usize,
    },
    /// Image count differs from the presentation's generator count.
    #[error("expected {expected} generator images, got {got}")]
    ImageCount {
        /// Generators in the presentation.
        expected: usize,
        /// Images supplied.
        got: usize,
    },
    /// A sign assignment's length differs from the component count.
    #[error("expected {expected} component signs, got {got}")]
    SignCount {
        /// Components in the presentation.
        expected: usize,
        /// Signs supplied.
        got: usize,
    },
    /// A sign string contained a character other than '+' or '-'.
    #[error("sign strings use only '+' and '-', got {0:?}")]
    BadSignChar(char),
    /// Symmetric-power degree must be at least 1.
    #[error("symmetric-power degree must be ≥ 1, got {0}")]
    DegreeTooSmall(usize),
}

/// An SL(2,ℂ) representation: one 2×2 image per generator.
#[derive(Clone, Debug)]
pub struct Sl2Rep<R> {
    images: Vec<CMatrix<R>>,
}

impl<R: Real> Sl2Rep<R> {
    /// Builds from per-generator 2×2 images.
    pub fn new(images: Vec<CMatrix<R>>) -> Result<Self, RepError> {
        for m in &images {
            if m.size() != 2 {
                return Err(RepError::NotTwoByTwo { got: m.size() });
            }
        }
        Ok(Sl2Rep { images })
    }

    /// Number of generator images.
    pub fn generator_count(&self) -> usize {
        self.images.len()
    }

    /// Image of generator `g`.
    pub fn image(&self, g: usize) -> &CMatrix<R> {
        &self.images[g]
    }
}

/// Per-component meridian signs ε(ℓ) ∈ {+1, −1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment(Vec<i8>);

impl SignAssignment {
    /// All-plus signs for `components` link components.
    pub fn all_plus(components: usize) -> Self {
        SignAssignment(vec![1; components])
    }

    /// Parses a string like `"+-"`, one character per component.
    pub fn parse(s: &str) -> Result<Self, RepError> {
        let mut signs = Vec::new();
        for ch in s.chars() {
            match ch {
                '+' => signs.push(1),
                '-' => signs.push(-1),
                other => return Err(RepError::BadSignChar(other)),
            }
        }
        Ok(SignAssignment(signs))
    }

    /// Number of components covered.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True when no component is covered.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sign of component `component` as ±1.
    pub fn get(&self, component: usize) -> i8 {
        self.0[component]
    }

    /// ε^k for component `component`.
    pub fn power(&self, component: usize, k: usize) -> f64 {
        if self.get(component) == 1 || k % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl std::fmt::Display for SignAssignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &s in &self.0 {
            f.write_str(if s == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Adjugate of a 2×2 matrix; equals the inverse when the determinant is 1.
fn adjugate2<R: Real>(m: &CMatrix<R>) -> CMatrix<R> {
    let mut out = CMatrix::zeros(2);
    out.set(0, 0, m.get(1, 1));
    out.set(0, 1, -m.get(0, 1));
    out.set(1, 0, -m.get(1, 0));
    out.set(1, 1, m.get(0, 0));
    out
}

/// Coefficients of (p·x + q·y)^k over x^{k−i}y^i, built by repeated
/// multiplication so no factorials appear.
fn linear_form_power<R: Real>(p: Complex<R>, q: Complex<R>, k: usize) -> Vec<Complex<R>> {
    let mut coeffs = vec![Complex::one()];
    for _ in 0..k {
        let mut next = vec![Complex::zero(); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] = next[i] + c * p;
            next[i + 1] = next[i + 1] + c * q;
        }
        coeffs = next;
    }
    coeffs
}

/// Degree-n symmetric power of a 2×2 matrix, an n×n matrix. Degree 1 is the
/// trivial one-dimensional representation `[[1]]`.
pub fn sym_power<R: Real>(n: usize, m: &CMatrix<R>) -> Result<CMatrix<R>, RepError> {
    if n < 1 {
        return Err(RepError::DegreeTooSmall(n));
    }
    if m.size() != 2 {
        return Err(RepError::NotTwoByTwo { got: m.size() });
    }
    let (a, b) = (m.get(0, 0), m.get(0, 1));
    let (c, d) = (m.get(1, 0), m.get(1, 1));
    let mut out = CMatrix::zeros(n);
    for j in 0..n {
        let left = linear_form_power(d, -b, n - 1 - j);
        let right = linear_form_power(-c, a, j);
        // Column j is the convolution of the two binomial expansions.
        for (i1, &u) in left.iter().enumerate() {
            if u.is_zero() {
                continue;
            }
            for (i2, &v) in right.iter().enumerate() {
                let i = i1 + i2;
                let cur = out.get(i, j);
                out.set(i, j, cur + u * v);
            }
        }
    }
    Ok(out)
}

/// A symmetric-power lift of an SL(2,ℂ) representation, with cached inverse
/// images for fast word evaluation.
#[derive(Clone, Debug)]
pub struct SymPowerRep<R> {
    /// Symmetric-power degree n (block size).
    pub n: usize,
    /// Per-component meridian signs used in the lift.
    pub signs: SignAssignment,
    /// Component of each generator.
    pub components: Vec<usize>,
    gens: Vec<CMatrix<R>>,
    inv_gens: Vec<CMatrix<R>>,
}

/// Lifts `rep` through the degree-n symmetric power, sending the generators
/// of component ℓ through σₙ(ε(ℓ)·ρ(g)).
pub fn lift_rep<R: Real>(
    n: usize,
    presentation: &Presentation,
    rep: &Sl2Rep<R>,
    signs: &SignAssignment,
) -> Result<SymPowerRep<R>, RepError> {
    if rep.generator_count() != presentation.generators.len() {
        return Err(RepError::ImageCount {
            expected: presentation.generators.len(),
            got: rep.generator_count(),
        });
    }
    if signs.len() != presentation.component_count {
        return Err(RepError::SignCount {
            expected: presentation.component_count,
            got: signs.len(),
        });
    }
    let components: Vec<usize> = presentation
        .generators
        .iter()
        .map(|g| g.component)
        .collect();
    let mut gens = Vec::with_capacity(rep.generator_count());
    let mut inv_gens = Vec::with_capacity(rep.generator_count());
    for (g, image) in rep.images.iter().enumerate() {
        let eps = signs.get(components[g]) as f64;
        let signed = image.scale(Complex::from_f64(eps, 0.0));
        gens.push(sym_power(n, &signed)?);
        // det(ε·image) = 1, so the adjugate is the exact inverse and the
        // symmetric power of it is the inverse image.
        inv_gens.push(sym_power(n, &adjugate2(&signed))?);
    }
    Ok(SymPowerRep {
        n,
        signs: signs.clone(),
        components,
        gens,
        inv_gens,
    })
}

impl<R: Real> SymPowerRep<R> {
    /// Image of generator `g` (exponent +1).
    pub fn generator_image(&self, g: usize) -> &CMatrix<R> {
        &self.gens[g]
    }

    /// Image of the inverse of generator `g`.
    pub fn generator_inverse_image(&self, g: usize) -> &CMatrix<R> {
        &self.inv_gens[g]
    }

    /// Image of a free-group word under the lift.
    pub fn evaluate_word(&self, w: &Word) -> CMatrix<R> {
        let mut out = CMatrix::identity(self.n);
        for &(g, e) in w.letters() {
            let factor = if e > 0 {
                &self.gens[g]
            } else {
                &self.inv_gens[g]
            };
            out = out.mul(factor).expect("images share the lift degree");
        }
        out
    }
}

/// Diagnostics from checking a lift against its presentation.
#[derive(Clone, Debug)]
pub struct RepReport {
    /// Largest entry deviation of any relator image from the identity.
    pub relator_residual: f64,
    /// Largest deviation of any generator-image determinant from 1.
    pub det_residual: f64,
    /// Largest deviation of a generator trace from n·ε^{n−1}.
    pub trace_residual: f64,
    /// Tolerance the residuals were judged against.
    pub tolerance: f64,
}

impl RepReport {
    /// True when every residual is within tolerance.
    pub fn passed(&self) -> bool {
        self.relator_residual <= self.tolerance
            && self.det_residual <= self.tolerance
            && self.trace_residual <= self.tolerance
    }
}

impl std::fmt::Display for RepReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "relator residual {:.3e}, det residual {:.3e}, trace residual {:.3e} (tol {:.1e}): {}",
            self.relator_residual,
            self.det_residual,
            self.trace_residual,
            self.tolerance,
            if self.passed() { "ok" } else { "FAILED" }
        )
    }
}

/// Checks that a lift actually represents the group: relators map to the
/// identity, generator images are unimodular, and parabolic meridians have
/// the forced trace n·ε^{n−1}.
pub fn verify_rep<R: Real>(
    presentation: &Presentation,
    rep: &SymPowerRep<R>,
    tolerance: f64,
) -> RepReport {
    let id = CMatrix::identity(rep.n);
    let mut relator_residual = 0.0f64;
    for r in &presentation.relators {
        let img = rep.evaluate_word(r);
        relator_residual = relator_residual.max(img.max_abs_diff(&id).to_f64());
    }
    let mut det_residual = 0.0f64;
    let mut trace_residual = 0.0f64;
    for g in 0..presentation.generators.len() {
        let img = rep.generator_image(g);
        let det = img.lu_det().det;
        det_residual = det_residual.max((det - Complex::one()).abs().to_f64());
        let expected = rep.signs.power(rep.components[g], rep.n - 1) * rep.n as f64;
        let trace = img.trace();
        trace_residual = trace_residual
            .max((trace - Complex::from_f64(expected, 0.0)).abs().to_f64());
    }
    RepReport {
        relator_residual,
        det_residual,
        trace_residual,
        tolerance,
    }
}

/// The two admissible cusp parameters γ for the Whitehead-link parabolic
/// family with both meridian traces +2: roots of the reduced character
/// equation, returned with the +imaginary branch first.
pub fn whitehead_gamma_candidates<R: Real>() -> [Complex<R>; 2] {
    // The trace-field equation at (x, y) = (2, 2) is the cubic
    // p(v) = xy − (x² + y² − 2)v + xy·v² − v³ = 4 − 6v + 4v² − v³,
    // with the reducible root v = 2 excluded.
    let p = [4.0f64, -6.0, 4.0, -1.0];
    // Exact synthetic division by (v − 2).
    let mut q = [0.0f64; 3];
    let mut acc = p[3];
    q[2] = acc;
    acc = p[2] + 2.0 * acc;
    q[1] = acc;
    acc = p[1] + 2.0 * acc;
    q[0] = acc;
    debug_assert_eq!(p[0] + 2.0 * q[0], 0.0);
    // Solve q₂v² + q₁v + q₀ = 0; the discriminant is negative.
    let disc = q[1] * q[1] - 4.0 * q[2] * q[0];
    let root_im = (-disc).sqrt() / (2.0 * q[2].abs());
    let root_re = -q[1] / (2.0 * q[2]);
    let v_plus = Complex::<R>::from_f64(root_re, root_im.abs());
    let v_minus = v_plus.conj();
    let two = Complex::<R>::from_f64(2.0, 0.0);
    [v_plus - two, v_minus - two]
}
