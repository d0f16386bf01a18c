//! The twisted Alexander invariant of a link-group presentation under a
//! symmetric-power lift, and limit evaluation of its numerator/denominator
//! pair at points on the unit circle.
//!
//! The ring map Φ sends a group-ring element Σ c_w·w to the Laurent-matrix
//! block Σ c_w·t^{α(w)}·ρ(w). The invariant is det(Fox Jacobian with one
//! generator's column block deleted) over det Φ(x_j − 1), for the smallest
//! generator j whose denominator block is nonsingular; it is well defined up
//! to a unit ±t^p.

use thiserror::Error;

use crate::laurent::{deflate_at_detailed, poly_eval, LaurentError, LaurentPoly};
use crate::matrix::{LaurentMatrix, MatrixError};
use crate::rep::SymPowerRep;
use crate::scalar::{Complex, Real};
use crate::words::{fox_derivative, AlphaMap, GroupRingElement, Presentation};

/// Errors from invariant construction and limit evaluation.
#[derive(Debug, Error)]
pub enum InvariantError {
    /// Every generator's denominator block det Φ(x_j − 1) vanished.
    #[error("denominator degenerate: det Φ(x_j − 1) vanishes for every generator")]
    DenominatorDegenerate,
    /// The ratio has a pole at the requested point.
    #[error("pole of order {order} at the evaluation point")]
    PoleAtPoint {
        /// Order of the pole (denominator excess).
        order: i64,
    },
    /// A deflation residual fell in the ambiguous band just above tolerance.
    #[error(
        "cannot resolve a root at the evaluation point: residual {residual:.3e} \
         sits in the ambiguous band ({tol:.1e}, {band:.1e}); \
         retry with a higher-precision backend"
    )]
    NotResolved {
        /// Relative residual of the rejected division.
        residual: f64,
        /// Tolerance below which a division is accepted.
        tol: f64,
        /// Upper edge of the ambiguous band (10 × tol).
        band: f64,
    },
    /// Underlying matrix failure.
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    /// Underlying polynomial evaluation failure.
    #[error(transparent)]
    Eval(#[from] LaurentError),
}

/// Applies Φ to a group-ring element: an n×n block of Laurent polynomials.
pub fn phi<R: Real>(
    rep: &SymPowerRep<R>,
    alpha: &AlphaMap,
    element: &GroupRingElement,
) -> LaurentMatrix<R> {
    let n = rep.n;
    use std::collections::BTreeMap;
    let mut by_exp: BTreeMap<i64, crate::matrix::CMatrix<R>> = BTreeMap::new();
    for (w, coeff) in element.terms() {
        let exp = alpha.degree(w);
        let img = rep.evaluate_word(w).scale(Complex::from_f64(coeff as f64, 0.0));
        match by_exp.get_mut(&exp) {
            Some(acc) => *acc = acc.add(&img).expect("blocks share the lift degree"),
            None => {
                by_exp.insert(exp, img);
            }
        }
    }
    let mut out = LaurentMatrix::zeros(n, n);
    if by_exp.is_empty() {
        return out;
    }
    let lo = *by_exp.keys().next().unwrap();
    let hi = *by_exp.keys().next_back().unwrap();
    let width = (hi - lo + 1) as usize;
    for i in 0..n {
        for j in 0..n {
            let mut coeffs = vec![Complex::<R>::zero(); width];
            for (&exp, mat) in &by_exp {
                coeffs[(exp - lo) as usize] = mat.get(i, j);
            }
            out.set(i, j, LaurentPoly::from_coeffs(lo, coeffs));
        }
    }
    out
}

/// The Fox Jacobian pushed through Φ: relator-row × generator-column blocks.
pub fn build_fox_matrix<R: Real>(
    presentation: &Presentation,
    alpha: &AlphaMap,
    rep: &SymPowerRep<R>,
) -> LaurentMatrix<R> {
    let n = rep.n;
    let g = presentation.generators.len();
    let r = presentation.relators.len();
    let mut out = LaurentMatrix::zeros(r * n, g * n);
    for (i, relator) in presentation.relators.iter().enumerate() {
        for j in 0..g {
            let derivative = fox_derivative(relator, j);
            let block = phi(rep, alpha, &derivative);
            for bi in 0..n {
                for bj in 0..n {
                    out.set(i * n + bi, j * n + bj, block.get(bi, bj).clone());
                }
            }
        }
    }
    out
}

/// A twisted invariant as a numerator/denominator pair, defined up to ±t^p.
#[derive(Clone, Debug)]
pub struct TwistedInvariant<R> {
    /// det of the Fox Jacobian with one generator's column block deleted.
    pub numerator: LaurentPoly<R>,
    /// det Φ(x_j − 1) for the deleted generator j.
    pub denominator: LaurentPoly<R>,
    /// Index of the deleted generator.
    pub deleted_column: usize,
}

/// Computes the twisted invariant, deleting the smallest generator column
/// whose denominator block has a nonzero determinant.
pub fn twisted_invariant<R: Real>(
    presentation: &Presentation,
    alpha: &AlphaMap,
    rep: &SymPowerRep<R>,
) -> Result<TwistedInvariant<R>, InvariantError> {
    let fox = build_fox_matrix(presentation, alpha, rep);
    let g = presentation.generators.len();
    for j in 0..g {
        let gen_minus_one = GroupRingElement::generator_minus_one(j);
        let den = phi(rep, alpha, &gen_minus_one).laurent_det()?;
        if den.is_zero() {
            continue;
        }
        let minor = fox.delete_block_column(rep.n, j)?;
        let num = minor.laurent_det()?;
        return Ok(TwistedInvariant {
            numerator: num,
            denominator: den,
            deleted_column: j,
        });
    }
    Err(InvariantError::DenominatorDegenerate)
}

/// A finite limit of the numerator/denominator ratio at a point.
#[derive(Clone, Copy, Debug)]
pub struct PointValue<R> {
    /// The limit value (zero when the numerator's root order is larger).
    pub value: Complex<R>,
    /// Numerator root order minus denominator root order at the point.
    pub zero_order: i64,
}

/// Checks a deflation's stopping residual for the ambiguous band
/// (tol, 10·tol) in which a root can be neither confirmed nor excluded.
fn check_resolved(rejected: Option<f64>, tol: f64) -> Result<(), InvariantError> {
    if let Some(residual) = rejected {
        if residual > tol && residual < 10.0 * tol {
            return Err(InvariantError::NotResolved {
                residual,
                tol,
                band: 10.0 * tol,
            });
        }
    }
    Ok(())
}

/// Limit of num/den as t → c: deflates shared roots at c and evaluates what
/// remains. A positive surplus of numerator roots yields the value 0 with
/// its order recorded; a denominator surplus is a pole error; residuals in
/// the ambiguous band request precision escalation.
pub fn limit_value<R: Real>(
    num: &LaurentPoly<R>,
    den: &LaurentPoly<R>,
    c: Complex<R>,
    tol: f64,
) -> Result<PointValue<R>, InvariantError> {
    let dn = deflate_at_detailed(num, c, tol);
    check_resolved(dn.rejected_residual, tol)?;
    let dd = deflate_at_detailed(den, c, tol);
    check_resolved(dd.rejected_residual, tol)?;
    let zero_order = dn.multiplicity as i64 - dd.multiplicity as i64;
    if zero_order < 0 {
        return Err(InvariantError::PoleAtPoint { order: -zero_order });
    }
    if zero_order > 0 {
        return Ok(PointValue {
            value: Complex::zero(),
            zero_order,
        });
    }
    let vn = poly_eval(&dn.quotient, c)?;
    let vd = poly_eval(&dd.quotient, c)?;
    Ok(PointValue {
        value: vn / vd,
        zero_order: 0,
    })
}

/// Report from the ε-ladder cross-check of a limit value.
#[derive(Clone, Debug)]
pub struct CrossCheck<R> {
    /// Richardson-extrapolated value of the ladder.
    pub extrapolated: Complex<R>,
    /// The limit value being checked.
    pub direct: Complex<R>,
    /// |extrapolated − direct| / (1 + |direct|).
    pub deviation: f64,
    /// True when the extrapolation's own tail had settled.
    pub converged: bool,
}

impl<R: Real> CrossCheck<R> {
    /// True when the ladder both converged and agrees within `tol`.
    pub fn agrees(&self, tol: f64) -> bool {
        self.converged && self.deviation <= tol
    }
}

/// Default ε ladder for [`cross_check_epsilon`].
pub const DEFAULT_EPSILON_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];

/// Evaluates num/den ÷ (t−c)^{zero_order} at t = c·(1+ε) down the ladder,
/// Richardson-extrapolates to ε = 0, and compares with `direct`.
pub fn cross_check_epsilon<R: Real>(
    num: &LaurentPoly<R>,
    den: &LaurentPoly<R>,
    c: Complex<R>,
    zero_order: i64,
    direct: Complex<R>,
    ladder: &[f64],
) -> Result<CrossCheck<R>, InvariantError> {
    assert!(!ladder.is_empty(), "epsilon ladder must be nonempty");
    let mut values = Vec::with_capacity(ladder.len());
    for &eps in ladder {
        let t = c * Complex::from_f64(1.0 + eps, 0.0);
        let base = poly_eval(num, t)? / poly_eval(den, t)?;
        let shift = (t - c).powi(zero_order);
        values.push(base / shift);
    }
    // Neville extrapolation to ε = 0 on the nodes ε_i.
    let mut table = values.clone();
    let mut last_correction = 0.0f64;
    for level in 1..table.len() {
        for i in 0..(table.len() - level) {
            let xi = R::from_f64(ladder[i]);
            let xj = R::from_f64(ladder[i + level]);
            let denom = Complex::new(xi - xj, R::zero());
            let a = Complex::new(xi, R::zero());
            let b = Complex::new(xj, R::zero());
            let next = (table[i + 1] * a - table[i] * b) / denom;
            if level == table.len() - 1 {
                last_correction = (next - table[i]).abs().to_f64();
            }
            table[i] = next;
        }
    }
    let extrapolated = table[0];
    let scale = 1.0 + direct.abs().to_f64();
    let deviation = (extrapolated - direct).abs().to_f64() / scale;
    // The final Neville correction measures how settled the ladder itself is.
    let converged = last_correction <= 1e-3 * (1.0 + extrapolated.abs().to_f64());
    Ok(CrossCheck {
        extrapolated,
        direct,
        deviation,
        converged,
    })
}
