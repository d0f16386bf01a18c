//! Laurent polynomials over a complex scalar backend, with evaluation,
//! root deflation at a point, and comparison up to the ±t^p unit ambiguity.

use thiserror::Error;

use crate::scalar::{Complex, Real};

/// Errors from Laurent-polynomial operations.
#[derive(Debug, Error)]
pub enum LaurentError {
    /// Evaluation point 0 is outside the domain (negative exponents).
    #[error("cannot evaluate a Laurent polynomial at t = 0")]
    EvalAtZero,
    /// A rational function needs a denominator that is not identically zero.
    #[error("denominator is identically zero")]
    ZeroDenominator,
}

/// A Laurent polynomial Σ c_k t^k with a finite exponent window.
///
/// Stored densely: `coeffs[i]` is the coefficient of `t^{lo+i}`. The zero
/// polynomial stores no coefficients. Exact-zero end coefficients are always
/// trimmed; tolerance-based trimming happens only at explicit normalization
/// sites ([`LaurentPoly::clamp`]).
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<R> {
    lo: i64,
    coeffs: Vec<Complex<R>>,
}

impl<R: Real> LaurentPoly<R> {
    /// The zero polynomial.
    pub fn zero() -> Self {
        LaurentPoly {
            lo: 0,
            coeffs: Vec::new(),
        }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        LaurentPoly::monomial(0, Complex::one())
    }

    /// A single term `c·t^exp`.
    pub fn monomial(exp: i64, c: Complex<R>) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            lo: exp,
            coeffs: vec![c],
        }
    }

    /// Builds from a dense coefficient run starting at exponent `lo`,
    /// trimming exact-zero ends.
    pub fn from_coeffs(lo: i64, coeffs: Vec<Complex<R>>) -> Self {
        let mut p = LaurentPoly { lo, coeffs };
        p.trim();
        p
    }

    /// Convenience constructor from binary64 real coefficients.
    pub fn from_real_coeffs(lo: i64, coeffs: &[f64]) -> Self {
        LaurentPoly::from_coeffs(
            lo,
            coeffs.iter().map(|&c| Complex::from_f64(c, 0.0)).collect(),
        )
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let leading_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if leading_zeros > 0 {
            self.coeffs.drain(..leading_zeros);
            self.lo += leading_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    /// Lowest exponent of the window (0 for the zero polynomial).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest exponent of the window (−1 offset convention for zero).
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    /// Number of stored coefficients.
    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^exp` (zero outside the window).
    pub fn coeff(&self, exp: i64) -> Complex<R> {
        if exp < self.lo {
            return Complex::zero();
        }
        let idx = (exp - self.lo) as usize;
        self.coeffs.get(idx).copied().unwrap_or_else(Complex::zero)
    }

    /// Dense coefficients, ascending from [`LaurentPoly::lo`].
    pub fn coeffs(&self) -> &[Complex<R>] {
        &self.coeffs
    }

    /// Largest coefficient magnitude (0 for the zero polynomial).
    pub fn max_coeff_abs(&self) -> R {
        let mut m = R::zero();
        for c in &self.coeffs {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            lo: self.lo + k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Scales every coefficient.
    pub fn scale(&self, s: Complex<R>) -> Self {
        LaurentPoly::from_coeffs(self.lo, self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Negation.
    pub fn neg(&self) -> Self {
        self.scale(-Complex::<R>::one())
    }

    /// Sum.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let mut coeffs = vec![Complex::zero(); (hi - lo + 1) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.lo - lo) as usize + i] = c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            let j = (other.lo - lo) as usize + i;
            coeffs[j] = coeffs[j] + c;
        }
        LaurentPoly::from_coeffs(lo, coeffs)
    }

    /// Difference.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product by convolution.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![Complex::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j] + a * b;
            }
        }
        LaurentPoly::from_coeffs(self.lo + other.lo, coeffs)
    }

    /// Zeroes coefficients with magnitude ≤ `threshold` and trims the window.
    pub fn clamp(&self, threshold: R) -> Self {
        LaurentPoly::from_coeffs(
            self.lo,
            self.coeffs
                .iter()
                .map(|&c| {
                    if c.abs() <= threshold {
                        Complex::zero()
                    } else {
                        c
                    }
                })
                .collect(),
        )
    }

    /// One synthetic division by `(t − c)` over the polynomial part:
    /// returns the quotient (sharing this polynomial's lowest exponent)
    /// and the scalar remainder.
    fn synthetic_divide(&self, c: Complex<R>) -> (Self, Complex<R>) {
        if self.is_zero() {
            return (LaurentPoly::zero(), Complex::zero());
        }
        if self.coeffs.len() == 1 {
            return (LaurentPoly::zero(), self.coeffs[0]);
        }
        let mut out = vec![Complex::<R>::zero(); self.coeffs.len() - 1];
        let mut acc = Complex::zero();
        for (k, &a) in self.coeffs.iter().enumerate().rev() {
            acc = a + acc * c;
            if k > 0 {
                out[k - 1] = acc;
            }
        }
        (LaurentPoly::from_coeffs(self.lo, out), acc)
    }
}

/// Evaluates `p` at `z ≠ 0` by Horner's scheme over the shifted polynomial.
pub fn poly_eval<R: Real>(p: &LaurentPoly<R>, z: Complex<R>) -> Result<Complex<R>, LaurentError> {
    if z.is_zero() {
        return Err(LaurentError::EvalAtZero);
    }
    if p.is_zero() {
        return Ok(Complex::zero());
    }
    let mut acc = Complex::zero();
    for &c in p.coeffs.iter().rev() {
        acc = acc * z + c;
    }
    Ok(acc * z.powi(p.lo))
}

/// Outcome of repeated deflation, with the residual that stopped it.
#[derive(Clone, Debug)]
pub struct Deflation<R> {
    /// Quotient after dividing out `(t − c)^multiplicity`.
    pub quotient: LaurentPoly<R>,
    /// Number of exact-enough divisions performed.
    pub multiplicity: usize,
    /// Relative residual of the first rejected division, if any division was
    /// rejected (None when deflation stopped at a constant).
    pub rejected_residual: Option<f64>,
}

/// Repeatedly divides `p` by `(t − c)`, accepting a division while the
/// remainder magnitude is ≤ `tol` × the current dividend's largest
/// coefficient magnitude. Returns the final quotient and the multiplicity.
pub fn deflate_at<R: Real>(p: &LaurentPoly<R>, c: Complex<R>, tol: f64) -> (LaurentPoly<R>, usize) {
    let d = deflate_at_detailed(p, c, tol);
    (d.quotient, d.multiplicity)
}

/// [`deflate_at`] with the stopping residual exposed, so callers can tell a
/// clean stop from a numerically ambiguous one.
pub fn deflate_at_detailed<R: Real>(p: &LaurentPoly<R>, c: Complex<R>, tol: f64) -> Deflation<R> {
    let mut current = p.clone();
    let mut multiplicity = 0usize;
    let mut rejected = None;
    while current.width() > 1 {
        let scale = current.max_coeff_abs();
        let (q, r) = current.synthetic_divide(c);
        let rel = (r.abs() / scale).to_f64();
        if rel <= tol {
            current = q;
            multiplicity += 1;
        } else {
            rejected = Some(rel);
            break;
        }
    }
    Deflation {
        quotient: current,
        multiplicity,
        rejected_residual: rejected,
    }
}

/// True iff `f = ±t^p · g` for some integer `p`, within a relative tolerance.
///
/// Windows are aligned at their lowest exponents and the dense coefficient
/// runs are compared entrywise for both global signs; no rescaling other than
/// the unit is allowed.
pub fn compare_up_to_unit<R: Real>(f: &LaurentPoly<R>, g: &LaurentPoly<R>, tol: f64) -> bool {
    let scale_f = f.max_coeff_abs().to_f64();
    let scale_g = g.max_coeff_abs().to_f64();
    let scale = scale_f.max(scale_g);
    let fc = f.clamp(R::from_f64(tol * scale_f));
    let gc = g.clamp(R::from_f64(tol * scale_g));
    if fc.is_zero() || gc.is_zero() {
        return fc.is_zero() && gc.is_zero();
    }
    if fc.width() != gc.width() {
        return false;
    }
    let tol_r = tol * scale;
    for sign in [1.0, -1.0] {
        let s = Complex::from_f64(sign, 0.0);
        let ok = fc
            .coeffs
            .iter()
            .zip(gc.coeffs.iter())
            .all(|(&a, &b)| (a - b * s).abs().to_f64() <= tol_r);
        if ok {
            return true;
        }
    }
    false
}

/// Attempts the exact polynomial division `num = q · den`, returning `q` when
/// the long-division remainder is negligible relative to the inputs.
///
/// `tol` is relative to the largest coefficient in play; use a few orders
/// above the scalar's roundoff. Returns `None` for a zero denominator, a
/// degree mismatch, or a non-negligible remainder.
pub fn try_divide_exact<R: Real>(
    num: &LaurentPoly<R>,
    den: &LaurentPoly<R>,
    tol: f64,
) -> Option<LaurentPoly<R>> {
    if den.is_zero() {
        return None;
    }
    if num.is_zero() {
        return Some(LaurentPoly::zero());
    }
    let n = num.shift(-num.lo());
    let d = den.shift(-den.lo());
    let (dn, dd) = (n.hi(), d.hi());
    if dn < dd {
        return None;
    }
    let lead = d.coeff(dd);
    let mut rem: Vec<Complex<R>> = n.coeffs().to_vec();
    let mut q = vec![Complex::<R>::zero(); (dn - dd + 1) as usize];
    for k in (0..q.len()).rev() {
        let c = rem[k + dd as usize] / lead;
        q[k] = c;
        for j in 0..=(dd as usize) {
            rem[k + j] = rem[k + j] - c * d.coeff(j as i64);
        }
    }
    let scale = num
        .max_coeff_abs()
        .to_f64()
        .max(den.max_coeff_abs().to_f64());
    if rem
        .iter()
        .any(|r| r.abs().to_f64() > tol * scale.max(1.0))
    {
        return None;
    }
    Some(LaurentPoly::from_coeffs(num.lo() - den.lo(), q))
}

/// A quotient of Laurent polynomials; the denominator is not identically zero.
#[derive(Clone, Debug)]
pub struct RationalFunction<R> {
    /// Numerator.
    pub num: LaurentPoly<R>,
    /// Denominator (never the zero polynomial).
    pub den: LaurentPoly<R>,
}

impl<R: Real> RationalFunction<R> {
    /// Builds a quotient, rejecting a zero denominator.
    pub fn new(num: LaurentPoly<R>, den: LaurentPoly<R>) -> Result<Self, LaurentError> {
        if den.is_zero() {
            return Err(LaurentError::ZeroDenominator);
        }
        Ok(RationalFunction { num, den })
    }

    /// Evaluates num/den at a nonzero point.
    pub fn eval(&self, z: Complex<R>) -> Result<Complex<R>, LaurentError> {
        Ok(poly_eval(&self.num, z)? / poly_eval(&self.den, z)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Dd;

    /// Relative tolerance for binary64 coefficient comparisons.
    const TOL: f64 = 1e-12;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::from_f64(re, im)
    }

    #[test]
    fn eval_matches_hand_values() {
        // t² − 4t + 1 at t = 1 is −2.
        let p = LaurentPoly::<f64>::from_real_coeffs(0, &[1.0, -4.0, 1.0]);
        let v = poly_eval(&p, c(1.0, 0.0)).unwrap();
        assert!((v - c(-2.0, 0.0)).abs() < TOL);
        // The constant 1 evaluates to 1 anywhere.
        let one = LaurentPoly::<f64>::one();
        assert_eq!(poly_eval(&one, c(2.5, -3.0)).unwrap(), c(1.0, 0.0));
        // t⁻¹ at t = 2 is 0.5.
        let inv = LaurentPoly::monomial(-1, c(1.0, 0.0));
        assert!((poly_eval(&inv, c(2.0, 0.0)).unwrap() - c(0.5, 0.0)).abs() < TOL);
    }

    #[test]
    fn eval_at_zero_is_a_domain_error() {
        let p = LaurentPoly::monomial(-2, c(1.0, 0.0));
        assert!(matches!(
            poly_eval(&p, Complex::zero()),
            Err(LaurentError::EvalAtZero)
        ));
    }

    #[test]
    fn arithmetic_window_bookkeeping() {
        let p = LaurentPoly::<f64>::from_real_coeffs(-1, &[1.0, 0.0, 2.0]);
        assert_eq!((p.lo(), p.hi()), (-1, 1));
        let q = LaurentPoly::<f64>::from_real_coeffs(1, &[3.0]);
        let sum = p.add(&q);
        assert_eq!(sum.coeff(1), c(5.0, 0.0));
        let prod = p.mul(&q);
        assert_eq!((prod.lo(), prod.hi()), (0, 2));
        assert_eq!(prod.coeff(0), c(3.0, 0.0));
        let diff = sum.sub(&q).sub(&p);
        assert!(diff.is_zero());
    }

    #[test]
    fn deflation_of_known_product() {
        // (t−1)²(t²−4t+1): quotient t²−4t+1 with multiplicity 2.
        let factor = LaurentPoly::<f64>::from_real_coeffs(0, &[1.0, -4.0, 1.0]);
        let lin = LaurentPoly::<f64>::from_real_coeffs(0, &[-1.0, 1.0]);
        let p = lin.mul(&lin).mul(&factor);
        let (q, mult) = deflate_at(&p, c(1.0, 0.0), 1e-8);
        assert_eq!(mult, 2);
        assert!(compare_up_to_unit(&q, &factor, 1e-9));
        assert!((q.coeff(1) - c(-4.0, 0.0)).abs() < TOL);
    }

    #[test]
    fn deflation_stops_at_nonroot() {
        let p = LaurentPoly::<f64>::from_real_coeffs(0, &[1.0, -4.0, 1.0]);
        let (q, mult) = deflate_at(&p, c(1.0, 0.0), 1e-8);
        assert_eq!(mult, 0);
        assert_eq!(q, p);
    }

    #[test]
    fn deflation_of_pure_power() {
        // (t+1)³ at c = −1 deflates to the constant 1 with multiplicity 3.
        let p = LaurentPoly::<f64>::from_real_coeffs(0, &[1.0, 3.0, 3.0, 1.0]);
        let (q, mult) = deflate_at(&p, c(-1.0, 0.0), 1e-8);
        assert_eq!(mult, 3);
        assert!((q.coeff(0) - c(1.0, 0.0)).abs() < TOL);
        assert_eq!(q.width(), 1);
    }

    #[test]
    fn deflation_remultiply_recovers_input() {
        let p = LaurentPoly::from_coeffs(
            -2,
            vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 1.0), c(3.0, -1.0)],
        );
        let lin = LaurentPoly::<f64>::from_real_coeffs(0, &[-1.0, 1.0]);
        let prod = p.mul(&lin).mul(&lin);
        let (q, mult) = deflate_at(&prod, c(1.0, 0.0), 1e-8);
        assert_eq!(mult, 2);
        let mut back = q;
        for _ in 0..mult {
            back = back.mul(&lin);
        }
        let err = back.sub(&prod).max_coeff_abs();
        assert!(err < 1e-7 * prod.max_coeff_abs());
    }

    #[test]
    fn unit_comparison_accepts_sign_and_shift() {
        let f = LaurentPoly::<f64>::from_real_coeffs(0, &[1.0, -4.0, 1.0]);
        let g = f.shift(5).neg();
        assert!(compare_up_to_unit(&f, &g, 1e-9));
        assert!(compare_up_to_unit(&g, &f, 1e-9));
        assert!(compare_up_to_unit(&f, &f, 1e-9));
    }

    #[test]
    fn unit_comparison_rejects_different_polynomials() {
        let f = LaurentPoly::<f64>::from_real_coeffs(0, &[1.0, -4.0, 1.0]);
        let g = LaurentPoly::<f64>::from_real_coeffs(0, &[1.0, -5.0, 1.0]);
        assert!(!compare_up_to_unit(&f, &g, 1e-9));
        // No scalar rescaling other than ±1 is allowed.
        let h = f.scale(c(2.0, 0.0));
        assert!(!compare_up_to_unit(&f, &h, 1e-9));
    }

    #[test]
    fn unit_comparison_of_zeros() {
        let z = LaurentPoly::<f64>::zero();
        let f = LaurentPoly::<f64>::one();
        assert!(compare_up_to_unit(&z, &z, 1e-9));
        assert!(!compare_up_to_unit(&z, &f, 1e-9));
    }

    #[test]
    fn clamp_drops_noise_and_trims() {
        let p = LaurentPoly::from_coeffs(
            -1,
            vec![c(1e-14, 0.0), c(2.0, 0.0), c(0.0, 1e-15)],
        );
        let q = p.clamp(1e-12);
        assert_eq!((q.lo(), q.hi()), (0, 0));
        assert_eq!(q.coeff(0), c(2.0, 0.0));
    }

    #[test]
    fn rational_function_requires_nonzero_denominator() {
        let num = LaurentPoly::<f64>::one();
        assert!(RationalFunction::new(num.clone(), LaurentPoly::zero()).is_err());
        let rf = RationalFunction::new(num, LaurentPoly::from_real_coeffs(0, &[2.0])).unwrap();
        let v = rf.eval(c(7.0, 0.0)).unwrap();
        assert!((v - c(0.5, 0.0)).abs() < TOL);
    }

    #[test]
    fn exact_division_recovers_the_quotient_or_refuses() {
        // (t² − 4t + 1)(t − 1)² / (t − 1)² at shifted exponents.
        let quotient = LaurentPoly::<f64>::from_real_coeffs(-2, &[1.0, -4.0, 1.0]);
        let den = LaurentPoly::from_real_coeffs(1, &[1.0, -2.0, 1.0]);
        let num = quotient.mul(&den);
        let q = try_divide_exact(&num, &den, TOL).unwrap();
        assert_eq!(q.lo(), quotient.lo());
        for e in q.lo()..=q.hi() {
            assert!((q.coeff(e) - quotient.coeff(e)).abs() < TOL);
        }
        // A perturbed numerator has a real remainder: division must refuse.
        let bad = num.add(&LaurentPoly::monomial(0, c(1e-6, 0.0)));
        assert!(try_divide_exact(&bad, &den, TOL).is_none());
        assert!(try_divide_exact(&LaurentPoly::one(), &den, TOL).is_none());
        assert!(try_divide_exact(&num, &LaurentPoly::zero(), TOL).is_none());
    }

    #[test]
    fn double_double_deflation_preserves_tiny_structure() {
        // (t−1)·(t − (1+1e−20)) is irresolvable at f64 but clean in dd.
        let eps = Dd::from_f64(1e-20);
        let one = Complex::<Dd>::one();
        let root2 = Complex::new(Dd::ONE + eps, Dd::ZERO);
        let l1 = LaurentPoly::from_coeffs(0, vec![-one, one]);
        let l2 = LaurentPoly::from_coeffs(0, vec![-root2, one]);
        let p = l1.mul(&l2);
        let (q, mult) = deflate_at(&p, Complex::one(), 1e-25);
        assert_eq!(mult, 1);
        let leftover_root = q.coeff(0).abs();
        assert!((leftover_root.to_f64() - (1.0)).abs() < 1e-15);
        let d = deflate_at_detailed(&q, Complex::one(), 1e-25);
        assert_eq!(d.multiplicity, 0);
        assert!(d.rejected_residual.unwrap() > 1e-22);
    }
}
