//! Dense complex matrices, LU determinants with log-magnitude tracking, and
//! determinants of Laurent-polynomial matrices via unit-circle sampling and
//! inverse DFT interpolation.

use rayon::prelude::*;
use thiserror::Error;

use crate::laurent::{poly_eval, LaurentError, LaurentPoly};
use crate::scalar::{Complex, Real};

/// Errors from matrix construction and determinant evaluation.
#[derive(Debug, Error)]
pub enum MatrixError {
    /// Rows of unequal length, or a size mismatch between operands.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension {
        /// Size the operation required.
        expected: usize,
        /// Size actually supplied.
        got: usize,
    },
    /// A sampled determinant overflowed the scalar's exponent range.
    #[error(
        "determinant sample overflowed (log-magnitude {log_magnitude:.1}); \
         use a higher-precision backend or an exact engine"
    )]
    Overflow {
        /// Natural log of the offending magnitude.
        log_magnitude: f64,
    },
    /// Evaluation failure while sampling entries.
    #[error(transparent)]
    Eval(#[from] LaurentError),
}

/// A square matrix of complex scalars in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<R> {
    n: usize,
    data: Vec<Complex<R>>,
}

/// Determinant value together with its overflow-safe log magnitude.
#[derive(Clone, Copy, Debug)]
pub struct DetResult<R> {
    /// The determinant in the working scalar (may overflow for huge inputs).
    pub det: Complex<R>,
    /// ln|det|, accumulated pivot-by-pivot so it survives overflow.
    pub log_magnitude: f64,
}

impl<R: Real> CMatrix<R> {
    /// The n×n zero matrix.
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    /// The n×n identity.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex::one());
        }
        m
    }

    /// Builds from rows, which must all have the outer length.
    pub fn from_rows(rows: Vec<Vec<Complex<R>>>) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MatrixError::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(CMatrix { n, data })
    }

    /// Side length.
    pub fn size(&self) -> usize {
        self.n
    }

    /// Entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> Complex<R> {
        self.data[i * self.n + j]
    }

    /// Overwrites entry (i, j).
    pub fn set(&mut self, i: usize, j: usize, v: Complex<R>) {
        self.data[i * self.n + j] = v;
    }

    /// Matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| a + b)
            .collect();
        Ok(CMatrix { n: self.n, data })
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.add(&other.scale(-Complex::<R>::one()))
    }

    /// Scalar multiple.
    pub fn scale(&self, s: Complex<R>) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Complex<R> {
        let mut t = Complex::zero();
        for i in 0..self.n {
            t = t + self.get(i, i);
        }
        t
    }

    /// Largest entry magnitude of the difference from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> R {
        let mut m = R::zero();
        for (&a, &b) in self.data.iter().zip(other.data.iter()) {
            let d = (a - b).abs();
            if d > m {
                m = d;
            }
        }
        m
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> R {
        let mut m = R::zero();
        for &a in &self.data {
            let d = a.abs();
            if d > m {
                m = d;
            }
        }
        m
    }

    /// Determinant by partially pivoted LU, with an overflow-safe log
    /// magnitude accumulated as the sum of pivot log-magnitudes.
    pub fn lu_det(&self) -> DetResult<R> {
        let n = self.n;
        if n == 0 {
            return DetResult {
                det: Complex::one(),
                log_magnitude: 0.0,
            };
        }
        let mut a = self.data.clone();
        let mut det = Complex::<R>::one();
        let mut log_magnitude = 0.0f64;
        let mut sign_flip = false;
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = a[k * n + k].abs2();
            for i in (k + 1)..n {
                let mag = a[i * n + k].abs2();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_row != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot_row * n + j);
                }
                sign_flip = !sign_flip;
            }
            let pivot = a[k * n + k];
            if pivot.is_zero() {
                return DetResult {
                    det: Complex::zero(),
                    log_magnitude: f64::NEG_INFINITY,
                };
            }
            det = det * pivot;
            log_magnitude += pivot.ln_abs_f64();
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                if factor.is_zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    a[i * n + j] = a[i * n + j] - factor * a[k * n + j];
                }
            }
        }
        if sign_flip {
            det = -det;
        }
        DetResult {
            det,
            log_magnitude,
        }
    }
}

/// A rectangular matrix whose entries are Laurent polynomials.
#[derive(Clone, Debug)]
pub struct LaurentMatrix<R> {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly<R>>,
}

impl<R: Real> LaurentMatrix<R> {
    /// A rows×cols matrix of zero polynomials.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            rows,
            cols,
            entries: vec![LaurentPoly::zero(); rows * cols],
        }
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly<R> {
        &self.entries[i * self.cols + j]
    }

    /// Overwrites entry (i, j).
    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly<R>) {
        self.entries[i * self.cols + j] = p;
    }

    /// Removes the contiguous column block `[drop·block, (drop+1)·block)`;
    /// the column count must be a multiple of `block`.
    pub fn delete_block_column(
        &self,
        block: usize,
        drop: usize,
    ) -> Result<LaurentMatrix<R>, MatrixError> {
        if block == 0 || self.cols % block != 0 || drop >= self.cols / block {
            return Err(MatrixError::Dimension {
                expected: self.cols,
                got: block * (drop + 1),
            });
        }
        let mut out = LaurentMatrix::zeros(self.rows, self.cols - block);
        for i in 0..self.rows {
            let mut out_j = 0usize;
            for j in 0..self.cols {
                if j / block == drop {
                    continue;
                }
                out.set(i, out_j, self.get(i, j).clone());
                out_j += 1;
            }
        }
        Ok(out)
    }

    /// Exponent window `[lo, hi]` guaranteed to contain the determinant's
    /// support, from per-row extremes of the nonzero entries. `None` when a
    /// row has no nonzero entry (the determinant is identically zero).
    pub fn det_window(&self) -> Option<(i64, i64)> {
        let mut lo = 0i64;
        let mut hi = 0i64;
        for i in 0..self.rows {
            let mut row_lo: Option<i64> = None;
            let mut row_hi: Option<i64> = None;
            for j in 0..self.cols {
                let e = self.get(i, j);
                if e.is_zero() {
                    continue;
                }
                row_lo = Some(row_lo.map_or(e.lo(), |v| v.min(e.lo())));
                row_hi = Some(row_hi.map_or(e.hi(), |v| v.max(e.hi())));
            }
            lo += row_lo?;
            hi += row_hi?;
        }
        Some((lo, hi))
    }

    /// Evaluates every entry at `z` (square matrices only).
    pub fn eval(&self, z: Complex<R>) -> Result<CMatrix<R>, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::Dimension {
                expected: self.rows,
                got: self.cols,
            });
        }
        let mut m = CMatrix::zeros(self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, poly_eval(self.get(i, j), z)?);
            }
        }
        Ok(m)
    }

    /// Determinant as a Laurent polynomial (square matrices only).
    ///
    /// Samples the scalar determinant at `m` = window-width points
    /// `z_k = e^{2πik/m}` on the unit circle (dense LU per sample, in
    /// parallel), then recovers coefficients by the inverse DFT
    /// `c_{lo+j} = (1/m) Σ_k s_k z_k^{−(lo+j)}` summed in a fixed order.
    /// Coefficients below `m · ε · max|s_k|` are clamped to zero.
    pub fn laurent_det(&self) -> Result<LaurentPoly<R>, MatrixError> {
        if self.rows != self.cols {
            return Err(MatrixError::Dimension {
                expected: self.rows,
                got: self.cols,
            });
        }
        if self.rows == 0 {
            return Ok(LaurentPoly::one());
        }
        let Some((lo, hi)) = self.det_window() else {
            return Ok(LaurentPoly::zero());
        };
        let m = (hi - lo + 1) as usize;
        // Roots of unity from the scalar's own 2π reduction, so samples at
        // quarter turns are exact in both backends.
        let roots: Vec<Complex<R>> = (0..m)
            .map(|k| Complex::<R>::unit_at(R::from_i64(k as i64) / R::from_i64(m as i64)))
            .collect();
        let samples: Vec<DetResult<R>> = (0..m)
            .into_par_iter()
            .map(|k| self.eval(roots[k]).map(|mat| mat.lu_det()))
            .collect::<Result<_, _>>()?;
        let mut max_sample = R::zero();
        for s in &samples {
            if !s.det.is_finite() {
                return Err(MatrixError::Overflow {
                    log_magnitude: s.log_magnitude,
                });
            }
            let a = s.det.abs();
            if a > max_sample {
                max_sample = a;
            }
        }
        let mut coeffs = Vec::with_capacity(m);
        for j in 0..m {
            let mut acc = Complex::<R>::zero();
            for (k, s) in samples.iter().enumerate() {
                // z_k^{−(lo+j)} = root at index (−k·(lo+j)) mod m.
                let e = (k as i64 * (lo + j as i64)).rem_euclid(m as i64) as usize;
                let twiddle = roots[(m - e) % m];
                acc = acc + s.det * twiddle;
            }
            coeffs.push(acc.scale(R::one() / R::from_i64(m as i64)));
        }
        let threshold =
            R::from_f64(m as f64) * R::epsilon() * max_sample * R::from_f64(m as f64).sqrt();
        Ok(LaurentPoly::from_coeffs(lo, coeffs).clamp(threshold))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::compare_up_to_unit;

    /// Absolute tolerance for binary64 determinant comparisons.
    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::from_f64(re, im)
    }

    fn mono(exp: i64, re: f64) -> LaurentPoly<f64> {
        LaurentPoly::monomial(exp, c(re, 0.0))
    }

    #[test]
    fn lu_det_known_values() {
        let m = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(3.0, 0.0), c(4.0, 0.0)],
        ])
        .unwrap();
        let r = m.lu_det();
        assert!((r.det - c(-2.0, 0.0)).abs() < TOL);
        assert!((r.log_magnitude - 2.0f64.ln()).abs() < 1e-12);

        let id = CMatrix::<f64>::identity(5);
        assert!((id.lu_det().det - c(1.0, 0.0)).abs() < TOL);

        // Rank-deficient: two equal rows.
        let s = CMatrix::from_rows(vec![
            vec![c(1.0, 1.0), c(2.0, 0.0)],
            vec![c(1.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let rs = s.lu_det();
        assert!(rs.det.abs() < TOL);
    }

    #[test]
    fn lu_det_complex_and_permutation() {
        // det [[i, 0], [0, i]] = −1.
        let m = CMatrix::from_rows(vec![
            vec![Complex::<f64>::i(), c(0.0, 0.0)],
            vec![c(0.0, 0.0), Complex::<f64>::i()],
        ])
        .unwrap();
        assert!((m.lu_det().det - c(-1.0, 0.0)).abs() < TOL);

        // A transposition has determinant −1.
        let p = CMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!((p.lu_det().det - c(-1.0, 0.0)).abs() < TOL);
    }

    #[test]
    fn lu_det_log_magnitude_tracks_scale() {
        // diag(1e200, 1e200): det overflows f64 but the log stays finite.
        let mut m = CMatrix::<f64>::zeros(2);
        m.set(0, 0, c(1e200, 0.0));
        m.set(1, 1, c(1e200, 0.0));
        let r = m.lu_det();
        assert!(!r.det.is_finite());
        assert!((r.log_magnitude - 400.0 * 10.0f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn matrix_product_and_trace() {
        let a = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let b = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(-1.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let ab = a.mul(&b).unwrap();
        assert!((ab.get(0, 0) - c(0.0, 0.0)).abs() < TOL);
        assert!((ab.trace() - c(1.0, 0.0)).abs() < TOL);
    }

    #[test]
    fn laurent_det_diagonal() {
        // diag(t − 1, t⁻¹ + 2) has determinant 2t − 1 − t⁻¹ (window [−1, 1]).
        let mut m = LaurentMatrix::<f64>::zeros(2, 2);
        m.set(0, 0, LaurentPoly::from_real_coeffs(0, &[-1.0, 1.0]));
        m.set(1, 1, LaurentPoly::from_real_coeffs(-1, &[1.0, 2.0]));
        assert_eq!(m.det_window(), Some((-1, 1)));
        let d = m.laurent_det().unwrap();
        let expected = LaurentPoly::from_real_coeffs(-1, &[-1.0, -1.0, 2.0]);
        assert!(d.sub(&expected).max_coeff_abs() < TOL);
    }

    #[test]
    fn laurent_det_matches_cofactor_2x2() {
        let mut m = LaurentMatrix::<f64>::zeros(2, 2);
        let a = LaurentPoly::from_real_coeffs(-1, &[1.0, -4.0, 1.0]);
        let b = mono(2, 3.0);
        let cc = LaurentPoly::from_real_coeffs(0, &[2.0, 1.0]);
        let d = LaurentPoly::from_real_coeffs(-2, &[1.0, 0.0, -1.0]);
        m.set(0, 0, a.clone());
        m.set(0, 1, b.clone());
        m.set(1, 0, cc.clone());
        m.set(1, 1, d.clone());
        let det = m.laurent_det().unwrap();
        let expected = a.mul(&d).sub(&b.mul(&cc));
        let err = det.sub(&expected).max_coeff_abs();
        assert!(err < TOL * (1.0 + expected.max_coeff_abs()));
    }

    #[test]
    fn laurent_det_matches_cofactor_3x3() {
        let mut m = LaurentMatrix::<f64>::zeros(3, 3);
        let entries = [
            [mono(0, 1.0), mono(1, 2.0), mono(-1, 1.0)],
            [
                LaurentPoly::from_real_coeffs(0, &[1.0, 1.0]),
                mono(0, -1.0),
                mono(0, 2.0),
            ],
            [
                mono(2, 1.0),
                LaurentPoly::from_real_coeffs(-1, &[3.0, 0.0, 1.0]),
                mono(0, 1.0),
            ],
        ];
        for (i, row) in entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m.set(i, j, e.clone());
            }
        }
        // Cofactor expansion along the first row.
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
            entries[r0][c0]
                .mul(&entries[r1][c1])
                .sub(&entries[r0][c1].mul(&entries[r1][c0]))
        };
        let expected = entries[0][0]
            .mul(&minor(1, 2, 1, 2))
            .sub(&entries[0][1].mul(&minor(1, 2, 0, 2)))
            .add(&entries[0][2].mul(&minor(1, 2, 0, 1)));
        let det = m.laurent_det().unwrap();
        let err = det.sub(&expected).max_coeff_abs();
        assert!(err < TOL * (1.0 + expected.max_coeff_abs()));
    }

    #[test]
    fn laurent_det_zero_row_is_zero() {
        let mut m = LaurentMatrix::<f64>::zeros(2, 2);
        m.set(0, 0, mono(3, 2.0));
        assert_eq!(m.det_window(), None);
        assert!(m.laurent_det().unwrap().is_zero());
    }

    #[test]
    fn laurent_det_integer_coefficients_come_back_clean() {
        // Entries with integer coefficients: interpolated coefficients land
        // within clamping distance of integers.
        let mut m = LaurentMatrix::<f64>::zeros(2, 2);
        m.set(0, 0, LaurentPoly::from_real_coeffs(0, &[-1.0, 1.0]));
        m.set(0, 1, LaurentPoly::from_real_coeffs(0, &[1.0, 1.0]));
        m.set(1, 0, LaurentPoly::from_real_coeffs(-1, &[-1.0, 1.0]));
        m.set(1, 1, LaurentPoly::from_real_coeffs(-1, &[7.0]));
        let d = m.laurent_det().unwrap();
        for &co in d.coeffs() {
            let re = co.re.round();
            assert!((co.re - re).abs() < 1e-10);
            assert!(co.im.abs() < 1e-10);
        }
    }

    #[test]
    fn block_column_deletion_keeps_layout() {
        // A 2×4 matrix in 2-wide column blocks: dropping block 1 keeps a
        // square 2×2 with the remaining columns shifted left.
        let mut m = LaurentMatrix::<f64>::zeros(2, 4);
        for i in 0..2 {
            for j in 0..4 {
                m.set(i, j, mono(0, (10 * i + j) as f64 + 1.0));
            }
        }
        let trimmed = m.delete_block_column(2, 1).unwrap();
        assert_eq!((trimmed.rows(), trimmed.cols()), (2, 2));
        assert_eq!(trimmed.get(0, 0), &mono(0, 1.0));
        assert_eq!(trimmed.get(1, 1), &mono(0, 12.0));
    }

    #[test]
    fn unit_comparison_of_determinants_up_to_shift() {
        let mut m = LaurentMatrix::<f64>::zeros(2, 2);
        m.set(0, 0, mono(0, 1.0));
        m.set(1, 1, LaurentPoly::from_real_coeffs(0, &[-1.0, 1.0]));
        let d1 = m.laurent_det().unwrap();
        let mut shifted = m.clone();
        shifted.set(0, 0, mono(5, -1.0));
        let d2 = shifted.laurent_det().unwrap();
        assert!(compare_up_to_unit(&d1, &d2, 1e-9));
    }
}
