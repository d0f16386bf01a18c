//! Exact evaluation engine over imaginary quadratic rings.
//!
//! Parabolic holonomy matrices of the supported census land in rings of
//! integers of ℚ(√−d) for small d. When every 2×2 entry is recognized as an
//! algebraic integer a + b·ω (ω² = rω − q), all determinant polynomials have
//! coefficients in the same ring, and the invariant's numerator and
//! denominator can be produced exactly: sample determinants at integer nodes
//! modulo several 59-bit primes (once per conjugate embedding of ω),
//! interpolate modulo each prime, solve for the (a, b) coordinates, and
//! reconstruct by the Chinese remainder theorem with a spare prime verifying
//! the coefficient bound. Root multiplicities at t = ±1 then come from exact
//! synthetic division with identically-zero remainders, immune to the
//! conditioning that limits the floating-point path at large degree.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::matrix::CMatrix;
use crate::rep::{lift_rep, SignAssignment, Sl2Rep};
use crate::scalar::{Complex, Real};
use crate::words::{fox_derivative, AlphaMap, GroupRingElement, Presentation, Word};

/// Errors from the exact engine.
#[derive(Debug, Error)]
pub enum ExactError {
    /// Could not gather enough usable primes.
    #[error("prime generation exhausted the search range")]
    PrimeGeneration,
    /// Reconstruction kept failing its verification prime.
    #[error("coefficient reconstruction exceeded its bound after retries")]
    BoundExceeded,
    /// The requested point is outside the engine's exact domain.
    #[error("exact evaluation supports only t = ±1, got {0}")]
    UnsupportedPoint(i64),
}

/// An imaginary quadratic ring of integers ℤ[ω], ω² = rω − q, of ℚ(√−d).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadRing {
    /// Square-free positive d of the field ℚ(√−d).
    pub d: i64,
    /// Constant of the minimal polynomial ω² = rω − q.
    pub q: i64,
    /// Linear coefficient of the minimal polynomial.
    pub r: i64,
}

impl QuadRing {
    /// The ring of integers of ℚ(√−d): ω = (1+√−d)/2 when d ≡ 3 (mod 4),
    /// ω = √−d otherwise.
    pub fn for_discriminant(d: i64) -> QuadRing {
        if d % 4 == 3 {
            QuadRing {
                d,
                q: (1 + d) / 4,
                r: 1,
            }
        } else {
            QuadRing { d, q: d, r: 0 }
        }
    }

    /// Imaginary part of ω.
    pub fn omega_im(&self) -> f64 {
        ((4 * self.q - self.r * self.r) as f64).sqrt() / 2.0
    }

    /// Real part of ω.
    pub fn omega_re(&self) -> f64 {
        self.r as f64 / 2.0
    }
}

/// An algebraic integer a + b·ω with machine-sized coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadInt {
    /// Rational coordinate.
    pub a: i64,
    /// ω coordinate.
    pub b: i64,
}

impl QuadInt {
    /// The zero element.
    pub fn zero() -> QuadInt {
        QuadInt { a: 0, b: 0 }
    }

    /// The unit element.
    pub fn one() -> QuadInt {
        QuadInt { a: 1, b: 0 }
    }

    /// Negation.
    pub fn neg(self) -> QuadInt {
        QuadInt {
            a: -self.a,
            b: -self.b,
        }
    }

    /// Product in the ring (ω² rewritten via ω² = rω − q).
    pub fn mul(self, o: QuadInt, ring: QuadRing) -> QuadInt {
        let bb = self.b as i128 * o.b as i128;
        let a = self.a as i128 * o.a as i128 - ring.q as i128 * bb;
        let b = self.a as i128 * o.b as i128 + self.b as i128 * o.a as i128 + ring.r as i128 * bb;
        QuadInt {
            a: a.try_into().expect("generator entries stay machine-sized"),
            b: b.try_into().expect("generator entries stay machine-sized"),
        }
    }

    /// Complex value under the standard embedding.
    pub fn to_complex<R: Real>(self, ring: QuadRing) -> Complex<R> {
        Complex::from_f64(
            self.a as f64 + self.b as f64 * ring.omega_re(),
            self.b as f64 * ring.omega_im(),
        )
    }
}

/// A recognized exact representation: a ring plus 2×2 generator images.
#[derive(Clone, Debug)]
pub struct ExactRep {
    /// Ring all entries live in.
    pub ring: QuadRing,
    /// Row-major 2×2 image of each generator.
    pub images: Vec<[QuadInt; 4]>,
}

/// Absolute tolerance for matching floating entries to ring elements.
const RECOGNITION_TOL: f64 = 1e-9;

/// Candidate fields tried during recognition, Gaussian and Eisenstein first.
const CANDIDATE_D: [i64; 5] = [1, 3, 2, 7, 11];

fn fit_entry(re: f64, im: f64, ring: QuadRing) -> Option<QuadInt> {
    let b = im / ring.omega_im();
    let b_round = b.round();
    if (b - b_round).abs() > RECOGNITION_TOL {
        return None;
    }
    let a = re - b_round * ring.omega_re();
    let a_round = a.round();
    if (a - a_round).abs() > RECOGNITION_TOL {
        return None;
    }
    if a_round.abs() > 1e15 || b_round.abs() > 1e15 {
        return None;
    }
    Some(QuadInt {
        a: a_round as i64,
        b: b_round as i64,
    })
}

/// Tries to recognize every generator image as a matrix over one imaginary
/// quadratic ring of integers with exact determinant 1.
pub fn recognize(images: &[CMatrix<f64>]) -> Option<ExactRep> {
    'candidates: for d in CANDIDATE_D {
        let ring = QuadRing::for_discriminant(d);
        let mut out = Vec::with_capacity(images.len());
        for m in images {
            if m.size() != 2 {
                return None;
            }
            let mut entries = [QuadInt::zero(); 4];
            for (k, entry) in entries.iter_mut().enumerate() {
                let v = m.get(k / 2, k % 2);
                match fit_entry(v.re, v.im, ring) {
                    Some(q) => *entry = q,
                    None => continue 'candidates,
                }
            }
            // det must be exactly 1 in the ring.
            let diag = entries[0].mul(entries[3], ring);
            let off = entries[1].mul(entries[2], ring);
            let det = QuadInt {
                a: diag.a - off.a,
                b: diag.b - off.b,
            };
            if det != QuadInt::one() {
                continue 'candidates;
            }
            out.push(entries);
        }
        return Some(ExactRep { ring, images: out });
    }
    None
}

// ---------------------------------------------------------------------------
// Modular arithmetic toolkit.
// ---------------------------------------------------------------------------

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn submod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Deterministic Miller–Rabin, valid for every u64.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == small {
            return true;
        }
        if n % small == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witnesses: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witnesses;
            }
        }
        return false;
    }
    true
}

fn legendre_is_square(a: u64, p: u64) -> bool {
    powmod(a, (p - 1) / 2, p) == 1
}

/// Tonelli–Shanks square root modulo an odd prime; `a` must be a QR.
fn sqrt_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        return 0;
    }
    if p % 4 == 3 {
        return powmod(a, (p + 1) / 4, p);
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while legendre_is_square(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut res = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        res = mulmod(res, b, p);
    }
    res
}

/// A prime together with a square root of −d, giving both embeddings of ω.
#[derive(Clone, Copy, Debug)]
struct PrimePair {
    p: u64,
    /// s with s² ≡ −d (mod p).
    s: u64,
}

impl PrimePair {
    /// The two residues ω = (r ± √(r²−4q))/2 under the conjugate embeddings.
    fn omegas(&self, ring: QuadRing) -> (u64, u64) {
        let p = self.p;
        let inv2 = invmod(2, p);
        let r = ring.r.rem_euclid(p as i64) as u64;
        // The discriminant r² − 4q is −d for half-integral ω (r = 1) and
        // −4d for ω = √−d (r = 0); its root follows from the stored √−d.
        let s_disc = if ring.r == 0 {
            mulmod(2, self.s, p)
        } else {
            self.s
        };
        let w_plus = mulmod(addmod(r, s_disc, p), inv2, p);
        let w_minus = mulmod(submod(r, s_disc, p), inv2, p);
        (w_plus, w_minus)
    }
}

/// Fixed, deterministic prime search: descend through odd candidates below
/// 2⁵⁹ keeping primes where −d is a quadratic residue.
fn primes_for_ring(ring: QuadRing, count: usize) -> Result<Vec<PrimePair>, ExactError> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = (1u64 << 59) - 1;
    while out.len() < count {
        if candidate < (1 << 58) {
            return Err(ExactError::PrimeGeneration);
        }
        if is_prime(candidate) {
            let neg_d = (-ring.d).rem_euclid(candidate as i64) as u64;
            if legendre_is_square(neg_d, candidate) {
                let s = sqrt_mod(neg_d, candidate);
                debug_assert_eq!(mulmod(s, s, candidate), neg_d);
                out.push(PrimePair { p: candidate, s });
            }
        }
        candidate -= 2;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Matrices over ℤ/p.
// ---------------------------------------------------------------------------

/// A square matrix of residues.
#[derive(Clone, Debug)]
struct PMatrix {
    n: usize,
    data: Vec<u64>,
}

impl PMatrix {
    fn zeros(n: usize) -> PMatrix {
        PMatrix {
            n,
            data: vec![0; n * n],
        }
    }

    fn identity(n: usize) -> PMatrix {
        let mut m = PMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.n + j] = v;
    }

    fn mul(&self, o: &PMatrix, p: u64) -> PMatrix {
        let n = self.n;
        let mut out = PMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let v = addmod(out.get(i, j), mulmod(a, o.get(k, j), p), p);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Determinant by Gaussian elimination over ℤ/p.
    fn det(&self, p: u64) -> u64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = 1u64;
        let mut negate = false;
        for k in 0..n {
            let pivot_row = match (k..n).find(|&i| a[i * n + k] != 0) {
                Some(i) => i,
                None => return 0,
            };
            if pivot_row != k {
                for j in 0..n {
                    a.swap(k * n + j, pivot_row * n + j);
                }
                negate = !negate;
            }
            let pivot = a[k * n + k];
            det = mulmod(det, pivot, p);
            let inv = invmod(pivot, p);
            for i in (k + 1)..n {
                let factor = mulmod(a[i * n + k], inv, p);
                if factor == 0 {
                    continue;
                }
                for j in k..n {
                    let v = submod(a[i * n + j], mulmod(factor, a[k * n + j], p), p);
                    a[i * n + j] = v;
                }
            }
        }
        if negate {
            submod(0, det, p)
        } else {
            det
        }
    }
}

// ---------------------------------------------------------------------------
// Per-embedding evaluation context.
// ---------------------------------------------------------------------------

/// Coefficients of (px + qy)^k over ℤ/p, by repeated multiplication.
fn linear_form_power_mod(pc: u64, qc: u64, k: usize, p: u64) -> Vec<u64> {
    let mut coeffs = vec![1u64];
    for _ in 0..k {
        let mut next = vec![0u64; coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] = addmod(next[i], mulmod(c, pc, p), p);
            next[i + 1] = addmod(next[i + 1], mulmod(c, qc, p), p);
        }
        coeffs = next;
    }
    coeffs
}

/// Degree-n symmetric power of a 2×2 residue matrix.
fn sym_power_mod(n: usize, e: &[u64; 4], p: u64) -> PMatrix {
    let (a, b, c, d) = (e[0], e[1], e[2], e[3]);
    let mut out = PMatrix::zeros(n);
    for j in 0..n {
        let left = linear_form_power_mod(d, submod(0, b, p), n - 1 - j, p);
        let right = linear_form_power_mod(submod(0, c, p), a, j, p);
        for (i1, &u) in left.iter().enumerate() {
            for (i2, &v) in right.iter().enumerate() {
                let i = i1 + i2;
                let cur = out.get(i, j);
                out.set(i, j, addmod(cur, mulmod(u, v, p), p));
            }
        }
    }
    out
}

/// A term of a Φ block: integer coefficient, t-exponent, cached word index.
#[derive(Clone, Copy, Debug)]
struct BlockTerm {
    coeff: i64,
    alpha: i64,
    word: usize,
}

/// A block of the evaluation problem: destination block row/column plus the
/// terms contributing to it.
#[derive(Clone, Debug)]
struct BlockSpec {
    bi: usize,
    bj: usize,
    terms: Vec<BlockTerm>,
}

/// Shared indexing of the distinct words appearing across all blocks.
#[derive(Default)]
struct WordTable {
    index: std::collections::BTreeMap<Word, usize>,
    words: Vec<Word>,
}

impl WordTable {
    fn intern(&mut self, w: &Word) -> usize {
        if let Some(&i) = self.index.get(w) {
            return i;
        }
        let i = self.words.len();
        self.index.insert(w.clone(), i);
        self.words.push(w.clone());
        i
    }
}

/// One conjugate embedding of the ring into ℤ/p with everything needed to
/// evaluate determinants at integer nodes.
struct ChannelCtx {
    p: u64,
    word_images: Vec<PMatrix>,
}

impl ChannelCtx {
    fn new(
        p: u64,
        w: u64,
        n: usize,
        images: &[[QuadInt; 4]],
        signs: &[i64],
        table: &WordTable,
    ) -> ChannelCtx {
        let embed = |x: QuadInt| -> u64 {
            let a = x.a.rem_euclid(p as i64) as u64;
            let b = x.b.rem_euclid(p as i64) as u64;
            addmod(a, mulmod(b, w, p), p)
        };
        let mut gens = Vec::with_capacity(images.len());
        let mut inv_gens = Vec::with_capacity(images.len());
        for (g, img) in images.iter().enumerate() {
            let sign = signs[g];
            let signed: Vec<QuadInt> = img
                .iter()
                .map(|&e| if sign == 1 { e } else { e.neg() })
                .collect();
            let e = [
                embed(signed[0]),
                embed(signed[1]),
                embed(signed[2]),
                embed(signed[3]),
            ];
            // Adjugate = inverse, since the signed matrix has determinant 1.
            let adj = [e[3], submod(0, e[1], p), submod(0, e[2], p), e[0]];
            gens.push(sym_power_mod(n, &e, p));
            inv_gens.push(sym_power_mod(n, &adj, p));
        }
        let word_images = table
            .words
            .iter()
            .map(|word| {
                let mut acc = PMatrix::identity(n);
                for &(g, e) in word.letters() {
                    let factor = if e > 0 { &gens[g] } else { &inv_gens[g] };
                    acc = acc.mul(factor, p);
                }
                acc
            })
            .collect();
        ChannelCtx { p, word_images }
    }

    /// Assembles the block matrix at integer node τ and takes its determinant.
    fn det_at_node(&self, specs: &[BlockSpec], block_rows: usize, n: usize, tau: i64) -> u64 {
        let p = self.p;
        let size = block_rows * n;
        let mut m = PMatrix::zeros(size);
        let t = tau.rem_euclid(p as i64) as u64;
        let t_inv = invmod(t, p);
        for spec in specs {
            for term in &spec.terms {
                let base = if term.alpha >= 0 { t } else { t_inv };
                let tpow = powmod(base, term.alpha.unsigned_abs(), p);
                let coeff = term.coeff.rem_euclid(p as i64) as u64;
                let scale = mulmod(coeff, tpow, p);
                if scale == 0 {
                    continue;
                }
                let img = &self.word_images[term.word];
                for i in 0..n {
                    for j in 0..n {
                        let v = img.get(i, j);
                        if v == 0 {
                            continue;
                        }
                        let (ri, rj) = (spec.bi * n + i, spec.bj * n + j);
                        let cur = m.get(ri, rj);
                        m.set(ri, rj, addmod(cur, mulmod(scale, v, p), p));
                    }
                }
            }
        }
        m.det(p)
    }
}

/// Lagrange interpolation over ℤ/p at distinct integer nodes: returns the
/// coefficients (constant first) of the unique polynomial through the data.
fn lagrange_mod(nodes: &[i64], values: &[u64], p: u64) -> Vec<u64> {
    let m = nodes.len();
    let xs: Vec<u64> = nodes.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
    // master(x) = Π (x − x_i), expanded.
    let mut master = vec![0u64; m + 1];
    master[0] = 1;
    for (deg, &x) in xs.iter().enumerate() {
        let neg_x = submod(0, x, p);
        let mut next = vec![0u64; m + 1];
        for k in 0..=deg {
            next[k + 1] = addmod(next[k + 1], master[k], p);
            next[k] = addmod(next[k], mulmod(master[k], neg_x, p), p);
        }
        master = next;
    }
    let mut out = vec![0u64; m];
    for (&xi, &vi) in xs.iter().zip(values.iter()) {
        // basis_i(x) = master(x)/(x − x_i), by synthetic division.
        let mut basis = vec![0u64; m];
        let mut carry = master[m];
        for k in (0..m).rev() {
            basis[k] = carry;
            carry = addmod(master[k], mulmod(carry, xi, p), p);
        }
        // weight = v_i / basis_i(x_i).
        let mut at_xi = 0u64;
        for k in (0..m).rev() {
            at_xi = addmod(mulmod(at_xi, xi, p), basis[k], p);
        }
        let weight = mulmod(vi, invmod(at_xi, p), p);
        for k in 0..m {
            out[k] = addmod(out[k], mulmod(weight, basis[k], p), p);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Exact polynomials over the ring.
// ---------------------------------------------------------------------------

/// An algebraic integer with unbounded coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigQuad {
    /// Rational coordinate.
    pub a: BigInt,
    /// ω coordinate.
    pub b: BigInt,
}

impl BigQuad {
    /// The zero element.
    pub fn zero() -> BigQuad {
        BigQuad {
            a: BigInt::zero(),
            b: BigInt::zero(),
        }
    }

    /// True when both coordinates vanish.
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Sum.
    pub fn add(&self, o: &BigQuad) -> BigQuad {
        BigQuad {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }

    /// Difference.
    pub fn sub(&self, o: &BigQuad) -> BigQuad {
        BigQuad {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }

    /// Product in the ring.
    pub fn mul(&self, o: &BigQuad, ring: QuadRing) -> BigQuad {
        let bb = &self.b * &o.b;
        BigQuad {
            a: &self.a * &o.a - BigInt::from(ring.q) * &bb,
            b: &self.a * &o.b + &self.b * &o.a + BigInt::from(ring.r) * &bb,
        }
    }

    /// Squared modulus a² + r·ab + q·b², a nonnegative rational integer.
    pub fn norm2(&self, ring: QuadRing) -> BigInt {
        &self.a * &self.a
            + BigInt::from(ring.r) * &self.a * &self.b
            + BigInt::from(ring.q) * &self.b * &self.b
    }

    /// Natural log of the modulus; −∞ for zero.
    pub fn ln_modulus(&self, ring: QuadRing) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        0.5 * ln_bigint(&self.norm2(ring))
    }

    /// Complex value under the standard embedding (may overflow to ±∞).
    pub fn to_complex<R: Real>(&self, ring: QuadRing) -> Complex<R> {
        let a = self.a.to_f64().unwrap_or(f64::INFINITY);
        let b = self.b.to_f64().unwrap_or(f64::INFINITY);
        Complex::from_f64(
            a + b * ring.omega_re(),
            b * ring.omega_im(),
        )
    }
}

/// ln of a positive big integer, stable for any size.
fn ln_bigint(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 52 {
        return mag.to_f64().unwrap().ln();
    }
    let shift = bits - 53;
    let top = (mag >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A Laurent polynomial with coefficients in an imaginary quadratic ring.
#[derive(Clone, Debug)]
pub struct ExactPoly {
    /// Ring of the coefficients.
    pub ring: QuadRing,
    lo: i64,
    coeffs: Vec<BigQuad>,
}

impl ExactPoly {
    /// Builds from a dense run, trimming zero ends.
    pub fn from_coeffs(ring: QuadRing, lo: i64, coeffs: Vec<BigQuad>) -> ExactPoly {
        let mut p = ExactPoly { ring, lo, coeffs };
        p.trim();
        p
    }

    /// The polynomial t^a − 1, the column normalizer of a meridian of weight a.
    pub fn t_power_minus_one(ring: QuadRing, a: i64) -> ExactPoly {
        let mut coeffs = vec![BigQuad::zero(); a as usize + 1];
        coeffs[0] = BigQuad {
            a: BigInt::from(-1),
            b: BigInt::zero(),
        };
        coeffs[a as usize] = BigQuad {
            a: BigInt::from(1),
            b: BigInt::zero(),
        };
        ExactPoly::from_coeffs(ring, 0, coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.lo = 0;
        }
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest exponent.
    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    /// Number of stored coefficients.
    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of t^exp.
    pub fn coeff(&self, exp: i64) -> BigQuad {
        if exp < self.lo {
            return BigQuad::zero();
        }
        self.coeffs
            .get((exp - self.lo) as usize)
            .cloned()
            .unwrap_or_else(BigQuad::zero)
    }

    /// Product.
    pub fn mul(&self, o: &ExactPoly) -> ExactPoly {
        if self.is_zero() || o.is_zero() {
            return ExactPoly::from_coeffs(self.ring, 0, Vec::new());
        }
        let mut coeffs = vec![BigQuad::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                let prod = a.mul(b, self.ring);
                coeffs[i + j] = coeffs[i + j].add(&prod);
            }
        }
        ExactPoly::from_coeffs(self.ring, self.lo + o.lo, coeffs)
    }

    /// Value at t = c for c = ±1 (the unit ambiguity makes |lo| irrelevant).
    pub fn eval_pm1(&self, c: i64) -> BigQuad {
        assert!(c == 1 || c == -1, "exact evaluation is for t = ±1 only");
        let mut acc = BigQuad::zero();
        for (k, co) in self.coeffs.iter().enumerate() {
            let exp = self.lo + k as i64;
            if c == 1 || exp.rem_euclid(2) == 0 {
                acc = acc.add(co);
            } else {
                acc = acc.sub(co);
            }
        }
        acc
    }

    /// Divides out (t − c)^k for the largest k with exactly-zero remainders;
    /// returns the quotient and k (up to the unit t^lo, which is carried on
    /// the quotient unchanged). The zero polynomial returns order 0.
    pub fn deflate_pm1(&self, c: i64) -> (ExactPoly, usize) {
        assert!(c == 1 || c == -1, "exact deflation is for t = ±1 only");
        let mut cur = self.clone();
        let mut mult = 0usize;
        while cur.coeffs.len() >= 2 {
            // Synthetic division of the ordinary part by (t − c): with c = ±1
            // every step is a single addition or subtraction.
            let m = cur.coeffs.len();
            let mut out = vec![BigQuad::zero(); m - 1];
            let mut acc = BigQuad::zero();
            for k in (1..m).rev() {
                acc = if c == 1 {
                    cur.coeffs[k].add(&acc)
                } else {
                    cur.coeffs[k].sub(&acc)
                };
                out[k - 1] = acc.clone();
            }
            let rem = if c == 1 {
                cur.coeffs[0].add(&acc)
            } else {
                cur.coeffs[0].sub(&acc)
            };
            if !rem.is_zero() {
                break;
            }
            cur = ExactPoly::from_coeffs(cur.ring, cur.lo, out);
            mult += 1;
        }
        (cur, mult)
    }

    /// Floating image of the polynomial (coefficients may overflow to ±∞
    /// when the coordinates exceed the scalar's range).
    pub fn to_laurent<R: Real>(&self) -> LaurentPoly<R> {
        LaurentPoly::from_coeffs(
            self.lo,
            self.coeffs
                .iter()
                .map(|c| c.to_complex::<R>(self.ring))
                .collect(),
        )
    }
}

// ---------------------------------------------------------------------------
// CRT reconstruction.
// ---------------------------------------------------------------------------

/// Combines residues into the symmetric range (−M/2, M/2].
fn crt_symmetric(residues: &[u64], primes: &[u64]) -> BigInt {
    let mut x = BigInt::from(residues[0]);
    let mut modulus = BigInt::from(primes[0]);
    for (&r, &p) in residues.iter().zip(primes.iter()).skip(1) {
        let p_big = BigInt::from(p);
        let cur = ((&x % &p_big) + &p_big) % &p_big;
        let cur_u = cur.to_u64().unwrap();
        let diff = submod(r, cur_u % p, p);
        let m_inv = {
            let m_mod = ((&modulus % &p_big) + &p_big) % &p_big;
            invmod(m_mod.to_u64().unwrap(), p)
        };
        let k = mulmod(diff, m_inv, p);
        x += &modulus * BigInt::from(k);
        modulus *= &p_big;
    }
    let half = &modulus / 2;
    if x > half {
        x -= &modulus;
    }
    x
}

// ---------------------------------------------------------------------------
// The engine.
// ---------------------------------------------------------------------------

/// Exact invariant engine bound to one presentation and recognized images.
pub struct ExactEngine {
    presentation: Presentation,
    alpha: AlphaMap,
    rep: ExactRep,
}

/// Numerator/denominator specs plus their interpolation windows.
struct Problem {
    specs_num: Vec<BlockSpec>,
    specs_den: Vec<BlockSpec>,
    table: WordTable,
    block_rows: usize,
    window_num: (i64, i64),
    window_den: (i64, i64),
    log2_bound: f64,
}

impl ExactEngine {
    /// Binds the engine if every generator image is recognized exactly.
    pub fn try_new(
        presentation: &Presentation,
        alpha: &AlphaMap,
        images: &[CMatrix<f64>],
    ) -> Option<ExactEngine> {
        let rep = recognize(images)?;
        Some(ExactEngine {
            presentation: presentation.clone(),
            alpha: alpha.clone(),
            rep,
        })
    }

    /// Ring the engine works over.
    pub fn ring(&self) -> QuadRing {
        self.rep.ring
    }

    /// Abelianization the engine was bound to.
    pub fn alpha(&self) -> &AlphaMap {
        &self.alpha
    }

    fn signs_per_generator(&self, signs: &SignAssignment) -> Vec<i64> {
        self.presentation
            .generators
            .iter()
            .map(|g| signs.get(g.component) as i64)
            .collect()
    }

    /// Reconstructs a float Sl2 representation (for bound estimation).
    fn float_rep(&self) -> Sl2Rep<f64> {
        let images = self
            .rep
            .images
            .iter()
            .map(|img| {
                CMatrix::from_rows(vec![
                    vec![
                        img[0].to_complex::<f64>(self.rep.ring),
                        img[1].to_complex::<f64>(self.rep.ring),
                    ],
                    vec![
                        img[2].to_complex::<f64>(self.rep.ring),
                        img[3].to_complex::<f64>(self.rep.ring),
                    ],
                ])
                .unwrap()
            })
            .collect();
        Sl2Rep::new(images).unwrap()
    }

    /// Builds block specs, windows, and the coefficient-size bound for the
    /// deleted-column-0 invariant at degree n.
    fn problem(&self, n: usize, signs: &SignAssignment) -> Problem {
        let g = self.presentation.generators.len();
        let relators = &self.presentation.relators;
        let mut table = WordTable::default();
        let mut specs_num = Vec::new();
        let mut row_windows = Vec::new();
        for (i, relator) in relators.iter().enumerate() {
            let mut row_lo: Option<i64> = None;
            let mut row_hi: Option<i64> = None;
            for j in 1..g {
                let derivative = fox_derivative(relator, j);
                let mut terms = Vec::new();
                for (w, coeff) in derivative.terms() {
                    let alpha = self.alpha.degree(w);
                    row_lo = Some(row_lo.map_or(alpha, |v: i64| v.min(alpha)));
                    row_hi = Some(row_hi.map_or(alpha, |v: i64| v.max(alpha)));
                    terms.push(BlockTerm {
                        coeff,
                        alpha,
                        word: table.intern(w),
                    });
                }
                if !terms.is_empty() {
                    specs_num.push(BlockSpec {
                        bi: i,
                        bj: j - 1,
                        terms,
                    });
                }
            }
            row_windows.push((row_lo, row_hi));
        }
        let window_num = {
            let mut lo = 0i64;
            let mut hi = 0i64;
            let mut degenerate = false;
            for (l, h) in &row_windows {
                match (l, h) {
                    (Some(l), Some(h)) => {
                        lo += l * n as i64;
                        hi += h * n as i64;
                    }
                    _ => degenerate = true,
                }
            }
            if degenerate {
                (0, -1)
            } else {
                (lo, hi)
            }
        };
        // Denominator: Φ(x₀ − 1) = t^{a₀}·ρ(x₀) − I, window [0, n·a₀].
        let a0 = self.alpha.per_generator[0];
        let x0 = Word::from_letters([(0usize, 1i8)]);
        let one = Word::identity();
        let specs_den = vec![BlockSpec {
            bi: 0,
            bj: 0,
            terms: vec![
                BlockTerm {
                    coeff: 1,
                    alpha: a0,
                    word: table.intern(&x0),
                },
                BlockTerm {
                    coeff: -1,
                    alpha: 0,
                    word: table.intern(&one),
                },
            ],
        }];
        let window_den = (0, n as i64 * a0);
        // Coefficient bound: 1-norm of a determinant is at most the product
        // over rows of the row sums of entry 1-norms; computed on the float
        // lift in log2 domain with generous slack added by the caller.
        let float_lift = lift_rep(n, &self.presentation, &self.float_rep(), signs)
            .expect("recognized images always lift");
        let fox = crate::invariant::build_fox_matrix(&self.presentation, &self.alpha, &float_lift);
        let minor = fox.delete_block_column(n, 0).expect("block layout is fixed");
        let row_sum_bound = |m: &crate::matrix::LaurentMatrix<f64>| -> f64 {
            let mut total = 0.0f64;
            for i in 0..m.rows() {
                let mut row_sum = 0.0f64;
                for j in 0..m.cols() {
                    for &c in m.get(i, j).coeffs() {
                        row_sum += c.abs();
                    }
                }
                total += row_sum.max(1.0).log2();
            }
            total
        };
        let den_block = crate::invariant::phi(
            &float_lift,
            &self.alpha,
            &GroupRingElement::generator_minus_one(0),
        );
        let log2_bound = row_sum_bound(&minor).max(row_sum_bound(&den_block));
        Problem {
            specs_num,
            specs_den,
            table,
            block_rows: relators.len(),
            window_num,
            window_den,
            log2_bound,
        }
    }

    /// Computes the exact numerator and denominator polynomials at degree n.
    pub fn num_den(
        &self,
        n: usize,
        signs: &SignAssignment,
    ) -> Result<(ExactPoly, ExactPoly), ExactError> {
        let problem = self.problem(n, signs);
        let ring = self.rep.ring;
        let want_num = problem.window_num.1 >= problem.window_num.0;
        // Guessed prime count from the bound, with slack; the verification
        // prime catches any shortfall and triggers a retry with more primes.
        let mut count = ((problem.log2_bound + 32.0) / 58.0).ceil() as usize + 1;
        for _attempt in 0..3 {
            let primes = primes_for_ring(ring, count + 1)?;
            match self.interpolate_all(n, signs, &problem, &primes, want_num, true) {
                Ok((num, den)) => {
                    let num = num.unwrap_or_else(|| ExactPoly::from_coeffs(ring, 0, Vec::new()));
                    return Ok((num, den.expect("denominator always requested")));
                }
                Err(ExactError::BoundExceeded) => {
                    count += 2;
                    continue;
                }
                Err(e) => return Err(e),
            }
        }
        Err(ExactError::BoundExceeded)
    }

    /// Shared interpolation driver: samples per prime and embedding, solves
    /// coordinates, CRTs over all but the last prime, and verifies against
    /// the last.
    #[allow(clippy::type_complexity)]
    fn interpolate_all(
        &self,
        n: usize,
        signs: &SignAssignment,
        problem: &Problem,
        primes: &[PrimePair],
        want_num: bool,
        want_den: bool,
    ) -> Result<(Option<ExactPoly>, Option<ExactPoly>), ExactError> {
        let ring = self.rep.ring;
        let gen_signs = self.signs_per_generator(signs);
        let m_num = if want_num {
            (problem.window_num.1 - problem.window_num.0 + 1) as usize
        } else {
            0
        };
        let m_den = if want_den {
            (problem.window_den.1 - problem.window_den.0 + 1) as usize
        } else {
            0
        };
        let nodes = integer_nodes(m_num.max(m_den));
        // Per prime: coordinate residue vectors for numerator and denominator.
        let per_prime: Vec<(Vec<(u64, u64)>, Vec<(u64, u64)>)> = primes
            .par_iter()
            .map(|pair| {
                let p = pair.p;
                let (w_plus, w_minus) = pair.omegas(ring);
                let eval_channel = |w: u64| -> (Vec<u64>, Vec<u64>) {
                    let ctx =
                        ChannelCtx::new(p, w, n, &self.rep.images, &gen_signs, &problem.table);
                    let num = if want_num {
                        let dets: Vec<u64> = nodes[..m_num]
                            .iter()
                            .map(|&tau| {
                                let raw = ctx.det_at_node(
                                    &problem.specs_num,
                                    problem.block_rows,
                                    n,
                                    tau,
                                );
                                // Samples are τ^{lo}·P(τ); strip the shift.
                                unshift(raw, tau, problem.window_num.0, p)
                            })
                            .collect();
                        lagrange_mod(&nodes[..m_num], &dets, p)
                    } else {
                        Vec::new()
                    };
                    let den = if want_den {
                        let dets: Vec<u64> = nodes[..m_den]
                            .iter()
                            .map(|&tau| {
                                let raw = ctx.det_at_node(&problem.specs_den, 1, n, tau);
                                unshift(raw, tau, problem.window_den.0, p)
                            })
                            .collect();
                        lagrange_mod(&nodes[..m_den], &dets, p)
                    } else {
                        Vec::new()
                    };
                    (num, den)
                };
                let (num_plus, den_plus) = eval_channel(w_plus);
                let (num_minus, den_minus) = eval_channel(w_minus);
                // Solve a + b·w₊ = c₊, a + b·w₋ = c₋ for each coefficient.
                let s_inv = invmod(submod(w_plus, w_minus, p), p);
                let solve = |plus: &[u64], minus: &[u64]| -> Vec<(u64, u64)> {
                    plus.iter()
                        .zip(minus.iter())
                        .map(|(&cp, &cm)| {
                            let b = mulmod(submod(cp, cm, p), s_inv, p);
                            let a = submod(cp, mulmod(b, w_plus, p), p);
                            (a, b)
                        })
                        .collect()
                };
                (solve(&num_plus, &num_minus), solve(&den_plus, &den_minus))
            })
            .collect();
        let crt_primes: Vec<u64> = primes[..primes.len() - 1].iter().map(|pp| pp.p).collect();
        let verify = &primes[primes.len() - 1];
        let reconstruct = |pick: &dyn Fn(&(Vec<(u64, u64)>, Vec<(u64, u64)>)) -> &Vec<(u64, u64)>,
                           width: usize,
                           lo: i64|
         -> Result<ExactPoly, ExactError> {
            let mut coeffs = Vec::with_capacity(width);
            for k in 0..width {
                let residues_a: Vec<u64> = per_prime[..crt_primes.len()]
                    .iter()
                    .map(|pp| pick(pp)[k].0)
                    .collect();
                let residues_b: Vec<u64> = per_prime[..crt_primes.len()]
                    .iter()
                    .map(|pp| pick(pp)[k].1)
                    .collect();
                let a = crt_symmetric(&residues_a, &crt_primes);
                let b = crt_symmetric(&residues_b, &crt_primes);
                // Check the spare prime agrees with the reconstruction.
                let pv = verify.p;
                let (va, vb) = pick(&per_prime[crt_primes.len()])[k];
                let ra = ((&a % BigInt::from(pv)) + BigInt::from(pv)) % BigInt::from(pv);
                let rb = ((&b % BigInt::from(pv)) + BigInt::from(pv)) % BigInt::from(pv);
                if ra.to_u64() != Some(va) || rb.to_u64() != Some(vb) {
                    return Err(ExactError::BoundExceeded);
                }
                coeffs.push(BigQuad { a, b });
            }
            Ok(ExactPoly::from_coeffs(ring, lo, coeffs))
        };
        let num = if want_num {
            Some(reconstruct(&|pp| &pp.0, m_num, problem.window_num.0)?)
        } else {
            None
        };
        let den = if want_den {
            Some(reconstruct(&|pp| &pp.1, m_den, problem.window_den.0)?)
        } else {
            None
        };
        Ok((num, den))
    }

    /// Fast path for t = −1: reconstructs only the two point values, one
    /// determinant per prime and embedding instead of a full interpolation.
    /// Returns None when either value is zero (callers then need orders and
    /// must take the full path).
    pub fn point_values_at(
        &self,
        n: usize,
        signs: &SignAssignment,
        point: i64,
    ) -> Result<Option<(BigQuad, BigQuad)>, ExactError> {
        if point != -1 {
            return Err(ExactError::UnsupportedPoint(point));
        }
        let problem = self.problem(n, signs);
        let ring = self.rep.ring;
        if problem.window_num.1 < problem.window_num.0 {
            return Ok(None);
        }
        let gen_signs = self.signs_per_generator(signs);
        let count = ((problem.log2_bound + 32.0) / 58.0).ceil() as usize + 1;
        let primes = primes_for_ring(ring, count + 1)?;
        let per_prime: Vec<((u64, u64), (u64, u64))> = primes
            .par_iter()
            .map(|pair| {
                let p = pair.p;
                let (w_plus, w_minus) = pair.omegas(ring);
                // No unshifting here: the determinant at the node is already
                // the Laurent value the caller wants.
                let one_channel = |w: u64| -> (u64, u64) {
                    let ctx =
                        ChannelCtx::new(p, w, n, &self.rep.images, &gen_signs, &problem.table);
                    let num = ctx.det_at_node(&problem.specs_num, problem.block_rows, n, -1);
                    let den = ctx.det_at_node(&problem.specs_den, 1, n, -1);
                    (num, den)
                };
                let (np, dp) = one_channel(w_plus);
                let (nm, dm) = one_channel(w_minus);
                let s_inv = invmod(submod(w_plus, w_minus, p), p);
                let solve = |cp: u64, cm: u64| -> (u64, u64) {
                    let b = mulmod(submod(cp, cm, p), s_inv, p);
                    let a = submod(cp, mulmod(b, w_plus, p), p);
                    (a, b)
                };
                (solve(np, nm), solve(dp, dm))
            })
            .collect();
        let crt_primes: Vec<u64> = primes[..primes.len() - 1].iter().map(|pp| pp.p).collect();
        let gather = |pick: &dyn Fn(&((u64, u64), (u64, u64))) -> (u64, u64)| -> BigQuad {
            let ra: Vec<u64> = per_prime[..crt_primes.len()].iter().map(|x| pick(x).0).collect();
            let rb: Vec<u64> = per_prime[..crt_primes.len()].iter().map(|x| pick(x).1).collect();
            BigQuad {
                a: crt_symmetric(&ra, &crt_primes),
                b: crt_symmetric(&rb, &crt_primes),
            }
        };
        let num = gather(&|x| x.0);
        let den = gather(&|x| x.1);
        // Verify both against the spare prime.
        let pv = primes[crt_primes.len()].p;
        let check = |v: &BigQuad, res: (u64, u64)| -> bool {
            let ra = ((&v.a % BigInt::from(pv)) + BigInt::from(pv)) % BigInt::from(pv);
            let rb = ((&v.b % BigInt::from(pv)) + BigInt::from(pv)) % BigInt::from(pv);
            ra.to_u64() == Some(res.0) && rb.to_u64() == Some(res.1)
        };
        let last = &per_prime[crt_primes.len()];
        if !check(&num, last.0) || !check(&den, last.1) {
            return Err(ExactError::BoundExceeded);
        }
        if num.is_zero() || den.is_zero() {
            return Ok(None);
        }
        Ok(Some((num, den)))
    }
}

/// Divides a sample by τ^{lo} mod p, so samples interpolate the shifted
/// ordinary polynomial.
fn unshift(raw: u64, tau: i64, lo: i64, p: u64) -> u64 {
    let t = tau.rem_euclid(p as i64) as u64;
    let base = if lo >= 0 { invmod(t, p) } else { t };
    mulmod(raw, powmod(base, lo.unsigned_abs(), p), p)
}

/// The deterministic node sequence 1, −1, 2, −2, 3, −3, …
fn integer_nodes(count: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(count);
    let mut k = 1i64;
    while out.len() < count {
        out.push(k);
        if out.len() < count {
            out.push(-k);
        }
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::twisted_invariant;
    use crate::laurent::compare_up_to_unit;
    use crate::words::Generator;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::from_f64(re, im)
    }

    fn eisenstein() -> QuadRing {
        QuadRing::for_discriminant(3)
    }

    fn gaussian() -> QuadRing {
        QuadRing::for_discriminant(1)
    }

    #[test]
    fn ring_parameters() {
        let e = eisenstein();
        assert_eq!((e.q, e.r), (1, 1));
        let g = gaussian();
        assert_eq!((g.q, g.r), (1, 0));
        // ω² = rω − q numerically in both rings.
        for ring in [e, g] {
            let om = c(ring.omega_re(), ring.omega_im());
            let lhs = om * om;
            let rhs = om.scale(ring.r as f64) - c(ring.q as f64, 0.0);
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn quad_int_norm_matches_complex_modulus() {
        let ring = eisenstein();
        let x = QuadInt { a: 1, b: 2 };
        assert_eq!(
            BigQuad {
                a: BigInt::from(1),
                b: BigInt::from(2)
            }
            .norm2(ring),
            BigInt::from(7)
        );
        let z = x.to_complex::<f64>(ring);
        assert!((z.abs2() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn recognition_of_the_two_census_rings() {
        // Figure-eight: corner (1 − i√3)/2 = 1 − ω in the Eisenstein ring.
        let omega_im = 3.0f64.sqrt() / 2.0;
        let a = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let b = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.5, -omega_im), c(1.0, 0.0)],
        ])
        .unwrap();
        let rep = recognize(&[a, b]).unwrap();
        assert_eq!(rep.ring.d, 3);
        assert_eq!(rep.images[1][2], QuadInt { a: 1, b: -1 });

        // Whitehead: corner −1 + i in the Gaussian ring.
        let a = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let b = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(-1.0, 1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let rep = recognize(&[a, b]).unwrap();
        assert_eq!(rep.ring.d, 1);
        assert_eq!(rep.images[1][2], QuadInt { a: -1, b: 1 });
    }

    #[test]
    fn recognition_rejects_transcendental_entries() {
        let a = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(std::f64::consts::PI, 0.3)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(recognize(&[a]).is_none());
    }

    #[test]
    fn primality_and_square_roots() {
        assert!(is_prime((1 << 59) - 55)); // a known 59-bit prime
        assert!(!is_prime(561)); // Carmichael
        assert!(!is_prime(3215031751)); // strong pseudoprime to bases 2,3,5,7
        assert!(is_prime(2));
        for ring in [eisenstein(), gaussian()] {
            let primes = primes_for_ring(ring, 3).unwrap();
            for pp in &primes {
                assert!(is_prime(pp.p));
                assert_eq!(
                    mulmod(pp.s, pp.s, pp.p),
                    (-ring.d).rem_euclid(pp.p as i64) as u64
                );
                let (w1, w2) = pp.omegas(ring);
                // Both embeddings satisfy w² = r·w − q mod p.
                for w in [w1, w2] {
                    let lhs = mulmod(w, w, pp.p);
                    let r = ring.r.rem_euclid(pp.p as i64) as u64;
                    let q = ring.q.rem_euclid(pp.p as i64) as u64;
                    let rhs = submod(mulmod(r, w, pp.p), q, pp.p);
                    assert_eq!(lhs, rhs, "d={} p={}", ring.d, pp.p);
                }
            }
        }
    }

    #[test]
    fn p_matrix_determinant_matches_integers() {
        let p = 1_000_000_007u64;
        let mut m = PMatrix::zeros(3);
        let rows = [[2i64, 7, 1], [0, 3, -1], [4, 0, 5]];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v.rem_euclid(p as i64) as u64);
            }
        }
        // det = 2(15−0) − 7(0+4) + 1(0−12) = 30 − 28 − 12 = −10.
        assert_eq!(m.det(p), p - 10);
    }

    #[test]
    fn lagrange_round_trip_mod_p() {
        let p = primes_for_ring(gaussian(), 1).unwrap()[0].p;
        let coeffs = [5u64, 0, 12, 7, 3];
        let nodes = integer_nodes(coeffs.len());
        let values: Vec<u64> = nodes
            .iter()
            .map(|&x| {
                let xm = x.rem_euclid(p as i64) as u64;
                let mut acc = 0u64;
                for &co in coeffs.iter().rev() {
                    acc = addmod(mulmod(acc, xm, p), co, p);
                }
                acc
            })
            .collect();
        assert_eq!(lagrange_mod(&nodes, &values, p), coeffs.to_vec());
    }

    #[test]
    fn crt_reconstructs_signed_values() {
        let primes = [1_000_000_007u64, 998_244_353];
        for value in [0i128, 1, -1, 123_456_789_012_345, -987_654_321_987] {
            let residues: Vec<u64> = primes
                .iter()
                .map(|&p| value.rem_euclid(p as i128) as u64)
                .collect();
            let got = crt_symmetric(&residues, &primes);
            assert_eq!(got, BigInt::from(value));
        }
    }

    #[test]
    fn exact_poly_deflation_and_eval() {
        let ring = gaussian();
        let one = BigQuad {
            a: BigInt::from(1),
            b: BigInt::zero(),
        };
        let minus_one = BigQuad {
            a: BigInt::from(-1),
            b: BigInt::zero(),
        };
        let two = BigQuad {
            a: BigInt::from(2),
            b: BigInt::zero(),
        };
        // (t − 1)²·(t + 2)
        let lin = ExactPoly::from_coeffs(ring, 0, vec![minus_one.clone(), one.clone()]);
        let smooth = ExactPoly::from_coeffs(ring, 0, vec![two.clone(), one.clone()]);
        let p = lin.mul(&lin).mul(&smooth);
        let (q, mult) = p.deflate_pm1(1);
        assert_eq!(mult, 2);
        assert_eq!(q.eval_pm1(1), BigQuad {
            a: BigInt::from(3),
            b: BigInt::zero()
        });
        // At −1: (−1−1)²(−1+2) = 4.
        assert_eq!(p.eval_pm1(-1), BigQuad {
            a: BigInt::from(4),
            b: BigInt::zero()
        });
        let (_, mult_m1) = p.deflate_pm1(-1);
        assert_eq!(mult_m1, 0);
    }

    #[test]
    fn ln_bigint_handles_huge_values() {
        let x = BigInt::from(10).pow(500);
        let expected = 500.0 * 10.0f64.ln();
        assert!((ln_bigint(&x) - expected).abs() < 1e-6);
        assert!((ln_bigint(&BigInt::from(7)) - 7.0f64.ln()).abs() < 1e-12);
    }

    fn figure8_engine() -> (Presentation, AlphaMap, Sl2Rep<f64>, ExactEngine) {
        let gens = vec![
            Generator {
                name: "a".into(),
                component: 0,
            },
            Generator {
                name: "b".into(),
                component: 0,
            },
        ];
        let (p, _) = crate::words::parse_presentation(
            gens,
            &["a b^-1 a^-1 b a = b a b^-1 a^-1 b".to_string()],
        )
        .unwrap();
        let alpha = AlphaMap::new(&p, vec![1]).unwrap();
        let omega_im = 3.0f64.sqrt() / 2.0;
        let a = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let b = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.5, -omega_im), c(1.0, 0.0)],
        ])
        .unwrap();
        let rep = Sl2Rep::new(vec![a.clone(), b.clone()]).unwrap();
        let engine = ExactEngine::try_new(&p, &alpha, &[a, b]).unwrap();
        (p, alpha, rep, engine)
    }

    #[test]
    fn exact_and_float_engines_agree_at_small_degree() {
        let (p, alpha, rep, engine) = figure8_engine();
        for n in [2usize, 3, 4] {
            let signs = SignAssignment::all_plus(1);
            let lifted = lift_rep(n, &p, &rep, &signs).unwrap();
            let float_inv = twisted_invariant(&p, &alpha, &lifted).unwrap();
            let (num, den) = engine.num_den(n, &signs).unwrap();
            let num_f: LaurentPoly<f64> = num.to_laurent();
            let den_f: LaurentPoly<f64> = den.to_laurent();
            assert!(
                compare_up_to_unit(&num_f, &float_inv.numerator, 1e-8),
                "numerator mismatch at n={n}"
            );
            assert!(
                compare_up_to_unit(&den_f, &float_inv.denominator, 1e-8),
                "denominator mismatch at n={n}"
            );
        }
    }

    #[test]
    fn exact_engine_minus_lift_agrees_too() {
        let (p, alpha, rep, engine) = figure8_engine();
        let signs = SignAssignment::parse("-").unwrap();
        let n = 4;
        let lifted = lift_rep(n, &p, &rep, &signs).unwrap();
        let float_inv = twisted_invariant(&p, &alpha, &lifted).unwrap();
        let (num, den) = engine.num_den(n, &signs).unwrap();
        assert!(compare_up_to_unit(&num.to_laurent::<f64>(), &float_inv.numerator, 1e-8));
        assert!(compare_up_to_unit(&den.to_laurent::<f64>(), &float_inv.denominator, 1e-8));
    }

    #[test]
    fn fast_point_path_matches_full_interpolation() {
        let (_, _, _, engine) = figure8_engine();
        let signs = SignAssignment::all_plus(1);
        let n = 5;
        let (num, den) = engine.num_den(n, &signs).unwrap();
        let fast = engine.point_values_at(n, &signs, -1).unwrap().unwrap();
        assert_eq!(fast.0, num.eval_pm1(-1));
        assert_eq!(fast.1, den.eval_pm1(-1));
    }
}
