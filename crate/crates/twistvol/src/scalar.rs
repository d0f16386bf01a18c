//! Real scalar abstraction (binary64 and double-double) and complex arithmetic.
//!
//! Every numerical routine in this crate is generic over [`Real`], so a whole
//! pipeline can be switched between IEEE binary64 and the ~106-bit
//! double-double format ([`Dd`]) without touching call sites. Transcendental
//! helpers (`ln_f64`) are deliberately exposed at binary64 fidelity: they feed
//! logarithmic estimators and diagnostics, never the linear algebra itself.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real number type usable as the scalar field of the numerical pipeline.
pub trait Real:
    Copy
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Short backend name used in CLI flags and reports (`"f64"` / `"dd"`).
    const NAME: &'static str;
    /// Additive identity.
    fn zero() -> Self;
    /// Multiplicative identity.
    fn one() -> Self;
    /// Unit roundoff of the format (2⁻⁵² for binary64, ~2⁻¹⁰⁴ for double-double).
    fn epsilon() -> Self;
    /// The constant 2π at full precision of the format.
    fn two_pi() -> Self;
    /// Exact-as-possible conversion from binary64.
    fn from_f64(x: f64) -> Self;
    /// Exact conversion from a machine integer.
    fn from_i64(x: i64) -> Self;
    /// Nearest binary64 value.
    fn to_f64(self) -> f64;
    /// Absolute value.
    fn abs(self) -> Self;
    /// Square root (NaN for negative input, like the IEEE operation).
    fn sqrt(self) -> Self;
    /// Natural logarithm at binary64 fidelity.
    fn ln_f64(self) -> f64;
    /// `(sin, cos)` of `2π·frac`, accurate at the format's precision.
    fn sin_cos_2pi(frac: Self) -> (Self, Self);
    /// Parses a plain decimal literal (`-12.5`, `3`, `8.25e-3`).
    fn parse_decimal(s: &str) -> Option<Self>;
    /// Formats with enough digits to round-trip through [`Real::parse_decimal`].
    fn format_decimal(self) -> String;
    /// True unless the value is infinite or NaN.
    fn is_finite(self) -> bool;
}

impl Real for f64 {
    const NAME: &'static str = "f64";
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn two_pi() -> Self {
        std::f64::consts::TAU
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_i64(x: i64) -> Self {
        x as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln_f64(self) -> f64 {
        f64::ln(self)
    }
    fn sin_cos_2pi(frac: Self) -> (Self, Self) {
        // Reduce before multiplying by 2π so large arguments keep quadrant accuracy.
        let r = frac - frac.round();
        (std::f64::consts::TAU * r).sin_cos()
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        // Reject the textual specials accepted by the std parser; the input
        // grammar for documents is plain decimal only.
        if s.chars()
            .any(|c| !matches!(c, '0'..='9' | '+' | '-' | '.' | 'e' | 'E'))
        {
            return None;
        }
        s.parse().ok()
    }
    fn format_decimal(self) -> String {
        // `Display` for f64 is shortest-round-trip.
        format!("{self}")
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

/// Error-free sum: `a + b = s + err` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Error-free sum assuming `|a| ≥ |b|` (or a = 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

/// Error-free product via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

/// Double-double value: an unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`,
/// giving roughly 32 significant decimal digits.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Dd {
    /// Leading component.
    pub hi: f64,
    /// Trailing component.
    pub lo: f64,
}

impl Dd {
    /// The value 0.
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    /// The value 1.
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    /// π at double-double precision.
    pub const PI: Dd = Dd {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    /// π/2 at double-double precision.
    pub const FRAC_PI_2: Dd = Dd {
        hi: std::f64::consts::FRAC_PI_2,
        lo: 6.123_233_995_736_766e-17,
    };
    /// 2π at double-double precision.
    pub const TAU: Dd = Dd {
        hi: std::f64::consts::TAU,
        lo: 2.449_293_598_294_706_4e-16,
    };

    /// Builds from components without renormalizing; callers must uphold the
    /// `|lo| ≤ ulp(hi)/2` invariant.
    #[inline]
    pub const fn from_parts(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    /// Renormalizes an arbitrary two-term sum into a valid double-double.
    #[inline]
    fn renorm(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    /// Multiplies by a plain binary64 factor.
    #[inline]
    pub fn mul_f64(self, x: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, x);
        Dd::renorm(p1, p2 + self.lo * x)
    }

    /// Integer power of ten, exact up to double-double rounding.
    fn ten_pow(e: u32) -> Dd {
        let mut result = Dd::ONE;
        let mut base = Dd::from_parts(10.0, 0.0);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }

    /// Largest integer ≤ self, as a double-double.
    fn floor(self) -> Dd {
        let f = self.hi.floor();
        if f == self.hi {
            Dd::renorm(f, self.lo.floor())
        } else {
            Dd { hi: f, lo: 0.0 }
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Dd::renorm(s1, s2 + t2)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        Dd::renorm(p1, p2 + self.hi * o.lo + self.lo * o.hi)
    }
}

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, o: Dd) -> Dd {
        // Three-term long division; each correction is computed against the
        // full double-double divisor.
        let q1 = self.hi / o.hi;
        let r1 = self - o.mul_f64(q1);
        let q2 = r1.hi / o.hi;
        let r2 = r1 - o.mul_f64(q2);
        let q3 = r2.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::renorm(s, e + q3)
    }
}

impl Real for Dd {
    const NAME: &'static str = "dd";
    fn zero() -> Self {
        Dd::ZERO
    }
    fn one() -> Self {
        Dd::ONE
    }
    fn epsilon() -> Self {
        // 2⁻¹⁰⁴: the roundoff of a 106-bit significand split across two doubles.
        Dd::from_parts(4.930_380_657_631_324e-32, 0.0)
    }
    fn two_pi() -> Self {
        Dd::TAU
    }
    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
    fn from_i64(x: i64) -> Self {
        let hi = x as f64;
        // |x| can exceed 2⁵³; recover the rounding error exactly in integers.
        let rem = if hi.abs() < 9.1e18 {
            x.wrapping_sub(hi as i64) as f64
        } else {
            0.0
        };
        Dd::renorm(hi, rem)
    }
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
    fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }
    fn sqrt(self) -> Self {
        if self == Dd::ZERO {
            return Dd::ZERO;
        }
        if self.hi < 0.0 {
            return Dd::from_f64(f64::NAN);
        }
        // One Newton step on the binary64 seed reaches double-double accuracy.
        let y = self.hi.sqrt();
        let (p1, p2) = two_prod(y, y);
        let diff = self - Dd::from_parts(p1, p2);
        Dd::renorm(y, diff.hi / (2.0 * y))
    }
    fn ln_f64(self) -> f64 {
        // ln(hi + lo) = ln(hi) + ln(1 + lo/hi); the correction is below 2⁻⁵²
        // relative, which is exactly the fidelity promised by this method.
        self.hi.ln() + self.lo / self.hi
    }
    fn sin_cos_2pi(frac: Self) -> (Self, Self) {
        // Quadrant reduction: frac = (q + r)/4 with |r| ≤ 1/2, so the Taylor
        // argument θ = r·π/2 satisfies |θ| ≤ π/4.
        let f4 = frac.mul_f64(4.0);
        let q = (f4.hi + f4.lo).round();
        let r = f4 - Dd::from_f64(q);
        let theta = r * Dd::FRAC_PI_2;
        let theta2 = theta * theta;
        let mut sin = theta;
        let mut cos = Dd::ONE;
        let mut term_s = theta;
        let mut term_c = Dd::ONE;
        // (π/4)³³/33! ≈ 1e−40 terminates the series well below 2⁻¹⁰⁴·(π/4).
        // Each ratio divisor is a small exact integer, so full double-double
        // division keeps the terms accurate to the format, not just to f64.
        for k in 1..=16u32 {
            let k = k as f64;
            term_c = term_c * theta2;
            term_c = (-term_c) / Dd::from_f64((2.0 * k - 1.0) * (2.0 * k));
            cos = cos + term_c;
            term_s = term_s * theta2;
            term_s = (-term_s) / Dd::from_f64((2.0 * k) * (2.0 * k + 1.0));
            sin = sin + term_s;
        }
        match q.rem_euclid(4.0) as u32 {
            0 => (sin, cos),
            1 => (cos, -sin),
            2 => (-sin, -cos),
            _ => (-cos, sin),
        }
    }
    fn parse_decimal(s: &str) -> Option<Self> {
        let s = s.trim();
        let mut chars = s.chars().peekable();
        let mut negative = false;
        match chars.peek() {
            Some('+') => {
                chars.next();
            }
            Some('-') => {
                negative = true;
                chars.next();
            }
            _ => {}
        }
        let mut acc = Dd::ZERO;
        let mut digits = 0usize;
        let mut frac_digits: i32 = 0;
        let mut seen_point = false;
        let mut exp: i32 = 0;
        let mut exp_seen = false;
        while let Some(&c) = chars.peek() {
            match c {
                '0'..='9' => {
                    acc = acc.mul_f64(10.0) + Dd::from_f64((c as u8 - b'0') as f64);
                    digits += 1;
                    if seen_point {
                        frac_digits += 1;
                    }
                    chars.next();
                }
                '.' if !seen_point && !exp_seen => {
                    seen_point = true;
                    chars.next();
                }
                'e' | 'E' if digits > 0 && !exp_seen => {
                    exp_seen = true;
                    chars.next();
                    let mut exp_neg = false;
                    match chars.peek() {
                        Some('+') => {
                            chars.next();
                        }
                        Some('-') => {
                            exp_neg = true;
                            chars.next();
                        }
                        _ => {}
                    }
                    let mut exp_digits = 0;
                    while let Some(&d @ '0'..='9') = chars.peek() {
                        exp = exp.saturating_mul(10).saturating_add((d as u8 - b'0') as i32);
                        exp_digits += 1;
                        chars.next();
                    }
                    if exp_digits == 0 {
                        return None;
                    }
                    if exp_neg {
                        exp = -exp;
                    }
                }
                _ => return None,
            }
        }
        if digits == 0 {
            return None;
        }
        let e10 = exp - frac_digits;
        let mut value = if e10 >= 0 {
            acc * Dd::ten_pow(e10 as u32)
        } else {
            acc / Dd::ten_pow((-e10) as u32)
        };
        if negative {
            value = -value;
        }
        Some(value)
    }
    fn format_decimal(self) -> String {
        if self == Dd::ZERO {
            return "0".to_string();
        }
        if !self.is_finite() {
            return format!("{}", self.hi);
        }
        let neg = self.hi < 0.0;
        let x = self.abs();
        // Locate the decimal exponent, then peel off 33 digits.
        let mut e10 = x.hi.log10().floor() as i32;
        let pow = |e: i32| {
            if e >= 0 {
                Dd::ten_pow(e as u32)
            } else {
                Dd::ONE / Dd::ten_pow((-e) as u32)
            }
        };
        if x / pow(e10) >= Dd::from_f64(10.0) {
            e10 += 1;
        } else if (x / pow(e10)).hi < 1.0 {
            e10 -= 1;
        }
        const DIGITS: usize = 33;
        let mut rem = x / pow(e10);
        let mut ds = Vec::with_capacity(DIGITS);
        for _ in 0..DIGITS {
            let d = rem.floor();
            let mut di = d.hi as i32;
            di = di.clamp(0, 9);
            ds.push(di as u8);
            rem = (rem - Dd::from_f64(di as f64)).mul_f64(10.0);
        }
        // Round the final digit and propagate carries.
        if rem.hi >= 5.0 {
            let mut i = DIGITS;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e10 += 1;
                    ds.pop();
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        while ds.len() > 1 && *ds.last().unwrap() == 0 {
            ds.pop();
        }
        let digits: String = ds.iter().map(|d| (b'0' + d) as char).collect();
        let body = if (-4..=24).contains(&e10) {
            let e = e10;
            if e >= 0 {
                let e = e as usize;
                if e + 1 >= digits.len() {
                    format!("{}{}", digits, "0".repeat(e + 1 - digits.len()))
                } else {
                    format!("{}.{}", &digits[..e + 1], &digits[e + 1..])
                }
            } else {
                format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
            }
        } else if digits.len() == 1 {
            format!("{digits}e{e10}")
        } else {
            format!("{}.{}e{}", &digits[..1], &digits[1..], e10)
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }
    fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_decimal())
    }
}

/// Complex number over a [`Real`] backend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex<R> {
    /// Real part.
    pub re: R,
    /// Imaginary part.
    pub im: R,
}

impl<R: Real> Complex<R> {
    /// Builds from parts.
    #[inline]
    pub fn new(re: R, im: R) -> Self {
        Complex { re, im }
    }
    /// The value 0.
    #[inline]
    pub fn zero() -> Self {
        Complex::new(R::zero(), R::zero())
    }
    /// The value 1.
    #[inline]
    pub fn one() -> Self {
        Complex::new(R::one(), R::zero())
    }
    /// The imaginary unit.
    #[inline]
    pub fn i() -> Self {
        Complex::new(R::zero(), R::one())
    }
    /// Builds from binary64 parts.
    #[inline]
    pub fn from_f64(re: f64, im: f64) -> Self {
        Complex::new(R::from_f64(re), R::from_f64(im))
    }
    /// Complex conjugate.
    #[inline]
    pub fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    /// Multiplies both parts by a real factor.
    #[inline]
    pub fn scale(self, s: R) -> Self {
        Complex::new(self.re * s, self.im * s)
    }
    /// Squared magnitude.
    #[inline]
    pub fn abs2(self) -> R {
        self.re * self.re + self.im * self.im
    }
    /// Magnitude, scaled to avoid overflow of the squares.
    pub fn abs(self) -> R {
        let ar = self.re.abs();
        let ai = self.im.abs();
        let m = if ar > ai { ar } else { ai };
        if m == R::zero() || !m.to_f64().is_finite() {
            return m;
        }
        let x = self.re / m;
        let y = self.im / m;
        m * (x * x + y * y).sqrt()
    }
    /// Natural log of the magnitude at binary64 fidelity, overflow-safe.
    pub fn ln_abs_f64(self) -> f64 {
        let ar = self.re.abs();
        let ai = self.im.abs();
        let m = if ar > ai { ar } else { ai };
        if m == R::zero() {
            return f64::NEG_INFINITY;
        }
        let x = self.re / m;
        let y = self.im / m;
        m.ln_f64() + 0.5 * (x * x + y * y).ln_f64()
    }
    /// True when both parts are exactly zero.
    #[inline]
    pub fn is_zero(self) -> bool {
        self.re == R::zero() && self.im == R::zero()
    }
    /// True unless either part is infinite or NaN.
    #[inline]
    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    /// The point e^{2πi·frac} on the unit circle.
    pub fn unit_at(frac: R) -> Self {
        let (s, c) = R::sin_cos_2pi(frac);
        Complex::new(c, s)
    }
    /// Integer power by binary exponentiation (negative powers via division).
    pub fn powi(self, e: i64) -> Self {
        if e < 0 {
            return Complex::one() / self.powi(-e);
        }
        let mut result = Complex::one();
        let mut base = self;
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }
}

impl<R: Real> Add for Complex<R> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl<R: Real> Sub for Complex<R> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl<R: Real> Neg for Complex<R> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Complex::new(-self.re, -self.im)
    }
}

impl<R: Real> Mul for Complex<R> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl<R: Real> Div for Complex<R> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        // Scale by the dominant component of the divisor to stay well inside
        // the exponent range for the intermediate squares.
        let ar = o.re.abs();
        let ai = o.im.abs();
        if ai <= ar {
            let r = o.im / o.re;
            let d = o.re + o.im * r;
            Complex::new((self.re + self.im * r) / d, (self.im - self.re * r) / d)
        } else {
            let r = o.re / o.im;
            let d = o.re * r + o.im;
            Complex::new((self.re * r + self.im) / d, (self.im * r - self.re) / d)
        }
    }
}
