//! The two scalar layers: exact Gaussian rationals and `f64` complex numbers.
//!
//! Everything structural (expansion, indicial polynomials, genericity) is
//! computed over [`ExactComplex`]; evaluation and verification use
//! [`Complex64`]. Conversion from exact to approximate is total; the reverse
//! embeds the binary64 value exactly (every finite `f64` is rational).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_bigint::{BigInt, Sign};
use num_rational::Ratio;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

pub use num_complex::Complex64;

/// Arbitrary-precision rational number.
pub type Rational = Ratio<BigInt>;

/// Exact complex scalar with Gaussian-rational value.
pub type ExactComplex = num_complex::Complex<Rational>;

/// Exact zero.
pub fn exact_zero() -> ExactComplex {
    ExactComplex::new(Rational::zero(), Rational::zero())
}

/// Exact one.
pub fn exact_one() -> ExactComplex {
    ExactComplex::new(Rational::one(), Rational::zero())
}

/// Exact value of an integer.
pub fn exact_int(n: i64) -> ExactComplex {
    ExactComplex::new(Rational::from_integer(BigInt::from(n)), Rational::zero())
}

/// Exact value of the real fraction `p/q`.
///
/// Panics if `q == 0`.
pub fn exact_ratio(p: i64, q: i64) -> ExactComplex {
    ExactComplex::new(
        Rational::new(BigInt::from(p), BigInt::from(q)),
        Rational::zero(),
    )
}

/// Exact Gaussian rational `p/q + (r/s)i`.
pub fn exact_gauss(p: i64, q: i64, r: i64, s: i64) -> ExactComplex {
    ExactComplex::new(
        Rational::new(BigInt::from(p), BigInt::from(q)),
        Rational::new(BigInt::from(r), BigInt::from(s)),
    )
}

/// Converts an exact scalar to binary64 complex. Total: overflowing
/// magnitudes map to `±inf`.
pub fn approx(x: &ExactComplex) -> Complex64 {
    Complex64::new(rat_to_f64(&x.re), rat_to_f64(&x.im))
}

/// Rational to `f64`, saturating on overflow.
pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Embeds a finite `f64` exactly as a rational (mantissa over a power of two).
pub fn f64_to_rat(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Embeds a finite complex value exactly.
pub fn c64_to_exact(z: Complex64) -> Option<ExactComplex> {
    Some(ExactComplex::new(f64_to_rat(z.re)?, f64_to_rat(z.im)?))
}

/// Exact equality with zero.
pub fn is_exact_zero(x: &ExactComplex) -> bool {
    x.re.is_zero() && x.im.is_zero()
}

/// Exactly a nonnegative rational integer.
pub fn is_nonnegative_integer(x: &ExactComplex) -> bool {
    x.im.is_zero() && x.re.is_integer() && !x.re.is_negative()
}

/// Exactly a rational integer.
pub fn is_integer(x: &ExactComplex) -> bool {
    x.im.is_zero() && x.re.is_integer()
}

/// An upper bound for `|x|` as a rational: `|re| + |im|`.
pub fn modulus_upper(x: &ExactComplex) -> Rational {
    x.re.abs() + x.im.abs()
}

/// A lower bound for `|x|` as a rational: `max(|re|, |im|)`.
pub fn modulus_lower(x: &ExactComplex) -> Rational {
    let re = x.re.abs();
    let im = x.im.abs();
    if re >= im {
        re
    } else {
        im
    }
}

/// Renders a rational compactly: integers as `n`, otherwise `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        alloc::format!("{}", r.numer())
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders an exact complex scalar for human-readable output.
///
/// Rationals with denominators up to 10^9 print as fractions; values that
/// came from floats print in decimal. Pure-real and pure-imaginary values
/// drop the silent part.
pub fn format_exact(x: &ExactComplex) -> String {
    let mut out = String::new();
    let re_zero = x.re.is_zero();
    let im_zero = x.im.is_zero();
    if re_zero && im_zero {
        return String::from("0");
    }
    if !re_zero || im_zero {
        out.push_str(&format_scalar_part(&x.re));
    }
    if !im_zero {
        if !re_zero {
            if x.im.is_negative() {
                out.push_str(" - ");
                let _ = write!(out, "{}*i", format_scalar_part(&(-x.im.clone())));
                return out;
            }
            out.push_str(" + ");
        }
        let _ = write!(out, "{}*i", format_scalar_part(&x.im));
    }
    out
}

fn format_scalar_part(r: &Rational) -> String {
    const BIG_DEN: u64 = 1_000_000_000;
    if r.denom() <= &BigInt::from(BIG_DEN) {
        format_rational(r)
    } else {
        // denominator too large to read as a fraction; fall back to decimal
        alloc::format!("{}", rat_to_f64(r))
    }
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via continued fractions. Returns `None` when the approximation error
/// exceeds `tol * max(1, |x|)`.
pub fn snap_rational(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    // continued-fraction convergents p_k/q_k of x
    let mut p0 = BigInt::one();
    let mut q0 = BigInt::zero();
    let mut p1 = BigInt::from(Float::floor(x) as i64);
    let mut q1 = BigInt::one();
    let mut frac = x - Float::floor(x);
    let bound = BigInt::from(max_den);
    for _ in 0..64 {
        let cand = Rational::new(p1.clone(), q1.clone());
        let err = Float::abs(rat_to_f64(&cand) - x);
        if err <= tol * Float::max(Float::abs(x), 1.0) {
            return Some(cand);
        }
        if Float::abs(frac) < 1e-18 {
            break;
        }
        let recip = 1.0 / frac;
        let a = Float::floor(recip);
        if !a.is_finite() || Float::abs(a) > 9.0e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > bound {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        frac = recip - a;
    }
    let cand = Rational::new(p1, q1);
    let err = Float::abs(rat_to_f64(&cand) - x);
    (err <= tol * Float::max(Float::abs(x), 1.0)).then_some(cand)
}

/// Snaps both parts of a complex value to Gaussian-rational form.
pub fn snap_gaussian(z: Complex64, max_den: u64, tol: f64) -> Option<ExactComplex> {
    Some(ExactComplex::new(
        snap_rational(z.re, max_den, tol)?,
        snap_rational(z.im, max_den, tol)?,
    ))
}

/// Parses a rational numeral: `p`, `-p/q`, or a decimal like `1.25`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let n: BigInt = if int_part.is_empty() || int_part == "-" {
            BigInt::zero()
        } else {
            int_part.parse().ok()?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits: BigInt = frac_part.parse().ok()?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = Rational::new(digits, scale);
        let whole = Rational::from_integer(n);
        return Some(if neg { whole - frac } else { whole + frac });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(n))
}

/// Serializes a rational as the canonical `p/q` string (`q > 0`, reduced).
pub fn rational_string(r: &Rational) -> String {
    // Ratio keeps the sign in the numerator and the fraction reduced
    let mut r = r.clone();
    if r.denom().sign() == Sign::Minus {
        r = Rational::new(-r.numer().clone(), -r.denom().clone());
    }
    alloc::format!("{}/{}", r.numer(), r.denom())
}

/// Sorts complex values into a deterministic order: by real part, then by
/// absolute imaginary part with the positive member of a conjugate pair
/// first. Used anywhere a root multiset is serialized.
pub fn sort_complex_deterministic(values: &mut [Complex64]) {
    values.sort_by(|a, b| {
        a.re.total_cmp(&b.re)
            .then_with(|| a.im.abs().total_cmp(&b.im.abs()))
            .then_with(|| b.im.total_cmp(&a.im))
    });
}

/// Same ordering for exact values.
pub fn sort_exact_deterministic(values: &mut Vec<ExactComplex>) {
    values.sort_by(|a, b| {
        let (fa, fb) = (approx(a), approx(b));
        fa.re
            .total_cmp(&fb.re)
            .then_with(|| fa.im.abs().total_cmp(&fb.im.abs()))
            .then_with(|| fb.im.total_cmp(&fa.im))
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops_are_exact() {
        let x = exact_gauss(3, 7, -2, 5);
        let y = exact_gauss(-1, 3, 4, 9);
        assert_eq!((x.clone() + y.clone()) - y.clone(), x);
        assert_eq!((x.clone() * y.clone()) / y, x);
    }

    #[test]
    fn snap_recovers_simple_fractions() {
        let r = snap_rational(-0.6666666666666666, 1_000_000, 1e-9).unwrap();
        assert_eq!(r, Rational::new(BigInt::from(-2), BigInt::from(3)));
    }

    #[test]
    fn snap_rejects_far_values() {
        assert!(snap_rational(core::f64::consts::PI, 10, 1e-12).is_none());
    }

    #[test]
    fn parse_and_print_round_trip() {
        let r = parse_rational("-22/7").unwrap();
        assert_eq!(rational_string(&r), "-22/7");
        let d = parse_rational("1.25").unwrap();
        assert_eq!(rational_string(&d), "5/4");
    }
}
