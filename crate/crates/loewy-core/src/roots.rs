//! Polynomial root finding.
//!
//! Numeric roots come from simultaneous Aberth–Ehrlich iteration started on
//! a perturbed circle, capped at 200 sweeps, with one Newton polish per
//! root. Degree <= 2 with exact coefficients is solved in closed form.
//! Integer roots are found exactly: a Cauchy bound plus divisor filtering
//! against the constant Gaussian integer, then exact evaluation.

use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Float, Signed, ToPrimitive, Zero};

use crate::scalar::{
    approx, is_exact_zero, modulus_lower, modulus_upper, rat_to_f64, snap_gaussian,
    sort_complex_deterministic, Complex64, ExactComplex, Rational,
};
use crate::unipoly::UniPoly;

pub const MAX_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootError {
    /// The zero polynomial has undefined roots.
    ZeroPolynomial,
    /// Iteration failed to reach the residual target.
    NoConvergence(String),
}

impl core::fmt::Display for RootError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RootError::ZeroPolynomial => write!(f, "undefined roots: zero polynomial"),
            RootError::NoConvergence(msg) => write!(f, "root iteration did not converge: {msg}"),
        }
    }
}

/// All `deg(p)` roots with multiplicity, deterministically ordered.
///
/// Residuals satisfy `|p(r)| <= 1e-10 (1 + |r|)^deg * max|coeff|` for every
/// returned root.
pub fn poly_roots(p: &UniPoly) -> Result<Vec<Complex64>, RootError> {
    if p.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let mut roots = match deg {
        1 => {
            let c0 = approx(&p.coeff(0));
            let c1 = approx(&p.coeff(1));
            alloc::vec![-c0 / c1]
        }
        2 => quadratic_roots(p),
        _ => aberth(&p.coeffs_c64())?,
    };
    sort_complex_deterministic(&mut roots);
    Ok(roots)
}

fn quadratic_roots(p: &UniPoly) -> Vec<Complex64> {
    let a = approx(&p.coeff(2));
    let b = approx(&p.coeff(1));
    let c = approx(&p.coeff(0));
    let disc = b * b - 4.0 * a * c;
    let sq = disc.sqrt();
    // pick the sign that avoids cancellation in -b -+ sq
    let q = if (b + sq).norm() >= (b - sq).norm() {
        -(b + sq) / 2.0
    } else {
        -(b - sq) / 2.0
    };
    if q.norm() == 0.0 {
        return alloc::vec![Complex64::new(0.0, 0.0), -b / a];
    }
    alloc::vec![q / a, c / q]
}

/// Aberth–Ehrlich simultaneous iteration on monic-normalized coefficients.
fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);

    // perturbed-circle starts; the irrational angle offset breaks symmetry
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * (k as f64) / (deg as f64)
                + 0.3963 + 0.12 * (k as f64);
            Complex64::from_polar(radius * (1.0 + 0.05 * Float::sin(k as f64 + 1.0)), angle)
        })
        .collect();

    let dcoeffs: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();

    let eval = |cs: &[Complex64], x: Complex64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in cs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };

    let mut converged = false;
    for _ in 0..MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let pz = eval(&monic, z[i]);
            let dz = eval(&dcoeffs, z[i]);
            let newton = if dz.norm() > 0.0 {
                pz / dz
            } else {
                Complex64::new(1e-12, 1e-12)
            };
            let mut repulse = Complex64::new(0.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = z[i] - zj;
                    if d.norm() > 0.0 {
                        repulse += 1.0 / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulse;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            z[i] -= step;
            let rel = step.norm() / (1.0 + z[i].norm());
            if rel > max_step {
                max_step = rel;
            }
        }
        if max_step < 1e-14 {
            converged = true;
            break;
        }
    }

    // one Newton polish per root
    for zi in z.iter_mut() {
        let dz = eval(&dcoeffs, *zi);
        if dz.norm() > 1e-300 {
            *zi -= eval(&monic, *zi) / dz;
        }
    }

    // residual acceptance: multiple roots stall the step criterion but the
    // residual still certifies them
    let scale = monic.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    for zi in &z {
        let bound = 1e-10 * Float::powi(1.0 + zi.norm(), deg as i32) * scale;
        if eval(&monic, *zi).norm() > bound {
            if converged {
                return Err(RootError::NoConvergence(alloc::format!(
                    "residual above bound at root near {zi}"
                )));
            }
            return Err(RootError::NoConvergence(String::from(
                "iteration cap reached with residual above bound",
            )));
        }
    }
    Ok(z)
}

/// The exact set of integer roots of `p`.
///
/// Denominators are cleared to Gaussian-integer coefficients; any integer
/// root must divide gcd(Re c0, Im c0) of the trailing coefficient, and the
/// Cauchy bound caps the search. Candidates are confirmed by exact
/// evaluation, so the result carries no floating-point uncertainty.
pub fn rational_integer_roots(p: &UniPoly) -> Vec<i64> {
    let mut out = Vec::new();
    if p.is_zero() {
        return out;
    }
    let zero_mult = p.root_multiplicity_at_zero();
    if zero_mult > 0 {
        out.push(0);
    }
    if p.degree() == Some(0) {
        return out;
    }

    // shift out the power of x so the constant term is nonzero
    let coeffs: Vec<ExactComplex> = p.coeffs()[zero_mult..].to_vec();
    let reduced = UniPoly::new(p.var(), coeffs);
    if reduced.degree().map_or(true, |d| d == 0) {
        return out;
    }

    // common denominator of all coefficients
    let mut denom = BigInt::from(1);
    for c in reduced.coeffs() {
        denom = denom.lcm(c.re.denom());
        denom = denom.lcm(c.im.denom());
    }
    let scaled: Vec<(BigInt, BigInt)> = reduced
        .coeffs()
        .iter()
        .map(|c| {
            let re = (c.re.clone() * Rational::from_integer(denom.clone())).to_integer();
            let im = (c.im.clone() * Rational::from_integer(denom.clone())).to_integer();
            (re, im)
        })
        .collect();

    let constant = &scaled[0];
    let divisor_base = constant.0.gcd(&constant.1);

    // Cauchy bound: |root| <= 1 + max |c_i| / |c_deg|
    let lead = reduced.leading().expect("nonzero");
    let lead_low = modulus_lower(lead);
    let mut ratio_max = Rational::zero();
    for c in reduced.coeffs() {
        let r = modulus_upper(c) / lead_low.clone();
        if r > ratio_max {
            ratio_max = r;
        }
    }
    let bound_f = rat_to_f64(&ratio_max) + 1.0;
    let bound = if bound_f.is_finite() {
        Float::min(bound_f, 9.0e18) as i64 + 1
    } else {
        i64::MAX
    };

    let mut candidates: Vec<i64> = Vec::new();
    if let Some(g) = divisor_base.abs().to_i64() {
        if g != 0 && g <= 1_000_000_000_000 {
            for d in divisors_up_to(g, bound) {
                candidates.push(d);
                candidates.push(-d);
            }
        }
    }
    if candidates.is_empty() {
        // divisor filtering unavailable; exhaustive scan within the bound
        let cap = bound.min(100_000);
        for k in 1..=cap {
            candidates.push(k);
            candidates.push(-k);
        }
    }
    candidates.sort_unstable();
    candidates.dedup();

    for k in candidates {
        if is_exact_zero(&reduced.eval_int(k)) {
            out.push(k);
        }
    }
    out.sort_unstable();
    out
}

fn divisors_up_to(n: i64, bound: i64) -> Vec<i64> {
    let mut divs = Vec::new();
    let mut d = 1i64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            if d <= bound {
                divs.push(d);
            }
            let q = n / d;
            if q <= bound {
                divs.push(q);
            }
        }
        d += 1;
    }
    divs
}

/// Finds the exact Gaussian-rational roots of `p` by snapping numeric roots
/// and verifying by exact evaluation, deflating as it goes. Returns the
/// verified roots and the residual factor whose roots stayed unresolved
/// (irrational or unverifiable).
pub fn exact_rational_roots(p: &UniPoly) -> (Vec<ExactComplex>, UniPoly) {
    let mut exact = Vec::new();
    let mut current = p.clone();
    let zero = crate::scalar::exact_zero();
    loop {
        if current.degree().map_or(true, |d| d == 0) {
            break;
        }
        if is_exact_zero(&current.coeff(0)) {
            if let Some(q) = current.deflate(&zero) {
                exact.push(zero.clone());
                current = q;
                continue;
            }
        }
        let numeric = match poly_roots(&current) {
            Ok(r) => r,
            Err(_) => break,
        };
        let mut progress = false;
        // multiple roots smear the numeric cluster by ~eps^(1/m), so try
        // increasingly coarse snaps; exact evaluation is the only gate
        'roots: for r in numeric {
            for (max_den, tol) in [(1_000_000u64, 1e-7f64), (1_000, 1e-3), (24, 5e-2)] {
                if let Some(snapped) = snap_gaussian(r, max_den, tol) {
                    if is_exact_zero(&current.eval_exact(&snapped)) {
                        if let Some(q) = current.deflate(&snapped) {
                            exact.push(snapped);
                            current = q;
                            progress = true;
                            break 'roots;
                        }
                    }
                }
            }
        }
        if !progress {
            break;
        }
    }
    crate::scalar::sort_exact_deterministic(&mut exact);
    (exact, current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{exact_int, exact_zero};
    use crate::unipoly::Var;

    fn poly(coeffs: &[i64]) -> UniPoly {
        UniPoly::new(Var::Z, coeffs.iter().map(|&c| exact_int(c)).collect())
    }

    #[test]
    fn quadratic_closed_form() {
        // z^2 - 3z + 2 -> {1, 2}
        let r = poly_roots(&poly(&[2, -3, 1])).unwrap();
        assert!((r[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        // z^2 + 1 -> {i, -i}
        let r = poly_roots(&poly(&[1, 0, 1])).unwrap();
        assert!((r[0] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn cubic_roots_of_unity() {
        let r = poly_roots(&poly(&[-1, 0, 0, 1])).unwrap();
        let p = poly(&[-1, 0, 0, 1]);
        for root in &r {
            assert!(p.eval_c64(*root).norm() < 1e-10);
        }
        let third = Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI / 3.0);
        assert!(r.iter().any(|z| (z - third).norm() < 1e-8));
        assert!(r.iter().any(|z| (z - third.conj()).norm() < 1e-8));
        assert!(r.iter().any(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-8));
    }

    #[test]
    fn repeated_roots_meet_residual_bound() {
        // (z-1)^4
        let p = poly(&[1, -4, 6, -4, 1]);
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 4);
        for root in &r {
            assert!((root - Complex64::new(1.0, 0.0)).norm() < 1e-2);
            assert!(p.eval_c64(*root).norm() < 1e-10 * Float::powi(1.0 + root.norm(), 4));
        }
    }

    #[test]
    fn zero_poly_rejected() {
        assert_eq!(
            poly_roots(&UniPoly::zero(Var::Z)),
            Err(RootError::ZeroPolynomial)
        );
    }

    #[test]
    fn integer_roots_exact() {
        // j^2 - 1 -> {-1, 1}
        let p = UniPoly::new(Var::J, alloc::vec![exact_int(-1), exact_zero(), exact_int(1)]);
        assert_eq!(rational_integer_roots(&p), alloc::vec![-1, 1]);
        // j + 1 -> {-1}
        let p = UniPoly::new(Var::J, alloc::vec![exact_int(1), exact_int(1)]);
        assert_eq!(rational_integer_roots(&p), alloc::vec![-1]);
        // j^2 + 1 -> {}
        let p = UniPoly::new(Var::J, alloc::vec![exact_int(1), exact_zero(), exact_int(1)]);
        assert!(rational_integer_roots(&p).is_empty());
    }

    #[test]
    fn integer_roots_with_rational_coeffs() {
        // (j - 3)(j + 7)/5
        let a = UniPoly::linear_root(Var::J, &exact_int(3));
        let b = UniPoly::linear_root(Var::J, &exact_int(-7));
        let p = a.mul(&b).scale(&crate::scalar::exact_ratio(1, 5));
        assert_eq!(rational_integer_roots(&p), alloc::vec![-7, 3]);
    }

    #[test]
    fn exact_roots_with_deflation() {
        // (x - 1/2)^2 (x - 3)
        let half = crate::scalar::exact_ratio(1, 2);
        let p = UniPoly::linear_root(Var::U0, &half)
            .mul(&UniPoly::linear_root(Var::U0, &half))
            .mul(&UniPoly::linear_root(Var::U0, &exact_int(3)));
        let (roots, residual) = exact_rational_roots(&p);
        assert_eq!(residual.degree(), Some(0));
        assert_eq!(roots.len(), 3);
        assert_eq!(roots.iter().filter(|r| **r == half).count(), 2);
    }

    #[test]
    fn irrational_roots_left_unresolved() {
        // x^3 - 2: no rational roots
        let p = poly(&[-2, 0, 0, 1]);
        let (roots, residual) = exact_rational_roots(&p);
        assert!(roots.is_empty());
        assert_eq!(residual.degree(), Some(3));
    }
}
