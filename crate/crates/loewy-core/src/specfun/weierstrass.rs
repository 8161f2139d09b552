//! Weierstrass elliptic function and derivative on the complex plane.
//!
//! Generic invariants go through the Laurent series
//! `wp(z) = 1/z^2 + sum c_k z^{2k-2}` (truncated at degree 30) after the
//! homogeneity rescale `wp(z; g2, g3) = s^2 wp(s z; g2/s^4, g3/s^6)` that
//! normalizes the invariants to modulus <= 1, plus repeated duplication to
//! bring the argument inside the series disc. Vanishing discriminant
//! degenerates to the hyperbolic closed form, and `g2 = g3 = 0` to `1/z^2`.

use alloc::vec::Vec;

use num_traits::Float;

use super::SpecFunError;
use crate::scalar::Complex64;

const SERIES_TERMS: usize = 16; // highest power z^{2k-2} = z^30
const SAFE_RADIUS: f64 = 0.45;
const DEGENERACY_REL: f64 = 1e-12;

/// How the invariant pair degenerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyClass {
    /// Nonzero discriminant: a genuine lattice.
    Generic,
    /// `g2^3 = 27 g3^2 != 0`: one period degenerates, hyperbolic form.
    DoubleRoot,
    /// `g2 = g3 = 0`: the rational function `1/z^2`.
    TripleRoot,
}

/// Invariant pair with cached discriminant and degeneracy class.
#[derive(Clone, Copy, Debug)]
pub struct EllipticInvariants {
    pub g2: Complex64,
    pub g3: Complex64,
    pub discriminant: Complex64,
    pub class: DegeneracyClass,
}

impl EllipticInvariants {
    pub fn new(g2: Complex64, g3: Complex64) -> Self {
        let discriminant = g2 * g2 * g2 - 27.0 * g3 * g3;
        let scale = Float::max(g2.norm().powi(3), g3.norm().powi(2));
        let class = if scale == 0.0 {
            DegeneracyClass::TripleRoot
        } else if discriminant.norm() <= DEGENERACY_REL * scale {
            if g2.norm() == 0.0 {
                DegeneracyClass::TripleRoot
            } else {
                DegeneracyClass::DoubleRoot
            }
        } else {
            DegeneracyClass::Generic
        };
        Self { g2, g3, discriminant, class }
    }
}

/// wp(z; g2, g3).
pub fn wp(z: Complex64, inv: &EllipticInvariants) -> Result<Complex64, SpecFunError> {
    wp_both(z, inv).map(|(p, _)| p)
}

/// wp'(z; g2, g3).
pub fn wp_prime(z: Complex64, inv: &EllipticInvariants) -> Result<Complex64, SpecFunError> {
    wp_both(z, inv).map(|(_, q)| q)
}

/// Evaluates `(wp, wp')` together; the duplication path shares all work.
pub fn wp_both(z: Complex64, inv: &EllipticInvariants) -> Result<(Complex64, Complex64), SpecFunError> {
    match inv.class {
        DegeneracyClass::TripleRoot => {
            if z.norm() < 1e-9 {
                return Err(SpecFunError::PoleNear(Complex64::new(0.0, 0.0)));
            }
            Ok((z.powi(-2), -2.0 * z.powi(-3)))
        }
        DegeneracyClass::DoubleRoot => wp_double_root(z, inv),
        DegeneracyClass::Generic => wp_generic(z, inv, None).map(|r| r.value),
    }
}

/// Hyperbolic degeneration: with `g2 = 12 c^2`, `g3 = -8 c^3`,
/// `wp(z) = c + 3 c / sinh^2(sqrt(3c) z)`.
fn wp_double_root(
    z: Complex64,
    inv: &EllipticInvariants,
) -> Result<(Complex64, Complex64), SpecFunError> {
    let c = -3.0 * inv.g3 / (2.0 * inv.g2);
    let w = (3.0 * c).sqrt();
    let x = w * z;
    if x.norm() < 1e-9 {
        return Err(SpecFunError::PoleNear(Complex64::new(0.0, 0.0)));
    }
    let (csch2, coth_signed) = stable_csch2_coth(x)?;
    let p = c + 3.0 * c * csch2;
    let q = -6.0 * c * w * coth_signed * csch2;
    Ok((p, q))
}

/// `(csch^2 x, coth x)` via `t = e^{-2|x|}`, stable for large `|Re x|`.
fn stable_csch2_coth(x: Complex64) -> Result<(Complex64, Complex64), SpecFunError> {
    let (s, sign) = if x.re < 0.0 { (-x, -1.0) } else { (x, 1.0) };
    let t = (-2.0 * s).exp();
    let denom = Complex64::new(1.0, 0.0) - t;
    if denom.norm() < 1e-12 {
        // x is within ~1e-12 of a zero of sinh, i.e. a pole location
        return Err(SpecFunError::PoleNear(x));
    }
    let csch2 = 4.0 * t / (denom * denom);
    let coth = (Complex64::new(1.0, 0.0) + t) / denom;
    Ok((csch2, sign * coth))
}

pub(crate) struct WpResult {
    pub value: (Complex64, Complex64),
}

/// Generic-lattice evaluation. `force_steps` pins the duplication count
/// (used by the consistency check); otherwise it is chosen from `|z|`.
pub(crate) fn wp_generic(
    z: Complex64,
    inv: &EllipticInvariants,
    force_steps: Option<usize>,
) -> Result<WpResult, SpecFunError> {
    // homogeneity rescale to |g2|, |g3| <= 1
    let s = Float::max(inv.g2.norm().powf(0.25), inv.g3.norm().powf(1.0 / 6.0));
    let (scale, g2n, g3n, zn) = if s > 0.0 {
        (s, inv.g2 / s.powi(4), inv.g3 / s.powi(6), z * s)
    } else {
        (1.0, inv.g2, inv.g3, z)
    };

    if zn.norm() < 1e-9 {
        return Err(SpecFunError::PoleNear(Complex64::new(0.0, 0.0)));
    }
    let steps = force_steps.unwrap_or_else(|| {
        let ratio = zn.norm() / SAFE_RADIUS;
        if ratio <= 1.0 {
            0
        } else {
            Float::ceil(Float::log2(ratio)) as usize
        }
    });
    let small = zn / Float::powi(2.0, steps as i32);

    let coeffs = laurent_coefficients(g2n, g3n);
    let (mut p, mut q) = series_eval(small, &coeffs);

    for _ in 0..steps {
        let (p2, q2) = duplicate(p, q, g2n)?;
        p = p2;
        q = q2;
    }
    if !p.re.is_finite() || !p.im.is_finite() || p.norm() > 1e12 {
        return Err(SpecFunError::PoleNear(z));
    }
    Ok(WpResult {
        value: (p * scale * scale, q * scale * scale * scale),
    })
}

/// Laurent coefficients `c_2 = g2/20`, `c_3 = g3/28`,
/// `c_k = 3 sum c_m c_{k-m} / ((2k+1)(k-3))` for `k >= 4`.
fn laurent_coefficients(g2: Complex64, g3: Complex64) -> Vec<Complex64> {
    let mut c = alloc::vec![Complex64::new(0.0, 0.0); SERIES_TERMS + 1];
    if SERIES_TERMS >= 2 {
        c[2] = g2 / 20.0;
    }
    if SERIES_TERMS >= 3 {
        c[3] = g3 / 28.0;
    }
    for k in 4..=SERIES_TERMS {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 2..=(k - 2) {
            acc += c[m] * c[k - m];
        }
        c[k] = 3.0 * acc / ((2 * k + 1) as f64 * (k - 3) as f64);
    }
    c
}

/// `wp(z) = 1/z^2 + sum_{k>=2} c_k z^{2k-2}` and its derivative.
fn series_eval(z: Complex64, coeffs: &[Complex64]) -> (Complex64, Complex64) {
    let z2 = z * z;
    let mut p = Complex64::new(0.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    // Horner in z^2 from the top
    for k in (2..coeffs.len()).rev() {
        p = p * z2 + coeffs[k];
        q = q * z2 + (2 * k - 2) as f64 * coeffs[k];
    }
    // p tail: z^2 * p gives sum c_k z^{2k-2} starting at k=2 needs z^{2}
    let p_tail = p * z2;
    let q_tail = q * z;
    (z.powi(-2) + p_tail, -2.0 * z.powi(-3) + q_tail)
}

/// One duplication step `(wp(z), wp'(z)) -> (wp(2z), wp'(2z))`.
fn duplicate(p: Complex64, q: Complex64, g2: Complex64) -> Result<(Complex64, Complex64), SpecFunError> {
    // wp'' = 6 wp^2 - g2/2
    let s = 6.0 * p * p - g2 * 0.5;
    if q.norm() < 1e-280 {
        // landed on a half-period; 2z is then a lattice point
        return Err(SpecFunError::PoleNear(Complex64::new(0.0, 0.0)));
    }
    let half_ratio = s / (2.0 * q);
    let p2 = -2.0 * p + half_ratio * half_ratio;
    let q2 = -q + s * (12.0 * p * q * q - s * s) / (4.0 * q * q * q);
    Ok((p2, q2))
}

/// Half-periods `(omega1, omega3)` of a generic lattice, from the cubic
/// roots through the complex AGM. The lattice is `2 m omega1 + 2 n omega3`.
pub fn half_periods(inv: &EllipticInvariants) -> Result<(Complex64, Complex64), SpecFunError> {
    if inv.class != DegeneracyClass::Generic {
        return Err(SpecFunError::DidNotConverge(
            "degenerate invariants have no finite lattice",
        ));
    }
    // roots of 4 t^3 - g2 t - g3
    let roots = cubic_roots(inv.g2, inv.g3);
    let (e1, e2, e3) = (roots[0], roots[1], roots[2]);
    let m1 = agm((e1 - e3).sqrt(), (e1 - e2).sqrt());
    let m2 = agm((e1 - e3).sqrt(), (e2 - e3).sqrt());
    if m1.norm() == 0.0 || m2.norm() == 0.0 {
        return Err(SpecFunError::DidNotConverge("AGM collapsed"));
    }
    let pi = core::f64::consts::PI;
    let omega1 = pi / (2.0 * m1);
    let omega3 = Complex64::i() * pi / (2.0 * m2);
    Ok((omega1, omega3))
}

fn cubic_roots(g2: Complex64, g3: Complex64) -> [Complex64; 3] {
    // depressed cubic 4t^3 - g2 t - g3 = 0, i.e. t^3 + p t + q = 0 with
    // p = -g2/4, q = -g3/4; Cardano with complex arithmetic
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let sq = disc.sqrt();
    let mut u3 = -q / 2.0 + sq;
    if u3.norm() < 1e-30 {
        u3 = -q / 2.0 - sq;
    }
    let u = u3.powf(1.0 / 3.0);
    let omega = Complex64::from_polar(1.0, 2.0 * core::f64::consts::PI / 3.0);
    let mut roots = [Complex64::new(0.0, 0.0); 3];
    for (i, rot) in [Complex64::new(1.0, 0.0), omega, omega * omega].iter().enumerate() {
        let uu = u * rot;
        let t = if uu.norm() > 1e-30 { uu - p / (3.0 * uu) } else { uu };
        roots[i] = t;
    }
    // order deterministically: largest real part first (e1 by convention)
    roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    roots
}

/// Complex AGM with the principal ("right") square-root choice.
fn agm(a0: Complex64, b0: Complex64) -> Complex64 {
    let mut a = a0;
    let mut b = b0;
    for _ in 0..64 {
        let am = (a + b) * 0.5;
        let mut gm = (a * b).sqrt();
        if (am - gm).norm() > (am + gm).norm() {
            gm = -gm;
        }
        a = am;
        b = gm;
        if (a - b).norm() <= 1e-15 * a.norm() {
            break;
        }
    }
    a
}
