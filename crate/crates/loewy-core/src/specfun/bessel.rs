//! Bessel functions J_nu, Y_nu of complex order and argument, with
//! derivatives.
//!
//! Strategy:
//! - `|zeta| <= 12`: ascending power series. The crossover keeps the
//!   worst partial-sum magnitude near 4e3, so cancellation costs at most
//!   ~4 digits of the f64 budget.
//! - `|zeta| > 12`: large-argument asymptotic series (P, Q form),
//!   truncated at its smallest term; arguments in the left half plane are
//!   reflected through `J_nu(e^{+-i pi} w) = e^{+-i nu pi} J_nu(w)` first.
//! - `Y_nu` comes from the connection through `J_{+-nu}`; integer order is
//!   the average of the two half-offset evaluations `nu +- 1e-6`, which
//!   cancels the linear error term.
//!
//! Branches are principal throughout (`zeta^nu = exp(nu Log zeta)`).

use num_traits::Float;

use super::gamma::inv_gamma;
use super::SpecFunError;
use crate::scalar::Complex64;

const SERIES_CUTOFF: f64 = 12.0;
const INTEGER_EPS: f64 = 1e-3;

fn is_integer(nu: Complex64) -> Option<i64> {
    if nu.im != 0.0 {
        return None;
    }
    let rounded = Float::round(nu.re);
    (nu.re == rounded && Float::abs(rounded) < 1e9).then_some(rounded as i64)
}

/// J_nu(zeta), principal branch.
pub fn bessel_j(nu: Complex64, zeta: Complex64) -> Result<Complex64, SpecFunError> {
    // negative integer order reduces to positive via J_{-n} = (-1)^n J_n
    if let Some(n) = is_integer(nu) {
        if n < 0 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(sign * bessel_j(-nu, zeta)?);
        }
    }
    if zeta.norm() == 0.0 {
        if nu.norm() == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if nu.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(SpecFunError::BranchPoint("J_nu at zeta = 0 with Re(nu) <= 0"));
    }
    if zeta.norm() <= SERIES_CUTOFF {
        return j_series(nu, zeta);
    }
    if zeta.re >= 0.0 {
        return j_asymptotic(nu, zeta);
    }
    // reflect into the right half plane
    let w = -zeta;
    let rot = if zeta.im >= 0.0 {
        (Complex64::i() * core::f64::consts::PI * nu).exp()
    } else {
        (-Complex64::i() * core::f64::consts::PI * nu).exp()
    };
    Ok(rot * j_asymptotic(nu, w)?)
}

fn j_series(nu: Complex64, zeta: Complex64) -> Result<Complex64, SpecFunError> {
    let quarter = zeta * zeta * 0.25;
    let mut term = inv_gamma(nu + 1.0);
    let mut sum = term;
    let mut worst = sum.norm();
    for m in 1..120 {
        term = term * (-quarter) / (m as f64 * (nu + m as f64));
        sum += term;
        worst = Float::max(worst, sum.norm());
        if term.norm() < 1e-17 * Float::max(worst, 1e-280) {
            break;
        }
    }
    let prefactor = (nu * (zeta * 0.5).ln()).exp();
    let value = prefactor * sum;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(SpecFunError::Overflow("Bessel series overflow"));
    }
    Ok(value)
}

/// Large-argument expansion, valid for `Re(zeta) >= 0`, `|zeta| > 12`.
fn j_asymptotic(nu: Complex64, zeta: Complex64) -> Result<Complex64, SpecFunError> {
    let (p, q) = pq_series(nu, zeta);
    let omega = zeta - (nu * 0.5 + 0.25) * core::f64::consts::PI;
    let amp = (2.0 / (core::f64::consts::PI * zeta)).sqrt();
    let value = amp * (omega.cos() * p - omega.sin() * q);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(SpecFunError::Overflow("Bessel asymptotic overflow"));
    }
    Ok(value)
}

fn pq_series(nu: Complex64, zeta: Complex64) -> (Complex64, Complex64) {
    let four_nu2 = 4.0 * nu * nu;
    let mut p = Complex64::new(1.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    // term_k = a_k / zeta^k built multiplicatively
    let mut term = Complex64::new(1.0, 0.0);
    let mut last_norm = f64::INFINITY;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        term = term * (four_nu2 - odd * odd) / (8.0 * k as f64 * zeta);
        let n = term.norm();
        if n > last_norm {
            break; // asymptotic tail started growing
        }
        last_norm = n;
        // signs cycle with period 4: P gets k = 2, 4, ... with (-1)^{k/2},
        // Q gets k = 1, 3, ... with (-1)^{(k-1)/2}
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if n < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// Y_nu(zeta), principal branch. `zeta != 0`.
pub fn bessel_y(nu: Complex64, zeta: Complex64) -> Result<Complex64, SpecFunError> {
    if zeta.norm() == 0.0 {
        return Err(SpecFunError::PoleNear(zeta));
    }
    if let Some(_n) = is_integer(nu) {
        // limit through symmetric order offsets. Each pair average kills
        // the O(eps) term; extrapolating the eps and 2*eps pairs kills the
        // O(eps^2) term as well, which keeps the sin(nu pi) cancellation
        // mild enough for ~1e-10 accuracy.
        let pair = |eps: f64| -> Result<Complex64, SpecFunError> {
            let e = Complex64::new(eps, 0.0);
            Ok((y_nonint(nu + e, zeta)? + y_nonint(nu - e, zeta)?) * 0.5)
        };
        let fine = pair(INTEGER_EPS)?;
        let coarse = pair(2.0 * INTEGER_EPS)?;
        return Ok((4.0 * fine - coarse) / 3.0);
    }
    y_nonint(nu, zeta)
}

fn y_nonint(nu: Complex64, zeta: Complex64) -> Result<Complex64, SpecFunError> {
    let pi = core::f64::consts::PI;
    let j_pos = bessel_j(nu, zeta)?;
    let j_neg = bessel_j(-nu, zeta)?;
    let s = (pi * nu).sin();
    if s.norm() < 1e-14 {
        return Err(SpecFunError::DidNotConverge("Y_nu too close to integer order"));
    }
    Ok((j_pos * (pi * nu).cos() - j_neg) / s)
}

/// J'_nu via the recurrence `2 J'_nu = J_{nu-1} - J_{nu+1}`.
pub fn bessel_j_prime(nu: Complex64, zeta: Complex64) -> Result<Complex64, SpecFunError> {
    let one = Complex64::new(1.0, 0.0);
    Ok((bessel_j(nu - one, zeta)? - bessel_j(nu + one, zeta)?) * 0.5)
}

/// Y'_nu via the same recurrence.
pub fn bessel_y_prime(nu: Complex64, zeta: Complex64) -> Result<Complex64, SpecFunError> {
    let one = Complex64::new(1.0, 0.0);
    Ok((bessel_y(nu - one, zeta)? - bessel_y(nu + one, zeta)?) * 0.5)
}
