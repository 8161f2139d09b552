//! Complex-plane evaluators for the special functions appearing in the
//! closed-form solution families: Weierstrass wp and wp' with their
//! degenerations, Bessel J/Y with derivatives, and stable elementary
//! functions.

pub mod bessel;
pub mod gamma;
pub mod weierstrass;

pub use bessel::{bessel_j, bessel_j_prime, bessel_y, bessel_y_prime};
pub use weierstrass::{half_periods, wp, wp_both, wp_prime, DegeneracyClass, EllipticInvariants};

use num_traits::Float;

use crate::scalar::Complex64;

/// Evaluation failures shared by every special-function path.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecFunError {
    /// The argument sits within tolerance of a pole; carries the estimate.
    PoleNear(Complex64),
    /// Principal-branch violation or an essential singularity.
    BranchPoint(&'static str),
    /// The value left the representable range.
    Overflow(&'static str),
    /// An iteration or limit process failed.
    DidNotConverge(&'static str),
}

impl core::fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpecFunError::PoleNear(z) => write!(f, "pole near z = {z}"),
            SpecFunError::BranchPoint(msg) => write!(f, "branch violation: {msg}"),
            SpecFunError::Overflow(msg) => write!(f, "overflow: {msg}"),
            SpecFunError::DidNotConverge(msg) => write!(f, "did not converge: {msg}"),
        }
    }
}

/// Named elementary evaluator used by the CLI and the expression engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elementary {
    Exp,
    Tanh,
    Cot,
    Log,
    Sqrt,
}

/// Principal-branch elementary functions with pole and branch contracts.
pub fn elementary(name: Elementary, z: Complex64) -> Result<Complex64, SpecFunError> {
    match name {
        Elementary::Exp => Ok(z.exp()),
        Elementary::Tanh => Ok(stable_tanh(z)),
        Elementary::Cot => stable_cot(z),
        Elementary::Log => {
            if z.norm() == 0.0 {
                return Err(SpecFunError::BranchPoint("log at 0"));
            }
            Ok(z.ln())
        }
        Elementary::Sqrt => Ok(z.sqrt()),
    }
}

/// tanh without overflow in the half-planes: driven by `e^{-2|Re z|}`.
pub fn stable_tanh(z: Complex64) -> Complex64 {
    if z.re >= 0.0 {
        let t = (-2.0 * z).exp();
        (Complex64::new(1.0, 0.0) - t) / (Complex64::new(1.0, 0.0) + t)
    } else {
        let t = (2.0 * z).exp();
        (t - Complex64::new(1.0, 0.0)) / (t + Complex64::new(1.0, 0.0))
    }
}

/// cot via `i (e^{2iz} + 1) / (e^{2iz} - 1)`, which saturates to -+i as
/// `Im z -> +-inf` instead of overflowing.
pub fn stable_cot(z: Complex64) -> Result<Complex64, SpecFunError> {
    let t = (Complex64::i() * 2.0 * z).exp();
    let denom = t - Complex64::new(1.0, 0.0);
    if denom.norm() < 1e-12 {
        // z is within ~1e-12 of a multiple of pi
        let k = Float::round(z.re / core::f64::consts::PI);
        return Err(SpecFunError::PoleNear(Complex64::new(
            k * core::f64::consts::PI,
            0.0,
        )));
    }
    Ok(Complex64::i() * (t + Complex64::new(1.0, 0.0)) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_values() {
        assert_eq!(
            elementary(Elementary::Exp, Complex64::new(0.0, 0.0)).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        let v = elementary(Elementary::Cot, Complex64::new(core::f64::consts::FRAC_PI_4, 0.0))
            .unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn tanh_matches_definition() {
        let w = Complex64::new(0.5, 0.2);
        let direct = ((2.0 * w).exp() - 1.0) / ((2.0 * w).exp() + 1.0);
        assert!((stable_tanh(w) - direct).norm() < 1e-14);
        // saturation without NaN
        let big = stable_tanh(Complex64::new(400.0, 3.0));
        assert!((big - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let neg = stable_tanh(Complex64::new(-400.0, 3.0));
        assert!((neg + Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cot_pole_detected() {
        assert!(matches!(
            stable_cot(Complex64::new(core::f64::consts::PI, 0.0)),
            Err(SpecFunError::PoleNear(_))
        ));
        // saturation for large imaginary part
        let v = stable_cot(Complex64::new(0.3, 50.0)).unwrap();
        assert!((v - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn log_branch_guard() {
        assert!(matches!(
            elementary(Elementary::Log, Complex64::new(0.0, 0.0)),
            Err(SpecFunError::BranchPoint(_))
        ));
    }
}
