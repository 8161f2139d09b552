//! Factorization of constant-coefficient linear ODEs into first-order
//! chains, verified by re-expansion.
//!
//! The ODE `u^(n) + c_{n-1} u^(n-1) + ... + c_1 u' + c_0 u + g = 0` factors
//! as `[D - b_n] ... [D - b_1] (u - alpha) = 0` where the `b_m` are the
//! characteristic roots and `(-1)^{n+1} alpha prod(b_m) = g` fixes `alpha`
//! whenever `prod(b_m) != 0` (that product is `(-1)^n c_0`); otherwise
//! `alpha` is arbitrary and 0 is the representative choice.

use alloc::vec::Vec;

use crate::operator::{Factor, FactorChain};
use crate::roots::{poly_roots, RootError};
use crate::scalar::{
    c64_to_exact, exact_int, exact_one, exact_zero, is_exact_zero, snap_gaussian, ExactComplex,
};
use crate::unipoly::{UniPoly, Var};

/// `u^(n) + c_{n-1} u^(n-1) + ... + c_0 u + constant = 0`.
///
/// `coeffs[k]` multiplies `u^(k)` for `k < n`; the forcing constant is kept
/// separately since it is the one slot the characteristic polynomial does
/// not see.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOde {
    pub coeffs: Vec<ExactComplex>,
    pub constant: ExactComplex,
}

impl LinearOde {
    pub fn new(coeffs: Vec<ExactComplex>, constant: ExactComplex) -> Self {
        Self { coeffs, constant }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// The ODE as a differential polynomial.
    pub fn as_diffpoly(&self) -> crate::diffpoly::DiffPolynomial {
        let n = self.order();
        let mut poly = crate::diffpoly::DiffPolynomial::derivative_var(n, exact_one());
        for (k, c) in self.coeffs.iter().enumerate() {
            if k == 0 {
                poly = poly.add(&crate::diffpoly::DiffPolynomial::var_u().scale(c));
            } else {
                poly = poly.add(&crate::diffpoly::DiffPolynomial::derivative_var(k, c.clone()));
            }
        }
        poly.add(&crate::diffpoly::DiffPolynomial::constant(self.constant.clone()))
    }
}

/// Monic characteristic polynomial `z^n + c_{n-1} z^{n-1} + ... + c_0`.
pub fn characteristic_poly(ode: &LinearOde) -> UniPoly {
    let mut coeffs = ode.coeffs.clone();
    coeffs.push(exact_one());
    UniPoly::new(Var::Z, coeffs)
}

/// Factors the ODE into a first-order chain with `a_i = 0`.
///
/// Characteristic roots are snapped to Gaussian rationals when exact
/// verification succeeds, so rational-root inputs round-trip exactly;
/// irrational roots are embedded as their binary64 values and round-trip to
/// 1e-10. Conjugate pairs of a real-coefficient input end up adjacent in
/// the factor list.
///
/// When the characteristic constant vanishes (`prod b_m = 0`) the chain
/// cannot produce a constant forcing at all: `alpha` is genuinely arbitrary
/// and 0 is returned. A nonzero `constant` is then not representable and is
/// dropped from the re-expansion; the round-trip guarantee applies to
/// inputs with `c_0 != 0` or `constant = 0`.
pub fn factor_linear(ode: &LinearOde) -> Result<FactorChain, RootError> {
    let char_poly = characteristic_poly(ode);

    // exact roots first (handles rational multiplicities by deflation),
    // then the numeric roots of whatever factor resisted
    let (mut roots, residual) = crate::roots::exact_rational_roots(&char_poly);
    if residual.degree().map_or(false, |d| d >= 1) {
        for r in poly_roots(&residual)? {
            let embedded = if let Some(snapped) = snap_gaussian(r, 1_000_000, 1e-7) {
                if is_exact_zero(&char_poly.eval_exact(&snapped)) {
                    snapped
                } else {
                    c64_to_exact(r).unwrap_or_else(exact_zero)
                }
            } else {
                c64_to_exact(r).unwrap_or_else(exact_zero)
            };
            roots.push(embedded);
        }
    }
    crate::scalar::sort_exact_deterministic(&mut roots);

    let product = roots.iter().fold(exact_one(), |acc, r| acc * r.clone());
    let n = ode.order() as i64;
    let alpha = if is_exact_zero(&product) {
        // homogeneous-in-constant branch: alpha is arbitrary, 0 is the
        // documented representative
        exact_zero()
    } else {
        let sign = if (n + 1) % 2 == 0 { exact_one() } else { exact_int(-1) };
        sign * ode.constant.clone() / product
    };

    Ok(FactorChain::new(
        alpha,
        roots
            .into_iter()
            .map(|b| Factor { a: exact_zero(), b })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::expand_chain;
    use crate::scalar::approx;
    use num_traits::Float;

    fn ode(coeffs: &[i64], constant: i64) -> LinearOde {
        LinearOde::new(
            coeffs.iter().map(|&c| exact_int(c)).collect(),
            exact_int(constant),
        )
    }

    #[test]
    fn characteristic_examples() {
        // u'' - 3u' + 2u + 2 = 0 -> z^2 - 3z + 2
        let p = characteristic_poly(&ode(&[2, -3], 2));
        assert_eq!(p.coeff(0), exact_int(2));
        assert_eq!(p.coeff(1), exact_int(-3));
        assert_eq!(p.coeff(2), exact_one());
        // u' = 0 -> z
        let p = characteristic_poly(&ode(&[0], 0));
        assert_eq!(p.degree(), Some(1));
        assert!(is_exact_zero(&p.coeff(0)));
        // u'' + u = 0 -> z^2 + 1
        let p = characteristic_poly(&ode(&[1, 0], 0));
        assert_eq!(p.coeff(0), exact_one());
        assert!(is_exact_zero(&p.coeff(1)));
    }

    #[test]
    fn factor_with_constant_forcing() {
        // u'' - 3u' + 2u + 2 = 0 -> alpha = -1, b = (1, 2)
        let chain = factor_linear(&ode(&[2, -3], 2)).unwrap();
        assert_eq!(chain.alpha, exact_int(-1));
        let mut roots: Vec<ExactComplex> =
            chain.factors.iter().map(|f| f.b.clone()).collect();
        crate::scalar::sort_exact_deterministic(&mut roots);
        assert_eq!(roots, alloc::vec![exact_int(1), exact_int(2)]);
        // re-expansion reproduces the input exactly
        assert_eq!(expand_chain(&chain).unwrap(), ode(&[2, -3], 2).as_diffpoly());
    }

    #[test]
    fn arbitrary_alpha_branch() {
        // u' = 0: root 0, alpha defaults to 0
        let chain = factor_linear(&ode(&[0], 0)).unwrap();
        assert!(is_exact_zero(&chain.alpha));
        assert!(is_exact_zero(&chain.factors[0].b));
    }

    #[test]
    fn conjugate_pair_adjacent() {
        // u'' + u = 0 -> b = (i, -i), alpha = 0
        let chain = factor_linear(&ode(&[1, 0], 0)).unwrap();
        assert!(is_exact_zero(&chain.alpha));
        let b0 = approx(&chain.factors[0].b);
        let b1 = approx(&chain.factors[1].b);
        assert!(Float::abs(b0.im - 1.0) < 1e-12 && Float::abs(b1.im + 1.0) < 1e-12);
        assert_eq!(expand_chain(&chain).unwrap(), ode(&[1, 0], 0).as_diffpoly());
    }

    #[test]
    fn permutation_invariance() {
        let chain = factor_linear(&ode(&[6, 11, 6], 12)).unwrap(); // roots -1,-2,-3
        let expanded = expand_chain(&chain).unwrap();
        let mut permuted = chain.clone();
        permuted.factors.swap(0, 2);
        assert_eq!(expand_chain(&permuted).unwrap(), expanded);
        permuted.factors.swap(0, 1);
        assert_eq!(expand_chain(&permuted).unwrap(), expanded);
    }

    #[test]
    fn irrational_roots_round_trip_numerically() {
        // u'' - 2u = 0: roots +-sqrt(2)
        let input = ode(&[-2, 0], 0);
        let chain = factor_linear(&input).unwrap();
        let expanded = expand_chain(&chain).unwrap();
        let target = input.as_diffpoly();
        for m in target.monomials() {
            let got = approx(&expanded.coeff(&m.index));
            let want = approx(&m.coeff);
            assert!((got - want).norm() <= 1e-10 * (1.0 + want.norm()));
        }
    }
}
