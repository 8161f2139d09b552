//! Factor chains and their expansion into differential polynomials.
//!
//! A chain `(alpha, [(a_1,b_1), ..., (a_n,b_n)])` denotes the ODE
//!
//! ```text
//! [D - (a_n u + b_n)] ... [D - (a_1 u + b_1)] (u - alpha) = 0 .
//! ```
//!
//! `factors[0]` is the innermost (rightmost) factor. Expansion follows the
//! recursion `A_{k+1} = dA_k/dz - (a_{k+1} u + b_{k+1}) A_k` with the formal
//! jet shift `u^{(k)} -> u^{(k+1)}`; the constant generated by `alpha` and
//! the `b_i` lands on the empty multi-index.

use alloc::string::String;
use alloc::vec::Vec;

use crate::diffpoly::DiffPolynomial;
use crate::scalar::{approx, exact_zero, Complex64, ExactComplex};

/// One linear factor `D - (a u + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub a: ExactComplex,
    pub b: ExactComplex,
}

/// The factorized ODE: shift `alpha` plus the ordered factor list,
/// innermost first.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorChain {
    pub alpha: ExactComplex,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainError {
    EmptyChain,
}

impl core::fmt::Display for ChainError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChainError::EmptyChain => write!(f, "factor chain must contain at least one factor"),
        }
    }
}

impl FactorChain {
    pub fn new(alpha: ExactComplex, factors: Vec<Factor>) -> Self {
        Self { alpha, factors }
    }

    /// Order of the induced ODE.
    pub fn order(&self) -> usize {
        self.factors.len()
    }

    /// The pure chain `[D - a_n u] ... [D - a_1 u] u` used by the
    /// leading-order analysis.
    pub fn homogeneous(a: &[ExactComplex]) -> Self {
        Self {
            alpha: exact_zero(),
            factors: a
                .iter()
                .map(|ai| Factor {
                    a: ai.clone(),
                    b: exact_zero(),
                })
                .collect(),
        }
    }
}

/// Expands the chain into the differential polynomial equal to the left
/// side of the factorized ODE.
pub fn expand_chain(chain: &FactorChain) -> Result<DiffPolynomial, ChainError> {
    if chain.factors.is_empty() {
        return Err(ChainError::EmptyChain);
    }
    // A_0 = u - alpha
    let mut acc = DiffPolynomial::var_u().sub(&DiffPolynomial::constant(chain.alpha.clone()));
    for factor in &chain.factors {
        let multiplier = DiffPolynomial::var_u()
            .scale(&factor.a)
            .add(&DiffPolynomial::constant(factor.b.clone()));
        acc = acc.z_derivative().sub(&multiplier.mul(&acc));
    }
    Ok(acc)
}

/// Expands `D_n = [D - a_n u] ... [D - a_1 u] u`.
///
/// Every monomial of the result has weight exactly `n + 1`; the top terms
/// are `u^{(n)}` and `(-1)^n (prod a_k) u^{n+1}`.
pub fn expand_dn(a: &[ExactComplex]) -> DiffPolynomial {
    // alpha = 0 and b = 0 make the chain act on u itself
    expand_chain(&FactorChain::homogeneous(a)).unwrap_or_else(|_| DiffPolynomial::var_u())
}

/// Closed-form smooth test functions for the numeric expansion oracle.
///
/// Derivatives of every order are available analytically, so the chain can
/// be applied by repeated differentiation without ever forming the expanded
/// polynomial.
#[derive(Clone, Debug)]
pub enum TestFunction {
    /// `c_0 + c_1 z + ... + c_m z^m`
    Poly(Vec<Complex64>),
    /// `p(z) e^{k z}` with polynomial amplitude
    ExpPoly { amplitude: Vec<Complex64>, k: Complex64 },
    /// `1/(z - pole)`
    Reciprocal { pole: Complex64 },
}

impl TestFunction {
    /// k-th derivative at `z`.
    pub fn derivative(&self, k: usize, z: Complex64) -> Complex64 {
        match self {
            TestFunction::Poly(coeffs) => {
                let mut total = Complex64::new(0.0, 0.0);
                for (m, c) in coeffs.iter().enumerate() {
                    if m < k {
                        continue;
                    }
                    // falling factorial m (m-1) ... (m-k+1)
                    let mut fall = 1.0;
                    for t in 0..k {
                        fall *= (m - t) as f64;
                    }
                    total += c * fall * z.powi((m - k) as i32);
                }
                total
            }
            TestFunction::ExpPoly { amplitude, k: rate } => {
                // (p e^{kz})^(k) via binomial expansion of derivatives
                let mut total = Complex64::new(0.0, 0.0);
                let mut binom = 1.0f64;
                for j in 0..=k {
                    if j > 0 {
                        binom = binom * (k - j + 1) as f64 / j as f64;
                    }
                    let p_der = TestFunction::Poly(amplitude.clone()).derivative(j, z);
                    total += binom * p_der * rate.powi((k - j) as i32);
                }
                total * (rate * z).exp()
            }
            TestFunction::Reciprocal { pole } => {
                // d^k/dz^k (z - a)^{-1} = (-1)^k k! (z - a)^{-(k+1)}
                let mut fact = 1.0f64;
                for t in 1..=k {
                    fact *= t as f64;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * fact * (z - pole).powi(-(k as i32) - 1)
            }
        }
    }

    /// Jet `(f, f', ..., f^(m))` at `z`.
    pub fn jet(&self, m: usize, z: Complex64) -> Vec<Complex64> {
        (0..=m).map(|k| self.derivative(k, z)).collect()
    }
}

/// Applies the nested chain to a test function at `z` by Taylor-jet
/// arithmetic, never forming the expanded polynomial.
///
/// This is the independent oracle for [`expand_chain`]: the two agree to
/// about 1e-9 relative on smooth inputs away from singularities.
pub fn apply_chain_numeric(chain: &FactorChain, f: &TestFunction, z: Complex64) -> Complex64 {
    let n = chain.order();
    // truncated Taylor coefficients of u at z, enough to lose one order per factor
    let u_taylor: Vec<Complex64> = (0..=n)
        .map(|k| {
            let mut fact = 1.0f64;
            for t in 1..=k {
                fact *= t as f64;
            }
            f.derivative(k, z) / fact
        })
        .collect();

    // A = u - alpha as a Taylor polynomial around z
    let mut acc = u_taylor.clone();
    acc[0] -= approx(&chain.alpha);

    for (step, factor) in chain.factors.iter().enumerate() {
        let needed = n - step; // orders still meaningful after this factor
        // derivative of the truncated series
        let mut deriv: Vec<Complex64> = (1..acc.len())
            .map(|k| acc[k] * k as f64)
            .collect();
        deriv.truncate(needed + 1);
        // (a u + b) * A, truncated
        let a = approx(&factor.a);
        let b = approx(&factor.b);
        let mut prod = alloc::vec![Complex64::new(0.0, 0.0); needed + 1];
        for (i, ui) in u_taylor.iter().enumerate() {
            for (j, aj) in acc.iter().enumerate() {
                if i + j <= needed {
                    prod[i + j] += a * ui * aj;
                }
            }
        }
        for (j, aj) in acc.iter().enumerate().take(needed + 1) {
            prod[j] += b * aj;
        }
        let mut next = alloc::vec![Complex64::new(0.0, 0.0); needed + 1];
        for k in 0..=needed {
            let d = deriv.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0));
            next[k] = d - prod[k];
        }
        acc = next;
    }
    acc[0]
}

/// Human-readable rendering of a chain, innermost factor rightmost.
pub fn format_chain(chain: &FactorChain) -> String {
    use crate::scalar::format_exact;
    let mut out = String::new();
    for factor in chain.factors.iter().rev() {
        out.push_str(&alloc::format!(
            "[D - (({})u + ({}))] ",
            format_exact(&factor.a),
            format_exact(&factor.b)
        ));
    }
    out.push_str(&alloc::format!("(u - ({}))", format_exact(&chain.alpha)));
    out
}
