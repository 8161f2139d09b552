//! Univariate polynomials over the exact Gaussian rationals.
//!
//! These carry the indicial polynomials `P(u0; j)`, the residue polynomials
//! `R_n(u0)` and characteristic polynomials, so the variable is tagged to
//! keep displays and serialized payloads unambiguous.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::scalar::{
    approx, exact_one, exact_zero, format_exact, is_exact_zero, Complex64, ExactComplex,
};

/// Variable tag for a univariate polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    /// Fuchs-index variable.
    J,
    /// Leading-coefficient variable.
    U0,
    /// Characteristic / complex-plane variable.
    Z,
}

impl Var {
    pub fn symbol(self) -> &'static str {
        match self {
            Var::J => "j",
            Var::U0 => "u0",
            Var::Z => "z",
        }
    }
}

/// Dense univariate polynomial, coefficients lowest degree first.
///
/// Invariant: the coefficient list is trimmed, so the leading coefficient is
/// nonzero unless the polynomial is zero (empty list).
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    var: Var,
    coeffs: Vec<ExactComplex>,
}

impl UniPoly {
    pub fn new(var: Var, mut coeffs: Vec<ExactComplex>) -> Self {
        while coeffs.last().map_or(false, is_exact_zero) {
            coeffs.pop();
        }
        Self { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        Self { var, coeffs: vec![] }
    }

    pub fn constant(var: Var, c: ExactComplex) -> Self {
        Self::new(var, vec![c])
    }

    pub fn one(var: Var) -> Self {
        Self::constant(var, exact_one())
    }

    /// The monomial `c * x^k`.
    pub fn monomial(var: Var, c: ExactComplex, k: usize) -> Self {
        let mut coeffs = vec![exact_zero(); k + 1];
        coeffs[k] = c;
        Self::new(var, coeffs)
    }

    /// `x - r`.
    pub fn linear_root(var: Var, r: &ExactComplex) -> Self {
        Self::new(var, vec![-r.clone(), exact_one()])
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[ExactComplex] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ExactComplex {
        self.coeffs.get(k).cloned().unwrap_or_else(exact_zero)
    }

    pub fn leading(&self) -> Option<&ExactComplex> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k) + other.coeff(k));
        }
        Self::new(self.var, coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-exact_one()))
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        Self::new(
            self.var,
            self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.var);
        }
        let mut coeffs = vec![exact_zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(self.var, coeffs)
    }

    /// Exact synthetic division by `x - r`; returns the quotient when the
    /// remainder is exactly zero.
    pub fn deflate(&self, r: &ExactComplex) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let mut quotient = vec![exact_zero(); self.coeffs.len() - 1];
        let mut carry = exact_zero();
        for k in (0..self.coeffs.len()).rev() {
            let value = self.coeffs[k].clone() + carry.clone() * r.clone();
            if k == 0 {
                if !is_exact_zero(&value) {
                    return None;
                }
            } else {
                quotient[k - 1] = value.clone();
                carry = value;
            }
        }
        Some(Self::new(self.var, quotient))
    }

    pub fn eval_exact(&self, x: &ExactComplex) -> ExactComplex {
        let mut acc = exact_zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn eval_int(&self, n: i64) -> ExactComplex {
        self.eval_exact(&crate::scalar::exact_int(n))
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + approx(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.clone() * crate::scalar::exact_int(k as i64))
            .collect();
        Self::new(self.var, coeffs)
    }

    /// Coefficients converted to `f64` complex, lowest degree first.
    pub fn coeffs_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(approx).collect()
    }

    /// Multiplicity of zero as a root (number of leading zero coefficients).
    pub fn root_multiplicity_at_zero(&self) -> usize {
        self.coeffs.iter().take_while(|c| is_exact_zero(c)).count()
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let sym = self.var.symbol();
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if is_exact_zero(c) {
                continue;
            }
            let rendered: String = format_exact(c);
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{rendered}")?,
                1 if rendered == "1" => write!(f, "{sym}")?,
                1 => write!(f, "({rendered})*{sym}")?,
                _ if rendered == "1" => write!(f, "{sym}^{k}")?,
                _ => write!(f, "({rendered})*{sym}^{k}")?,
            }
        }
        Ok(())
    }
}
