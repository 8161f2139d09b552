//! Differential polynomials: multivariate polynomials in `u, u', ..., u^(n)`
//! with exact complex coefficients.
//!
//! A monomial is keyed by its multi-index `(i_0, ..., i_n)` where `i_k` is
//! the power of the k-th derivative. The weight of a monomial is
//! `sum (k+1) i_k`; the expanded chain polynomials are graded by it.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::scalar::{
    approx, exact_int, exact_one, exact_zero, format_exact, is_exact_zero, Complex64,
    ExactComplex,
};

/// A single term `c * u^{i_0} (u')^{i_1} ... (u^{(n)})^{i_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffMonomial {
    pub coeff: ExactComplex,
    /// Multi-index, trailing zeros trimmed. Empty index = constant term.
    pub index: Vec<u32>,
}

impl DiffMonomial {
    /// `sum (k+1) i_k`; the constant term has weight 0.
    pub fn weight(&self) -> i64 {
        index_weight(&self.index)
    }

    /// Total degree `sum i_k`.
    pub fn degree(&self) -> i64 {
        self.index.iter().map(|&i| i as i64).sum()
    }
}

pub fn index_weight(index: &[u32]) -> i64 {
    index
        .iter()
        .enumerate()
        .map(|(k, &i)| (k as i64 + 1) * i as i64)
        .sum()
}

fn trim_index(mut index: Vec<u32>) -> Vec<u32> {
    while index.last() == Some(&0) {
        index.pop();
    }
    index
}

/// Sum of distinct-index monomials; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DiffPolynomial {
    terms: BTreeMap<Vec<u32>, ExactComplex>,
}

impl DiffPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactComplex) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![], c);
        p
    }

    /// The polynomial `u`.
    pub fn var_u() -> Self {
        let mut p = Self::zero();
        p.add_term(vec![1], exact_one());
        p
    }

    /// The monomial `c * u^{(k)}`.
    pub fn derivative_var(k: usize, c: ExactComplex) -> Self {
        let mut index = vec![0; k + 1];
        index[k] = 1;
        let mut p = Self::zero();
        p.add_term(index, c);
        p
    }

    pub fn from_monomials(monomials: impl IntoIterator<Item = DiffMonomial>) -> Self {
        let mut p = Self::zero();
        for m in monomials {
            p.add_term(m.index, m.coeff);
        }
        p
    }

    pub fn add_term(&mut self, index: Vec<u32>, coeff: ExactComplex) {
        if is_exact_zero(&coeff) {
            return;
        }
        let index = trim_index(index);
        let value = match self.terms.get(&index) {
            Some(old) => old.clone() + coeff,
            None => coeff,
        };
        if is_exact_zero(&value) {
            self.terms.remove(&index);
        } else {
            self.terms.insert(index, value);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest derivative order appearing with nonzero power.
    pub fn order(&self) -> usize {
        self.terms
            .keys()
            .map(|idx| idx.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    /// Largest total degree over the terms.
    pub fn degree(&self) -> i64 {
        self.monomials().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn monomials(&self) -> impl Iterator<Item = DiffMonomial> + '_ {
        self.terms.iter().map(|(index, coeff)| DiffMonomial {
            coeff: coeff.clone(),
            index: index.clone(),
        })
    }

    pub fn coeff(&self, index: &[u32]) -> ExactComplex {
        let key = trim_index(index.to_vec());
        self.terms.get(&key).cloned().unwrap_or_else(exact_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (index, coeff) in &other.terms {
            out.add_term(index.clone(), coeff.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-exact_one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        let mut out = Self::zero();
        for (index, coeff) in &self.terms {
            out.add_term(index.clone(), coeff.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ia, ca) in &self.terms {
            for (ib, cb) in &other.terms {
                let n = ia.len().max(ib.len());
                let mut index = vec![0u32; n];
                for (k, slot) in index.iter_mut().enumerate() {
                    *slot = ia.get(k).copied().unwrap_or(0) + ib.get(k).copied().unwrap_or(0);
                }
                out.add_term(index, ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Formal derivative with respect to z: `u^{(k)} -> u^{(k+1)}` by the
    /// product rule; constants drop.
    pub fn z_derivative(&self) -> Self {
        let mut out = Self::zero();
        for (index, coeff) in &self.terms {
            for k in 0..index.len() {
                if index[k] == 0 {
                    continue;
                }
                let mut idx = index.clone();
                idx[k] -= 1;
                if idx.len() < k + 2 {
                    idx.resize(k + 2, 0);
                }
                idx[k + 1] += 1;
                out.add_term(idx, coeff.clone() * exact_int(index[k] as i64));
            }
        }
        out
    }

    /// Evaluates on a jet `(u, u', ..., u^(m))` of `f64` complex values.
    pub fn eval_c64(&self, jet: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (index, coeff) in &self.terms {
            acc += Self::term_value(index, coeff, jet);
        }
        acc
    }

    /// Largest single-term magnitude on the jet; the scale used for
    /// relative residuals.
    pub fn eval_term_scale(&self, jet: &[Complex64]) -> f64 {
        let mut scale: f64 = 0.0;
        for (index, coeff) in &self.terms {
            let t = Self::term_value(index, coeff, jet).norm();
            if t > scale {
                scale = t;
            }
        }
        scale
    }

    fn term_value(index: &[u32], coeff: &ExactComplex, jet: &[Complex64]) -> Complex64 {
        let mut term = approx(coeff);
        for (k, &power) in index.iter().enumerate() {
            for _ in 0..power {
                term *= jet.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0));
            }
        }
        term
    }

    /// Evaluates exactly on an exact jet.
    pub fn eval_exact(&self, jet: &[ExactComplex]) -> ExactComplex {
        let mut acc = exact_zero();
        for (index, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (k, &power) in index.iter().enumerate() {
                for _ in 0..power {
                    term = term * jet.get(k).cloned().unwrap_or_else(exact_zero);
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Substitutes a truncated Laurent expansion for `u` (exact arithmetic).
    pub fn eval_laurent(&self, u: &LaurentPoly) -> LaurentPoly {
        // precompute derivative series u, u', ..., u^(order)
        let order = self.order();
        let mut jets = Vec::with_capacity(order + 1);
        jets.push(u.clone());
        for k in 0..order {
            let prev: &LaurentPoly = &jets[k];
            jets.push(prev.derivative());
        }
        let mut acc = LaurentPoly::zero();
        for (index, coeff) in &self.terms {
            let mut term = LaurentPoly::constant(coeff.clone());
            for (k, &power) in index.iter().enumerate() {
                for _ in 0..power {
                    term = term.mul(&jets[k]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// z-exponent of a monomial under `u = u0 z^p`: `sum i_k (p - k)`.
    pub fn term_exponent(index: &[u32], p: i64) -> i64 {
        index
            .iter()
            .enumerate()
            .map(|(k, &i)| i as i64 * (p - k as i64))
            .sum()
    }

    /// Smallest z-exponent over all terms under `u = u0 z^p` (the constant
    /// term contributes exponent 0).
    pub fn min_exponent(&self, p: i64) -> Option<i64> {
        self.terms
            .keys()
            .map(|idx| Self::term_exponent(idx, p))
            .min()
    }

    /// True when every term is affine in the jet (total degree <= 1).
    pub fn is_linear(&self) -> bool {
        self.monomials().all(|m| m.degree() <= 1)
    }
}

impl fmt::Display for DiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // highest derivative first, then higher degree
        let mut items: Vec<(&Vec<u32>, &ExactComplex)> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let oa = a.0.len();
            let ob = b.0.len();
            ob.cmp(&oa).then_with(|| b.0.cmp(a.0))
        });
        let mut first = true;
        for (index, coeff) in items {
            let rendered = format_exact(coeff);
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if index.is_empty() {
                write!(f, "{rendered}")?;
                continue;
            }
            if rendered != "1" {
                write!(f, "({rendered})*")?;
            }
            let mut need_star = false;
            for (k, &power) in index.iter().enumerate() {
                if power == 0 {
                    continue;
                }
                if need_star {
                    write!(f, "*")?;
                }
                need_star = true;
                let base = derivative_symbol(k);
                if power == 1 {
                    write!(f, "{base}")?;
                } else {
                    write!(f, "{base}^{power}")?;
                }
            }
        }
        Ok(())
    }
}

fn derivative_symbol(k: usize) -> String {
    match k {
        0 => String::from("u"),
        1 => String::from("u'"),
        2 => String::from("u''"),
        3 => String::from("u'''"),
        _ => alloc::format!("u^({k})"),
    }
}

/// Finite Laurent polynomial `sum c_e z^e` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, ExactComplex>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExactComplex) -> Self {
        let mut p = Self::zero();
        p.add_term(0, c);
        p
    }

    pub fn add_term(&mut self, exp: i64, coeff: ExactComplex) {
        if is_exact_zero(&coeff) {
            return;
        }
        let value = match self.terms.get(&exp) {
            Some(old) => old.clone() + coeff,
            None => coeff,
        };
        if is_exact_zero(&value) {
            self.terms.remove(&exp);
        } else {
            self.terms.insert(exp, value);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> ExactComplex {
        self.terms.get(&exp).cloned().unwrap_or_else(exact_zero)
    }

    /// Smallest exponent carrying a nonzero coefficient.
    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &other.terms {
                out.add_term(ea + eb, ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Term-wise derivative `c z^e -> c e z^{e-1}`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero();
        for (&e, c) in &self.terms {
            if e != 0 {
                out.add_term(e - 1, c.clone() * exact_int(e));
            }
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &ExactComplex)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::exact_int;

    #[test]
    fn z_derivative_product_rule() {
        // d/dz (u^2) = 2 u u'
        let u2 = DiffPolynomial::var_u().mul(&DiffPolynomial::var_u());
        let d = u2.z_derivative();
        assert_eq!(d.coeff(&[1, 1]), exact_int(2));
        assert_eq!(d.num_terms(), 1);
    }

    #[test]
    fn weights_and_orders() {
        // u'' : index (0,0,1), weight 3
        let upp = DiffPolynomial::derivative_var(2, exact_one());
        let m = upp.monomials().next().unwrap();
        assert_eq!(m.weight(), 3);
        assert_eq!(upp.order(), 2);
        // u*u' : weight 1 + 2 = 3
        let uu1 = DiffPolynomial::var_u().mul(&DiffPolynomial::derivative_var(1, exact_one()));
        assert_eq!(uu1.monomials().next().unwrap().weight(), 3);
    }

    #[test]
    fn laurent_substitution_kills_riccati_solution() {
        // u' - u^2 at u = -1/z vanishes identically
        let poly = DiffPolynomial::derivative_var(1, exact_one())
            .sub(&DiffPolynomial::var_u().mul(&DiffPolynomial::var_u()));
        let mut series = LaurentPoly::zero();
        series.add_term(-1, exact_int(-1));
        assert!(poly.eval_laurent(&series).is_zero());
    }

    #[test]
    fn eval_matches_term_sum() {
        let p = DiffPolynomial::derivative_var(2, exact_one())
            .add(&DiffPolynomial::var_u().mul(&DiffPolynomial::var_u()).scale(&exact_int(3)));
        let jet = [Complex64::new(0.5, 0.25), Complex64::new(-1.0, 2.0), Complex64::new(0.0, 1.0)];
        let direct = jet[2] + 3.0 * jet[0] * jet[0];
        assert!((p.eval_c64(&jet) - direct).norm() < 1e-14);
    }
}
