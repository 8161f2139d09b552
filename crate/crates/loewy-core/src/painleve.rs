//! Leading-order analysis, indicial polynomials, Fuchs indices, the Laurent
//! recursion, and the genericity test.
//!
//! For a differential polynomial `E` and an ansatz `u = u0 z^p` (a pole of
//! order `-p` at the origin), the dominant terms are those attaining the
//! minimal z-exponent. The indicial polynomial `P(u0; j)` is read off the
//! Gateaux derivative of the dominant terms; its roots are the Fuchs
//! indices, at which the Laurent coefficient `u_j` is not determined by the
//! recursion `P(u0; j) u_j + Q_j = 0`.
//!
//! All computations here are exact. Indices and obstructions are decided by
//! rational arithmetic, never by floating-point proximity.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::diffpoly::{DiffPolynomial, LaurentPoly};
use crate::operator::expand_dn;
use crate::roots::{exact_rational_roots, poly_roots, rational_integer_roots};
use crate::scalar::{
    exact_int, exact_one, exact_zero, is_exact_zero, Complex64, ExactComplex,
};
use crate::unipoly::{UniPoly, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PainleveError {
    /// The given (p, u0) pair does not solve the leading-order equation.
    NotABalance(String),
    /// residue/indicial recursions need every chain coefficient nonzero
    DegenerateChain,
    /// Negative expansion depth.
    NegativeDepth,
    /// The polynomial is identically zero.
    ZeroPolynomial,
}

impl core::fmt::Display for PainleveError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PainleveError::NotABalance(msg) => write!(f, "not a leading balance: {msg}"),
            PainleveError::DegenerateChain => write!(f, "degenerate chain: some a_i is zero"),
            PainleveError::NegativeDepth => write!(f, "expansion depth must be nonnegative"),
            PainleveError::ZeroPolynomial => write!(f, "zero polynomial"),
        }
    }
}

/// A leading-order balance `u ~ u0 z^p`, `u0 != 0`, `p < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingBalance {
    pub p: i64,
    pub u0: ExactComplex,
}

/// Status of a nonnegative Fuchs index met during the Laurent recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResonanceStatus {
    /// `Q_j = 0`: the coefficient is arbitrary (set to 0 by convention).
    Free,
    /// `Q_j != 0`: no Laurent solution through this balance.
    Obstructed,
}

/// Indicial polynomial and its roots for one balance.
#[derive(Clone, Debug)]
pub struct IndicialData {
    pub balance: LeadingBalance,
    /// `P(u0; j)` as an exact polynomial in `j`.
    pub indicial: UniPoly,
    /// Exactly verified Gaussian-rational Fuchs indices.
    pub fuchs_exact: Vec<ExactComplex>,
    /// Numeric roots of the factor left unresolved by exact reconstruction.
    pub fuchs_approx: Vec<Complex64>,
    /// Exact integer Fuchs indices.
    pub integer_indices: Vec<i64>,
}

/// Truncated Laurent solution through a balance.
#[derive(Clone, Debug)]
pub struct LaurentSolution {
    pub balance: LeadingBalance,
    /// `u_0, u_1, ..., u_depth` (shorter if an obstruction stopped it).
    pub coefficients: Vec<ExactComplex>,
    /// Nonnegative resonances met, in order, with their status.
    pub resonances: Vec<(i64, ResonanceStatus)>,
    /// Depth actually reached.
    pub depth: i64,
}

impl LaurentSolution {
    pub fn obstructed(&self) -> bool {
        self.resonances
            .iter()
            .any(|(_, s)| *s == ResonanceStatus::Obstructed)
    }

    /// The truncated series as a Laurent polynomial.
    pub fn series(&self) -> LaurentPoly {
        let mut s = LaurentPoly::zero();
        for (r, c) in self.coefficients.iter().enumerate() {
            s.add_term(self.balance.p + r as i64, c.clone());
        }
        s
    }
}

/// Outcome of the genericity test over the chain coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenericityVerdict {
    /// No nonnegative integer Fuchs index up to `jmax`: every meromorphic
    /// solution is elliptic or a degeneration thereof.
    GenericW { jmax: i64 },
    /// Witness `P_n(-k/a_k; j) = 0` with `0 <= j <= jmax`, verified exactly.
    InS { k: usize, j: i64 },
    /// Some coordinate hyperplane `a_i = 0` contains the vector (1-based).
    OnAxis { i: usize },
}

impl GenericityVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            GenericityVerdict::GenericW { .. } => "GenericW",
            GenericityVerdict::InS { .. } => "InS",
            GenericityVerdict::OnAxis { .. } => "OnAxis",
        }
    }
}

/// Falling factorial `x (x-1) ... (x-k+1)` over the exact scalars.
pub fn falling_exact(x: &ExactComplex, k: usize) -> ExactComplex {
    let mut acc = exact_one();
    for t in 0..k {
        acc = acc * (x.clone() - exact_int(t as i64));
    }
    acc
}

/// Falling factorial `(j + shift)(j + shift - 1) ...` as a polynomial in j.
fn falling_poly(shift: i64, k: usize) -> UniPoly {
    let mut acc = UniPoly::one(Var::J);
    for t in 0..k {
        acc = acc.mul(&UniPoly::new(
            Var::J,
            alloc::vec![exact_int(shift - t as i64), exact_one()],
        ));
    }
    acc
}

/// Sub-polynomial of terms attaining the minimal z-exponent under
/// `u = u0 z^p`. The constant term carries exponent 0.
pub fn dominant_terms(poly: &DiffPolynomial, p: i64) -> DiffPolynomial {
    let Some(min_exp) = poly.min_exponent(p) else {
        return DiffPolynomial::zero();
    };
    DiffPolynomial::from_monomials(
        poly.monomials()
            .filter(|m| DiffPolynomial::term_exponent(&m.index, p) == min_exp),
    )
}

/// Leading-order coefficient equation `E_0(u0; p)` of the dominant terms,
/// as a polynomial in `u0`.
pub fn leading_equation(poly: &DiffPolynomial, p: i64) -> UniPoly {
    let dominant = dominant_terms(poly, p);
    let mut acc = UniPoly::zero(Var::U0);
    let pc = exact_int(p);
    for m in dominant.monomials() {
        let mut coeff = m.coeff.clone();
        for (k, &power) in m.index.iter().enumerate() {
            for _ in 0..power {
                coeff = coeff * falling_exact(&pc, k);
            }
        }
        acc = acc.add(&UniPoly::monomial(Var::U0, coeff, m.degree() as usize));
    }
    acc
}

/// Enumerates the leading balances of `poly` with `p` in `{-1, ..., -n}`,
/// `n` the order of `poly`.
///
/// An empty result signals that no Laurent-type pole ansatz balances: the
/// equation has no meromorphic solutions with a pole of order within the
/// search range. Only exactly verified Gaussian-rational `u0` are returned;
/// irrational balances are outside the exact layer's contract.
pub fn leading_balances(poly: &DiffPolynomial) -> Vec<LeadingBalance> {
    leading_balances_bounded(poly, -(poly.order() as i64))
}

/// Same search with an explicit lower bound for `p` (inclusive, negative).
pub fn leading_balances_bounded(poly: &DiffPolynomial, p_min: i64) -> Vec<LeadingBalance> {
    let mut out = Vec::new();
    if poly.is_zero() {
        return out;
    }
    let mut p = -1;
    while p >= p_min {
        let dominant = dominant_terms(poly, p);
        if dominant.num_terms() >= 2 {
            let e0 = leading_equation(poly, p);
            let (roots, _residual) = exact_rational_roots(&e0);
            let mut seen: Vec<ExactComplex> = Vec::new();
            for u0 in roots {
                if !is_exact_zero(&u0) && !seen.contains(&u0) {
                    seen.push(u0.clone());
                    out.push(LeadingBalance { p, u0 });
                }
            }
        }
        p -= 1;
    }
    out
}

/// Residue polynomial `R_n(u0) = z^{n+1} D_n(u0 / z)`: degree `n + 1` in
/// `u0` with zero set `{0, -1/a_1, ..., -n/a_n}`.
pub fn residue_poly(a: &[ExactComplex]) -> Result<UniPoly, PainleveError> {
    if a.is_empty() || a.iter().any(is_exact_zero) {
        return Err(PainleveError::DegenerateChain);
    }
    // every monomial of D_n sits at exponent -(n+1) under u = u0/z, so the
    // leading equation at p = -1 is exactly R_n
    Ok(leading_equation(&expand_dn(a), -1))
}

/// Indicial polynomial `P(u0; j)` computed from the Gateaux derivative of
/// the dominant terms at `u0 z^p` applied to `z^{j+p}`.
pub fn indicial_direct(
    poly: &DiffPolynomial,
    bal: &LeadingBalance,
) -> Result<UniPoly, PainleveError> {
    if poly.is_zero() {
        return Err(PainleveError::ZeroPolynomial);
    }
    if is_exact_zero(&bal.u0) {
        return Err(PainleveError::NotABalance(String::from("u0 = 0")));
    }
    let e0 = leading_equation(poly, bal.p);
    if !is_exact_zero(&e0.eval_exact(&bal.u0)) {
        return Err(PainleveError::NotABalance(alloc::format!(
            "E0(u0) != 0 at u0 = {}",
            crate::scalar::format_exact(&bal.u0)
        )));
    }

    let dominant = dominant_terms(poly, bal.p);
    let pc = exact_int(bal.p);
    let mut acc = UniPoly::zero(Var::J);
    for m in dominant.monomials() {
        // c_I * u0^{|I| - 1} * prod_m ff(p, m)^{i_m}
        let degree = m.degree();
        let mut base = m.coeff.clone();
        for _ in 0..degree.max(1) - 1 {
            base = base * bal.u0.clone();
        }
        for (k, &power) in m.index.iter().enumerate() {
            for _ in 0..power {
                base = base * falling_exact(&pc, k);
            }
        }
        // sum_k i_k ff(j+p, k) / ff(p, k)
        let mut inner = UniPoly::zero(Var::J);
        for (k, &power) in m.index.iter().enumerate() {
            if power == 0 {
                continue;
            }
            let ratio = falling_poly(bal.p, k)
                .scale(&(exact_int(power as i64) / falling_exact(&pc, k)));
            inner = inner.add(&ratio);
        }
        acc = acc.add(&inner.scale(&base));
    }
    Ok(acc)
}

/// Indicial polynomial `P_n(u0; j)` built iteratively:
/// `P_{m+1} = P_m (j - m - 1 - a_{m+1} u0) - a_{m+1} R_m(u0)`.
///
/// Agrees exactly with [`indicial_direct`] on the expanded chain.
pub fn indicial_recursive(
    a: &[ExactComplex],
    u0: &ExactComplex,
) -> Result<UniPoly, PainleveError> {
    if a.is_empty() || a.iter().any(is_exact_zero) {
        return Err(PainleveError::DegenerateChain);
    }
    // P_1(u0; j) = j - 1 - 2 a_1 u0
    let mut p = UniPoly::new(
        Var::J,
        alloc::vec![
            exact_int(-1) - exact_int(2) * a[0].clone() * u0.clone(),
            exact_one(),
        ],
    );
    for m in 1..a.len() {
        let r_m = residue_poly(&a[..m])?.eval_exact(u0);
        let linear = UniPoly::new(
            Var::J,
            alloc::vec![
                exact_int(-(m as i64) - 1) - a[m].clone() * u0.clone(),
                exact_one(),
            ],
        );
        p = p.mul(&linear).sub(&UniPoly::constant(Var::J, a[m].clone() * r_m));
    }
    Ok(p)
}

/// Assembles the indicial polynomial, Fuchs indices (exact where
/// verifiable) and the exact integer index set for one balance.
pub fn indicial_data(
    poly: &DiffPolynomial,
    bal: &LeadingBalance,
) -> Result<IndicialData, PainleveError> {
    let indicial = indicial_direct(poly, bal)?;
    let (fuchs_exact, residual) = exact_rational_roots(&indicial);
    let fuchs_approx = if residual.degree().map_or(false, |d| d >= 1) {
        poly_roots(&residual).unwrap_or_default()
    } else {
        Vec::new()
    };
    let integer_indices = rational_integer_roots(&indicial);
    Ok(IndicialData {
        balance: bal.clone(),
        indicial,
        fuchs_exact,
        fuchs_approx,
        integer_indices,
    })
}

/// Genericity test over the coefficient vector `a`.
///
/// `OnAxis(i)` when `a_i = 0`; otherwise `InS(k, j)` for the first exact
/// witness `P_n(-k/a_k; j) = 0` with `0 <= j <= jmax`; otherwise the vector
/// is certified generic up to the recorded bound, and every meromorphic
/// solution of the chain ODE lies in class W.
pub fn genericity_test(a: &[ExactComplex], jmax: i64) -> GenericityVerdict {
    for (i, ai) in a.iter().enumerate() {
        if is_exact_zero(ai) {
            return GenericityVerdict::OnAxis { i: i + 1 };
        }
    }
    for k in 1..=a.len() {
        let u0 = -exact_int(k as i64) / a[k - 1].clone();
        if let Ok(p) = indicial_recursive(a, &u0) {
            let hits = rational_integer_roots(&p);
            if let Some(&j) = hits.iter().find(|&&j| j >= 0 && j <= jmax) {
                return GenericityVerdict::InS { k, j };
            }
        }
    }
    GenericityVerdict::GenericW { jmax }
}

/// Runs the Laurent recursion through `bal` to the requested depth.
///
/// At a non-resonant step `u_j = -Q_j / P(u0; j)`. At a resonance with
/// `Q_j = 0` the free coefficient is set to 0 by convention and recorded;
/// with `Q_j != 0` the obstruction is recorded and the recursion stops.
pub fn laurent_expand(
    poly: &DiffPolynomial,
    bal: &LeadingBalance,
    depth: i64,
) -> Result<LaurentSolution, PainleveError> {
    laurent_expand_with(poly, bal, depth, &BTreeMap::new())
}

/// Same recursion with caller-chosen values for the free resonant
/// coefficients (keyed by the index `j`); unkeyed resonances stay 0.
pub fn laurent_expand_with(
    poly: &DiffPolynomial,
    bal: &LeadingBalance,
    depth: i64,
    resonant_values: &BTreeMap<i64, ExactComplex>,
) -> Result<LaurentSolution, PainleveError> {
    if depth < 0 {
        return Err(PainleveError::NegativeDepth);
    }
    let indicial = indicial_direct(poly, bal)?;
    let q = poly
        .min_exponent(bal.p)
        .ok_or(PainleveError::ZeroPolynomial)?;

    let mut series = LaurentPoly::zero();
    series.add_term(bal.p, bal.u0.clone());
    let mut coefficients = alloc::vec![bal.u0.clone()];
    let mut resonances = Vec::new();
    let mut reached = 0;

    for j in 1..=depth {
        let expanded = poly.eval_laurent(&series);
        let q_j = expanded.coeff(q + j);
        let p_j = indicial.eval_int(j);
        if is_exact_zero(&p_j) {
            if is_exact_zero(&q_j) {
                resonances.push((j, ResonanceStatus::Free));
                let injected = resonant_values.get(&j).cloned().unwrap_or_else(exact_zero);
                if !is_exact_zero(&injected) {
                    series.add_term(bal.p + j, injected.clone());
                }
                coefficients.push(injected);
                reached = j;
            } else {
                resonances.push((j, ResonanceStatus::Obstructed));
                break;
            }
        } else {
            let u_j = -(q_j / p_j);
            series.add_term(bal.p + j, u_j.clone());
            coefficients.push(u_j);
            reached = j;
        }
    }

    Ok(LaurentSolution {
        balance: bal.clone(),
        coefficients,
        resonances,
        depth: reached,
    })
}

/// Full analysis of an expanded polynomial: per-balance indicial data in
/// deterministic order.
pub fn analyze(poly: &DiffPolynomial) -> Vec<IndicialData> {
    leading_balances(poly)
        .iter()
        .filter_map(|bal| indicial_data(poly, bal).ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{expand_chain, Factor, FactorChain};
    use crate::scalar::{exact_ratio, format_exact};

    fn exact_vec(values: &[i64]) -> Vec<ExactComplex> {
        values.iter().map(|&v| exact_int(v)).collect()
    }

    #[test]
    fn residue_polynomials_match_hand_computation() {
        // a = (1): R_1 = -u0 (u0 + 1)
        let r1 = residue_poly(&exact_vec(&[1])).unwrap();
        assert_eq!(r1.coeff(0), exact_zero());
        assert_eq!(r1.coeff(1), exact_int(-1));
        assert_eq!(r1.coeff(2), exact_int(-1));
        // a = (1,1): R_2 = u0 (u0+1) (u0+2)
        let r2 = residue_poly(&exact_vec(&[1, 1])).unwrap();
        assert!(is_exact_zero(&r2.eval_int(0)));
        assert!(is_exact_zero(&r2.eval_int(-1)));
        assert!(is_exact_zero(&r2.eval_int(-2)));
        assert_eq!(r2.degree(), Some(3));
    }

    #[test]
    fn residue_root_set_with_repeats() {
        // a = (2,4): roots {0, -1/2, -1/2}
        let r = residue_poly(&[exact_int(2), exact_int(4)]).unwrap();
        let half = exact_ratio(-1, 2);
        assert!(is_exact_zero(&r.eval_exact(&half)));
        let deflated = r.deflate(&half).unwrap();
        assert!(is_exact_zero(&deflated.eval_exact(&half)));
        assert!(is_exact_zero(&r.eval_int(0)));
    }

    #[test]
    fn degenerate_chain_rejected() {
        assert_eq!(
            residue_poly(&[exact_int(0), exact_int(1)]),
            Err(PainleveError::DegenerateChain)
        );
    }

    #[test]
    fn indicial_paper_values() {
        // P_1(-1; j) = j + 1 and P_2(-1; j) = j^2 - 1 at a = (1,1)
        let p1 = indicial_recursive(&exact_vec(&[1]), &exact_int(-1)).unwrap();
        assert_eq!(p1.coeff(0), exact_int(1));
        assert_eq!(p1.coeff(1), exact_int(1));
        let p2 = indicial_recursive(&exact_vec(&[1, 1]), &exact_int(-1)).unwrap();
        assert_eq!(p2.coeff(0), exact_int(-1));
        assert_eq!(p2.coeff(1), exact_zero());
        assert_eq!(p2.coeff(2), exact_int(1));
    }

    #[test]
    fn direct_equals_recursive() {
        let a = alloc::vec![exact_int(2), exact_ratio(-3, 5), exact_int(1)];
        let d3 = expand_dn(&a);
        for k in 1..=3i64 {
            let u0 = -exact_int(k) / a[(k - 1) as usize].clone();
            let bal = LeadingBalance { p: -1, u0: u0.clone() };
            let direct = indicial_direct(&d3, &bal).unwrap();
            let recursive = indicial_recursive(&a, &u0).unwrap();
            assert_eq!(direct, recursive, "k = {k}");
        }
    }

    #[test]
    fn derivative_identity() {
        // indicial of dD_n/dz at (u0, -1) = P_n(u0; j) (j - n - 1)
        let a = alloc::vec![exact_int(1), exact_int(3)];
        let d2 = expand_dn(&a);
        let u0 = exact_ratio(-2, 3);
        let bal = LeadingBalance { p: -1, u0: u0.clone() };
        let p2 = indicial_direct(&d2, &bal).unwrap();
        let derived = d2.z_derivative();
        let p2_prime = indicial_direct(&derived, &bal).unwrap();
        let expected = p2.mul(&UniPoly::new(
            Var::J,
            alloc::vec![exact_int(-3), exact_one()],
        ));
        assert_eq!(p2_prime, expected);
    }

    #[test]
    fn balances_of_d2() {
        let balances = leading_balances(&expand_dn(&exact_vec(&[1, 1])));
        assert_eq!(balances.len(), 2);
        assert!(balances.iter().all(|b| b.p == -1));
        assert!(balances.iter().any(|b| b.u0 == exact_int(-1)));
        assert!(balances.iter().any(|b| b.u0 == exact_int(-2)));
    }

    #[test]
    fn balances_of_riccati() {
        // u' - u^2: single balance (p, u0) = (-1, -1)
        let poly = expand_dn(&exact_vec(&[1]));
        let balances = leading_balances(&poly);
        assert_eq!(balances.len(), 1);
        assert_eq!(balances[0], LeadingBalance { p: -1, u0: exact_int(-1) });
    }

    #[test]
    fn eq10_fuchs_indices() {
        // u0 = -1/a1 gives {-1, 2 - a2/a1}; u0 = -2/a2 gives {-1, 2 - 4a1/a2}
        let (a1, a2) = (exact_int(3), exact_int(5));
        let chain = FactorChain::new(
            exact_int(2),
            alloc::vec![
                Factor { a: a1.clone(), b: exact_int(-1) },
                Factor { a: a2.clone(), b: exact_int(7) },
            ],
        );
        let poly = expand_chain(&chain).unwrap();
        let balances = leading_balances(&poly);
        assert_eq!(balances.len(), 2, "balances: {balances:?}");
        for bal in &balances {
            let data = indicial_data(&poly, bal).unwrap();
            let expected_second = if bal.u0 == -exact_one() / a1.clone() {
                exact_int(2) - a2.clone() / a1.clone()
            } else {
                exact_int(2) - exact_int(4) * a1.clone() / a2.clone()
            };
            assert!(
                data.fuchs_exact.contains(&exact_int(-1)),
                "missing -1 for u0 = {}",
                format_exact(&bal.u0)
            );
            assert!(
                data.fuchs_exact.contains(&expected_second),
                "missing {} for u0 = {}",
                format_exact(&expected_second),
                format_exact(&bal.u0)
            );
        }
    }

    #[test]
    fn dominant_terms_of_chain_are_dn() {
        let chain = FactorChain::new(
            exact_one(),
            alloc::vec![
                Factor { a: exact_one(), b: exact_one() },
                Factor { a: exact_one(), b: exact_one() },
            ],
        );
        let poly = expand_chain(&chain).unwrap();
        let dominant = dominant_terms(&poly, -1);
        assert_eq!(dominant, expand_dn(&exact_vec(&[1, 1])));
    }

    #[test]
    fn dominant_terms_keeps_equal_exponents() {
        // u'' + u^2 at p = -2: both terms sit at exponent -4
        let poly = DiffPolynomial::derivative_var(2, exact_one())
            .add(&DiffPolynomial::var_u().mul(&DiffPolynomial::var_u()));
        let dom = dominant_terms(&poly, -2);
        assert_eq!(dom, poly);
        // single-term polynomial is its own dominant part
        let single = DiffPolynomial::derivative_var(1, exact_one());
        assert_eq!(dominant_terms(&single, -1), single);
    }

    #[test]
    fn genericity_examples() {
        assert_eq!(
            genericity_test(&exact_vec(&[1, 1]), 10),
            GenericityVerdict::InS { k: 1, j: 1 }
        );
        assert_eq!(
            genericity_test(&exact_vec(&[1, 3]), 50),
            GenericityVerdict::GenericW { jmax: 50 }
        );
        assert_eq!(
            genericity_test(&exact_vec(&[0, 1]), 10),
            GenericityVerdict::OnAxis { i: 1 }
        );
    }

    #[test]
    fn laurent_riccati_exact() {
        // u' - u^2 about the pole of -1/z: all corrections vanish
        let poly = expand_dn(&exact_vec(&[1]));
        let bal = LeadingBalance { p: -1, u0: exact_int(-1) };
        let sol = laurent_expand(&poly, &bal, 6).unwrap();
        assert!(!sol.obstructed());
        assert_eq!(sol.coefficients[0], exact_int(-1));
        for c in &sol.coefficients[1..] {
            assert!(is_exact_zero(c));
        }
        assert!(poly.eval_laurent(&sol.series()).is_zero());
    }

    #[test]
    fn laurent_riccati_with_shift() {
        // alpha a1 + b1 = 0: solution alpha - (1/a1)/(z - c). About its pole
        // the expansion has u0 = -1/a1, u_1 = alpha, higher corrections 0.
        let a1 = exact_int(2);
        let alpha = exact_int(3);
        let b1 = -(alpha.clone() * a1.clone());
        let chain = FactorChain::new(
            alpha.clone(),
            alloc::vec![Factor { a: a1.clone(), b: b1 }],
        );
        let poly = expand_chain(&chain).unwrap();
        let bal = LeadingBalance { p: -1, u0: -exact_one() / a1 };
        let sol = laurent_expand(&poly, &bal, 5).unwrap();
        assert!(!sol.obstructed());
        assert_eq!(sol.coefficients[1], alpha);
        for c in &sol.coefficients[2..] {
            assert!(is_exact_zero(c));
        }
    }

    #[test]
    fn second_order_particular_series_coefficients() {
        // with alpha a1 + b1 = 0, the second-order chain is solved by
        // alpha - 1/(a1 z - c); the recursion through u0 = -1/a1 must
        // reproduce u_1 = alpha and kill every higher correction
        let (alpha, a1) = (exact_int(3), exact_int(2));
        let b1 = -(alpha.clone() * a1.clone());
        let chain = FactorChain::new(
            alpha.clone(),
            alloc::vec![
                Factor { a: a1.clone(), b: b1 },
                Factor { a: exact_int(5), b: exact_int(7) },
            ],
        );
        let poly = expand_chain(&chain).unwrap();
        let bal = LeadingBalance { p: -1, u0: -exact_one() / a1 };
        let sol = laurent_expand(&poly, &bal, 6).unwrap();
        assert!(!sol.obstructed());
        assert_eq!(sol.coefficients[1], alpha);
        for c in &sol.coefficients[2..] {
            assert!(is_exact_zero(c), "higher corrections must vanish: {sol:?}");
        }
    }

    #[test]
    fn a4_obstruction_detected_exactly() {
        // a2 = 4 a1: the u0 = -2/a2 balance has Fuchs index 1 and the
        // compatibility condition 2 alpha a1 - 2 b1 + b2 = 0.
        let (alpha, a1, b1) = (exact_int(1), exact_int(1), exact_int(2));
        let a2 = exact_int(4);
        let compatible_b2 = exact_int(2) * b1.clone() - exact_int(2) * alpha.clone() * a1.clone();
        let incompatible_b2 = compatible_b2.clone() + exact_one();
        for (b2, expect_obstructed) in [(compatible_b2, false), (incompatible_b2, true)] {
            let chain = FactorChain::new(
                alpha.clone(),
                alloc::vec![
                    Factor { a: a1.clone(), b: b1.clone() },
                    Factor { a: a2.clone(), b: b2 },
                ],
            );
            let poly = expand_chain(&chain).unwrap();
            let bal = LeadingBalance {
                p: -1,
                u0: -exact_int(2) / a2.clone(),
            };
            let sol = laurent_expand(&poly, &bal, 4).unwrap();
            assert_eq!(sol.obstructed(), expect_obstructed, "b2 case");
            if expect_obstructed {
                assert_eq!(sol.resonances, alloc::vec![(1, ResonanceStatus::Obstructed)]);
            } else {
                assert!(sol
                    .resonances
                    .iter()
                    .any(|&(j, s)| j == 1 && s == ResonanceStatus::Free));
            }
        }
    }

    #[test]
    fn injected_resonant_coefficient_still_vanishes() {
        // A4 compatible case: j = 1 is a free resonance; any injected value
        // must keep the series exactly consistent
        let (alpha, a1, b1) = (exact_int(1), exact_int(1), exact_int(2));
        let a2 = exact_int(4);
        let b2 = exact_int(2) * b1.clone() - exact_int(2) * alpha.clone() * a1.clone();
        let chain = FactorChain::new(
            alpha,
            alloc::vec![
                Factor { a: a1, b: b1 },
                Factor { a: a2.clone(), b: b2 },
            ],
        );
        let poly = expand_chain(&chain).unwrap();
        let bal = LeadingBalance { p: -1, u0: -exact_int(2) / a2 };
        let mut inject = BTreeMap::new();
        inject.insert(1i64, exact_ratio(5, 3));
        let sol = laurent_expand_with(&poly, &bal, 6, &inject).unwrap();
        assert_eq!(sol.coefficients[1], exact_ratio(5, 3));
        let q = poly.min_exponent(bal.p).unwrap();
        let expanded = poly.eval_laurent(&sol.series());
        if let Some(lowest) = expanded.min_exponent() {
            assert!(lowest > q + sol.depth, "series inconsistent: {lowest} vs {}", q + sol.depth);
        }
    }

    #[test]
    fn not_a_balance_is_rejected() {
        let poly = expand_dn(&exact_vec(&[1]));
        let bal = LeadingBalance { p: -1, u0: exact_int(7) };
        assert!(matches!(
            indicial_direct(&poly, &bal),
            Err(PainleveError::NotABalance(_))
        ));
    }
}
