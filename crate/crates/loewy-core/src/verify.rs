//! Numerical residual verification of solution expressions against
//! expanded chains, and exact series-vanishing checks for Laurent
//! solutions.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::diffpoly::DiffPolynomial;
use crate::expr::{pow, zvar, EvalError, Expr};
use crate::operator::{expand_chain, FactorChain};
use crate::painleve::LaurentSolution;
use crate::rng::SplitMix64;
use crate::scalar::{c64_to_exact, exact_zero, Complex64};

/// Inner and outer radius of the sampling annulus.
pub const ANNULUS: (f64, f64) = (0.3, 3.0);

#[derive(Clone, Debug, PartialEq)]
pub enum VerifyError {
    /// Fewer than half the requested sample points were usable.
    Inconclusive { usable: usize, requested: usize },
    /// The Laurent solution carries an obstructed resonance.
    Obstructed,
    Chain(String),
    Eval(String),
}

impl core::fmt::Display for VerifyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            VerifyError::Inconclusive { usable, requested } => write!(
                f,
                "inconclusive: only {usable} of {requested} sample points usable"
            ),
            VerifyError::Obstructed => write!(f, "laurent solution is obstructed"),
            VerifyError::Chain(msg) => write!(f, "chain error: {msg}"),
            VerifyError::Eval(msg) => write!(f, "evaluation error: {msg}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of a sampled residual check.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub sample_points: Vec<Complex64>,
    pub max_relative_residual: f64,
    pub pole_skips: usize,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Evaluates the expanded chain polynomial on the jet of `e` at seeded
/// pseudo-random points in an annulus around `center`, skipping points
/// where evaluation runs into a pole.
///
/// The residual at each point is normalized by `max(1, largest |term|)` of
/// the expanded polynomial there, so large cubic terms do not mask a
/// genuine mismatch.
pub fn residual(
    chain: &FactorChain,
    e: &Expr,
    samples: usize,
    seed: u64,
    tol: f64,
    center: Complex64,
) -> Result<ResidualReport, VerifyError> {
    let poly = expand_chain(chain).map_err(|err| VerifyError::Chain(alloc::format!("{err}")))?;
    residual_against(&poly, e, samples, seed, tol, center)
}

/// Same check against an already-expanded differential polynomial.
pub fn residual_against(
    poly: &DiffPolynomial,
    e: &Expr,
    samples: usize,
    seed: u64,
    tol: f64,
    center: Complex64,
) -> Result<ResidualReport, VerifyError> {
    let order = poly.order();
    let mut jet_exprs: Vec<Expr> = Vec::with_capacity(order + 1);
    jet_exprs.push(e.clone());
    for k in 0..order {
        let d = jet_exprs[k].differentiate();
        jet_exprs.push(d);
    }

    let mut rng = SplitMix64::new(seed);
    let mut points = Vec::with_capacity(samples);
    let mut max_rel: f64 = 0.0;
    let mut pole_skips = 0usize;
    let mut attempts = 0usize;
    let budget = samples * 4;

    while points.len() < samples && attempts < budget {
        attempts += 1;
        let z = rng.annulus(center, ANNULUS.0, ANNULUS.1);
        let mut jet = Vec::with_capacity(order + 1);
        let mut bad = false;
        for je in &jet_exprs {
            match je.eval(z) {
                Ok(v) => jet.push(v),
                // poles and overflow boundaries: resample elsewhere
                Err(EvalError::PoleNear(_))
                | Err(EvalError::NonFinite)
                | Err(EvalError::SpecFun(_)) => {
                    bad = true;
                    break;
                }
                Err(other) => return Err(VerifyError::Eval(alloc::format!("{other}"))),
            }
        }
        if bad {
            pole_skips += 1;
            continue;
        }
        let value = poly.eval_c64(&jet);
        let scale = Float::max(1.0, poly.eval_term_scale(&jet));
        let rel = value.norm() / scale;
        if rel > max_rel {
            max_rel = rel;
        }
        points.push(z);
    }

    if points.len() < samples.div_ceil(2) {
        return Err(VerifyError::Inconclusive {
            usable: points.len(),
            requested: samples,
        });
    }
    let verdict = if max_rel <= tol { Verdict::Pass } else { Verdict::Fail };
    Ok(ResidualReport {
        sample_points: points,
        max_relative_residual: max_rel,
        pole_skips,
        tolerance: tol,
        verdict,
    })
}

/// Additive probe `e + 0.1 z^degree` used to show the residual check
/// discriminates: a perturbed solution must fail.
pub fn perturbed(e: &Expr, degree: i32) -> Expr {
    let bump = c64_to_exact(Complex64::new(0.1, 0.0)).unwrap_or_else(exact_zero);
    crate::expr::add(e.clone(), crate::expr::mul(crate::expr::con(bump), pow(zvar(), degree)))
}

/// Largest probe residual over degrees 0..=2; evidence of sensitivity.
pub fn probe_sensitivity(
    poly: &DiffPolynomial,
    e: &Expr,
    samples: usize,
    seed: u64,
    center: Complex64,
) -> Result<f64, VerifyError> {
    let mut worst: f64 = 0.0;
    for degree in 0..=2 {
        let probe = perturbed(e, degree);
        let report = residual_against(poly, &probe, samples, seed, 1e-8, center)?;
        if report.max_relative_residual > worst {
            worst = report.max_relative_residual;
        }
    }
    Ok(worst)
}

/// Result of substituting a truncated Laurent solution exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesVanishing {
    /// Lowest exponent carrying a nonzero coefficient. `None` when the
    /// substitution vanishes identically.
    pub lowest_nonvanishing: Option<i64>,
    /// The series must vanish through this exponent (`q + depth`).
    pub required_through: i64,
    pub pass: bool,
}

/// Substitutes the truncated Laurent series into `poly` with exact
/// arithmetic. Every coefficient through `q + depth` must cancel.
pub fn residual_series(
    poly: &DiffPolynomial,
    s: &LaurentSolution,
) -> Result<SeriesVanishing, VerifyError> {
    if s.obstructed() {
        return Err(VerifyError::Obstructed);
    }
    let q = poly
        .min_exponent(s.balance.p)
        .ok_or_else(|| VerifyError::Chain(String::from("zero polynomial")))?;
    let substituted = poly.eval_laurent(&s.series());
    let lowest = substituted.min_exponent();
    let required = q + s.depth;
    let pass = lowest.map_or(true, |l| l > required);
    Ok(SeriesVanishing {
        lowest_nonvanishing: lowest,
        required_through: required,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify2::{classify, instantiate, random_admissible};
    use crate::operator::Factor;
    use crate::painleve::{laurent_expand, LeadingBalance};
    use crate::scalar::{exact_int, exact_one, exact_ratio};

    fn chain(al: i64, a1: i64, b1: i64, a2: i64, b2: i64) -> FactorChain {
        FactorChain::new(
            exact_int(al),
            alloc::vec![
                Factor { a: exact_int(a1), b: exact_int(b1) },
                Factor { a: exact_int(a2), b: exact_int(b2) },
            ],
        )
    }

    #[test]
    fn constant_alpha_solution_has_zero_residual() {
        // u = alpha annihilates the (u - alpha) factor identically
        let c = chain(3, 1, 2, 5, -1);
        let e = crate::expr::con(exact_int(3));
        let report = residual(&c, &e, 20, 0, 1e-12, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert_eq!(report.max_relative_residual, 0.0);
    }

    #[test]
    fn table_family_passes_and_probe_fails() {
        // Table row 4 instance (0,1,0,3,0)
        let c = chain(0, 1, 0, 3, 0);
        let report = classify(
            &exact_int(0),
            &exact_one(),
            &exact_int(0),
            &exact_int(3),
            &exact_int(0),
        );
        let fam = report
            .families
            .iter()
            .find(|f| f.case_tag == "I.B2.row4")
            .unwrap();
        let mut rng = SplitMix64::new(5);
        let asg = random_admissible(fam, &mut rng);
        let inst = instantiate(fam, &asg).unwrap();
        let res = residual(&c, &inst.expr, 20, 1, 1e-8, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(res.verdict, Verdict::Pass, "residual {res:?}");

        let poly = expand_chain(&c).unwrap();
        let worst = probe_sensitivity(&poly, &inst.expr, 20, 1, Complex64::new(0.0, 0.0)).unwrap();
        assert!(worst >= 1e-3, "probe too weak: {worst:e}");
    }

    #[test]
    fn riccati_series_identically_zero() {
        let poly = crate::operator::expand_dn(&[exact_one()]);
        let bal = LeadingBalance { p: -1, u0: exact_int(-1) };
        let sol = laurent_expand(&poly, &bal, 6).unwrap();
        let vanish = residual_series(&poly, &sol).unwrap();
        assert_eq!(vanish.lowest_nonvanishing, None);
        assert!(vanish.pass);
    }

    #[test]
    fn generic_chain_series_vanishes_through_depth() {
        let c = chain(1, 2, -1, 5, 3);
        let poly = expand_chain(&c).unwrap();
        let bal = LeadingBalance { p: -1, u0: -exact_one() / exact_int(2) };
        let sol = laurent_expand(&poly, &bal, 6).unwrap();
        assert!(!sol.obstructed());
        let vanish = residual_series(&poly, &sol).unwrap();
        assert!(vanish.pass, "{vanish:?}");
        if let Some(lowest) = vanish.lowest_nonvanishing {
            assert!(lowest > vanish.required_through);
        }
    }

    #[test]
    fn obstructed_input_is_error() {
        // A4 without compatibility: obstruction at j = 1
        let c = chain(1, 1, 2, 4, 3);
        let poly = expand_chain(&c).unwrap();
        let bal = LeadingBalance { p: -1, u0: exact_ratio(-1, 2) };
        let sol = laurent_expand(&poly, &bal, 4).unwrap();
        assert!(sol.obstructed());
        assert_eq!(residual_series(&poly, &sol), Err(VerifyError::Obstructed));
    }

    #[test]
    fn fisher_families_satisfy_their_equation() {
        // w'' + c w' - (6/lambda)(w - e1)(w - e2) built directly; the
        // travelling-wave families returned for it must have zero residual
        use crate::classify2::fisher_meromorphic;
        use crate::diffpoly::DiffPolynomial;
        let cases = [
            (exact_int(0), exact_int(1), exact_int(0), exact_int(1)), // w1
            (exact_int(5), exact_int(1), exact_int(1), exact_int(0)), // w2
        ];
        let mut rng = SplitMix64::new(21);
        for (c, lambda, e1, e2) in cases {
            let six_over_lambda = exact_int(6) / lambda.clone();
            let quadratic = DiffPolynomial::var_u()
                .sub(&DiffPolynomial::constant(e1.clone()))
                .mul(&DiffPolynomial::var_u().sub(&DiffPolynomial::constant(e2.clone())));
            let poly = DiffPolynomial::derivative_var(2, exact_one())
                .add(&DiffPolynomial::derivative_var(1, c.clone()))
                .sub(&quadratic.scale(&six_over_lambda));
            let families = fisher_meromorphic(&c, &lambda, &e1, &e2).unwrap();
            assert!(!families.is_empty());
            for fam in &families {
                for seed in 0..3 {
                    let asg = crate::classify2::random_admissible(fam, &mut rng);
                    let inst = crate::classify2::instantiate(fam, &asg).unwrap();
                    let rep = residual_against(
                        &poly,
                        &inst.expr,
                        20,
                        seed,
                        1e-8,
                        Complex64::new(0.0, 0.0),
                    )
                    .unwrap();
                    assert_eq!(
                        rep.verdict,
                        Verdict::Pass,
                        "{}: residual {:e}",
                        fam.case_tag,
                        rep.max_relative_residual
                    );
                }
            }
        }
    }

    #[test]
    fn inconclusive_when_poles_dominate() {
        // an expression that faults everywhere: 1/(z - z) is always a pole
        let c = chain(0, 1, 0, 3, 0);
        let e = crate::expr::div(crate::expr::coni(1), crate::expr::sub(zvar(), zvar()));
        let err = residual(&c, &e, 16, 0, 1e-8, Complex64::new(0.0, 0.0));
        assert!(matches!(err, Err(VerifyError::Inconclusive { .. })));
    }
}
