//! Wire formats: rational-string complex scalars, chain and ODE payloads,
//! and the JSON shapes of every command's output.
//!
//! Rational numerals travel as strings `"p/q"` (`q > 0`, reduced); complex
//! scalars as `{"re": "p/q", "im": "p/q"}`. Scalar shorthand is accepted on
//! input: a bare string or integer is a real value. Exact commands reject
//! non-integer floating numerals; verify/growth assignments accept them and
//! embed the binary64 value exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use loewy_core::classify2::{ParamSpec, SolutionFamily};
use loewy_core::operator::{Factor, FactorChain};
use loewy_core::painleve::{GenericityVerdict, IndicialData, LaurentSolution, ResonanceStatus};
use loewy_core::scalar::{
    exact_zero, f64_to_rat, parse_rational, rational_string, Complex64,
    ExactComplex, Rational,
};
use loewy_core::unipoly::UniPoly;

/// How numerals are admitted for a command.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum NumeralPolicy {
    /// Rational strings and integers only.
    ExactOnly,
    /// Also accept floating values (embedded exactly as binary64).
    AllowFloat,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum NumIn {
    Text(String),
    Number(serde_json::Number),
}

impl NumIn {
    fn to_rational(&self, policy: NumeralPolicy) -> Result<Rational, String> {
        match self {
            NumIn::Text(s) => {
                parse_rational(s).ok_or_else(|| format!("invalid rational numeral '{s}'"))
            }
            NumIn::Number(n) => {
                if let Some(i) = n.as_i64() {
                    return Ok(Rational::from_integer(i.into()));
                }
                let v = n
                    .as_f64()
                    .ok_or_else(|| format!("unrepresentable number {n}"))?;
                match policy {
                    NumeralPolicy::ExactOnly => Err(format!(
                        "non-rational numeral {v}: exact commands require \"p/q\" strings or integers"
                    )),
                    NumeralPolicy::AllowFloat => {
                        f64_to_rat(v).ok_or_else(|| format!("non-finite number {v}"))
                    }
                }
            }
        }
    }
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
pub enum ComplexIn {
    Scalar(NumIn),
    Full {
        re: NumIn,
        #[serde(default)]
        im: Option<NumIn>,
    },
}

impl ComplexIn {
    pub fn to_exact(&self, policy: NumeralPolicy) -> Result<ExactComplex, String> {
        match self {
            ComplexIn::Scalar(n) => Ok(ExactComplex::new(
                n.to_rational(policy)?,
                Rational::from_integer(0.into()),
            )),
            ComplexIn::Full { re, im } => Ok(ExactComplex::new(
                re.to_rational(policy)?,
                match im {
                    Some(v) => v.to_rational(policy)?,
                    None => Rational::from_integer(0.into()),
                },
            )),
        }
    }
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct ComplexOut {
    pub re: String,
    pub im: String,
}

impl ComplexOut {
    pub fn from_exact(x: &ExactComplex) -> Self {
        Self {
            re: rational_string(&x.re),
            im: rational_string(&x.im),
        }
    }
}

pub fn c64_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

// ---- chain payloads ----

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct FactorIn {
    pub a: ComplexIn,
    pub b: ComplexIn,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct ChainIn {
    pub alpha: ComplexIn,
    pub factors: Vec<FactorIn>,
}

impl ChainIn {
    pub fn to_chain(&self, policy: NumeralPolicy) -> Result<FactorChain, String> {
        if self.factors.is_empty() {
            return Err(String::from("chain must contain at least one factor"));
        }
        let alpha = self.alpha.to_exact(policy)?;
        let factors = self
            .factors
            .iter()
            .map(|f| {
                Ok(Factor {
                    a: f.a.to_exact(policy)?,
                    b: f.b.to_exact(policy)?,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(FactorChain::new(alpha, factors))
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct FactorOut {
    pub a: ComplexOut,
    pub b: ComplexOut,
}

#[derive(Serialize, Debug, Clone)]
pub struct ChainOut {
    pub alpha: ComplexOut,
    pub factors: Vec<FactorOut>,
}

impl ChainOut {
    pub fn from_chain(chain: &FactorChain) -> Self {
        Self {
            alpha: ComplexOut::from_exact(&chain.alpha),
            factors: chain
                .factors
                .iter()
                .map(|f| FactorOut {
                    a: ComplexOut::from_exact(&f.a),
                    b: ComplexOut::from_exact(&f.b),
                })
                .collect(),
        }
    }
}

// ---- linear ODE payload ----

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct LinearOdeIn {
    /// Coefficients of `u, u', ..., u^(n-1)`; the leading `u^(n)` is monic.
    pub coefficients: Vec<ComplexIn>,
    /// Constant forcing term, default 0.
    #[serde(default)]
    pub constant: Option<ComplexIn>,
}

impl LinearOdeIn {
    pub fn to_ode(&self, policy: NumeralPolicy) -> Result<loewy_core::linfact::LinearOde, String> {
        if self.coefficients.is_empty() {
            return Err(String::from("linear ODE needs at least one coefficient"));
        }
        let coeffs = self
            .coefficients
            .iter()
            .map(|c| c.to_exact(policy))
            .collect::<Result<Vec<_>, _>>()?;
        let constant = match &self.constant {
            Some(c) => c.to_exact(policy)?,
            None => exact_zero(),
        };
        Ok(loewy_core::linfact::LinearOde::new(coeffs, constant))
    }
}

// ---- expand ----

#[derive(Serialize, Debug)]
pub struct TermOut {
    pub index: Vec<u32>,
    pub coeff: ComplexOut,
    pub weight: i64,
}

#[derive(Serialize, Debug)]
pub struct ExpandOut {
    pub order: usize,
    pub chain: String,
    pub terms: Vec<TermOut>,
    pub rendered: String,
}

// ---- painleve ----

#[derive(Serialize, Debug)]
pub struct ResonanceOut {
    pub j: i64,
    pub status: &'static str,
}

#[derive(Serialize, Debug)]
pub struct BalanceOut {
    pub p: i64,
    pub u0: ComplexOut,
    /// Indicial polynomial coefficients in `j`, lowest degree first.
    pub indicial: Vec<ComplexOut>,
    pub fuchs_exact: Vec<ComplexOut>,
    pub fuchs_approx: Vec<[f64; 2]>,
    pub integer_indices: Vec<i64>,
    pub resonances: Vec<ResonanceOut>,
    /// Laurent coefficients `u_0 ... u_depth` (shorter when obstructed).
    pub laurent: Vec<ComplexOut>,
    pub obstructed: bool,
}

#[derive(Serialize, Debug)]
pub struct GenericityOut {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_j: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<usize>,
    pub jmax: i64,
}

#[derive(Serialize, Debug)]
pub struct PainleveOut {
    pub order: usize,
    pub balances: Vec<BalanceOut>,
    pub genericity: GenericityOut,
    pub depth: i64,
}

pub fn poly_coeffs_out(p: &UniPoly) -> Vec<ComplexOut> {
    p.coeffs().iter().map(ComplexOut::from_exact).collect()
}

pub fn balance_out(data: &IndicialData, laurent: &LaurentSolution) -> BalanceOut {
    BalanceOut {
        p: data.balance.p,
        u0: ComplexOut::from_exact(&data.balance.u0),
        indicial: poly_coeffs_out(&data.indicial),
        fuchs_exact: data.fuchs_exact.iter().map(ComplexOut::from_exact).collect(),
        fuchs_approx: data.fuchs_approx.iter().map(|z| c64_pair(*z)).collect(),
        integer_indices: data.integer_indices.clone(),
        resonances: laurent
            .resonances
            .iter()
            .map(|(j, s)| ResonanceOut {
                j: *j,
                status: match s {
                    ResonanceStatus::Free => "Free",
                    ResonanceStatus::Obstructed => "Obstructed",
                },
            })
            .collect(),
        laurent: laurent.coefficients.iter().map(ComplexOut::from_exact).collect(),
        obstructed: laurent.obstructed(),
    }
}

pub fn genericity_out(v: &GenericityVerdict) -> GenericityOut {
    match v {
        GenericityVerdict::GenericW { jmax } => GenericityOut {
            verdict: "GenericW",
            witness_k: None,
            witness_j: None,
            axis: None,
            jmax: *jmax,
        },
        GenericityVerdict::InS { k, j } => GenericityOut {
            verdict: "InS",
            witness_k: Some(*k),
            witness_j: Some(*j),
            axis: None,
            jmax: 0,
        },
        GenericityVerdict::OnAxis { i } => GenericityOut {
            verdict: "OnAxis",
            witness_k: None,
            witness_j: None,
            axis: Some(*i),
            jmax: 0,
        },
    }
}

// ---- classify ----

#[derive(Serialize, Debug)]
pub struct ParamOut {
    pub name: String,
    pub nonzero: bool,
}

#[derive(Serialize, Debug)]
pub struct FamilyOut {
    pub tag: String,
    pub expression: String,
    pub free_params: Vec<ParamOut>,
    pub derived_params: Vec<String>,
    pub constraints: Vec<String>,
    pub provenance: String,
}

#[derive(Serialize, Debug)]
pub struct ClassifyOut {
    pub chain: ChainOut,
    pub case_path: String,
    pub completeness: &'static str,
    pub families: Vec<FamilyOut>,
}

pub fn family_out(f: &SolutionFamily) -> FamilyOut {
    FamilyOut {
        tag: f.case_tag.clone(),
        expression: f.expr.render(),
        free_params: f
            .free
            .iter()
            .map(|ParamSpec { name, nonzero }| ParamOut {
                name: name.clone(),
                nonzero: *nonzero,
            })
            .collect(),
        derived_params: f.derived.iter().map(|(n, _)| n.clone()).collect(),
        constraints: f.constraints.iter().map(|c| c.label.clone()).collect(),
        provenance: f.provenance.clone(),
    }
}

// ---- verify ----

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
pub struct FamilyRequestIn {
    pub chain: ChainIn,
    pub family: String,
    #[serde(default)]
    pub assignment: BTreeMap<String, ComplexIn>,
}

impl FamilyRequestIn {
    pub fn assignment_exact(
        &self,
    ) -> Result<BTreeMap<String, ExactComplex>, String> {
        self.assignment
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.to_exact(NumeralPolicy::AllowFloat)?)))
            .collect()
    }
}

#[derive(Serialize, Debug)]
pub struct VerifyOut {
    pub family: String,
    pub verdict: &'static str,
    pub max_relative_residual: f64,
    pub tolerance: f64,
    pub pole_skips: usize,
    pub samples_used: usize,
    pub sample_points: Vec<[f64; 2]>,
}

// ---- growth ----

#[derive(Serialize, Debug)]
pub struct GrowthOut {
    pub family: String,
    pub radii: Vec<f64>,
    pub m_values: Vec<f64>,
    pub n_values: Vec<f64>,
    pub t_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hayman_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hayman_c: Option<f64>,
    pub subexponential: bool,
    pub consistent_with_bound: bool,
}

// ---- errors ----

#[derive(Serialize, Debug)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
}

#[derive(Serialize, Debug)]
pub struct ErrorOut {
    pub error: ErrorBody,
}
