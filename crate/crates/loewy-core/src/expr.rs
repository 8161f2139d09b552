//! Closed-form expression trees for solution families: construction,
//! parameter binding, exact differentiation, numeric evaluation, and an
//! overflow-safe scaled evaluation for growth estimates.
//!
//! The node set is closed under differentiation: `wp -> wp'`,
//! `wp' -> 6 wp^2 - g2/2`, Bessel nodes through their recurrences, and the
//! elementary functions through the chain rule. Parameters are complex
//! constants; `z` is the only variable.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use core::fmt;

use num_traits::Float;

use crate::scalar::{
    approx, exact_int, exact_one, exact_zero, format_exact, is_exact_zero, Complex64,
    ExactComplex,
};
use crate::specfun::{
    bessel_j, bessel_j_prime, bessel_y, bessel_y_prime, stable_cot, stable_tanh,
    EllipticInvariants, SpecFunError,
};

/// Which Bessel evaluator a node refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
    JPrime,
    YPrime,
}

/// Expression tree over `z` with named constant parameter slots.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(ExactComplex),
    Param(String),
    Z,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Tanh(Box<Expr>),
    Cot(Box<Expr>),
    Wp { prime: bool, arg: Box<Expr>, g2: Box<Expr>, g3: Box<Expr> },
    Bessel { kind: BesselKind, nu: Box<Expr>, arg: Box<Expr> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvalError {
    UnboundParam(String),
    /// Evaluation ran into a pole (or a blow-up indistinguishable from one)
    /// near the given point.
    PoleNear(Complex64),
    SpecFun(SpecFunError),
    NonFinite,
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::UnboundParam(name) => write!(f, "unbound parameter slot '{name}'"),
            EvalError::PoleNear(z) => write!(f, "pole near z = {z}"),
            EvalError::SpecFun(e) => write!(f, "{e}"),
            EvalError::NonFinite => write!(f, "non-finite value"),
        }
    }
}

impl From<SpecFunError> for EvalError {
    fn from(e: SpecFunError) -> Self {
        match e {
            SpecFunError::PoleNear(z) => EvalError::PoleNear(z),
            other => EvalError::SpecFun(other),
        }
    }
}

// ---- constructors with light constant folding ----

pub fn con(x: ExactComplex) -> Expr {
    Expr::Const(x)
}

pub fn coni(n: i64) -> Expr {
    Expr::Const(exact_int(n))
}

pub fn par(name: &str) -> Expr {
    Expr::Param(String::from(name))
}

pub fn zvar() -> Expr {
    Expr::Z
}

fn as_const(e: &Expr) -> Option<&ExactComplex> {
    match e {
        Expr::Const(c) => Some(c),
        _ => None,
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => return Expr::Const(x.clone() + y.clone()),
        (Some(x), None) if is_exact_zero(x) => return b,
        (None, Some(y)) if is_exact_zero(y) => return a,
        _ => {}
    }
    Expr::Add(Box::new(a), Box::new(b))
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => return Expr::Const(x.clone() - y.clone()),
        (None, Some(y)) if is_exact_zero(y) => return a,
        _ => {}
    }
    Expr::Sub(Box::new(a), Box::new(b))
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (as_const(&a), as_const(&b)) {
        (Some(x), Some(y)) => return Expr::Const(x.clone() * y.clone()),
        (Some(x), None) => {
            if is_exact_zero(x) {
                return Expr::Const(exact_zero());
            }
            if *x == exact_one() {
                return b;
            }
        }
        (None, Some(y)) => {
            if is_exact_zero(y) {
                return Expr::Const(exact_zero());
            }
            if *y == exact_one() {
                return a;
            }
        }
        _ => {}
    }
    Expr::Mul(Box::new(a), Box::new(b))
}

pub fn div(a: Expr, b: Expr) -> Expr {
    if let (Some(x), Some(y)) = (as_const(&a), as_const(&b)) {
        if !is_exact_zero(y) {
            return Expr::Const(x.clone() / y.clone());
        }
    }
    if let Some(x) = as_const(&a) {
        if is_exact_zero(x) {
            return Expr::Const(exact_zero());
        }
    }
    if let Some(y) = as_const(&b) {
        if *y == exact_one() {
            return a;
        }
    }
    Expr::Div(Box::new(a), Box::new(b))
}

pub fn neg(a: Expr) -> Expr {
    mul(coni(-1), a)
}

pub fn pow(a: Expr, n: i32) -> Expr {
    match n {
        0 => coni(1),
        1 => a,
        _ => {
            if let Some(x) = as_const(&a) {
                if n > 0 {
                    let mut acc = exact_one();
                    for _ in 0..n {
                        acc = acc * x.clone();
                    }
                    return Expr::Const(acc);
                }
            }
            Expr::Pow(Box::new(a), n)
        }
    }
}

pub fn exp(a: Expr) -> Expr {
    if let Some(x) = as_const(&a) {
        if is_exact_zero(x) {
            return coni(1);
        }
    }
    Expr::Exp(Box::new(a))
}

pub fn tanh(a: Expr) -> Expr {
    Expr::Tanh(Box::new(a))
}

pub fn cot(a: Expr) -> Expr {
    Expr::Cot(Box::new(a))
}

pub fn wp(arg: Expr, g2: Expr, g3: Expr) -> Expr {
    Expr::Wp { prime: false, arg: Box::new(arg), g2: Box::new(g2), g3: Box::new(g3) }
}

pub fn wp_prime(arg: Expr, g2: Expr, g3: Expr) -> Expr {
    Expr::Wp { prime: true, arg: Box::new(arg), g2: Box::new(g2), g3: Box::new(g3) }
}

pub fn bessel(kind: BesselKind, nu: Expr, arg: Expr) -> Expr {
    Expr::Bessel { kind, nu: Box::new(nu), arg: Box::new(arg) }
}

impl core::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        add(self, rhs)
    }
}

impl core::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        sub(self, rhs)
    }
}

impl core::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        mul(self, rhs)
    }
}

impl core::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        div(self, rhs)
    }
}

impl core::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(self)
    }
}

impl Expr {
    /// Free parameter slots appearing in the tree.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) | Expr::Z => {}
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Pow(a, _) | Expr::Exp(a) | Expr::Tanh(a) | Expr::Cot(a) => {
                a.collect_params(out)
            }
            Expr::Wp { arg, g2, g3, .. } => {
                arg.collect_params(out);
                g2.collect_params(out);
                g3.collect_params(out);
            }
            Expr::Bessel { nu, arg, .. } => {
                nu.collect_params(out);
                arg.collect_params(out);
            }
        }
    }

    /// Substitutes parameter slots with exact constants; slots missing from
    /// the map stay symbolic.
    pub fn bind(&self, values: &BTreeMap<String, ExactComplex>) -> Expr {
        match self {
            Expr::Const(_) | Expr::Z => self.clone(),
            Expr::Param(name) => match values.get(name) {
                Some(v) => Expr::Const(v.clone()),
                None => self.clone(),
            },
            Expr::Add(a, b) => add(a.bind(values), b.bind(values)),
            Expr::Sub(a, b) => sub(a.bind(values), b.bind(values)),
            Expr::Mul(a, b) => mul(a.bind(values), b.bind(values)),
            Expr::Div(a, b) => div(a.bind(values), b.bind(values)),
            Expr::Pow(a, n) => pow(a.bind(values), *n),
            Expr::Exp(a) => exp(a.bind(values)),
            Expr::Tanh(a) => tanh(a.bind(values)),
            Expr::Cot(a) => cot(a.bind(values)),
            Expr::Wp { prime, arg, g2, g3 } => Expr::Wp {
                prime: *prime,
                arg: Box::new(arg.bind(values)),
                g2: Box::new(g2.bind(values)),
                g3: Box::new(g3.bind(values)),
            },
            Expr::Bessel { kind, nu, arg } => Expr::Bessel {
                kind: *kind,
                nu: Box::new(nu.bind(values)),
                arg: Box::new(arg.bind(values)),
            },
        }
    }

    /// Exact derivative with respect to `z`.
    pub fn differentiate(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Param(_) => coni(0),
            Expr::Z => coni(1),
            Expr::Add(a, b) => add(a.differentiate(), b.differentiate()),
            Expr::Sub(a, b) => sub(a.differentiate(), b.differentiate()),
            Expr::Mul(a, b) => add(
                mul(a.differentiate(), (**b).clone()),
                mul((**a).clone(), b.differentiate()),
            ),
            Expr::Div(a, b) => {
                let num = sub(
                    mul(a.differentiate(), (**b).clone()),
                    mul((**a).clone(), b.differentiate()),
                );
                div(num, pow((**b).clone(), 2))
            }
            Expr::Pow(a, n) => mul(
                mul(coni(*n as i64), pow((**a).clone(), n - 1)),
                a.differentiate(),
            ),
            Expr::Exp(a) => mul(exp((**a).clone()), a.differentiate()),
            Expr::Tanh(a) => mul(
                sub(coni(1), pow(tanh((**a).clone()), 2)),
                a.differentiate(),
            ),
            Expr::Cot(a) => mul(
                neg(add(coni(1), pow(cot((**a).clone()), 2))),
                a.differentiate(),
            ),
            Expr::Wp { prime: false, arg, g2, g3 } => mul(
                wp_prime((**arg).clone(), (**g2).clone(), (**g3).clone()),
                arg.differentiate(),
            ),
            Expr::Wp { prime: true, arg, g2, g3 } => {
                // wp'' = 6 wp^2 - g2 / 2
                let wp_sq = pow(wp((**arg).clone(), (**g2).clone(), (**g3).clone()), 2);
                let second = sub(mul(coni(6), wp_sq), div((**g2).clone(), coni(2)));
                mul(second, arg.differentiate())
            }
            Expr::Bessel { kind, nu, arg } => {
                let n = (**nu).clone();
                let a = (**arg).clone();
                let da = arg.differentiate();
                let d_dzeta = match kind {
                    // 2 J'_nu = J_{nu-1} - J_{nu+1}
                    BesselKind::J => bessel(BesselKind::JPrime, n, a),
                    BesselKind::Y => bessel(BesselKind::YPrime, n, a),
                    // f'' = -f'/zeta - (1 - nu^2/zeta^2) f from the ODE
                    BesselKind::JPrime | BesselKind::YPrime => {
                        let (f, fp) = match kind {
                            BesselKind::JPrime => (BesselKind::J, BesselKind::JPrime),
                            _ => (BesselKind::Y, BesselKind::YPrime),
                        };
                        let term1 = neg(div(
                            bessel(fp, n.clone(), a.clone()),
                            a.clone(),
                        ));
                        let coeff = sub(coni(1), div(pow(n.clone(), 2), pow(a.clone(), 2)));
                        sub(term1, mul(coeff, bessel(f, n, a)))
                    }
                };
                mul(d_dzeta, da)
            }
        }
    }

    /// Numeric value at `z`. All parameter slots must be bound.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        let v = self.eval_inner(z)?;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(EvalError::PoleNear(z));
        }
        Ok(v)
    }

    fn eval_inner(&self, z: Complex64) -> Result<Complex64, EvalError> {
        match self {
            Expr::Const(c) => Ok(approx(c)),
            Expr::Param(name) => Err(EvalError::UnboundParam(name.clone())),
            Expr::Z => Ok(z),
            Expr::Add(a, b) => Ok(a.eval_inner(z)? + b.eval_inner(z)?),
            Expr::Sub(a, b) => Ok(a.eval_inner(z)? - b.eval_inner(z)?),
            Expr::Mul(a, b) => Ok(a.eval_inner(z)? * b.eval_inner(z)?),
            Expr::Div(a, b) => {
                let num = a.eval_inner(z)?;
                let den = b.eval_inner(z)?;
                if den.norm() == 0.0 || num.norm() > 1e280 * den.norm() {
                    return Err(EvalError::PoleNear(z));
                }
                Ok(num / den)
            }
            Expr::Pow(a, n) => Ok(a.eval_inner(z)?.powi(*n)),
            Expr::Exp(a) => Ok(a.eval_inner(z)?.exp()),
            Expr::Tanh(a) => Ok(stable_tanh(a.eval_inner(z)?)),
            Expr::Cot(a) => Ok(stable_cot(a.eval_inner(z)?)?),
            Expr::Wp { prime, arg, g2, g3 } => {
                let w = arg.eval_inner(z)?;
                let inv = EllipticInvariants::new(g2.eval_inner(z)?, g3.eval_inner(z)?);
                let (p, q) = crate::specfun::wp_both(w, &inv).map_err(|e| match e {
                    // report the pole in the z plane, not the wp plane
                    SpecFunError::PoleNear(_) => EvalError::PoleNear(z),
                    other => EvalError::SpecFun(other),
                })?;
                Ok(if *prime { q } else { p })
            }
            Expr::Bessel { kind, nu, arg } => {
                let n = nu.eval_inner(z)?;
                let a = arg.eval_inner(z)?;
                let v = match kind {
                    BesselKind::J => bessel_j(n, a),
                    BesselKind::Y => bessel_y(n, a),
                    BesselKind::JPrime => bessel_j_prime(n, a),
                    BesselKind::YPrime => bessel_y_prime(n, a),
                };
                v.map_err(|e| match e {
                    SpecFunError::PoleNear(_) => EvalError::PoleNear(z),
                    other => EvalError::SpecFun(other),
                })
            }
        }
    }

    /// Overflow-safe evaluation tracking the logarithmic magnitude through
    /// exp nodes, for growth quadrature at radii where `e^{e^r}` overflows.
    pub fn eval_scaled(&self, z: Complex64) -> Result<Scaled, EvalError> {
        match self {
            Expr::Const(c) => Ok(Scaled::from_c64(approx(c))),
            Expr::Param(name) => Err(EvalError::UnboundParam(name.clone())),
            Expr::Z => Ok(Scaled::from_c64(z)),
            Expr::Add(a, b) => Ok(a.eval_scaled(z)?.add(&b.eval_scaled(z)?)),
            Expr::Sub(a, b) => Ok(a.eval_scaled(z)?.add(&b.eval_scaled(z)?.neg())),
            Expr::Mul(a, b) => Ok(a.eval_scaled(z)?.mul(&b.eval_scaled(z)?)),
            Expr::Div(a, b) => {
                let num = a.eval_scaled(z)?;
                let den = b.eval_scaled(z)?;
                if den.is_zero() {
                    return Err(EvalError::PoleNear(z));
                }
                Ok(num.mul(&den.recip()))
            }
            Expr::Pow(a, n) => Ok(a.eval_scaled(z)?.powi(*n)),
            Expr::Exp(a) => {
                let inner = a.eval_scaled(z)?;
                // need the actual argument value; its own scale must be sane
                let v = inner.to_c64_checked().ok_or(EvalError::NonFinite)?;
                Ok(Scaled { m: Complex64::from_polar(1.0, v.im), log_scale: v.re })
            }
            Expr::Tanh(a) => {
                let inner = a.eval_scaled(z)?;
                match inner.to_c64_checked() {
                    Some(v) => Ok(Scaled::from_c64(stable_tanh(v))),
                    None => {
                        // argument too large to represent: saturate by the
                        // sign of the real part
                        if inner.m.re.abs() < 1e-12 {
                            return Err(EvalError::NonFinite);
                        }
                        let s = if inner.m.re > 0.0 { 1.0 } else { -1.0 };
                        Ok(Scaled::from_c64(Complex64::new(s, 0.0)))
                    }
                }
            }
            Expr::Cot(a) => {
                let inner = a.eval_scaled(z)?;
                match inner.to_c64_checked() {
                    Some(v) => Ok(Scaled::from_c64(stable_cot(v)?)),
                    None => {
                        if inner.m.im.abs() < 1e-12 {
                            return Err(EvalError::NonFinite);
                        }
                        let s = if inner.m.im > 0.0 { -1.0 } else { 1.0 };
                        Ok(Scaled::from_c64(Complex64::new(0.0, s)))
                    }
                }
            }
            Expr::Wp { .. } | Expr::Bessel { .. } => {
                // these stay in the representable range on the radii the
                // growth module uses them for
                Ok(Scaled::from_c64(self.eval(z)?))
            }
        }
    }

    /// Renders the expression for reports.
    pub fn render(&self) -> String {
        alloc::format!("{self}")
    }
}

/// A complex value `m * e^{log_scale}` with `|m|` kept near 1.
#[derive(Clone, Copy, Debug)]
pub struct Scaled {
    pub m: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn from_c64(v: Complex64) -> Self {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Scaled { m: v, log_scale: 0.0 };
        }
        let l = Float::ln(n);
        Scaled { m: v / n, log_scale: l }
    }

    pub fn is_zero(&self) -> bool {
        self.m.norm() == 0.0
    }

    /// ln |value|; `-inf` for zero.
    pub fn log_norm(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        Float::ln(self.m.norm()) + self.log_scale
    }

    pub fn argument(&self) -> f64 {
        self.m.arg()
    }

    pub fn to_c64_checked(&self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(Complex64::new(0.0, 0.0));
        }
        if self.log_norm() > 690.0 {
            return None;
        }
        Some(self.m * Float::exp(self.log_scale))
    }

    fn renorm(mut self) -> Self {
        let n = self.m.norm();
        if n == 0.0 || !n.is_finite() {
            self.log_scale = 0.0;
            return self;
        }
        self.log_scale += Float::ln(n);
        self.m /= n;
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.log_scale >= other.log_scale {
            (self, other)
        } else {
            (other, self)
        };
        let diff = lo.log_scale - hi.log_scale;
        if diff < -700.0 {
            return *hi;
        }
        Scaled {
            m: hi.m + lo.m * Float::exp(diff),
            log_scale: hi.log_scale,
        }
        .renorm()
    }

    pub fn neg(&self) -> Self {
        Scaled { m: -self.m, log_scale: self.log_scale }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Scaled {
            m: self.m * other.m,
            log_scale: self.log_scale + other.log_scale,
        }
        .renorm()
    }

    pub fn recip(&self) -> Self {
        Scaled {
            m: 1.0 / self.m,
            log_scale: -self.log_scale,
        }
        .renorm()
    }

    pub fn powi(&self, n: i32) -> Self {
        if self.is_zero() {
            return *self;
        }
        let arg = self.m.arg() * n as f64;
        let scale = self.log_scale * n as f64 + Float::ln(self.m.norm()) * n as f64;
        Scaled { m: Complex64::from_polar(1.0, arg), log_scale: scale }
    }
}

// precedence-aware rendering
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8) -> fmt::Result {
        let prec = self.precedence();
        // composite constants like "1 + 2*i" read as sums; wrap them
        let need_paren = prec < parent
            || matches!(self, Expr::Const(c) if format_exact(c).contains(' ') && parent > 1);
        if need_paren {
            write!(f, "(")?;
        }
        match self {
            Expr::Const(c) => write!(f, "{}", format_exact(c))?,
            Expr::Param(name) => write!(f, "{name}")?,
            Expr::Z => write!(f, "z")?,
            Expr::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 1)?;
            }
            Expr::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 2)?;
            }
            Expr::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
            Expr::Pow(a, n) => {
                a.fmt_prec(f, 4)?;
                write!(f, "^{n}")?;
            }
            Expr::Exp(a) => write!(f, "exp({a})")?,
            Expr::Tanh(a) => write!(f, "tanh({a})")?,
            Expr::Cot(a) => write!(f, "cot({a})")?,
            Expr::Wp { prime, arg, g2, g3 } => {
                let name = if *prime { "wp'" } else { "wp" };
                write!(f, "{name}({arg}; {g2}, {g3})")?;
            }
            Expr::Bessel { kind, nu, arg } => {
                let name = match kind {
                    BesselKind::J => "J",
                    BesselKind::Y => "Y",
                    BesselKind::JPrime => "J'",
                    BesselKind::YPrime => "Y'",
                };
                write!(f, "{name}[{nu}]({arg})")?;
            }
        }
        if need_paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Jet `(e, e', e'')` of an expression, for second-order residuals.
pub fn jet2(e: &Expr) -> [Expr; 3] {
    let d1 = e.differentiate();
    let d2 = d1.differentiate();
    [e.clone(), d1, d2]
}

/// Central finite difference used by tests to cross-check differentiate.
pub fn finite_difference(e: &Expr, z: Complex64, h: f64) -> Result<Complex64, EvalError> {
    let hp = Complex64::new(h, 0.0);
    Ok((e.eval(z + hp)? - e.eval(z - hp)?) / (2.0 * hp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::exact_ratio;

    #[test]
    fn eval_rational_function() {
        // u = -2/(3 z) at z = 1 -> -2/3
        let u = div(coni(-2), mul(coni(3), zvar()));
        let v = u.eval(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - Complex64::new(-2.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pole_is_signalled() {
        let u = div(coni(1), zvar());
        assert!(matches!(
            u.eval(Complex64::new(0.0, 0.0)),
            Err(EvalError::PoleNear(_))
        ));
    }

    #[test]
    fn unbound_param_rejected() {
        let u = add(par("c0"), zvar());
        assert!(matches!(
            u.eval(Complex64::new(1.0, 0.0)),
            Err(EvalError::UnboundParam(_))
        ));
        let mut binding = BTreeMap::new();
        binding.insert(String::from("c0"), exact_ratio(1, 2));
        let bound = u.bind(&binding);
        assert!(bound.params().is_empty());
        let v = bound.eval(Complex64::new(1.0, 0.0)).unwrap();
        assert!((v - Complex64::new(1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_of_wp_pair() {
        // d/dz wp = wp'
        let e = wp(zvar(), coni(2), coni(1));
        let d = e.differentiate();
        let z = Complex64::new(0.4, 0.2);
        let direct = d.eval(z).unwrap();
        let via_node = wp_prime(zvar(), coni(2), coni(1)).eval(z).unwrap();
        assert!((direct - via_node).norm() < 1e-12 * via_node.norm());
    }

    #[test]
    fn chain_rule_tanh() {
        // d/dz tanh(w z) = (1 - tanh^2) w
        let w = exact_ratio(3, 2);
        let e = tanh(mul(con(w), zvar()));
        let d = e.differentiate();
        let z = Complex64::new(0.3, -0.1);
        let fd = finite_difference(&e, z, 1e-6).unwrap();
        let sym = d.eval(z).unwrap();
        assert!((fd - sym).norm() <= 1e-6 * (1.0 + sym.norm()));
    }

    #[test]
    fn derivative_matrix_against_finite_differences() {
        let cases: Vec<Expr> = alloc::vec![
            exp(mul(coni(2), zvar())),
            div(coni(1), sub(zvar(), coni(3))),
            cot(add(zvar(), con(exact_ratio(1, 3)))),
            wp_prime(exp(zvar()), coni(1), coni(0)),
            pow(add(zvar(), coni(1)), 3),
            bessel(BesselKind::J, con(exact_ratio(1, 3)), mul(coni(2), zvar())),
            bessel(BesselKind::YPrime, con(exact_ratio(1, 2)), add(zvar(), coni(2))),
        ];
        let z = Complex64::new(0.52, 0.18);
        for e in &cases {
            let sym = e.differentiate().eval(z).unwrap();
            let fd = finite_difference(e, z, 1e-5).unwrap();
            assert!(
                (fd - sym).norm() <= 1e-6 * (1.0 + sym.norm()),
                "case {e}: fd={fd} sym={sym}"
            );
        }
    }

    #[test]
    fn scaled_eval_tracks_towers() {
        // exp(exp(z)) at z with e^z ~ 1000: log scale must be ~ e^z
        let e = exp(exp(zvar()));
        let z = Complex64::new(6.9077552789821, 0.0); // e^z ~ 1000
        let s = e.eval_scaled(z).unwrap();
        assert!((s.log_norm() - 1000.0).abs() < 1.0);
        // and tanh of a huge real argument saturates
        let t = tanh(exp(exp(zvar())));
        let v = t.eval_scaled(z).unwrap();
        assert!((v.to_c64_checked().unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn scaled_matches_plain_in_range() {
        let e = div(
            exp(mul(coni(2), zvar())),
            add(exp(zvar()), coni(3)),
        );
        let z = Complex64::new(1.2, 0.7);
        let plain = e.eval(z).unwrap();
        let scaled = e.eval_scaled(z).unwrap().to_c64_checked().unwrap();
        assert!((plain - scaled).norm() < 1e-12 * plain.norm());
    }

    #[test]
    fn rendering_is_readable() {
        let u = sub(
            div(coni(-2), mul(coni(3), sub(zvar(), par("z0")))),
            par("b2"),
        );
        assert_eq!(u.render(), "-2/(3*(z - z0)) - b2");
    }
}
