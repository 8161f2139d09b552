//! Algebra and numerics for factor-chain ODEs
//!
//! This crate implements the machinery for ODEs built from nested first-order
//! factors `[D - (a_n u + b_n)] ... [D - (a_1 u + b_1)] (u - alpha) = 0`:
//!
//! - exact Gaussian-rational and `f64` complex arithmetic ([`scalar`]),
//! - univariate and differential polynomials ([`unipoly`], [`diffpoly`]),
//! - chain expansion and a Taylor-jet oracle ([`operator`]),
//! - leading-order / Fuchs-index / Laurent-recursion analysis and the
//!   genericity test ([`painleve`]),
//! - constant-coefficient linear factorization ([`linfact`]),
//! - Weierstrass, Bessel and elementary evaluators ([`specfun`]),
//! - closed-form solution families for the second-order case ([`classify2`]),
//! - symbolic differentiation and residual verification ([`expr`], [`verify`]),
//! - Nevanlinna characteristic estimation ([`growth`]).
//!
//! Structural computations (expansion, indicial polynomials, Fuchs indices)
//! run over exact Gaussian rationals; evaluation and verification run over
//! `f64` complex numbers. The crate is `no_std` + `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod scalar;
pub mod rng;
pub mod unipoly;
pub mod diffpoly;
pub mod roots;
pub mod operator;
pub mod painleve;
pub mod linfact;
pub mod specfun;
pub mod expr;
pub mod classify2;
pub mod verify;
pub mod growth;

pub use scalar::{approx, Complex64, ExactComplex, Rational};
