//! Exact-arithmetic Graev metrics on free groups, free products of finite
//! metric groups with amalgamation, and HNN extensions, together with the
//! SIN-group toolkit built on top of them.
//!
//! All distances are exact rationals ([`rational::Rat`]); every infimum in
//! the theory is an attained minimum over a finite search space, and every
//! fast algorithm has an independent brute-force counterpart for
//! cross-checking.

pub mod alphabet;
pub mod amalgam;
pub mod cli;
pub mod combinatorics;
pub mod free;
pub mod group;
pub mod hnn;
pub mod parse;
pub mod product;
pub mod rational;
pub mod sin;
pub mod words;
