//! Bi-free probability toolkit.
//!
//! Exact symbolic side: noncommutative polynomials ([`ncalg`]), bi-non-crossing
//! partition lattices ([`bnclattice`]), bi-free cumulants ([`cumulant`]) and
//! the bi-free difference quotients with their adjoints ([`derivation`]).
//!
//! Numerical side: bi-free Gaussian families with closed-form Fisher
//! information, entropy and entropy dimension ([`gaussfam`]), and Fisher
//! information of commuting pairs given by a sampled joint density
//! ([`bipartite`]).

pub mod ncalg;
pub mod bnclattice;
pub mod cumulant;
pub mod derivation;
pub mod quad;
pub mod gaussfam;
pub mod bipartite;
pub mod selftest;
pub mod cli;
