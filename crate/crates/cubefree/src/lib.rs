//! Algorithms for finite permutation groups of cube-free order.
//!
//! The crate provides a small permutation-group engine (stabilizer chains,
//! homomorphisms, coset actions), structural machinery for solvable groups
//! (complements, Sylow towers, socle and Frattini subgroups, polycyclic
//! presentations), and on top of that an isomorphism test for groups whose
//! order is not divisible by the cube of any prime. A brute-force oracle,
//! an instance generator and a small-group catalog support testing, and the
//! `cubefree` binary exposes everything on the command line.

pub mod error;
pub mod grouptheory;
pub mod iso;
pub mod modp;
pub mod oracle;
pub mod perm;
pub mod presentations;
pub mod structure;
pub mod cli;

pub use error::{Error, Result};
