//! Finite permutation groups: elements, stabilizer chains, homomorphisms,
//! quotients, and the JSON group-file format.

mod chain;
mod fileio;
mod group;
mod hom;
mod permutation;
mod quotient;

pub(crate) use chain::StabChain;
pub use fileio::{group_from_json, group_to_json, GroupFile};
pub use group::{PermGroup, ELEMENTS_CAP};
pub use hom::GroupHom;
pub use permutation::Permutation;
pub use quotient::{CosetQuotient, INDEX_CAP};
