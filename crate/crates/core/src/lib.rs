//! Subrack lattices of finite groups under conjugation.
//!
//! A group `G` acts on itself by `a ▷ b = a·b·a⁻¹`. The subsets closed under
//! this operation form a lattice `R(G)`, and much of the structure of `G`
//! (center, abelian normal subgroups, nilpotence class, p-nilpotence) can be
//! read off that lattice alone. [`oracle`] computes the same facts from the
//! multiplication table so the two routes can be compared.

pub mod bitset;
pub mod catalog;
pub mod cycle_forms;
pub mod error;
pub mod group;
pub mod oracle;
pub mod invariants;
pub mod lattice;
pub mod nilpotence;
pub mod rack;
pub mod verify;

pub use bitset::ElemSet;
pub use catalog::{catalog, catalog_up_to, CATALOG};
pub use error::{Error, Result};
pub use group::FiniteGroup;
pub use lattice::{LatticeMode, ModeChoice, SubrackLattice};
pub use rack::Rack;
