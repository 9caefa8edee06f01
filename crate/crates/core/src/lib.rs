//! Exact computation in GL₂(ℤ/p²ℤ): conjugacy-class invariants, the
//! Gassmann (local conjugacy) test, named subgroup families, and exhaustive
//! verification of the classification of locally conjugate subgroups.

pub mod ambient;
pub mod conjcls;
pub mod error;
pub mod families;
pub mod lattice;
pub mod mat2;
pub mod residue;
pub mod subgrp;
pub mod verify;

pub use conjcls::{class_invariant, similarity_rep, ClassInvariant, SimilarityRep};
pub use error::{Error, Result};
pub use families::{named, FamilyId, Params};
pub use mat2::{Mat2, PPart};
pub use residue::{smallest_nonsquare, Modulus, Residue};
pub use subgrp::{are_conjugate, are_locally_conjugate, closure, Fingerprint, Subgroup};
pub use verify::{Context, Status, VerificationReport};
