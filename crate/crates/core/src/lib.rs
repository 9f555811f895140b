//! Exact verification toolkit for σ-invariant nets of quadrics in ℙ⁵ and the
//! Clifford algebras attached to them.

pub mod cli;
pub mod clifford;
pub mod exactalg;
pub mod fiber;
pub mod geometry;
pub mod pencil;
pub mod plucker;
pub mod report;
