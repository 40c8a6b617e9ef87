//! Galois groups of squarefree polynomials over p-adic fields.
//!
//! The pipeline: a squarefree polynomial `F` over `Q_p` is modeled by a global
//! number-field tower whose completion recovers the local splitting data; the
//! roots of the tower are approximated complex-analytically; resolvents formed
//! relative to an overgroup `W` are evaluated and factored `p`-adically; and a
//! deduction engine eliminates candidate groups by comparing statistics of the
//! resolvents against statistics of coset-action images, until a unique
//! candidate (the Galois group, up to conjugacy) survives.
//!
//! Modules mirror the architecture:
//!
//! * [`perm`] — permutation-group kernel (orbits, blocks, coset actions,
//!   normalizers, double cosets, bounded subgroup enumeration, embeddings).
//! * [`combinat`] — divisions and binning enumerators used by the group
//!   machinery.
//! * [`padic`] — `Q_p` and tower extensions, polynomial factorization, Newton
//!   and ramification polygons, ramification filtrations.
//! * [`gtower`] — global rational towers with complex root enumeration and
//!   completion certificates.
//! * [`model`] — global model constructors (symmetric, factors, ramification
//!   tower, root of unity, root of uniformizer, select).
//! * [`resolvent`] — invariants, Tschirnhaus transformations, and resolvent
//!   evaluation.
//! * [`stats`] — statistics on groups and polynomials, with equivalence,
//!   partial order, and maximal preimages.
//! * [`deduce`] — the All / Maximal / Maximal2 / Sequence deduction loops.
//! * [`choice`] — candidate-subgroup tranches and subgroup partitions.
//! * [`engine`] — the end-to-end `galois_group` entry point and the simulated
//!   oracle harness.

pub mod combinat;
pub mod perm;
pub mod padic;
pub mod gtower;
pub mod model;
pub mod resolvent;
pub mod stats;
pub mod deduce;
pub mod choice;
pub mod engine;

mod error;

pub use error::Error;

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
