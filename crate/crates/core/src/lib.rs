//! Exact exponential sums, L-functions and Newton/Hodge polygons for
//! characters of truncated Witt vectors of rational functions over finite
//! fields.
//!
//! The crate is layered bottom-up:
//!
//! * [`finite_field`], [`galois_ring`], [`witt`], [`cyclotomic`]: exact
//!   arithmetic substrates.
//! * [`sum`]: the input `f` with its validated invariants and derived
//!   pole degrees.
//! * [`engine`]: character sums `S_f(k)` by enumeration, along two
//!   independent evaluation paths.
//! * [`lfunction`], [`polygon`]: the L-polynomial and its Newton polygon
//!   against the Hodge-type lower bounds.
//! * [`artin_hasse`], [`cohomology`]: the valuation estimates and the
//!   partial-fraction reduction model behind the degree count.

mod ring;

pub mod artin_hasse;
pub mod cohomology;
pub mod cyclotomic;
pub mod engine;
pub mod finite_field;
pub mod galois_ring;
pub mod lfunction;
pub mod polygon;
pub mod rational;
pub mod sum;
pub mod witt;

pub use finite_field::{embed, Embedding, FFElement, FieldError, FieldParams};
pub use galois_ring::{GRParams, GaloisRingElement, RingError};
