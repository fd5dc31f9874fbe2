//! Exact algebra and geometry of correlation boxes.
//!
//! A *behavior* is a joint conditional distribution P(ab…|xy…) over the
//! outputs of several parties given their inputs, stored as a flat rational
//! coefficient vector. Bell-like expressions are linear forms on behaviors.
//! This crate implements, with exact rational arithmetic throughout:
//!
//! * scenarios (party cardinalities plus a set of allowed signaling
//!   directions) and the flat/tensor index conventions ([`scenario`]);
//! * behaviors and Bell expressions, validation and evaluation ([`corr`]);
//! * the monoid of deterministic local maps, their composition,
//!   factorization and invertibility ([`detmap`]);
//! * general stochastic local transformations, the causal-form validity
//!   test, the complete-positivity witness and the convex decomposition
//!   into deterministic maps ([`stochmap`]);
//! * the invariant-subspace machinery: Z/C/S bases, dual forms,
//!   projectors and Collins-Gisin coordinates ([`subspaces`]);
//! * affine equivalence, canonical forms and variance-optimal estimators
//!   for inequalities ([`ineq`]);
//! * liftings of behaviors and expressions, payoff maximization and
//!   lifting censuses ([`lifting`]);
//! * exact vertex/facet enumeration via the double description method,
//!   extremality tests and facet orbit classification ([`polytope`]).
//!
//! No floating point is used anywhere: every vertex count, facet count and
//! duality relation is an exact combinatorial fact.

pub mod corr;
pub mod detmap;
pub mod ineq;
pub mod io;
pub mod lifting;
pub mod polytope;
pub mod ratlin;
pub mod scenario;
pub mod stochmap;
pub mod subspaces;

mod error;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;

/// Caps the global worker pool used for internal parallelism. Call once,
/// before any parallel operation; later calls fail harmlessly.
pub fn build_thread_pool(threads: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}
