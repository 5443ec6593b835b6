//! Exact kernels for two constructive separation procedures on finitely
//! presented analytic sets, together with the arithmetic they stand on.
//!
//! The crate is organized in three layers:
//!
//! * Combinatorial base: finite sequences and their prime-power codes
//!   ([`seq`]), finite linear orders and the Kleene-Brouwer comparison
//!   ([`order`]), ultimately periodic points ([`point`]), and finite graph
//!   presentations of trees of pairs ([`graph`]).
//! * Set codes: semi-positive and Borel code ASTs over Cantor space with
//!   evaluation, norms and monotonicity checks ([`spc`]), the norm/order
//!   comparison fixpoints ([`fixpoint`]), and convexly generated codes over
//!   rational space ([`cgc`]).
//! * Separators: the product-graph bar recursion emitting semi-positive
//!   separators or lasso counterexamples ([`dyck`]), exact rational convex
//!   geometry ([`geom`]), interval-scheme addressing and Souslin scheme
//!   construction/validation ([`scheme`]), and the fuel-bounded convex
//!   separation recursion ([`preiss`]).
//!
//! Everything is exact: rationals are arbitrary precision, set memberships
//! are decided, and all randomized checking lives in the test suites, not
//! here. [`oracle`] holds independent second routes (Fourier-Motzkin,
//! Caratheodory enumeration, truth tables, bounded searches) used to
//! cross-check the main implementations; the two routes never share code.

pub mod cgc;
pub mod dyck;
pub mod error;
pub mod fixpoint;
pub mod geom;
pub mod graph;
pub mod oracle;
pub mod order;
pub mod point;
pub mod preiss;
pub mod report;
pub mod scheme;
pub mod seq;
pub mod spc;

pub use error::Error;
