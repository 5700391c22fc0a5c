//! Discretized configuration spaces of finite graphs.
//!
//! The crate builds `Conf□_n(Γ)`, the cube complex whose `k`-cubes are a choice
//! of `k` pairwise disjoint edges of `Γ` together with `n - k` further vertices
//! disjoint from them, and studies it through three lenses:
//!
//! * combinatorics: f-vectors, Euler characteristics, vertex links and the
//!   flag (locally CAT(0)) condition ([`cube`]);
//! * PL Morse theory: height functions on `Γ`, the induced Morse function on
//!   the configuration space, descending links and the certificates that a
//!   complex is a wedge of circles or splits off a free factor ([`morse`],
//!   [`simplicial`]);
//! * integral homology via Smith normal form, including closed-surface
//!   recognition ([`homology`]).
//!
//! Heights are stored doubled (`height2`) so that every value used by the
//! height presets, including half-integers, is an exact integer.

pub mod cube;
pub mod graph;
pub mod homology;
pub mod morse;
pub mod reproduce;
pub mod simplicial;

pub use cube::{build_conf, Cube, CubeComplex};
pub use graph::{generate, Graph, GraphFamily};
pub use homology::{HomologyReport, SurfaceReport};
pub use morse::{induced_morse, HeightFunction, MorseData, SplitCertificate, WedgeCertificate};
pub use simplicial::{LinkClassification, SimplicialComplex};

/// Version string embedded in reports.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default node budget for the backtracking collapse search.
pub const DEFAULT_COLLAPSE_BUDGET: usize = 100_000;
