//! Generalized Feynman graph calculus for arbitrary base measures.
//!
//! Moments of a perturbed measure are expanded into sums over Feynman graphs
//! whose empty vertices carry truncated moments of the base measure. The
//! base measure is anything implementing [`moment_oracles::MomentOracle`];
//! all arithmetic is exact over the rationals so every combinatorial identity
//! can be checked with equality rather than tolerances.
//!
//! Modules, bottom-up:
//!
//! - [`partitions`]: set partitions, pairings, self-contraction-free and
//!   connected partition families.
//! - [`feynman_graphs`]: graphs as partitions of the leg set.
//! - [`moment_oracles`]: measures and their truncated moments.
//! - [`powerseries`]: truncated formal power series.
//! - [`wick_ordering`]: Wick monomials and their expectations.
//! - [`expansion_engine`]: Feynman rules and the perturbation series.

pub mod cli;
pub mod expansion_engine;
pub mod feynman_graphs;
pub mod moment_oracles;
pub mod partitions;
pub mod powerseries;
pub mod scalar;
pub mod wick_ordering;

pub use expansion_engine::{Engine, EngineError, ExpansionRequest, SeriesResult, VolumeSpec};
pub use feynman_graphs::{enumerate_graphs, FeynmanGraph, LegLabel};
pub use moment_oracles::{
    Cumulants, DiscreteMeasure, GaussianOracle, IidCumulantOracle, Measure, MomentOracle, SiteIndex,
};
pub use partitions::{Capacity, Partition};
pub use powerseries::FormalSeries;
pub use scalar::Scalar;
pub use wick_ordering::{Wick, WickFamily};
