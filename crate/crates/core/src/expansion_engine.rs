//! Perturbation series over a finite weighted volume.
//!
//! Integrals over the volume become weighted sums over its sites. The value
//! of a graph is the sum over positions of the inner vertices of the site
//! weights times the product, over empty vertices, of the truncated moment
//! of the sites attached to it. The coefficient of `lambda^m` in the series
//! is `(-1)^m / m!` times the sum of graph values at order `m`.
//!
//! Graphs are evaluated in chunks; inside a chunk they may run on several
//! threads, but partial sums are always accumulated in canonical graph order
//! so the output does not depend on the worker count.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feynman_graphs::{
    enumerate_graphs, vertex_families, FeynmanGraph, GraphError, LegLabel,
};
use crate::moment_oracles::{
    cumulants_from_moments, Cumulants, DiscreteMeasure, MomentOracle, OracleError, SiteIndex,
};
use crate::partitions::{enumerate_connected_partitions, Capacity, PartitionError};
use crate::powerseries::{FormalSeries, SeriesError};
use crate::scalar::{self, Scalar};
use crate::wick_ordering::{Wick, WickError, WickFamily};

const CHUNK: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid request: {0}")]
    Request(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Wick(#[from] WickError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl EngineError {
    /// Capacity and oracle-capability failures, as opposed to bad input.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            EngineError::Partition(PartitionError::Capacity { .. })
                | EngineError::Graph(GraphError::Partition(PartitionError::Capacity { .. }))
                | EngineError::Oracle(OracleError::Capability { .. })
                | EngineError::Wick(WickError::Oracle(OracleError::Capability { .. }))
                | EngineError::Wick(WickError::Partition(PartitionError::Capacity { .. }))
        )
    }
}

/// Finite stand-in for the integration domain: distinct sites with positive
/// quadrature weights.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawVolume")]
pub struct VolumeSpec {
    sites: Vec<SiteIndex>,
    #[serde(with = "scalar::serde_vec")]
    weights: Vec<Scalar>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVolume {
    sites: Vec<SiteIndex>,
    #[serde(with = "scalar::serde_vec")]
    weights: Vec<Scalar>,
}

impl TryFrom<RawVolume> for VolumeSpec {
    type Error = EngineError;

    fn try_from(raw: RawVolume) -> Result<Self, EngineError> {
        VolumeSpec::new(raw.sites, raw.weights)
    }
}

impl VolumeSpec {
    pub fn new(sites: Vec<SiteIndex>, weights: Vec<Scalar>) -> Result<Self, EngineError> {
        if sites.len() != weights.len() {
            return Err(EngineError::Request(
                "one weight per volume site is required".into(),
            ));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(EngineError::Request(
                "volume weights must be positive".into(),
            ));
        }
        let mut sorted = sites.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(EngineError::Request("volume sites must be distinct".into()));
        }
        Ok(VolumeSpec { sites, weights })
    }

    /// Every site in `sites` with weight 1.
    pub fn uniform(sites: Vec<SiteIndex>) -> Result<Self, EngineError> {
        let weights = vec![Scalar::one(); sites.len()];
        Self::new(sites, weights)
    }

    pub fn sites(&self) -> &[SiteIndex] {
        &self.sites
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.weights
    }

    /// All weights multiplied by `r > 0`.
    pub fn scaled(&self, r: &Scalar) -> Result<Self, EngineError> {
        Self::new(
            self.sites.clone(),
            self.weights.iter().map(|w| w * r).collect(),
        )
    }
}

/// Everything that determines a series, apart from the measure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionRequest {
    /// Sites of the outer points `x_1..x_n`.
    pub external_sites: Vec<SiteIndex>,
    /// Degree of the interaction monomial.
    pub p: usize,
    /// Highest power of the coupling retained.
    pub order: usize,
    pub volume: VolumeSpec,
    /// Drop graphs with a self-contraction at an interaction vertex.
    pub wick_ordered: bool,
    /// Keep only connected graphs.
    pub connected_only: bool,
}

impl ExpansionRequest {
    pub fn new(external_sites: Vec<SiteIndex>, p: usize, order: usize, volume: VolumeSpec) -> Self {
        ExpansionRequest {
            external_sites,
            p,
            order,
            volume,
            wick_ordered: false,
            connected_only: false,
        }
    }

    pub fn n(&self) -> usize {
        self.external_sites.len()
    }

    /// Longest moment the series needs: `n + p * order`.
    pub fn required_order(&self) -> usize {
        self.n() + self.p * self.order
    }

    pub fn vacuum(&self) -> Self {
        ExpansionRequest {
            external_sites: Vec::new(),
            ..self.clone()
        }
    }

    pub fn filter_name(&self) -> &'static str {
        match (self.wick_ordered, self.connected_only) {
            (false, false) => "none",
            (true, false) => "wick",
            (false, true) => "connected",
            (true, true) => "wick+connected",
        }
    }

    fn keeps(&self, g: &FeynmanGraph) -> bool {
        (!self.wick_ordered || !g.has_self_contraction())
            && (!self.connected_only || g.is_connected())
    }
}

/// A computed series together with how many graphs fed each order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesResult {
    pub order: usize,
    #[serde(rename = "coefficients")]
    pub series: FormalSeries,
    pub graph_counts: Vec<u64>,
    pub filtered: String,
    pub request: ExpansionRequest,
}

/// The two independent values of `<V, ..., V>^T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeMoment {
    /// Sum over connected partitions of the vertex leg families.
    pub via_connected_partitions: Scalar,
    /// Truncation recursion applied to the moments `<V^k>`.
    pub via_recursion: Scalar,
}

/// Series engine bound to one measure.
pub struct Engine<'o> {
    cumulants: Cumulants<'o>,
    capacity: Capacity,
    pool: Option<rayon::ThreadPool>,
}

impl<'o> Engine<'o> {
    pub fn new(oracle: &'o dyn MomentOracle) -> Self {
        Engine {
            cumulants: Cumulants::new(oracle),
            capacity: Capacity::default(),
            pool: None,
        }
    }

    pub fn with_capacity(mut self, capacity: Capacity) -> Self {
        self.capacity = capacity;
        self
    }

    /// Evaluate graphs on `jobs` worker threads (1 means the calling thread).
    pub fn with_jobs(mut self, jobs: usize) -> Result<Self, EngineError> {
        self.pool = if jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| EngineError::Request(e.to_string()))?;
            Some(pool)
        } else {
            None
        };
        Ok(self)
    }

    pub fn cumulants(&self) -> &Cumulants<'o> {
        &self.cumulants
    }

    pub fn oracle(&self) -> &'o dyn MomentOracle {
        self.cumulants.oracle()
    }

    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    fn validate(&self, req: &ExpansionRequest, order: usize) -> Result<(), EngineError> {
        if req.p == 0 {
            return Err(GraphError::ZeroDegree.into());
        }
        let oracle = self.oracle();
        let sites = oracle.num_sites();
        for &s in req.external_sites.iter().chain(req.volume.sites()) {
            if s >= sites {
                return Err(OracleError::SiteOutOfRange { site: s, sites }.into());
            }
        }
        let needed = req.n() + req.p * order;
        if needed > oracle.max_order() {
            return Err(OracleError::Capability {
                requested: needed,
                max: oracle.max_order(),
            }
            .into());
        }
        Ok(())
    }

    /// Visits every assignment of volume sites to `m` inner vertices with the
    /// product of their weights.
    fn for_each_assignment<F>(
        &self,
        m: usize,
        req: &ExpansionRequest,
        mut f: F,
    ) -> Result<(), EngineError>
    where
        F: FnMut(&[SiteIndex], &Scalar) -> Result<(), EngineError>,
    {
        let k = req.volume.sites().len();
        if k == 0 && m > 0 {
            return Ok(());
        }
        let mut digits = vec![0usize; m];
        let mut ys = vec![0 as SiteIndex; m];
        loop {
            let mut weight = Scalar::one();
            for (j, &d) in digits.iter().enumerate() {
                ys[j] = req.volume.sites()[d];
                weight *= &req.volume.weights()[d];
            }
            f(&ys, &weight)?;
            let mut j = m;
            loop {
                if j == 0 {
                    return Ok(());
                }
                j -= 1;
                digits[j] += 1;
                if digits[j] < k {
                    break;
                }
                digits[j] = 0;
            }
        }
    }

    /// Value of one graph: weighted sum over inner-vertex positions of the
    /// product of truncated moments, one per empty vertex.
    pub fn evaluate_graph(
        &self,
        g: &FeynmanGraph,
        req: &ExpansionRequest,
    ) -> Result<Scalar, EngineError> {
        if g.n() != req.n() || g.p() != req.p {
            return Err(EngineError::Request(format!(
                "graph has (n, p) = ({}, {}) but the request has ({}, {})",
                g.n(),
                g.p(),
                req.n(),
                req.p
            )));
        }
        self.validate(req, g.m())?;
        self.evaluate_unchecked(g, req)
    }

    fn evaluate_unchecked(
        &self,
        g: &FeynmanGraph,
        req: &ExpansionRequest,
    ) -> Result<Scalar, EngineError> {
        let blocks = g.alpha().blocks();
        let mut total = Scalar::zero();
        let mut tuple = Vec::new();
        self.for_each_assignment(g.m(), req, |ys, weight| {
            let mut term = weight.clone();
            for block in blocks {
                tuple.clear();
                tuple.extend(block.iter().map(|l| match *l {
                    LegLabel::Outer(i) => req.external_sites[i - 1],
                    LegLabel::InnerLeg(v, _) => ys[v - 1],
                }));
                term *= self.cumulants.truncated_moment(&tuple)?;
                if term.is_zero() {
                    break;
                }
            }
            total += term;
            Ok(())
        })?;
        Ok(total)
    }

    /// Brute-force order-`m` integrand: weighted sum over positions of the
    /// full moment `<phi(x_1)..phi(x_n) phi(y_1)^p .. phi(y_m)^p>`.
    pub fn moment_sum_direct(
        &self,
        m: usize,
        req: &ExpansionRequest,
    ) -> Result<Scalar, EngineError> {
        self.validate(req, m)?;
        let mut total = Scalar::zero();
        let mut tuple = Vec::new();
        self.for_each_assignment(m, req, |ys, weight| {
            tuple.clear();
            tuple.extend_from_slice(&req.external_sites);
            for &y in ys {
                tuple.extend(std::iter::repeat_n(y, req.p));
            }
            total += weight * self.oracle().moment(&tuple)?;
            Ok(())
        })?;
        Ok(total)
    }

    /// Sum of graph values over the graphs of order `m` kept by the request
    /// filters, with the number of graphs kept.
    pub fn graph_sum(
        &self,
        m: usize,
        req: &ExpansionRequest,
    ) -> Result<(Scalar, u64), EngineError> {
        self.validate(req, m)?;
        let mut graphs =
            enumerate_graphs(req.n(), m, req.p, self.capacity)?.filter(|g| req.keeps(g));
        let mut total = Scalar::zero();
        let mut count = 0u64;
        loop {
            let chunk: Vec<FeynmanGraph> = graphs.by_ref().take(CHUNK).collect();
            if chunk.is_empty() {
                break;
            }
            count += chunk.len() as u64;
            let values: Vec<Scalar> = match &self.pool {
                Some(pool) => pool.install(|| {
                    chunk
                        .par_iter()
                        .map(|g| self.evaluate_unchecked(g, req))
                        .collect::<Result<_, _>>()
                })?,
                None => chunk
                    .iter()
                    .map(|g| self.evaluate_unchecked(g, req))
                    .collect::<Result<_, _>>()?,
            };
            for v in values {
                total += v;
            }
        }
        Ok((total, count))
    }

    fn check_capacity(&self, req: &ExpansionRequest) -> Result<(), EngineError> {
        self.capacity.check(req.required_order())?;
        self.validate(req, req.order)
    }

    fn assemble(
        &self,
        req: &ExpansionRequest,
        sums: Vec<Scalar>,
        counts: Vec<u64>,
    ) -> Result<SeriesResult, EngineError> {
        let coeffs = sums
            .into_iter()
            .enumerate()
            .map(|(m, s)| {
                let c = s / scalar::factorial(m);
                if m % 2 == 1 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        Ok(SeriesResult {
            order: req.order,
            series: FormalSeries::from_coeffs(coeffs)?,
            graph_counts: counts,
            filtered: req.filter_name().to_owned(),
            request: req.clone(),
        })
    }

    /// `sum_m (-lambda)^m / m! * sum_{G in F(n, m)} V(G)`, with the request
    /// filters applied to the graphs.
    pub fn perturbation_series(&self, req: &ExpansionRequest) -> Result<SeriesResult, EngineError> {
        self.check_capacity(req)?;
        let mut sums = Vec::with_capacity(req.order + 1);
        let mut counts = Vec::with_capacity(req.order + 1);
        for m in 0..=req.order {
            let (s, c) = self.graph_sum(m, req)?;
            sums.push(s);
            counts.push(c);
        }
        self.assemble(req, sums, counts)
    }

    /// The same series assembled from [`Engine::moment_sum_direct`], without
    /// graphs. Filters are ignored.
    pub fn direct_series(&self, req: &ExpansionRequest) -> Result<FormalSeries, EngineError> {
        self.validate(req, req.order)?;
        let sums = (0..=req.order)
            .map(|m| self.moment_sum_direct(m, req))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.assemble(req, sums, vec![0; req.order + 1])?.series)
    }

    /// Connected vacuum graphs only. Requires `n = 0`.
    pub fn free_energy_series(&self, req: &ExpansionRequest) -> Result<SeriesResult, EngineError> {
        if req.n() != 0 {
            return Err(EngineError::Request(
                "the free energy has no external points".into(),
            ));
        }
        let req = ExpansionRequest {
            connected_only: true,
            ..req.clone()
        };
        let mut result = self.perturbation_series(&req)?;
        // the empty graph is connected by convention, but ln 1 = 0
        result.series = {
            let mut c = result.series.coeffs().to_vec();
            c[0] = Scalar::zero();
            FormalSeries::from_coeffs(c)?
        };
        Ok(result)
    }

    /// `<V, ..., V>^T` with `m` copies of `V = sum_y w(y) phi(y)^p`, computed
    /// by two independent routes.
    pub fn truncated_composite_moment(
        &self,
        m: usize,
        req: &ExpansionRequest,
    ) -> Result<CompositeMoment, EngineError> {
        if m == 0 {
            return Err(EngineError::Request("need at least one copy of V".into()));
        }
        let vac = req.vacuum();
        self.capacity.check(vac.p * m)?;
        self.validate(&vac, m)?;

        let families = vertex_families(0, m, vac.p);
        let mut connected = Scalar::zero();
        for part in enumerate_connected_partitions(&families, self.capacity)? {
            let g = FeynmanGraph::alpha_inverse(part, 0, m, vac.p)?;
            connected += self.evaluate_unchecked(&g, &vac)?;
        }

        let moments = (0..=m)
            .map(|k| self.moment_sum_direct(k, &vac))
            .collect::<Result<Vec<_>, _>>()?;
        let recursion = cumulants_from_moments(&moments)?.pop().expect("m >= 1");

        Ok(CompositeMoment {
            via_connected_partitions: connected,
            via_recursion: recursion,
        })
    }

    /// Series of the moment `<phi(x_1)..phi(x_n)>` under the perturbed,
    /// normalized measure: numerator series times the inverse vacuum series.
    pub fn normalized_moment_series(
        &self,
        req: &ExpansionRequest,
    ) -> Result<SeriesResult, EngineError> {
        if req.n() == 0 {
            return Err(EngineError::Request(
                "normalized moments need external points".into(),
            ));
        }
        if req.connected_only {
            return Err(EngineError::Request(
                "normalized moments are built from unfiltered connectivity".into(),
            ));
        }
        let numerator = self.perturbation_series(req)?;
        let vacuum = self.perturbation_series(&req.vacuum())?;
        let series = numerator.series.mul(&vacuum.series.inverse()?)?;
        Ok(SeriesResult {
            series,
            ..numerator
        })
    }

    /// Order-`m` integrand with every interaction replaced by its Wick
    /// ordering `:phi(y)^p:`, from the explicit Wick expansion.
    pub fn wick_moment_sum_direct(
        &self,
        m: usize,
        req: &ExpansionRequest,
        wick: &Wick<'_, '_>,
    ) -> Result<Scalar, EngineError> {
        self.validate(req, m)?;
        let mut total = Scalar::zero();
        self.for_each_assignment(m, req, |ys, weight| {
            let families = ys
                .iter()
                .map(|&y| WickFamily::new(vec![y; req.p]))
                .collect::<Result<Vec<_>, _>>()?;
            total += weight * wick.wick_expectation_recursive(&families, &req.external_sites)?;
            Ok(())
        })?;
        Ok(total)
    }

    /// Series of the Wick-ordered interaction built without graphs.
    pub fn wick_direct_series(&self, req: &ExpansionRequest) -> Result<FormalSeries, EngineError> {
        self.validate(req, req.order)?;
        let wick = Wick::with_capacity(&self.cumulants, Capacity(usize::MAX));
        let sums = (0..=req.order)
            .map(|m| self.wick_moment_sum_direct(m, req, &wick))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.assemble(req, sums, vec![0; req.order + 1])?.series)
    }
}

fn interaction_energy(values: &[Scalar], req: &ExpansionRequest) -> f64 {
    let v: Scalar = req
        .volume
        .sites()
        .iter()
        .zip(req.volume.weights())
        .map(|(&y, w)| w * scalar::pow(&values[y], req.p))
        .sum();
    scalar::to_f64(&v)
}

/// `sum_i w_i exp(-lambda V(phi_i))` for a discrete measure, in binary64.
pub fn exact_partition_function(
    measure: &DiscreteMeasure,
    req: &ExpansionRequest,
    lambda: f64,
) -> f64 {
    measure
        .configs()
        .iter()
        .map(|(w, values)| scalar::to_f64(w) * (-lambda * interaction_energy(values, req)).exp())
        .sum()
}

/// Perturbed expectation of `phi(x_1)..phi(x_n)`, normalized by the
/// partition function, in binary64.
pub fn exact_normalized_moment(
    measure: &DiscreteMeasure,
    req: &ExpansionRequest,
    lambda: f64,
) -> f64 {
    let numerator: f64 = measure
        .configs()
        .iter()
        .map(|(w, values)| {
            let obs: Scalar = req.external_sites.iter().map(|&x| &values[x]).product();
            scalar::to_f64(&(w * obs)) * (-lambda * interaction_energy(values, req)).exp()
        })
        .sum();
    numerator / exact_partition_function(measure, req, lambda)
}
