//! Identity suites run by `feyn verify`. Each suite compares two routes to
//! the same quantity and stops at the first disagreement.

use clap::ValueEnum;
use num_traits::{Signed, Zero};

use crate::expansion_engine::{
    exact_partition_function, Engine, EngineError, ExpansionRequest, VolumeSpec,
};
use crate::moment_oracles::{composite_truncated_moment, Measure, SiteIndex};
use crate::partitions::Capacity;
use crate::scalar::{self, Scalar};
use crate::wick_ordering::{Wick, WickFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Graph sums against direct moment sums.
    GraphSum,
    /// Connected vacuum graphs against the logarithm of the vacuum series.
    LinkedCluster,
    /// Wick expectations by partitions against explicit expansion.
    Wick,
    /// Truncated moments of the interaction by two routes.
    Composite,
    /// Taylor remainder scaling of the vacuum series.
    Remainder,
}

impl Suite {
    pub fn all() -> &'static [Suite] {
        &[
            Suite::GraphSum,
            Suite::LinkedCluster,
            Suite::Wick,
            Suite::Composite,
            Suite::Remainder,
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::GraphSum => "graph-sum",
            Suite::LinkedCluster => "linked-cluster",
            Suite::Wick => "wick",
            Suite::Composite => "composite",
            Suite::Remainder => "remainder",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Only this interaction degree, if set.
    pub p: Option<usize>,
    /// Only this order, if set.
    pub order: Option<usize>,
    pub jobs: usize,
    pub capacity: Capacity,
    pub volume: VolumeSpec,
}

impl VerifyOptions {
    pub fn new(volume: VolumeSpec) -> Self {
        VerifyOptions {
            p: None,
            order: None,
            jobs: 1,
            capacity: Capacity::default(),
            volume,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutcome {
    pub checks: usize,
    /// One line per compared case.
    pub details: Vec<String>,
    /// First counterexample, if any.
    pub failure: Option<String>,
    /// Why nothing was checked.
    pub skipped: Option<String>,
}

impl SuiteOutcome {
    fn check(&mut self, ok: bool, line: String) -> bool {
        self.checks += 1;
        if !ok {
            self.failure = Some(line.clone());
        }
        self.details.push(line);
        ok
    }

    fn finish(mut self, what: &str) -> Self {
        if self.checks == 0 && self.failure.is_none() {
            self.skipped = Some(format!("no {what} within capacity and oracle order"));
        }
        self
    }
}

const WICK_POINTS: usize = 6;
const BRIDGE_LEGS: usize = 8;

pub fn run_suite(
    suite: Suite,
    measure: &Measure,
    opts: &VerifyOptions,
) -> Result<SuiteOutcome, EngineError> {
    let engine = Engine::new(measure.oracle())
        .with_capacity(opts.capacity)
        .with_jobs(opts.jobs)?;
    let ctx = Ctx {
        engine,
        measure,
        opts,
    };
    match suite {
        Suite::GraphSum => ctx.graph_sum(),
        Suite::LinkedCluster => ctx.linked_cluster(),
        Suite::Wick => ctx.wick(),
        Suite::Composite => ctx.composite(),
        Suite::Remainder => ctx.remainder(),
    }
}

struct Ctx<'a> {
    engine: Engine<'a>,
    measure: &'a Measure,
    opts: &'a VerifyOptions,
}

impl Ctx<'_> {
    fn sites(&self) -> usize {
        self.measure.oracle().num_sites()
    }

    fn fits(&self, legs: usize) -> bool {
        legs <= self.opts.capacity.0 && legs <= self.measure.oracle().max_order()
    }

    fn degrees(&self, default: &[usize]) -> Vec<usize> {
        self.opts.p.map_or_else(|| default.to_vec(), |p| vec![p])
    }

    fn request(&self, n: usize, p: usize, order: usize) -> ExpansionRequest {
        let external = (0..n).map(|i| i % self.sites()).collect();
        ExpansionRequest::new(external, p, order, self.opts.volume.clone())
    }

    fn graph_sum(&self) -> Result<SuiteOutcome, EngineError> {
        let mut out = SuiteOutcome::default();
        for p in self.degrees(&[2, 3, 4]) {
            for n in 0..=2 {
                for m in 0..=2 {
                    if self.opts.order.is_some_and(|o| o != m)
                        || n + p * m > 8
                        || !self.fits(n + p * m)
                    {
                        continue;
                    }
                    let req = self.request(n, p, m);
                    let (graphs, count) = self.engine.graph_sum(m, &req)?;
                    let direct = self.engine.moment_sum_direct(m, &req)?;
                    let line = format!(
                        "n={n} m={m} p={p}: {count} graphs sum to {}, direct {}",
                        scalar::format(&graphs),
                        scalar::format(&direct)
                    );
                    if !out.check(graphs == direct, line) {
                        return Ok(out);
                    }
                }
            }
        }
        Ok(out.finish("cases"))
    }

    fn linked_cluster(&self) -> Result<SuiteOutcome, EngineError> {
        let cases = match (self.opts.p, self.opts.order) {
            (Some(p), Some(n)) => vec![(p, n)],
            (Some(p), None) => vec![(p, if p <= 3 { 3 } else { 2 })],
            (None, Some(n)) => vec![(4, n), (2, n), (3, n)],
            (None, None) => vec![(4, 2), (2, 3), (3, 3)],
        };
        let mut out = SuiteOutcome::default();
        for (p, order) in cases {
            if !self.fits(p * order) {
                continue;
            }
            let req = self.request(0, p, order);
            let linked = self.engine.free_energy_series(&req)?.series;
            let log = self.engine.perturbation_series(&req)?.series.log()?;
            for k in 0..=order {
                let line = format!(
                    "p={p} c{k}: connected {} vs log {}",
                    scalar::format(linked.coeff(k)),
                    scalar::format(log.coeff(k))
                );
                if !out.check(linked.coeff(k) == log.coeff(k), line) {
                    return Ok(out);
                }
            }
        }
        Ok(out.finish("cases"))
    }

    fn wick(&self) -> Result<SuiteOutcome, EngineError> {
        let mut out = SuiteOutcome::default();
        let cumulants = self.engine.cumulants();
        let wick = Wick::with_capacity(cumulants, self.opts.capacity);
        let k = self.sites();
        let patterns: [fn(usize, usize) -> usize; 3] = [|_, o| o, |i, o| i + o, |i, o| i / 2 + o];

        for total in 1..=WICK_POINTS {
            for sizes in integer_partitions(total) {
                for e in 0..=WICK_POINTS - total {
                    if !self.fits(total + e) {
                        continue;
                    }
                    for pattern in patterns {
                        for offset in 0..k {
                            let site = |i: usize| pattern(i, offset) % k;
                            let mut next = 0;
                            let mut families = Vec::new();
                            for &s in &sizes {
                                families
                                    .push(WickFamily::new((next..next + s).map(site).collect())?);
                                next += s;
                            }
                            let external: Vec<SiteIndex> = (next..next + e).map(site).collect();
                            let sc = wick.wick_expectation_sc(&families, &external)?;
                            let rec = wick.wick_expectation_recursive(&families, &external)?;
                            let line = format!(
                                "families {:?} external {external:?}: partitions {}, expansion {}",
                                families.iter().map(WickFamily::points).collect::<Vec<_>>(),
                                scalar::format(&sc),
                                scalar::format(&rec)
                            );
                            if !out.check(sc == rec, line) {
                                return Ok(out);
                            }
                            if sizes.len() == 1 && e > 0 {
                                let mut vars: Vec<Vec<SiteIndex>> =
                                    families[0].points().iter().map(|&s| vec![s]).collect();
                                vars.push(external.clone());
                                let truncated =
                                    composite_truncated_moment(cumulants.oracle(), &vars)?;
                                let line = format!(
                                    "family {:?} with product {external:?}: {} vs truncated {}",
                                    families[0].points(),
                                    scalar::format(&sc),
                                    scalar::format(&truncated)
                                );
                                if !out.check(sc == truncated, line) {
                                    return Ok(out);
                                }
                            }
                        }
                    }
                }
            }
        }

        for p in self.degrees(&[2, 3, 4]) {
            for n in 0..=2 {
                if n + p > BRIDGE_LEGS {
                    continue;
                }
                let order = self.opts.order.unwrap_or((BRIDGE_LEGS - n) / p);
                if order == 0 || !self.fits(n + p * order) {
                    continue;
                }
                let mut req = self.request(n, p, order);
                req.wick_ordered = true;
                let graphs = self.engine.perturbation_series(&req)?.series;
                let direct = self.engine.wick_direct_series(&req)?;
                let line =
                    format!("wick series n={n} p={p} N={order}: graphs {graphs}, direct {direct}");
                if !out.check(graphs == direct, line) {
                    return Ok(out);
                }
            }
        }
        Ok(out.finish("cases"))
    }

    fn composite(&self) -> Result<SuiteOutcome, EngineError> {
        let mut out = SuiteOutcome::default();
        for p in self.degrees(&[1, 2, 3]) {
            for m in 1..=3 {
                if self.opts.order.is_some_and(|o| o != m) || !self.fits(p * m) {
                    continue;
                }
                let req = self.request(0, p, m);
                let c = self.engine.truncated_composite_moment(m, &req)?;
                let line = format!(
                    "m={m} p={p}: connected partitions {}, recursion {}",
                    scalar::format(&c.via_connected_partitions),
                    scalar::format(&c.via_recursion)
                );
                if !out.check(c.via_connected_partitions == c.via_recursion, line) {
                    return Ok(out);
                }
            }
        }
        Ok(out.finish("cases"))
    }

    fn remainder(&self) -> Result<SuiteOutcome, EngineError> {
        let mut out = SuiteOutcome::default();
        let Some(discrete) = self.measure.as_discrete() else {
            out.skipped = Some("needs a discrete measure".into());
            return Ok(out);
        };
        let p = self.opts.p.unwrap_or(4);
        let orders = self.opts.order.map_or_else(|| vec![1, 2], |n| vec![n]);
        for order in orders {
            let req = self.request(0, p, order + 4);
            let series = self.engine.direct_series(&req)?;
            let Some(e) = (order + 1..=order + 4).find(|&k| !series.coeff(k).is_zero()) else {
                out.skipped = Some(format!("series vanishes past order {order}"));
                continue;
            };
            let scale = interaction_scale(discrete.configs(), &req);
            let partial = |lambda: f64| -> f64 {
                (0..=order)
                    .rev()
                    .fold(0.0, |acc, k| acc * lambda + scalar::to_f64(series.coeff(k)))
            };
            let remainder = |lambda: f64| {
                (exact_partition_function(discrete, &req, lambda) - partial(lambda)).abs()
            };
            let expected = 2f64.powi(e as i32);
            for lambda in [0.25, 0.125, 0.0625] {
                let lambda = lambda / scale;
                let ratio = remainder(lambda) / remainder(lambda / 2.0);
                let (lo, hi) = (0.8 * expected, 1.25 * expected);
                let line = format!(
                    "p={p} N={order} lambda={lambda}: R(lambda)/R(lambda/2) = {ratio:.4}, expected {expected} in [{lo}, {hi}]"
                );
                if !out.check((lo..=hi).contains(&ratio), line) {
                    return Ok(out);
                }
            }
        }
        Ok(out.finish("orders"))
    }
}

/// Largest `|V|` over the configurations of a discrete measure, at least 1.
fn interaction_scale(configs: &[(Scalar, Vec<Scalar>)], req: &ExpansionRequest) -> f64 {
    configs
        .iter()
        .map(|(_, values)| {
            let v: Scalar = req
                .volume
                .sites()
                .iter()
                .zip(req.volume.weights())
                .map(|(&y, w)| w * scalar::pow(&values[y], req.p))
                .sum();
            scalar::to_f64(&v.abs())
        })
        .fold(1.0, f64::max)
}

/// Non-increasing lists of positive integers summing to `n`.
fn integer_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for k in (1..=rest.min(max)).rev() {
            cur.push(k);
            go(rest - k, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment_oracles::DiscreteMeasure;

    #[test]
    fn integer_partition_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| integer_partitions(n).len()).collect();
        assert_eq!(counts, [1, 2, 3, 5, 7, 11]);
        assert_eq!(
            integer_partitions(3),
            vec![vec![3], vec![2, 1], vec![1, 1, 1]]
        );
    }

    #[test]
    fn spin_suites_pass() {
        let measure = Measure::Discrete(DiscreteMeasure::symmetric_spin());
        let opts = VerifyOptions::new(VolumeSpec::uniform(vec![0]).unwrap());
        for &suite in Suite::all() {
            let out = run_suite(suite, &measure, &opts).unwrap();
            assert!(out.failure.is_none(), "{}: {:?}", suite.name(), out.failure);
            assert!(out.checks > 0, "{}", suite.name());
        }
    }
}
