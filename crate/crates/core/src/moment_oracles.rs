//! Moments and truncated moments (cumulants) of a base measure over a finite
//! set of sites.
//!
//! A [`MomentOracle`] only has to produce ordinary moments. Truncated moments
//! are recovered by [`Cumulants`], which solves the partition recursion
//!
//! ```text
//! m(S) = sum over partitions {B1..Bk} of S of  k(B1) * ... * k(Bk)
//! ```
//!
//! for `k(S)` and memoizes the result per sorted multiset of sites.

use std::collections::HashMap;
use std::sync::{Mutex, RwLock};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::partitions::{
    enumerate_pair_partitions, enumerate_partitions, Capacity, PartitionError,
};
use crate::scalar::{self, Scalar};

/// Index into the site list of the active measure. External points and
/// integration points share this index space.
pub type SiteIndex = usize;

/// Highest tuple length a [`GaussianOracle`] serves unless told otherwise.
pub const DEFAULT_GAUSSIAN_ORDER: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("moment of order {requested} requested but the measure supports at most {max}")]
    Capability { requested: usize, max: usize },
    #[error("site {site} out of range for a measure on {sites} sites")]
    SiteOutOfRange { site: SiteIndex, sites: usize },
    #[error("truncated moments need at least one argument")]
    EmptyTuple,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Source of moments `<phi(z1) ... phi(zq)>` of a normalized measure.
///
/// Implementations must be symmetric in their arguments and return 1 for
/// the empty tuple.
pub trait MomentOracle: Send + Sync {
    fn num_sites(&self) -> usize;

    /// Largest tuple length [`MomentOracle::moment`] accepts.
    fn max_order(&self) -> usize;

    fn moment(&self, sites: &[SiteIndex]) -> Result<Scalar, OracleError>;

    fn check(&self, sites: &[SiteIndex]) -> Result<(), OracleError> {
        if sites.len() > self.max_order() {
            return Err(OracleError::Capability {
                requested: sites.len(),
                max: self.max_order(),
            });
        }
        let n = self.num_sites();
        match sites.iter().find(|&&s| s >= n) {
            Some(&site) => Err(OracleError::SiteOutOfRange { site, sites: n }),
            None => Ok(()),
        }
    }
}

/// A measure with finitely many field configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    sites: usize,
    configs: Vec<(Scalar, Vec<Scalar>)>,
}

impl DiscreteMeasure {
    /// `configs` holds `(weight, field value per site)`. Weights must be
    /// positive and sum to exactly 1.
    pub fn new(sites: usize, configs: Vec<(Scalar, Vec<Scalar>)>) -> Result<Self, OracleError> {
        let bad = |msg: &str| Err(OracleError::InvalidMeasure(msg.to_owned()));
        if configs.is_empty() {
            return bad("at least one configuration is required");
        }
        if configs.iter().any(|(w, _)| !w.is_positive()) {
            return bad("configuration weights must be positive");
        }
        if configs.iter().any(|(_, v)| v.len() != sites) {
            return bad("every configuration needs one value per site");
        }
        let total: Scalar = configs.iter().map(|(w, _)| w).sum();
        if !total.is_one() {
            return bad("configuration weights must sum to 1");
        }
        Ok(DiscreteMeasure { sites, configs })
    }

    /// Symmetric +-1 spin on a single site.
    pub fn symmetric_spin() -> Self {
        let half = scalar::ratio(1, 2);
        DiscreteMeasure::new(
            1,
            vec![
                (half.clone(), vec![scalar::from_i64(1)]),
                (half, vec![scalar::from_i64(-1)]),
            ],
        )
        .expect("valid measure")
    }

    pub fn configs(&self) -> &[(Scalar, Vec<Scalar>)] {
        &self.configs
    }
}

impl MomentOracle for DiscreteMeasure {
    fn num_sites(&self) -> usize {
        self.sites
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn moment(&self, sites: &[SiteIndex]) -> Result<Scalar, OracleError> {
        self.check(sites)?;
        Ok(self
            .configs
            .iter()
            .map(|(w, values)| sites.iter().fold(w.clone(), |acc, &s| acc * &values[s]))
            .sum())
    }
}

/// Centered Gaussian measure given by its covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianOracle {
    covariance: Vec<Vec<Scalar>>,
    max_order: usize,
}

impl GaussianOracle {
    pub fn new(covariance: Vec<Vec<Scalar>>) -> Result<Self, OracleError> {
        let k = covariance.len();
        if k == 0 {
            return Err(OracleError::InvalidMeasure("covariance is empty".into()));
        }
        if covariance.iter().any(|row| row.len() != k) {
            return Err(OracleError::InvalidMeasure(
                "covariance must be square".into(),
            ));
        }
        for (i, row) in covariance.iter().enumerate() {
            for (j, entry) in row.iter().enumerate().take(i) {
                if *entry != covariance[j][i] {
                    return Err(OracleError::InvalidMeasure(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(GaussianOracle {
            covariance,
            max_order: DEFAULT_GAUSSIAN_ORDER,
        })
    }

    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn covariance(&self, u: SiteIndex, v: SiteIndex) -> &Scalar {
        &self.covariance[u][v]
    }
}

impl MomentOracle for GaussianOracle {
    fn num_sites(&self) -> usize {
        self.covariance.len()
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    /// Sum over pairings of the arguments of the product of covariances.
    fn moment(&self, sites: &[SiteIndex]) -> Result<Scalar, OracleError> {
        self.check(sites)?;
        let positions: Vec<usize> = (0..sites.len()).collect();
        let pairings = enumerate_pair_partitions(&positions, Capacity(self.max_order))?;
        Ok(pairings
            .map(|p| {
                p.blocks().iter().fold(Scalar::one(), |acc, b| {
                    acc * &self.covariance[sites[b[0]]][sites[b[1]]]
                })
            })
            .sum())
    }
}

/// Independent, identically distributed sites with prescribed cumulants
/// `k_1..k_Q`. Truncated moments spanning two different sites vanish.
#[derive(Debug)]
pub struct IidCumulantOracle {
    sites: usize,
    cumulants: Vec<Scalar>,
    memo: Mutex<HashMap<Vec<SiteIndex>, Scalar>>,
}

impl IidCumulantOracle {
    /// `cumulants[k - 1]` is the order-`k` cumulant.
    pub fn new(sites: usize, cumulants: Vec<Scalar>) -> Result<Self, OracleError> {
        if sites == 0 {
            return Err(OracleError::InvalidMeasure(
                "at least one site is required".into(),
            ));
        }
        Ok(IidCumulantOracle {
            sites,
            cumulants,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn cumulants(&self) -> &[Scalar] {
        &self.cumulants
    }

    fn cumulant_of(&self, block: &[SiteIndex]) -> Scalar {
        if block.iter().all(|&s| s == block[0]) {
            self.cumulants[block.len() - 1].clone()
        } else {
            Scalar::zero()
        }
    }
}

impl Clone for IidCumulantOracle {
    fn clone(&self) -> Self {
        IidCumulantOracle {
            sites: self.sites,
            cumulants: self.cumulants.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl MomentOracle for IidCumulantOracle {
    fn num_sites(&self) -> usize {
        self.sites
    }

    fn max_order(&self) -> usize {
        self.cumulants.len()
    }

    fn moment(&self, sites: &[SiteIndex]) -> Result<Scalar, OracleError> {
        self.check(sites)?;
        let mut key = sites.to_vec();
        key.sort_unstable();
        if let Some(v) = self.memo.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let value =
            enumerate_partitions(&(0..key.len()).collect::<Vec<_>>(), Capacity(usize::MAX))?
                .map(|p| {
                    p.blocks().iter().fold(Scalar::one(), |acc, b| {
                        let block: Vec<_> = b.iter().map(|&i| key[i]).collect();
                        acc * self.cumulant_of(&block)
                    })
                })
                .sum::<Scalar>();
        self.memo.lock().unwrap().insert(key, value.clone());
        Ok(value)
    }
}

/// Measure file contents. All scalars are exact-rational strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    Discrete {
        sites: usize,
        configs: Vec<ConfigEntry>,
    },
    Gaussian {
        covariance: Vec<Vec<String>>,
    },
    IidCumulant {
        sites: usize,
        cumulants: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEntry {
    pub weight: String,
    pub values: Vec<String>,
}

/// One of the bundled oracle kinds, built from a [`MeasureConfig`].
#[derive(Debug, Clone)]
pub enum Measure {
    Discrete(DiscreteMeasure),
    Gaussian(GaussianOracle),
    IidCumulant(IidCumulantOracle),
}

fn parse_all(texts: &[String]) -> Result<Vec<Scalar>, OracleError> {
    texts
        .iter()
        .map(|t| scalar::parse(t).map_err(|e| OracleError::InvalidMeasure(e.to_string())))
        .collect()
}

impl Measure {
    pub fn from_config(config: &MeasureConfig) -> Result<Self, OracleError> {
        match config {
            MeasureConfig::Discrete { sites, configs } => {
                let configs = configs
                    .iter()
                    .map(|c| {
                        let w = scalar::parse(&c.weight)
                            .map_err(|e| OracleError::InvalidMeasure(e.to_string()))?;
                        Ok((w, parse_all(&c.values)?))
                    })
                    .collect::<Result<Vec<_>, OracleError>>()?;
                Ok(Measure::Discrete(DiscreteMeasure::new(*sites, configs)?))
            }
            MeasureConfig::Gaussian { covariance } => {
                let rows = covariance
                    .iter()
                    .map(|r| parse_all(r))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Measure::Gaussian(GaussianOracle::new(rows)?))
            }
            MeasureConfig::IidCumulant { sites, cumulants } => Ok(Measure::IidCumulant(
                IidCumulantOracle::new(*sites, parse_all(cumulants)?)?,
            )),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, OracleError> {
        let config: MeasureConfig =
            serde_json::from_str(text).map_err(|e| OracleError::InvalidMeasure(e.to_string()))?;
        Self::from_config(&config)
    }

    pub fn oracle(&self) -> &dyn MomentOracle {
        match self {
            Measure::Discrete(m) => m,
            Measure::Gaussian(m) => m,
            Measure::IidCumulant(m) => m,
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteMeasure> {
        match self {
            Measure::Discrete(m) => Some(m),
            _ => None,
        }
    }
}

fn sorted(sites: &[SiteIndex]) -> Vec<SiteIndex> {
    let mut key = sites.to_vec();
    key.sort_unstable();
    key
}

fn sub_multiset(key: &[SiteIndex], positions: &[usize]) -> Vec<SiteIndex> {
    // positions are increasing and key is sorted, so the result is sorted
    positions.iter().map(|&i| key[i]).collect()
}

/// Memoized truncated moments of an oracle.
///
/// The memo is shared behind a lock, so one table can serve several worker
/// threads; values are pure functions of the key, so results do not depend
/// on which thread filled an entry.
pub struct Cumulants<'o> {
    oracle: &'o dyn MomentOracle,
    memo: RwLock<HashMap<Vec<SiteIndex>, Scalar>>,
}

impl<'o> Cumulants<'o> {
    pub fn new(oracle: &'o dyn MomentOracle) -> Self {
        Cumulants {
            oracle,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn oracle(&self) -> &'o dyn MomentOracle {
        self.oracle
    }

    pub fn moment(&self, sites: &[SiteIndex]) -> Result<Scalar, OracleError> {
        self.oracle.moment(sites)
    }

    /// Truncated moment `<phi(z1), ..., phi(zq)>^T`, solved from the partition
    /// recursion.
    pub fn truncated_moment(&self, sites: &[SiteIndex]) -> Result<Scalar, OracleError> {
        if sites.is_empty() {
            return Err(OracleError::EmptyTuple);
        }
        self.oracle.check(sites)?;
        self.truncated_sorted(&sorted(sites))
    }

    fn truncated_sorted(&self, key: &[SiteIndex]) -> Result<Scalar, OracleError> {
        if let Some(v) = self.memo.read().unwrap().get(key) {
            return Ok(v.clone());
        }
        let mut value = self.oracle.moment(key)?;
        let positions: Vec<usize> = (0..key.len()).collect();
        for p in enumerate_partitions(&positions, Capacity(usize::MAX))? {
            if p.num_blocks() < 2 {
                continue;
            }
            let mut term = Scalar::one();
            for b in p.blocks() {
                term *= self.truncated_sorted(&sub_multiset(key, b))?;
                if term.is_zero() {
                    break;
                }
            }
            value -= term;
        }
        self.memo
            .write()
            .unwrap()
            .insert(key.to_vec(), value.clone());
        Ok(value)
    }

    /// Moment rebuilt from truncated moments: the sum over all partitions of
    /// the products of truncated moments of the blocks.
    pub fn moment_from_truncated(&self, sites: &[SiteIndex]) -> Result<Scalar, OracleError> {
        self.oracle.check(sites)?;
        let key = sorted(sites);
        let positions: Vec<usize> = (0..key.len()).collect();
        let mut total = Scalar::zero();
        for p in enumerate_partitions(&positions, Capacity(usize::MAX))? {
            let mut term = Scalar::one();
            for b in p.blocks() {
                term *= self.truncated_sorted(&sub_multiset(&key, b))?;
            }
            total += term;
        }
        Ok(total)
    }

    /// Truncated moment by Moebius inversion on the partition lattice:
    /// `sum_I (-1)^(k-1) (k-1)! prod_blocks m(block)`. Uses only ordinary
    /// moments and never touches the memo.
    pub fn truncated_moment_mobius(&self, sites: &[SiteIndex]) -> Result<Scalar, OracleError> {
        if sites.is_empty() {
            return Err(OracleError::EmptyTuple);
        }
        self.oracle.check(sites)?;
        let positions: Vec<usize> = (0..sites.len()).collect();
        let mut total = Scalar::zero();
        for p in enumerate_partitions(&positions, Capacity(usize::MAX))? {
            let k = p.num_blocks();
            let mut term = scalar::factorial(k - 1);
            if k % 2 == 0 {
                term = -term;
            }
            for b in p.blocks() {
                let block: Vec<_> = b.iter().map(|&i| sites[i]).collect();
                term *= self.oracle.moment(&block)?;
            }
            total += term;
        }
        Ok(total)
    }
}

/// Truncated moment of `n` (possibly composite) random variables, given the
/// joint moment of any subcollection. `joint_moment` receives increasing
/// variable indices. Solves the partition recursion with a memo over subsets.
pub fn truncate_by_recursion<F>(n: usize, mut joint_moment: F) -> Result<Scalar, OracleError>
where
    F: FnMut(&[usize]) -> Result<Scalar, OracleError>,
{
    assert!(n < 64, "at most 63 variables");
    if n == 0 {
        return Err(OracleError::EmptyTuple);
    }
    let mut memo: HashMap<u64, Scalar> = HashMap::new();
    truncate_subset(&(0..n).collect::<Vec<_>>(), &mut joint_moment, &mut memo)
}

fn truncate_subset<F>(
    vars: &[usize],
    joint_moment: &mut F,
    memo: &mut HashMap<u64, Scalar>,
) -> Result<Scalar, OracleError>
where
    F: FnMut(&[usize]) -> Result<Scalar, OracleError>,
{
    let mask = vars.iter().fold(0u64, |m, &v| m | (1 << v));
    if let Some(v) = memo.get(&mask) {
        return Ok(v.clone());
    }
    let mut value = joint_moment(vars)?;
    for p in enumerate_partitions(vars, Capacity(usize::MAX))? {
        if p.num_blocks() < 2 {
            continue;
        }
        let mut term = Scalar::one();
        for b in p.blocks() {
            term *= truncate_subset(b, joint_moment, memo)?;
        }
        value -= term;
    }
    memo.insert(mask, value.clone());
    Ok(value)
}

/// Truncated moment of composite variables `Y_i = prod_{s in variables[i]} phi(s)`.
pub fn composite_truncated_moment(
    oracle: &dyn MomentOracle,
    variables: &[Vec<SiteIndex>],
) -> Result<Scalar, OracleError> {
    truncate_by_recursion(variables.len(), |idx| {
        let sites: Vec<_> = idx
            .iter()
            .flat_map(|&i| variables[i].iter().copied())
            .collect();
        oracle.moment(&sites)
    })
}

/// Cumulants `k_1..k_N` of a single random variable from its moments
/// `moments[0] = 1, moments[1], ..., moments[N]`.
pub fn cumulants_from_moments(moments: &[Scalar]) -> Result<Vec<Scalar>, OracleError> {
    (1..moments.len())
        .map(|order| truncate_by_recursion(order, |idx| Ok(moments[idx.len()].clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{from_i64, ratio};

    fn gaussian_identity(k: usize) -> GaussianOracle {
        let cov = (0..k)
            .map(|i| (0..k).map(|j| from_i64((i == j) as i64)).collect())
            .collect();
        GaussianOracle::new(cov).unwrap()
    }

    #[test]
    fn spin_moments_and_cumulants() {
        let spin = DiscreteMeasure::symmetric_spin();
        assert_eq!(spin.moment(&[0, 0, 0]).unwrap(), from_i64(0));
        assert_eq!(spin.moment(&[]).unwrap(), from_i64(1));
        let c = Cumulants::new(&spin);
        assert_eq!(c.truncated_moment(&[0, 0]).unwrap(), from_i64(1));
        assert_eq!(c.truncated_moment(&[0, 0, 0, 0]).unwrap(), from_i64(-2));
        assert_eq!(
            c.truncated_moment_mobius(&[0, 0, 0, 0]).unwrap(),
            from_i64(-2)
        );
    }

    #[test]
    fn single_site_cumulant_is_the_mean() {
        let m = DiscreteMeasure::new(
            1,
            vec![
                (ratio(1, 3), vec![from_i64(2)]),
                (ratio(2, 3), vec![from_i64(5)]),
            ],
        )
        .unwrap();
        let c = Cumulants::new(&m);
        assert_eq!(c.truncated_moment(&[0]).unwrap(), from_i64(4));
        assert_eq!(c.moment_from_truncated(&[0]).unwrap(), from_i64(4));
    }

    #[test]
    fn mobius_two_points() {
        let m = DiscreteMeasure::new(
            2,
            vec![
                (ratio(1, 4), vec![from_i64(1), from_i64(3)]),
                (ratio(3, 4), vec![from_i64(-1), from_i64(1)]),
            ],
        )
        .unwrap();
        let c = Cumulants::new(&m);
        let direct = m.moment(&[0, 1]).unwrap() - m.moment(&[0]).unwrap() * m.moment(&[1]).unwrap();
        assert_eq!(c.truncated_moment_mobius(&[0, 1]).unwrap(), direct);
        assert_eq!(c.truncated_moment(&[1, 0]).unwrap(), direct);
    }

    #[test]
    fn gaussian_truncation() {
        let cov = vec![
            vec![from_i64(2), ratio(1, 2)],
            vec![ratio(1, 2), from_i64(1)],
        ];
        let g = GaussianOracle::new(cov).unwrap();
        let c = Cumulants::new(&g);
        assert_eq!(c.truncated_moment(&[0, 1]).unwrap(), ratio(1, 2));
        assert_eq!(c.truncated_moment(&[0, 0]).unwrap(), from_i64(2));
        for tuple in [&[0][..], &[0, 1, 1], &[0, 0, 1, 1], &[1, 0, 1, 0, 1]] {
            assert!(c.truncated_moment(tuple).unwrap().is_zero(), "{tuple:?}");
        }
    }

    #[test]
    fn gaussian_fourth_moment() {
        let g = gaussian_identity(1);
        assert_eq!(g.moment(&[0, 0, 0, 0]).unwrap(), from_i64(3));
        let cov = vec![
            vec![from_i64(1), from_i64(2)],
            vec![from_i64(2), from_i64(3)],
        ];
        let g = GaussianOracle::new(cov).unwrap();
        // G00 G11 + 2 G01^2 for <phi0 phi0 phi1 phi1>
        assert_eq!(g.moment(&[0, 0, 1, 1]).unwrap(), from_i64(3 + 2 * 4));
    }

    #[test]
    fn asymmetric_covariance_rejected() {
        let cov = vec![
            vec![from_i64(1), from_i64(2)],
            vec![from_i64(0), from_i64(1)],
        ];
        assert!(matches!(
            GaussianOracle::new(cov),
            Err(OracleError::InvalidMeasure(_))
        ));
    }

    #[test]
    fn iid_moments() {
        let iid =
            IidCumulantOracle::new(1, vec![from_i64(0), from_i64(1), from_i64(6), from_i64(0)])
                .unwrap();
        assert_eq!(iid.moment(&[0, 0, 0]).unwrap(), from_i64(6));
        assert_eq!(iid.moment(&[0, 0]).unwrap(), from_i64(1));
        assert_eq!(iid.moment(&[0, 0, 0, 0]).unwrap(), from_i64(3));
        assert_eq!(
            iid.moment(&[0; 5]),
            Err(OracleError::Capability {
                requested: 5,
                max: 4
            })
        );
    }

    #[test]
    fn iid_sites_are_independent() {
        let iid = IidCumulantOracle::new(2, vec![from_i64(1), from_i64(2), from_i64(3)]).unwrap();
        let c = Cumulants::new(&iid);
        assert!(c.truncated_moment(&[0, 1]).unwrap().is_zero());
        assert!(c.truncated_moment(&[0, 1, 1]).unwrap().is_zero());
        assert_eq!(c.truncated_moment(&[1, 1, 1]).unwrap(), from_i64(3));
        // m(0,1) = m(0) m(1)
        assert_eq!(iid.moment(&[0, 1]).unwrap(), from_i64(1));
    }

    #[test]
    fn errors() {
        let spin = DiscreteMeasure::symmetric_spin();
        let c = Cumulants::new(&spin);
        assert_eq!(c.truncated_moment(&[]), Err(OracleError::EmptyTuple));
        assert_eq!(
            c.truncated_moment(&[1]),
            Err(OracleError::SiteOutOfRange { site: 1, sites: 1 })
        );
        let g = gaussian_identity(1).with_max_order(4);
        assert!(matches!(
            Cumulants::new(&g).truncated_moment(&[0; 6]),
            Err(OracleError::Capability {
                requested: 6,
                max: 4
            })
        ));
    }

    #[test]
    fn discrete_validation() {
        assert!(DiscreteMeasure::new(1, vec![]).is_err());
        assert!(DiscreteMeasure::new(1, vec![(ratio(1, 2), vec![from_i64(1)])]).is_err());
        assert!(DiscreteMeasure::new(
            1,
            vec![
                (from_i64(2), vec![from_i64(1)]),
                (from_i64(-1), vec![from_i64(1)])
            ]
        )
        .is_err());
        assert!(DiscreteMeasure::new(2, vec![(from_i64(1), vec![from_i64(1)])]).is_err());
    }

    #[test]
    fn config_parsing() {
        let m = Measure::from_json(
            r#"{"type":"discrete","sites":1,"configs":[{"weight":"1/2","values":["1"]},{"weight":"1/2","values":["-1"]}]}"#,
        )
        .unwrap();
        assert_eq!(m.oracle().moment(&[0, 0]).unwrap(), from_i64(1));
        let g = Measure::from_json(r#"{"type":"gaussian","covariance":[["1","0"],["0","2"]]}"#)
            .unwrap();
        assert_eq!(g.oracle().moment(&[1, 1]).unwrap(), from_i64(2));
        let i =
            Measure::from_json(r#"{"type":"iid_cumulant","sites":1,"cumulants":["0","1","6"]}"#)
                .unwrap();
        assert_eq!(i.oracle().moment(&[0, 0, 0]).unwrap(), from_i64(6));
        assert!(
            Measure::from_json(r#"{"type":"gaussian","covariance":[["1","2"],["0","1"]]}"#)
                .is_err()
        );
        assert!(Measure::from_json(r#"{"type":"gaussian","covariance":[["x"]]}"#).is_err());
        assert!(Measure::from_json(r#"{"type":"poisson"}"#).is_err());
    }

    #[test]
    fn univariate_cumulants() {
        // moments of the +-1 spin: 1, 0, 1, 0, 1
        let ms: Vec<_> = [1, 0, 1, 0, 1].iter().map(|&v| from_i64(v)).collect();
        let ks = cumulants_from_moments(&ms).unwrap();
        assert_eq!(ks, [0, 1, 0, -2].map(from_i64));
    }

    #[test]
    fn composite_of_singletons_is_ordinary() {
        let m = DiscreteMeasure::new(
            2,
            vec![
                (ratio(1, 3), vec![from_i64(1), from_i64(2)]),
                (ratio(2, 3), vec![from_i64(-1), ratio(1, 2)]),
            ],
        )
        .unwrap();
        let c = Cumulants::new(&m);
        let vars = vec![vec![0], vec![1], vec![1]];
        assert_eq!(
            composite_truncated_moment(&m, &vars).unwrap(),
            c.truncated_moment(&[0, 1, 1]).unwrap()
        );
    }
}
