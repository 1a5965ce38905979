//! Wick-ordered monomials and their expectations.
//!
//! A Wick monomial `:phi(u1)...phi(un):` is expanded extensionally into a
//! linear combination of ordinary monomials by the recursion
//!
//! ```text
//! :U: = U - sum_{I in P(U), |I| > 1} sum_j :I_j: prod_{l != j} <I_l>^T
//!         - sum_{I in P(U)} prod_l <I_l>^T
//! ```
//!
//! Expectations of products of Wick monomials can then be taken in two
//! independent ways: through the expansion and ordinary moments, or as a sum
//! over partitions without self-contractions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moment_oracles::{Cumulants, OracleError, SiteIndex};
use crate::partitions::{
    enumerate_partitions, enumerate_sc_free_partitions, Capacity, FamilyList, PartitionError,
};
use crate::scalar::{self, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WickError {
    #[error("Wick families must be nonempty")]
    EmptyFamily,
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// Finite linear combination of ordinary monomials, keyed by the sorted
/// multiset of sites. The empty key is the constant term.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonomialCombination {
    terms: BTreeMap<Vec<SiteIndex>, Scalar>,
}

impl MonomialCombination {
    pub fn monomial(sites: &[SiteIndex]) -> Self {
        let mut key = sites.to_vec();
        key.sort_unstable();
        MonomialCombination {
            terms: BTreeMap::from([(key, Scalar::one())]),
        }
    }

    pub fn terms(&self) -> &BTreeMap<Vec<SiteIndex>, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, sites: &[SiteIndex]) -> Scalar {
        let mut key = sites.to_vec();
        key.sort_unstable();
        self.terms.get(&key).cloned().unwrap_or_else(Scalar::zero)
    }

    fn add_scaled(&mut self, other: &MonomialCombination, factor: &Scalar) {
        for (key, c) in &other.terms {
            let entry = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
            *entry += c * factor;
            if entry.is_zero() {
                self.terms.remove(key);
            }
        }
    }

    fn add_constant(&mut self, c: &Scalar) {
        self.add_scaled(
            &MonomialCombination {
                terms: BTreeMap::from([(Vec::new(), Scalar::one())]),
            },
            c,
        );
    }

    pub fn mul(&self, other: &MonomialCombination) -> MonomialCombination {
        let mut out = MonomialCombination::default();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                key.sort_unstable();
                let term = MonomialCombination {
                    terms: BTreeMap::from([(key, ca * cb)]),
                };
                out.add_scaled(&term, &Scalar::one());
            }
        }
        out
    }

    /// Expectation under the oracle, monomial by monomial.
    pub fn expectation(&self, cumulants: &Cumulants<'_>) -> Result<Scalar, OracleError> {
        let mut total = Scalar::zero();
        for (key, c) in &self.terms {
            total += c * cumulants.moment(key)?;
        }
        Ok(total)
    }
}

/// The points of one Wick-ordered factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WickFamily {
    points: Vec<SiteIndex>,
}

impl WickFamily {
    pub fn new(points: Vec<SiteIndex>) -> Result<Self, WickError> {
        if points.is_empty() {
            return Err(WickError::EmptyFamily);
        }
        Ok(WickFamily { points })
    }

    pub fn points(&self) -> &[SiteIndex] {
        &self.points
    }
}

/// Wick calculus over a memoized cumulant table.
pub struct Wick<'c, 'o> {
    cumulants: &'c Cumulants<'o>,
    capacity: Capacity,
    memo: Mutex<HashMap<Vec<SiteIndex>, MonomialCombination>>,
}

impl<'c, 'o> Wick<'c, 'o> {
    pub fn new(cumulants: &'c Cumulants<'o>) -> Self {
        Self::with_capacity(cumulants, Capacity::default())
    }

    pub fn with_capacity(cumulants: &'c Cumulants<'o>, capacity: Capacity) -> Self {
        Wick {
            cumulants,
            capacity,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn cumulants(&self) -> &'c Cumulants<'o> {
        self.cumulants
    }

    /// `:phi(points[0]) ... phi(points[n-1]):` as ordinary monomials.
    pub fn wick_expand(&self, points: &[SiteIndex]) -> Result<MonomialCombination, WickError> {
        if points.is_empty() {
            return Err(WickError::EmptyFamily);
        }
        self.cumulants.oracle().check(points)?;
        self.capacity.check(points.len())?;
        let mut key = points.to_vec();
        key.sort_unstable();
        self.expand_sorted(&key)
    }

    fn expand_sorted(&self, key: &[SiteIndex]) -> Result<MonomialCombination, WickError> {
        if let Some(w) = self.memo.lock().unwrap().get(key) {
            return Ok(w.clone());
        }
        let mut out = MonomialCombination::monomial(key);
        let positions: Vec<usize> = (0..key.len()).collect();
        for p in enumerate_partitions(&positions, Capacity(usize::MAX))? {
            let blocks: Vec<Vec<SiteIndex>> = p
                .blocks()
                .iter()
                .map(|b| b.iter().map(|&i| key[i]).collect())
                .collect();
            let kappas = blocks
                .iter()
                .map(|b| self.cumulants.truncated_moment(b))
                .collect::<Result<Vec<_>, _>>()?;
            let all: Scalar = kappas.iter().product();
            out.add_constant(&-all);
            if blocks.len() < 2 {
                continue;
            }
            for (j, block) in blocks.iter().enumerate() {
                let rest: Scalar = kappas
                    .iter()
                    .enumerate()
                    .filter(|&(l, _)| l != j)
                    .map(|(_, k)| k)
                    .product();
                if rest.is_zero() {
                    continue;
                }
                let inner = self.expand_sorted(block)?;
                out.add_scaled(&inner, &-rest);
            }
        }
        self.memo.lock().unwrap().insert(key.to_vec(), out.clone());
        Ok(out)
    }

    /// `< :J_1: ... :J_m: prod(external) >` as a sum over partitions of all
    /// points in which no block lies inside a single family.
    pub fn wick_expectation_sc(
        &self,
        families: &[WickFamily],
        external: &[SiteIndex],
    ) -> Result<Scalar, WickError> {
        let (labels, site_of) = point_labels(families, external);
        let family_list = FamilyList::new(labels)?;
        let ext: Vec<(usize, usize)> = (0..external.len()).map(|i| (families.len(), i)).collect();
        let mut total = Scalar::zero();
        for p in enumerate_sc_free_partitions(&family_list, &ext, self.capacity)? {
            let mut term = Scalar::one();
            for b in p.blocks() {
                let sites: Vec<_> = b.iter().map(|l| site_of[l]).collect();
                term *= self.cumulants.truncated_moment(&sites)?;
                if term.is_zero() {
                    break;
                }
            }
            total += term;
        }
        Ok(total)
    }

    /// The same expectation, through the Wick expansion of every family and
    /// ordinary moments of the resulting polynomial.
    pub fn wick_expectation_recursive(
        &self,
        families: &[WickFamily],
        external: &[SiteIndex],
    ) -> Result<Scalar, WickError> {
        let mut product = MonomialCombination::monomial(external);
        for f in families {
            product = product.mul(&self.wick_expand(f.points())?);
        }
        Ok(product.expectation(self.cumulants)?)
    }

    /// Table of `< :A: :B: >` over all monomials `A`, `B` in `sites` of
    /// degree `1..=max_degree`.
    pub fn orthogonality_report(
        &self,
        sites: &[SiteIndex],
        max_degree: usize,
    ) -> Result<OrthogonalityReport, WickError> {
        let monomials = monomials_up_to(sites, max_degree);
        let families = monomials
            .iter()
            .map(|m| WickFamily::new(m.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        let k = monomials.len();
        let mut values = vec![vec![Scalar::zero(); k]; k];
        for i in 0..k {
            for j in i..k {
                let v =
                    self.wick_expectation_sc(&[families[i].clone(), families[j].clone()], &[])?;
                values[i][j] = v.clone();
                values[j][i] = v;
            }
        }
        let mut off_diagonal_nonzero = Vec::new();
        let mut off_degree_nonzero = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                if values[i][j].is_zero() {
                    continue;
                }
                off_diagonal_nonzero.push([i, j]);
                if monomials[i].len() != monomials[j].len() {
                    off_degree_nonzero.push([i, j]);
                }
            }
        }
        Ok(OrthogonalityReport {
            sites: sites.to_vec(),
            max_degree,
            monomials: monomials
                .iter()
                .map(|m| {
                    m.iter()
                        .map(|s| s.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect(),
            degrees: monomials.iter().map(Vec::len).collect(),
            matrix: values
                .iter()
                .map(|row| row.iter().map(scalar::format).collect())
                .collect(),
            gaussian_compatible: off_degree_nonzero.is_empty(),
            off_diagonal_nonzero,
            off_degree_nonzero,
            values,
        })
    }
}

/// Result of [`Wick::orthogonality_report`]. The verdict only covers the
/// monomials listed in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalityReport {
    pub sites: Vec<SiteIndex>,
    pub max_degree: usize,
    /// Monomial `i` as comma-separated site indices.
    pub monomials: Vec<String>,
    pub degrees: Vec<usize>,
    pub matrix: Vec<Vec<String>>,
    /// Index pairs `[i, j]`, `i < j`, with a nonzero entry.
    pub off_diagonal_nonzero: Vec<[usize; 2]>,
    /// The subset of those pairs whose degrees differ.
    pub off_degree_nonzero: Vec<[usize; 2]>,
    pub gaussian_compatible: bool,
    #[serde(skip)]
    pub values: Vec<Vec<Scalar>>,
}

impl OrthogonalityReport {
    /// Entry for the monomials given as site lists (order inside each list is
    /// irrelevant).
    pub fn entry(&self, a: &[SiteIndex], b: &[SiteIndex]) -> Option<&Scalar> {
        let find = |m: &[SiteIndex]| {
            let mut key = m.to_vec();
            key.sort_unstable();
            let text = key
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",");
            self.monomials.iter().position(|t| *t == text)
        };
        Some(&self.values[find(a)?][find(b)?])
    }
}

/// A point is labeled by `(family index, position)`.
type PointLabel = (usize, usize);

/// Labels for every family point, with external points placed in group
/// `families.len()`, and the site of each label.
fn point_labels(
    families: &[WickFamily],
    external: &[SiteIndex],
) -> (Vec<Vec<PointLabel>>, BTreeMap<PointLabel, SiteIndex>) {
    let mut site_of = BTreeMap::new();
    let labels = families
        .iter()
        .enumerate()
        .map(|(q, f)| {
            f.points()
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    site_of.insert((q, i), s);
                    (q, i)
                })
                .collect()
        })
        .collect();
    for (i, &s) in external.iter().enumerate() {
        site_of.insert((families.len(), i), s);
    }
    (labels, site_of)
}

/// All sorted multisets of `sites` with sizes `1..=max_degree`, by degree
/// then lexicographically.
pub fn monomials_up_to(sites: &[SiteIndex], max_degree: usize) -> Vec<Vec<SiteIndex>> {
    let mut sites = sites.to_vec();
    sites.sort_unstable();
    sites.dedup();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<SiteIndex>> = vec![Vec::new()];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for m in &layer {
            let start = m
                .last()
                .map_or(0, |last| sites.iter().position(|s| s == last).unwrap());
            for s in &sites[start..] {
                let mut longer = m.clone();
                longer.push(*s);
                next.push(longer);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
