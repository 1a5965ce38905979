//! Set partitions of finite label sets.
//!
//! Partitions are kept in canonical form: the ground set is sorted, elements
//! are sorted inside each block, and blocks are ordered by their least
//! element. Two partitions of the same ground set are therefore equal iff
//! they compare equal structurally.
//!
//! Enumeration walks restricted growth strings, so the full family of
//! `Bell(n)` partitions is never materialized.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Default upper bound on the ground-set size accepted by the enumerators.
pub const DEFAULT_CAPACITY: usize = 14;

/// Largest ground set an enumerator will walk. `Bell(14)` is already about
/// 1.9e8 partitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity(pub usize);

impl Default for Capacity {
    fn default() -> Self {
        Capacity(DEFAULT_CAPACITY)
    }
}

impl Capacity {
    pub fn check(self, size: usize) -> Result<(), PartitionError> {
        if size > self.0 {
            Err(PartitionError::Capacity {
                size,
                limit: self.0,
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("ground set of size {size} exceeds enumeration capacity {limit}")]
    Capacity { size: usize, limit: usize },
    #[error("partition has an empty block")]
    EmptyBlock,
    #[error("blocks are not pairwise disjoint")]
    NotDisjoint,
    #[error("relabeling is not defined on every element of the ground set")]
    NotTotal,
    #[error("relabeling maps two elements to the same label")]
    NotInjective,
    #[error("families must be nonempty and pairwise disjoint")]
    BadFamilies,
    #[error("families overlap the external label set")]
    FamilyOverlap,
}

/// A set partition in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition<L> {
    ground: Vec<L>,
    blocks: Vec<Vec<L>>,
}

impl<L: Ord + Clone> Partition<L> {
    /// Builds a partition from arbitrary blocks, canonicalizing them.
    pub fn new(blocks: Vec<Vec<L>>) -> Result<Self, PartitionError> {
        let mut blocks = blocks;
        for b in blocks.iter_mut() {
            if b.is_empty() {
                return Err(PartitionError::EmptyBlock);
            }
            b.sort();
        }
        blocks.sort_by(|a, b| a[0].cmp(&b[0]));
        let mut ground: Vec<L> = blocks.iter().flatten().cloned().collect();
        ground.sort();
        if ground.windows(2).any(|w| w[0] == w[1]) {
            return Err(PartitionError::NotDisjoint);
        }
        Ok(Partition { ground, blocks })
    }

    /// The partition with one singleton block per element.
    pub fn discrete(ground: &[L]) -> Result<Self, PartitionError> {
        Self::new(ground.iter().map(|l| vec![l.clone()]).collect())
    }

    pub fn ground(&self) -> &[L] {
        &self.ground
    }

    pub fn blocks(&self) -> &[Vec<L>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Image of the partition under a relabeling `sigma`, which must be
    /// defined and injective on the ground set.
    pub fn transport<M: Ord + Clone>(
        &self,
        sigma: &BTreeMap<L, M>,
    ) -> Result<Partition<M>, PartitionError> {
        let mut images = Vec::with_capacity(self.ground.len());
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|l| {
                        let image = sigma.get(l).cloned().ok_or(PartitionError::NotTotal)?;
                        images.push(image.clone());
                        Ok(image)
                    })
                    .collect::<Result<Vec<M>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        images.sort();
        if images.windows(2).any(|w| w[0] == w[1]) {
            return Err(PartitionError::NotInjective);
        }
        Partition::new(blocks)
    }
}

impl<L: fmt::Display> fmt::Display for Partition<L> {
    /// Blocks joined by `|`, elements by `,`; e.g. `1,2|3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, l) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{l}")?;
            }
        }
        Ok(())
    }
}

fn sorted_set<L: Ord + Clone>(ground: &[L]) -> Vec<L> {
    let mut g = ground.to_vec();
    g.sort();
    g.dedup();
    g
}

/// Streaming enumerator over all partitions of a ground set, in restricted
/// growth string order (the one-block partition first).
#[derive(Debug, Clone)]
pub struct Partitions<L> {
    ground: Vec<L>,
    rgs: Vec<usize>,
    // prefix_max[i] = max(rgs[0..=i])
    prefix_max: Vec<usize>,
    done: bool,
}

impl<L: Ord + Clone> Partitions<L> {
    fn new(ground: Vec<L>) -> Self {
        let n = ground.len();
        Partitions {
            ground,
            rgs: vec![0; n],
            prefix_max: vec![0; n],
            done: false,
        }
    }

    fn current(&self) -> Partition<L> {
        let k = self.prefix_max.last().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (label, &b) in self.ground.iter().zip(&self.rgs) {
            blocks[b].push(label.clone());
        }
        Partition {
            ground: self.ground.clone(),
            blocks,
        }
    }

    fn advance(&mut self) {
        let n = self.rgs.len();
        for i in (1..n).rev() {
            if self.rgs[i] <= self.prefix_max[i - 1] {
                self.rgs[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.rgs[i]);
                for j in i + 1..n {
                    self.rgs[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return;
            }
        }
        self.done = true;
    }
}

impl<L: Ord + Clone> Iterator for Partitions<L> {
    type Item = Partition<L>;

    fn next(&mut self) -> Option<Partition<L>> {
        if self.done {
            return None;
        }
        let p = self.current();
        self.advance();
        Some(p)
    }
}

/// All partitions of `ground` (duplicates are collapsed), `Bell(|ground|)` in total.
pub fn enumerate_partitions<L: Ord + Clone>(
    ground: &[L],
    capacity: Capacity,
) -> Result<Partitions<L>, PartitionError> {
    let ground = sorted_set(ground);
    capacity.check(ground.len())?;
    Ok(Partitions::new(ground))
}

/// Streaming enumerator over perfect matchings of a ground set.
#[derive(Debug, Clone)]
pub struct PairPartitions<L> {
    ground: Vec<L>,
    // choice[j] picks the partner of the least unmatched element at level j
    choice: Vec<usize>,
    done: bool,
}

impl<L: Ord + Clone> PairPartitions<L> {
    fn current(&self) -> Partition<L> {
        let mut remaining = self.ground.clone();
        let mut blocks = Vec::with_capacity(self.choice.len());
        for &c in &self.choice {
            let first = remaining.remove(0);
            let partner = remaining.remove(c);
            blocks.push(vec![first, partner]);
        }
        Partition {
            ground: self.ground.clone(),
            blocks,
        }
    }
}

impl<L: Ord + Clone> Iterator for PairPartitions<L> {
    type Item = Partition<L>;

    fn next(&mut self) -> Option<Partition<L>> {
        if self.done {
            return None;
        }
        let p = self.current();
        let k = self.choice.len();
        self.done = true;
        for j in (0..k).rev() {
            let radix = 2 * (k - j) - 1;
            if self.choice[j] + 1 < radix {
                self.choice[j] += 1;
                self.choice[j + 1..].iter_mut().for_each(|c| *c = 0);
                self.done = false;
                break;
            }
        }
        Some(p)
    }
}

/// Partitions whose blocks all have size two; empty when `|ground|` is odd.
pub fn enumerate_pair_partitions<L: Ord + Clone>(
    ground: &[L],
    capacity: Capacity,
) -> Result<PairPartitions<L>, PartitionError> {
    let ground = sorted_set(ground);
    capacity.check(ground.len())?;
    let odd = ground.len() % 2 == 1;
    let k = ground.len() / 2;
    Ok(PairPartitions {
        ground,
        choice: vec![0; k],
        done: odd,
    })
}

/// An ordered list of nonempty, pairwise disjoint label sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyList<L> {
    families: Vec<Vec<L>>,
    owner: BTreeMap<L, usize>,
}

impl<L: Ord + Clone> FamilyList<L> {
    pub fn new(families: Vec<Vec<L>>) -> Result<Self, PartitionError> {
        let mut owner = BTreeMap::new();
        let mut sorted = Vec::with_capacity(families.len());
        for (q, family) in families.into_iter().enumerate() {
            if family.is_empty() {
                return Err(PartitionError::BadFamilies);
            }
            for l in &family {
                if owner.insert(l.clone(), q).is_some() {
                    return Err(PartitionError::BadFamilies);
                }
            }
            let mut family = family;
            family.sort();
            sorted.push(family);
        }
        Ok(FamilyList {
            families: sorted,
            owner,
        })
    }

    pub fn families(&self) -> &[Vec<L>] {
        &self.families
    }

    pub fn len(&self) -> usize {
        self.families.len()
    }

    pub fn is_empty(&self) -> bool {
        self.families.is_empty()
    }

    /// Index of the family containing `label`, if any.
    pub fn owner(&self, label: &L) -> Option<usize> {
        self.owner.get(label).copied()
    }

    /// Sorted union of all families.
    pub fn union(&self) -> Vec<L> {
        self.owner.keys().cloned().collect()
    }

    /// True when `block` lies inside a single family.
    pub fn contains_block(&self, block: &[L]) -> bool {
        let mut owners = block.iter().map(|l| self.owner(l));
        match owners.next() {
            Some(Some(q)) => owners.all(|o| o == Some(q)),
            _ => false,
        }
    }
}

/// Partitions of `(union of families) + external` in which no block is a
/// subset of a single family.
pub fn enumerate_sc_free_partitions<L: Ord + Clone>(
    families: &FamilyList<L>,
    external: &[L],
    capacity: Capacity,
) -> Result<impl Iterator<Item = Partition<L>>, PartitionError> {
    if external.iter().any(|l| families.owner(l).is_some()) {
        return Err(PartitionError::FamilyOverlap);
    }
    let mut ground = families.union();
    ground.extend(external.iter().cloned());
    let families = families.clone();
    Ok(enumerate_partitions(&ground, capacity)?.filter(move |p| is_sc_free(&families, p)))
}

pub fn is_sc_free<L: Ord + Clone>(families: &FamilyList<L>, p: &Partition<L>) -> bool {
    p.blocks().iter().all(|b| !families.contains_block(b))
}

/// Partitions of the union of `families` that link every family to every
/// other through shared blocks.
pub fn enumerate_connected_partitions<L: Ord + Clone>(
    families: &FamilyList<L>,
    capacity: Capacity,
) -> Result<impl Iterator<Item = Partition<L>>, PartitionError> {
    let families = families.clone();
    Ok(enumerate_partitions(&families.union(), capacity)?
        .filter(move |p| is_connected_partition(&families, p)))
}

/// Connectivity of the family hypergraph induced by `p`, by union-find over
/// the families touched by each block. Labels outside every family are ignored.
pub fn is_connected_partition<L: Ord + Clone>(families: &FamilyList<L>, p: &Partition<L>) -> bool {
    let mut dsu = UnionFind::new(families.len());
    for block in p.blocks() {
        let mut owners = block.iter().filter_map(|l| families.owner(l));
        if let Some(first) = owners.next() {
            for q in owners {
                dsu.union(first, q);
            }
        }
    }
    dsu.components() <= 1
}

/// Literal connectivity test: no proper nonempty subfamily has a union that
/// is also a union of blocks of `p`. Exponential in the number of families.
pub fn is_connected_partition_literal<L: Ord + Clone>(
    families: &FamilyList<L>,
    p: &Partition<L>,
) -> bool {
    let n = families.len();
    assert!(
        n < 64,
        "literal connectivity test supports fewer than 64 families"
    );
    for mask in 1u64..(1u64 << n) - 1 {
        let inside = |l: &L| families.owner(l).is_some_and(|q| mask & (1 << q) != 0);
        // The subfamily union is a union of blocks iff no block straddles it.
        let splits = p.blocks().iter().any(|b| {
            let hits = b.iter().filter(|l| inside(l)).count();
            hits != 0 && hits != b.len()
        });
        if !splits {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            count: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.count -= 1;
        }
    }

    pub(crate) fn components(&self) -> usize {
        self.count
    }
}
