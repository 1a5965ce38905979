//! Generalized Feynman graphs for a single monomial interaction `phi^p`.
//!
//! A graph has `n` outer vertices, `m` inner (interaction) vertices with `p`
//! labeled legs each, and anonymous empty vertices. Every leg and every outer
//! vertex is joined to exactly one empty vertex, so a graph is the same thing
//! as a partition of the leg set: each block is the neighborhood of one empty
//! vertex. The graph is stored as that partition, which is also the canonical
//! representative of the graph modulo relabeling of empty vertices.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::partitions::{
    enumerate_partitions, Capacity, FamilyList, Partition, PartitionError, Partitions, UnionFind,
};

/// Legs per inner vertex used when nothing else is configured.
pub const DEFAULT_DEGREE: usize = 4;

/// An outer vertex (`x_i`) or one leg of an inner vertex. Indices are 1-based.
/// All outer labels sort before all inner legs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LegLabel {
    Outer(usize),
    InnerLeg(usize, usize),
}

impl LegLabel {
    /// The full vertex this label belongs to, as a node index: outer vertices
    /// are `0..n`, inner vertices `n..n+m`.
    fn owner_node(self, n: usize) -> usize {
        match self {
            LegLabel::Outer(i) => i - 1,
            LegLabel::InnerLeg(v, _) => n + v - 1,
        }
    }
}

impl fmt::Display for LegLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LegLabel::Outer(i) => write!(f, "x{i}"),
            LegLabel::InnerLeg(v, leg) => write!(f, "v{v}.{leg}"),
        }
    }
}

impl FromStr for LegLabel {
    type Err = GraphError;

    /// Parses `x3` or `v2.4`.
    fn from_str(s: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::Parse(s.to_owned());
        let index = |t: &str| t.parse::<usize>().ok().filter(|&i| i > 0).ok_or_else(bad);
        if let Some(rest) = s.strip_prefix('x') {
            Ok(LegLabel::Outer(index(rest)?))
        } else if let Some(rest) = s.strip_prefix('v') {
            let (v, leg) = rest.split_once('.').ok_or_else(bad)?;
            Ok(LegLabel::InnerLeg(index(v)?, index(leg)?))
        } else {
            Err(bad())
        }
    }
}

/// Degree of the interaction monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InteractionSpec {
    pub p: usize,
}

impl Default for InteractionSpec {
    fn default() -> Self {
        InteractionSpec { p: DEFAULT_DEGREE }
    }
}

impl InteractionSpec {
    pub fn new(p: usize) -> Result<Self, GraphError> {
        if p == 0 {
            return Err(GraphError::ZeroDegree);
        }
        Ok(InteractionSpec { p })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("interaction degree must be at least 1")]
    ZeroDegree,
    #[error("partition ground set is not the leg set of ({n}, {m}, {p})")]
    GroundMismatch { n: usize, m: usize, p: usize },
    #[error("cannot parse graph text near {0:?}")]
    Parse(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// The full leg set `[n] + p*[m]` in canonical order.
pub fn leg_set(n: usize, m: usize, p: usize) -> Vec<LegLabel> {
    let outer = (1..=n).map(LegLabel::Outer);
    let inner = (1..=m).flat_map(|v| (1..=p).map(move |leg| LegLabel::InnerLeg(v, leg)));
    outer.chain(inner).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeynmanGraph {
    n: usize,
    m: usize,
    p: usize,
    blocks: Partition<LegLabel>,
}

impl FeynmanGraph {
    /// The graph whose empty vertices are the blocks of `part`.
    pub fn alpha_inverse(
        part: Partition<LegLabel>,
        n: usize,
        m: usize,
        p: usize,
    ) -> Result<Self, GraphError> {
        InteractionSpec::new(p)?;
        if part.ground() != leg_set(n, m, p).as_slice() {
            return Err(GraphError::GroundMismatch { n, m, p });
        }
        Ok(FeynmanGraph {
            n,
            m,
            p,
            blocks: part,
        })
    }

    /// Parses the canonical text form, e.g. `x1,v1.1|v1.2`.
    pub fn parse(text: &str, n: usize, m: usize, p: usize) -> Result<Self, GraphError> {
        let blocks = if text.trim().is_empty() {
            Vec::new()
        } else {
            text.split('|')
                .map(|b| b.split(',').map(|l| l.trim().parse()).collect())
                .collect::<Result<Vec<Vec<LegLabel>>, _>>()?
        };
        Self::alpha_inverse(Partition::new(blocks)?, n, m, p)
    }

    /// The partition of the leg set given by empty-vertex neighborhoods.
    pub fn alpha(&self) -> &Partition<LegLabel> {
        &self.blocks
    }

    pub fn into_partition(self) -> Partition<LegLabel> {
        self.blocks
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn empty_vertices(&self) -> usize {
        self.blocks.num_blocks()
    }

    /// Leg families: one singleton per outer vertex, then the `p` legs of
    /// each inner vertex.
    pub fn families(&self) -> FamilyList<LegLabel> {
        vertex_families(self.n, self.m, self.p)
    }

    /// Connectivity of the graph with all legs of an inner vertex glued into
    /// one node. The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        let nodes = self.n + self.m;
        if nodes == 0 {
            return true;
        }
        let mut dsu = UnionFind::new(nodes);
        for block in self.blocks.blocks() {
            let first = block[0].owner_node(self.n);
            for l in &block[1..] {
                dsu.union(first, l.owner_node(self.n));
            }
        }
        dsu.components() == 1
    }

    /// True if some empty vertex touches the legs of exactly one inner vertex
    /// and nothing else.
    pub fn has_self_contraction(&self) -> bool {
        self.blocks.blocks().iter().any(|block| match block[0] {
            LegLabel::Outer(_) => false,
            LegLabel::InnerLeg(v, _) => block
                .iter()
                .all(|l| matches!(l, LegLabel::InnerLeg(w, _) if *w == v)),
        })
    }

    /// Relabels outer vertices by `outer` and inner vertices by `inner`
    /// (both 1-based permutations given as image lists). Leg numbers are kept.
    pub fn relabel(&self, outer: &[usize], inner: &[usize]) -> Result<Self, GraphError> {
        let sigma = induced_leg_map(self.n, self.m, self.p, outer, inner);
        let blocks = self.blocks.transport(&sigma)?;
        FeynmanGraph::alpha_inverse(blocks, self.n, self.m, self.p)
    }

    /// Undirected DOT rendering. Outer vertices are points labeled `x_i`,
    /// inner vertices filled circles, empty vertices open circles named
    /// `e1..ek` in canonical block order (the names carry no meaning).
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for i in 1..=self.n {
            let _ = writeln!(out, "  x{i} [shape=point, label=\"x_{i}\"];");
        }
        for v in 1..=self.m {
            let _ = writeln!(
                out,
                "  v{v} [shape=circle, style=filled, fillcolor=black, fontcolor=white, label=\"v{v}\"];"
            );
        }
        for e in 1..=self.blocks.num_blocks() {
            let _ = writeln!(out, "  e{e} [shape=circle, label=\"\"];");
        }
        for (e, block) in self.blocks.blocks().iter().enumerate() {
            for l in block {
                let _ = match l {
                    LegLabel::Outer(i) => writeln!(out, "  x{i} -- e{};", e + 1),
                    LegLabel::InnerLeg(v, leg) => {
                        writeln!(out, "  v{v} -- e{} [taillabel=\"{leg}\"];", e + 1)
                    }
                };
            }
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for FeynmanGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.blocks, f)
    }
}

pub fn vertex_families(n: usize, m: usize, p: usize) -> FamilyList<LegLabel> {
    let outer = (1..=n).map(|i| vec![LegLabel::Outer(i)]);
    let inner = (1..=m).map(|v| (1..=p).map(|leg| LegLabel::InnerLeg(v, leg)).collect());
    FamilyList::new(outer.chain(inner).collect()).expect("vertex families are disjoint")
}

/// Leg-set bijection induced by permutations of the outer and inner vertices.
pub fn induced_leg_map(
    n: usize,
    m: usize,
    p: usize,
    outer: &[usize],
    inner: &[usize],
) -> BTreeMap<LegLabel, LegLabel> {
    leg_set(n, m, p)
        .into_iter()
        .filter_map(|l| {
            let image = match l {
                LegLabel::Outer(i) => LegLabel::Outer(*outer.get(i - 1)?),
                LegLabel::InnerLeg(v, leg) => LegLabel::InnerLeg(*inner.get(v - 1)?, leg),
            };
            Some((l, image))
        })
        .collect()
}

/// Streaming enumerator over `F(n, m)` for degree `p`.
#[derive(Debug, Clone)]
pub struct Graphs {
    n: usize,
    m: usize,
    p: usize,
    inner: Partitions<LegLabel>,
}

impl Iterator for Graphs {
    type Item = FeynmanGraph;

    fn next(&mut self) -> Option<FeynmanGraph> {
        self.inner.next().map(|blocks| FeynmanGraph {
            n: self.n,
            m: self.m,
            p: self.p,
            blocks,
        })
    }
}

/// All `Bell(n + p*m)` graphs in canonical order.
pub fn enumerate_graphs(
    n: usize,
    m: usize,
    p: usize,
    capacity: Capacity,
) -> Result<Graphs, GraphError> {
    InteractionSpec::new(p)?;
    let inner = enumerate_partitions(&leg_set(n, m, p), capacity)?;
    Ok(Graphs { n, m, p, inner })
}
