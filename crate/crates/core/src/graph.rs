//! Confusability graph over released symbols and its finest decomposition.
//!
//! Two clusters are adjacent when their conditional `S`-ranges intersect.
//! The connected components give the finest overlap partition of `⟦S⟧`, and
//! `I* = log₂(#components)`.

use std::collections::VecDeque;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantization::{log2, ClusterId, Quantization};
use crate::range::{ConditionalRange, JointRange};

#[derive(Clone, Debug)]
pub struct ConfusabilityGraph {
    nodes: Vec<ClusterId>,
    members: Vec<Vec<usize>>,
    adjacency: Vec<FixedBitSet>,
}

impl ConfusabilityGraph {
    /// One node per cluster of `q`, in cluster-id order.
    pub fn build(jr: &JointRange, q: &Quantization) -> Self {
        let ranges = q.cond_ranges(jr);
        let n = ranges.len();
        let mut adjacency = vec![FixedBitSet::with_capacity(n); n];
        for u in 0..n {
            for v in u + 1..n {
                if ranges[u].intersects(&ranges[v]) {
                    adjacency[u].insert(v);
                    adjacency[v].insert(u);
                }
            }
        }
        ConfusabilityGraph {
            nodes: q.ids().collect(),
            members: q.blocks(),
            adjacency,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[ClusterId] {
        &self.nodes
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].contains(v)
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[u].ones()
    }

    /// Edges `(u, v)` with `u < v`, as node positions.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.node_count())
            .flat_map(|u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    /// Connected components as node positions, found by BFS and ordered by
    /// their smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut seen = FixedBitSet::with_capacity(n);
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen.put(start) {
                continue;
            }
            let mut block = vec![start];
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for v in self.adjacency[u].ones() {
                    if !seen.put(v) {
                        block.push(v);
                        queue.push_back(v);
                    }
                }
            }
            block.sort_unstable();
            out.push(block);
        }
        out
    }

    /// The finest decomposition, expressed over `X` symbols.
    pub fn finest_decomposition(&self) -> Decomposition {
        let blocks = self
            .components()
            .into_iter()
            .map(|nodes| {
                nodes
                    .into_iter()
                    .flat_map(|u| self.members[u].iter().copied())
                    .collect()
            })
            .collect();
        Decomposition::from_blocks(blocks)
    }
}

/// A partition of the `X` alphabet into the symbol sets of connected components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    blocks: Vec<Vec<usize>>,
}

impl Decomposition {
    fn from_blocks(mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Decomposition { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks of `X` indices, each ascending, ordered by smallest member.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn alphabet_len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block position of every `X` symbol.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.alphabet_len()];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                labels[x] = i;
            }
        }
        labels
    }
}

/// `I*(S; X̂) = log₂ |𝒫*|`.
pub fn maximin_information(jr: &JointRange, q: &Quantization) -> f64 {
    log2(component_count(jr, q))
}

pub fn component_count(jr: &JointRange, q: &Quantization) -> usize {
    ConfusabilityGraph::build(jr, q).components().len()
}

/// Finest overlap partition of `⟦S⟧` computed straight from the definition:
/// every conditional range of the release is glued into one block.
pub fn overlap_partition(jr: &JointRange, q: &Quantization) -> Vec<Vec<usize>> {
    let mut sets = DisjointSets::new(jr.s_len());
    for range in q.cond_ranges(jr) {
        glue(&mut sets, &range);
    }
    sets.blocks()
}

fn glue(sets: &mut DisjointSets, range: &ConditionalRange) {
    let mut it = range.iter();
    if let Some(first) = it.next() {
        for s in it {
            sets.union(first, s);
        }
    }
}

/// Decomposition of the graph of `q`, obtained from the singleton-level
/// decomposition `dec` by fusing every block that a cluster of `q` touches.
pub fn merge_update(dec: &Decomposition, q: &Quantization) -> Result<Decomposition> {
    let n = q.alphabet_len();
    if dec.alphabet_len() != n {
        return Err(Error::contract(format!(
            "decomposition covers {} symbols, quantization {}",
            dec.alphabet_len(),
            n
        )));
    }
    let labels = dec.labels();
    let mut sets = DisjointSets::new(dec.len());
    for c in q.clusters() {
        let first = labels[c.members()[0]];
        for &x in &c.members()[1..] {
            sets.union(first, labels[x]);
        }
    }
    let blocks = sets
        .blocks()
        .into_iter()
        .map(|group| group.iter().flat_map(|&b| dec.blocks[b].iter().copied()).collect())
        .collect();
    Ok(Decomposition::from_blocks(blocks))
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }

    /// Members of every set, ascending, ordered by smallest member.
    fn blocks(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            let r = self.find(a);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(a);
        }
        out
    }
}
