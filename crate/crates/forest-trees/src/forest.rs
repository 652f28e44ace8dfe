//! Forest-in-host instances: a complete multipartite host graph together
//! with an acyclic edge set that spanning trees are required to contain.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Vertex addressed as (part index, offset within part); serializes as `[p, o]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Vertex {
    pub part: usize,
    pub offset: usize,
}

impl From<(usize, usize)> for Vertex {
    fn from((part, offset): (usize, usize)) -> Self {
        Vertex { part, offset }
    }
}

impl From<Vertex> for (usize, usize) {
    fn from(v: Vertex) -> Self {
        (v.part, v.offset)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.part, self.offset)
    }
}

pub type Edge = (Vertex, Vertex);

fn edge_text(e: &Edge) -> String {
    format!("[{}, {}]", e.0, e.1)
}

/// A complete multipartite host (`parts[i]` vertices in part `i`) plus the
/// forest edges every counted spanning tree must contain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestInstance {
    pub parts: Vec<usize>,
    pub edges: Vec<Edge>,
}

/// Per-component vertex counts split by part, in canonical (descending
/// lexicographic) order. For a bipartite host each entry is `[m_i, n_i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentProfile {
    pub components: Vec<Vec<usize>>,
    pub k: usize,
}

impl ComponentProfile {
    /// Builds a profile directly from count vectors, normalizing to the
    /// canonical descending order.
    pub fn from_components(mut components: Vec<Vec<usize>>) -> Self {
        components.sort_unstable_by(|a, b| b.cmp(a));
        let k = components.len();
        ComponentProfile { components, k }
    }

    /// Sum of component counts per part; equals the host part sizes.
    pub fn part_sums(&self) -> Vec<usize> {
        let width = self.components.first().map_or(0, Vec::len);
        let mut sums = vec![0; width];
        for c in &self.components {
            for (s, v) in sums.iter_mut().zip(c) {
                *s += v;
            }
        }
        sums
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("edge {} uses a vertex outside the declared parts", edge_text(.0))]
    EdgeOutOfRange(Edge),
    #[error("edge {} joins two vertices of the same part", edge_text(.0))]
    SamePartEdge(Edge),
    #[error("edge {} repeats an earlier edge", edge_text(.0))]
    DuplicateEdge(Edge),
    #[error("edge {} closes a cycle", edge_text(.0))]
    CycleDetected(Edge),
    #[error("host has {total} vertices, enumeration is capped at {cap}")]
    HostTooLarge { total: usize, cap: usize },
    #[error("target of {target} components is outside the reachable range {min}..={max}")]
    InfeasibleTarget {
        target: usize,
        min: usize,
        max: usize,
    },
    #[error("host has no vertices")]
    EmptyHost,
}

const ENUMERATION_CAP: usize = 12;

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = v;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false when both vertices already share a component.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (small, large) = if self.size[ra] < self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = large;
        self.size[large] += self.size[small];
        true
    }
}

/// Union-find without path compression so unions can be reverted in LIFO
/// order; used by the backtracking enumerator.
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    /// Returns the (attached, kept) roots for a later [`Self::undo`].
    fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (small, large) = if self.size[ra] < self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = large;
        self.size[large] += self.size[small];
        Some((small, large))
    }

    fn undo(&mut self, (attached, kept): (usize, usize)) {
        self.size[kept] -= self.size[attached];
        self.parent[attached] = attached;
    }
}

fn global_index(parts: &[usize], v: Vertex) -> usize {
    parts[..v.part].iter().sum::<usize>() + v.offset
}

impl ForestInstance {
    pub fn new(parts: Vec<usize>, edges: Vec<Edge>) -> Self {
        ForestInstance { parts, edges }
    }

    pub fn total_vertices(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Checks every instance invariant and returns the component profile in
    /// canonical order: count vectors sorted descending lexicographically.
    pub fn validate(&self) -> Result<ComponentProfile, ForestError> {
        let total = self.total_vertices();
        if total == 0 {
            return Err(ForestError::EmptyHost);
        }
        let mut seen = BTreeSet::new();
        let mut dsu = Dsu::new(total);
        for &edge in &self.edges {
            let (a, b) = edge;
            for v in [a, b] {
                if v.part >= self.parts.len() || v.offset >= self.parts[v.part] {
                    return Err(ForestError::EdgeOutOfRange(edge));
                }
            }
            if a.part == b.part {
                return Err(ForestError::SamePartEdge(edge));
            }
            let key = if a <= b { (a, b) } else { (b, a) };
            if !seen.insert(key) {
                return Err(ForestError::DuplicateEdge(edge));
            }
            let (ia, ib) = (global_index(&self.parts, a), global_index(&self.parts, b));
            if !dsu.union(ia, ib) {
                return Err(ForestError::CycleDetected(edge));
            }
        }
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> =
            std::collections::BTreeMap::new();
        let mut index = 0;
        for (part, &count) in self.parts.iter().enumerate() {
            for _ in 0..count {
                let root = dsu.find(index);
                by_root
                    .entry(root)
                    .or_insert_with(|| vec![0; self.parts.len()])[part] += 1;
                index += 1;
            }
        }
        let mut components: Vec<Vec<usize>> = by_root.into_values().collect();
        components.sort_unstable_by(|a, b| b.cmp(a));
        let k = components.len();
        Ok(ComponentProfile { components, k })
    }
}

/// All cross-part edges of the complete multipartite host on `parts`,
/// ordered by (part pair, offsets).
fn host_edges(parts: &[usize]) -> Vec<Edge> {
    let mut edges = Vec::new();
    for p in 0..parts.len() {
        for q in p + 1..parts.len() {
            for i in 0..parts[p] {
                for j in 0..parts[q] {
                    edges.push((Vertex { part: p, offset: i }, Vertex { part: q, offset: j }));
                }
            }
        }
    }
    edges
}

/// Lazily yields every forest of the host exactly once, the empty forest
/// first, extending by host edges in lexicographic order (preorder over the
/// backtracking tree).
pub struct ForestEnumerator {
    parts: Vec<usize>,
    edges: Vec<Edge>,
    endpoint_ids: Vec<(usize, usize)>,
    dsu: RollbackDsu,
    chosen: Vec<(usize, (usize, usize))>,
    cursor: usize,
    remaining: usize,
    started: bool,
    done: bool,
}

impl ForestEnumerator {
    fn instance(&self) -> ForestInstance {
        ForestInstance {
            parts: self.parts.clone(),
            edges: self.chosen.iter().map(|&(i, _)| self.edges[i]).collect(),
        }
    }
}

impl Iterator for ForestEnumerator {
    type Item = ForestInstance;

    fn next(&mut self) -> Option<ForestInstance> {
        if self.done || self.remaining == 0 {
            self.done = true;
            return None;
        }
        if !self.started {
            self.started = true;
            self.remaining -= 1;
            return Some(self.instance());
        }
        loop {
            while self.cursor < self.edges.len() {
                let (a, b) = self.endpoint_ids[self.cursor];
                if let Some(undo) = self.dsu.union(a, b) {
                    self.chosen.push((self.cursor, undo));
                    self.cursor += 1;
                    self.remaining -= 1;
                    return Some(self.instance());
                }
                self.cursor += 1;
            }
            match self.chosen.pop() {
                Some((index, undo)) => {
                    self.dsu.undo(undo);
                    self.cursor = index + 1;
                }
                None => {
                    self.done = true;
                    return None;
                }
            }
        }
    }
}

/// Enumerates every acyclic edge subset of the complete multipartite host,
/// up to `cap` instances. Hosts above 12 vertices are rejected.
pub fn enumerate_forests(parts: &[usize], cap: usize) -> Result<ForestEnumerator, ForestError> {
    let total: usize = parts.iter().sum();
    if total == 0 {
        return Err(ForestError::EmptyHost);
    }
    if total > ENUMERATION_CAP {
        return Err(ForestError::HostTooLarge {
            total,
            cap: ENUMERATION_CAP,
        });
    }
    let edges = host_edges(parts);
    let endpoint_ids = edges
        .iter()
        .map(|&(a, b)| (global_index(parts, a), global_index(parts, b)))
        .collect();
    Ok(ForestEnumerator {
        parts: parts.to_vec(),
        edges,
        endpoint_ids,
        dsu: RollbackDsu::new(total),
        chosen: Vec::new(),
        cursor: 0,
        remaining: cap,
        started: false,
        done: false,
    })
}

/// Draws seeded random host edges, discarding those that would close a
/// cycle, until the forest has exactly `target_components` components.
/// Deterministic in (parts, target, seed).
pub fn random_forest(
    parts: &[usize],
    target_components: usize,
    seed: u64,
) -> Result<ForestInstance, ForestError> {
    let total: usize = parts.iter().sum();
    if total == 0 {
        return Err(ForestError::EmptyHost);
    }
    let nonempty = parts.iter().filter(|&&p| p > 0).count();
    let min = if nonempty >= 2 { 1 } else { total };
    if target_components < min || target_components > total {
        return Err(ForestError::InfeasibleTarget {
            target: target_components,
            min,
            max: total,
        });
    }
    let edges = host_edges(parts);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dsu = Dsu::new(total);
    let mut picked = Vec::with_capacity(total - target_components);
    let mut components = total;
    while components > target_components {
        let edge = edges[rng.random_range(0..edges.len())];
        let a = global_index(parts, edge.0);
        let b = global_index(parts, edge.1);
        if dsu.union(a, b) {
            picked.push(edge);
            components -= 1;
        }
    }
    Ok(ForestInstance {
        parts: parts.to_vec(),
        edges: picked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(part: usize, offset: usize) -> Vertex {
        Vertex { part, offset }
    }

    #[test]
    fn empty_forest_profile_is_all_singletons() {
        let inst = ForestInstance::new(vec![2, 2], vec![]);
        let p = inst.validate().unwrap();
        assert_eq!(p.k, 4);
        assert_eq!(
            p.components,
            vec![vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]]
        );
        assert_eq!(p.part_sums(), vec![2, 2]);
    }

    #[test]
    fn single_edge_merges_two_singletons() {
        let inst = ForestInstance::new(vec![2, 2], vec![(v(0, 0), v(1, 0))]);
        let p = inst.validate().unwrap();
        assert_eq!(p.k, 3);
        assert_eq!(p.components, vec![vec![1, 1], vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn four_cycle_is_rejected() {
        let inst = ForestInstance::new(
            vec![2, 2],
            vec![
                (v(0, 0), v(1, 0)),
                (v(0, 0), v(1, 1)),
                (v(0, 1), v(1, 0)),
                (v(0, 1), v(1, 1)),
            ],
        );
        assert_eq!(
            inst.validate(),
            Err(ForestError::CycleDetected((v(0, 1), v(1, 1))))
        );
    }

    #[test]
    fn validation_rejects_malformed_edges() {
        let range = ForestInstance::new(vec![2, 2], vec![(v(0, 0), v(1, 2))]);
        assert!(matches!(
            range.validate(),
            Err(ForestError::EdgeOutOfRange(_))
        ));
        let same = ForestInstance::new(vec![2, 2], vec![(v(0, 0), v(0, 1))]);
        assert!(matches!(same.validate(), Err(ForestError::SamePartEdge(_))));
        let dup = ForestInstance::new(vec![2, 2], vec![(v(0, 0), v(1, 0)), (v(1, 0), v(0, 0))]);
        assert!(matches!(dup.validate(), Err(ForestError::DuplicateEdge(_))));
        let empty = ForestInstance::new(vec![], vec![]);
        assert_eq!(empty.validate(), Err(ForestError::EmptyHost));
    }

    #[test]
    fn enumeration_counts_small_hosts() {
        let count = |parts: &[usize]| enumerate_forests(parts, usize::MAX).unwrap().count();
        assert_eq!(count(&[1, 1]), 2);
        assert_eq!(count(&[2, 1]), 4);
        // 2^4 edge subsets of K_{2,2} minus the single 4-cycle.
        assert_eq!(count(&[2, 2]), 15);
    }

    #[test]
    fn enumeration_yields_empty_forest_first_and_respects_cap() {
        let mut it = enumerate_forests(&[2, 2], usize::MAX).unwrap();
        assert_eq!(it.next().unwrap().edges, vec![]);
        let capped: Vec<_> = enumerate_forests(&[2, 2], 7).unwrap().collect();
        assert_eq!(capped.len(), 7);
        assert!(enumerate_forests(&[7, 6], usize::MAX).is_err());
    }

    #[test]
    fn enumeration_is_duplicate_free_and_valid() {
        let mut seen = BTreeSet::new();
        for inst in enumerate_forests(&[2, 3], usize::MAX).unwrap() {
            inst.validate().unwrap();
            let mut key: Vec<Edge> = inst.edges.clone();
            key.sort_unstable();
            assert!(seen.insert(key));
        }
    }

    #[test]
    fn random_forest_hits_target_and_repeats() {
        let empty = random_forest(&[3, 3], 6, 42).unwrap();
        assert!(empty.edges.is_empty());

        let tree = random_forest(&[2, 2], 1, 7).unwrap();
        assert_eq!(tree.validate().unwrap().k, 1);

        let single = random_forest(&[1, 1], 1, 3).unwrap();
        assert_eq!(single.edges, vec![(v(0, 0), v(1, 0))]);

        let a = random_forest(&[5, 4], 3, 99).unwrap();
        let b = random_forest(&[5, 4], 3, 99).unwrap();
        assert_eq!(a, b);

        assert!(matches!(
            random_forest(&[2, 2], 0, 1),
            Err(ForestError::InfeasibleTarget { .. })
        ));
        // A single-part host has no edges, so only the all-singleton forest exists.
        assert!(matches!(
            random_forest(&[4], 2, 1),
            Err(ForestError::InfeasibleTarget { .. })
        ));
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = ForestInstance::new(vec![2, 2], vec![(v(0, 0), v(1, 1))]);
        let s = serde_json::to_string(&inst).unwrap();
        assert_eq!(s, r#"{"parts":[2,2],"edges":[[[0,0],[1,1]]]}"#);
        let back: ForestInstance = serde_json::from_str(&s).unwrap();
        assert_eq!(back, inst);
    }
}
