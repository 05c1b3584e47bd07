//! Truncated crystal graphs: generation, comparison and export.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crystal::{f_op, CrystalError};
use crate::partition::{check_coloring, ColoredMultiPartition, Residue};
use crate::slope::SlopeDatum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub residue: Residue,
    pub target: usize,
}

#[derive(Debug, Error)]
pub enum GraphJsonError {
    #[error("invalid graph JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed graph: {0}")]
    Malformed(String),
}

/// The part of `B(Λ)` reachable from the empty multi-partition by
/// `f`-operators without exceeding `max_boxes` boxes.
#[derive(Debug, Clone)]
pub struct CrystalGraph {
    n: u32,
    coloring: Vec<Residue>,
    max_boxes: usize,
    vertices: Vec<ColoredMultiPartition>,
    edges: Vec<Edge>,
    index: HashMap<ColoredMultiPartition, usize>,
    out: Vec<Vec<Option<usize>>>,
}

impl PartialEq for CrystalGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.coloring == other.coloring
            && self.max_boxes == other.max_boxes
            && self.vertices == other.vertices
            && self.edges == other.edges
    }
}

impl Eq for CrystalGraph {}

/// Breadth-first closure of the empty multi-partition under `f_ī`.
///
/// Vertices are numbered in discovery order with residues tried in
/// ascending order, so the result is deterministic.
pub fn generate(
    xi: &SlopeDatum,
    n: u32,
    coloring: &[Residue],
    max_boxes: usize,
    allow_nonaligned: bool,
) -> Result<CrystalGraph, CrystalError> {
    check_coloring(n, coloring)?;
    if xi.components() != coloring.len() {
        return Err(CrystalError::ComponentMismatch { datum: xi.components(), coloring: coloring.len() });
    }
    if !xi.mode().is_perturbed() {
        return Err(CrystalError::NotPerturbed);
    }
    if !allow_nonaligned && !xi.is_aligned() {
        return Err(CrystalError::NotAligned);
    }
    let root = ColoredMultiPartition::empty(n, coloring.to_vec())?;
    let mut graph = CrystalGraph::with_root(n, coloring.to_vec(), max_boxes, root);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        if graph.vertices[v].size() >= max_boxes {
            continue;
        }
        for color in 0..n {
            let Some(next) = f_op(xi, &graph.vertices[v], color)? else { continue };
            let (target, fresh) = graph.intern(next);
            if fresh {
                queue.push_back(target);
            }
            graph.push_edge(Edge { source: v, residue: color, target });
        }
    }
    Ok(graph)
}

impl CrystalGraph {
    fn with_root(n: u32, coloring: Vec<Residue>, max_boxes: usize, root: ColoredMultiPartition) -> Self {
        let mut graph = CrystalGraph {
            n,
            coloring,
            max_boxes,
            vertices: Vec::new(),
            edges: Vec::new(),
            index: HashMap::new(),
            out: Vec::new(),
        };
        graph.intern(root);
        graph
    }

    fn intern(&mut self, mp: ColoredMultiPartition) -> (usize, bool) {
        if let Some(&idx) = self.index.get(&mp) {
            return (idx, false);
        }
        let idx = self.vertices.len();
        self.index.insert(mp.clone(), idx);
        self.vertices.push(mp);
        self.out.push(vec![None; self.n as usize]);
        (idx, true)
    }

    fn push_edge(&mut self, edge: Edge) {
        self.out[edge.source][edge.residue as usize] = Some(edge.target);
        self.edges.push(edge);
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coloring(&self) -> &[Residue] {
        &self.coloring
    }

    pub fn max_boxes(&self) -> usize {
        self.max_boxes
    }

    pub fn vertices(&self) -> &[ColoredMultiPartition] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn root(&self) -> &ColoredMultiPartition {
        &self.vertices[0]
    }

    pub fn index_of(&self, mp: &ColoredMultiPartition) -> Option<usize> {
        self.index.get(mp).copied()
    }

    pub fn contains(&self, mp: &ColoredMultiPartition) -> bool {
        self.index.contains_key(mp)
    }

    /// Target of the `ī`-edge out of vertex `v`, if any.
    pub fn successor(&self, v: usize, color: Residue) -> Option<usize> {
        self.out[v][color as usize]
    }

    /// Vertices at the truncation depth; their `f`-edges are not recorded.
    pub fn is_frontier(&self, v: usize) -> bool {
        self.vertices[v].size() >= self.max_boxes
    }

    /// Removes one edge; only meant for building negative test cases.
    pub fn without_edge(&self, edge: Edge) -> CrystalGraph {
        let mut copy = self.clone();
        copy.edges.retain(|e| *e != edge);
        if copy.out[edge.source][edge.residue as usize] == Some(edge.target) {
            copy.out[edge.source][edge.residue as usize] = None;
        }
        copy
    }

    /// Checks that every vertex is reachable, each vertex has at most one
    /// outgoing and one incoming edge per residue, and edges add one box.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut incoming = vec![vec![false; self.n as usize]; self.vertices.len()];
        let mut reached = vec![false; self.vertices.len()];
        reached[0] = true;
        for e in &self.edges {
            let slot = &mut incoming[e.target][e.residue as usize];
            if *slot {
                return Err(format!("vertex {} has two incoming {}-edges", e.target, e.residue));
            }
            *slot = true;
            if self.vertices[e.target].size() != self.vertices[e.source].size() + 1 {
                return Err(format!("edge {e:?} does not add exactly one box"));
            }
        }
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for t in self.out[v].iter().flatten() {
                if !reached[*t] {
                    reached[*t] = true;
                    queue.push_back(*t);
                }
            }
        }
        if let Some(v) = reached.iter().position(|r| !r) {
            return Err(format!("vertex {v} is unreachable from the root"));
        }
        Ok(())
    }

    /// Number of vertices per content vector.
    pub fn weight_multiplicities(&self) -> BTreeMap<Vec<usize>, usize> {
        let mut counts = BTreeMap::new();
        for v in &self.vertices {
            *counts.entry(v.content()).or_insert(0) += 1;
        }
        counts
    }

    /// Graphviz digraph; vertex labels are canonical multi-partition JSON.
    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph crystal {\n  node [shape=box];\n");
        for (idx, v) in self.vertices.iter().enumerate() {
            let label = v.to_json().replace('\\', "\\\\").replace('"', "\\\"");
            writeln!(out, "  v{idx} [label=\"{label}\"];").unwrap();
        }
        for e in &self.edges {
            writeln!(out, "  v{} -> v{} [label=\"{}\"];", e.source, e.target, e.residue).unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn export_json(&self) -> String {
        let wire = GraphJson {
            n: self.n,
            coloring: self.coloring.clone(),
            max_boxes: self.max_boxes,
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| (e.source, e.residue, e.target)).collect(),
        };
        serde_json::to_string(&wire).expect("graph serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<CrystalGraph, GraphJsonError> {
        let wire: GraphJson = serde_json::from_str(text)?;
        let bad = |msg: String| Err(GraphJsonError::Malformed(msg));
        check_coloring(wire.n, &wire.coloring).map_err(|e| GraphJsonError::Malformed(e.to_string()))?;
        let Some(root) = wire.vertices.first() else {
            return bad("graph has no vertices".into());
        };
        if !root.is_empty() {
            return bad("first vertex must be the empty multi-partition".into());
        }
        let mut graph = CrystalGraph::with_root(wire.n, wire.coloring.clone(), wire.max_boxes, root.clone());
        for v in &wire.vertices[1..] {
            if v.n() != wire.n || v.coloring() != wire.coloring.as_slice() {
                return bad(format!("vertex {v} has a different modulus or coloring"));
            }
            if !graph.intern(v.clone()).1 {
                return bad(format!("duplicate vertex {v}"));
            }
        }
        for (source, residue, target) in wire.edges {
            let count = graph.vertices.len();
            if source >= count || target >= count || residue >= wire.n {
                return bad(format!("edge ({source}, {residue}, {target}) is out of range"));
            }
            if graph.out[source][residue as usize].is_some() {
                return bad(format!("vertex {source} has two outgoing {residue}-edges"));
            }
            graph.push_edge(Edge { source, residue, target });
        }
        Ok(graph)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: u32,
    coloring: Vec<Residue>,
    max_boxes: usize,
    vertices: Vec<ColoredMultiPartition>,
    edges: Vec<(usize, Residue, usize)>,
}

/// A rooted graph with at most one outgoing edge per label, truncated at a
/// frontier beyond which out-edges are unknown.
pub trait RootedCrystal {
    fn residues(&self) -> u32;
    fn root(&self) -> usize;
    fn successor(&self, v: usize, color: Residue) -> Option<usize>;
    fn is_frontier(&self, v: usize) -> bool;
    fn vertex_count(&self) -> usize;
}

impl RootedCrystal for CrystalGraph {
    fn residues(&self) -> u32 {
        self.n
    }

    fn root(&self) -> usize {
        0
    }

    fn successor(&self, v: usize, color: Residue) -> Option<usize> {
        CrystalGraph::successor(self, v, color)
    }

    fn is_frontier(&self, v: usize) -> bool {
        CrystalGraph::is_frontier(self, v)
    }

    fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
}

/// The `f`-word from the root at which two graphs first disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MismatchWitness {
    pub word: Vec<Residue>,
    pub reason: String,
}

impl MismatchWitness {
    /// The witness word in CLI notation, e.g. `"f0 f1"`.
    pub fn word_string(&self) -> String {
        self.word.iter().map(|r| format!("f{r}")).collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum IsoOutcome {
    Isomorphic { matched: usize },
    Mismatch(MismatchWitness),
}

impl IsoOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic { .. })
    }
}

/// Walks both graphs from their roots in lockstep, matching `ī`-edges.
///
/// Succeeds when the matching is a bijection that respects every edge label
/// at non-frontier vertices.
pub fn parallel_iso_check<A: RootedCrystal, B: RootedCrystal>(a: &A, b: &B) -> IsoOutcome {
    let mismatch = |word: &[Residue], reason: String| {
        IsoOutcome::Mismatch(MismatchWitness { word: word.to_vec(), reason })
    };
    if a.residues() != b.residues() {
        return mismatch(&[], format!("residue counts differ: {} vs {}", a.residues(), b.residues()));
    }
    let mut a_to_b = vec![None; a.vertex_count()];
    let mut b_to_a = vec![None; b.vertex_count()];
    a_to_b[a.root()] = Some(b.root());
    b_to_a[b.root()] = Some(a.root());
    let mut queue = VecDeque::from([(a.root(), b.root(), Vec::new())]);
    let mut matched = 1;
    while let Some((va, vb, word)) = queue.pop_front() {
        match (a.is_frontier(va), b.is_frontier(vb)) {
            (true, true) => continue,
            (false, false) => {}
            _ => return mismatch(&word, "truncation frontier differs".into()),
        }
        for color in 0..a.residues() {
            let mut next_word = word.clone();
            next_word.push(color);
            match (a.successor(va, color), b.successor(vb, color)) {
                (None, None) => {}
                (Some(_), None) => return mismatch(&next_word, "edge present only in the first graph".into()),
                (None, Some(_)) => return mismatch(&next_word, "edge present only in the second graph".into()),
                (Some(ta), Some(tb)) => match (a_to_b[ta], b_to_a[tb]) {
                    (None, None) => {
                        a_to_b[ta] = Some(tb);
                        b_to_a[tb] = Some(ta);
                        matched += 1;
                        queue.push_back((ta, tb, next_word));
                    }
                    (Some(x), Some(y)) if x == tb && y == ta => {}
                    _ => return mismatch(&next_word, "targets are matched inconsistently".into()),
                },
            }
        }
    }
    if matched != a.vertex_count() || matched != b.vertex_count() {
        return mismatch(&[], format!("unreachable vertices: {matched} matched of {} and {}", a.vertex_count(), b.vertex_count()));
    }
    IsoOutcome::Isomorphic { matched }
}
