//! Coral graphs (trees with positive half-edges and negative vertices), their
//! types, and the graph-level extension that turns negative vertices into
//! unbounded ends.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::lattice::LatticeVector;
use crate::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexClass {
    Interior,
    Negative,
}

/// Violations found by a validator; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub violations: Vec<String>,
}

impl Report {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, s: impl Into<String>) {
        self.violations.push(s.into());
    }

    /// Sorts and dedupes so the report does not depend on listing order.
    pub(crate) fn finish(mut self) -> Self {
        self.violations.sort();
        self.violations.dedup();
        self
    }

    pub fn contains(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.contains(needle))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct CoralGraph {
    pub vertices: Vec<(VertexId, VertexClass)>,
    /// Half-edges: (edge id, the endpoint vertex).
    pub positive_edges: Vec<(EdgeId, VertexId)>,
    pub bounded_edges: Vec<(EdgeId, (VertexId, VertexId))>,
    pub weights: BTreeMap<EdgeId, u64>,
    /// Ordering of the positive edges; the last one carries no constraint.
    pub labels: Vec<EdgeId>,
}

/// An edge seen from one of its vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Incidence {
    Bounded { edge: EdgeId, other: VertexId },
    Positive { edge: EdgeId },
}

impl Incidence {
    pub fn edge(self) -> EdgeId {
        match self {
            Incidence::Bounded { edge, .. } | Incidence::Positive { edge } => edge,
        }
    }

    pub fn other_vertex(self) -> Option<VertexId> {
        match self {
            Incidence::Bounded { other, .. } => Some(other),
            Incidence::Positive { .. } => None,
        }
    }
}

impl CoralGraph {
    pub fn class(&self, v: VertexId) -> Option<VertexClass> {
        self.vertices.iter().find(|(id, _)| *id == v).map(|(_, c)| *c)
    }

    pub fn negative_vertices(&self) -> Vec<VertexId> {
        let mut v: Vec<_> = self
            .vertices
            .iter()
            .filter(|(_, c)| *c == VertexClass::Negative)
            .map(|(id, _)| *id)
            .collect();
        v.sort();
        v
    }

    pub fn interior_vertices(&self) -> Vec<VertexId> {
        let mut v: Vec<_> = self
            .vertices
            .iter()
            .filter(|(_, c)| *c == VertexClass::Interior)
            .map(|(id, _)| *id)
            .collect();
        v.sort();
        v
    }

    pub fn weight(&self, e: EdgeId) -> u64 {
        self.weights.get(&e).copied().unwrap_or(0)
    }

    pub fn positive_endpoint(&self, e: EdgeId) -> Option<VertexId> {
        self.positive_edges.iter().find(|(id, _)| *id == e).map(|(_, v)| *v)
    }

    pub fn bounded_ends(&self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        self.bounded_edges.iter().find(|(id, _)| *id == e).map(|(_, p)| *p)
    }

    /// Incidences at every vertex, in edge-id order.
    pub fn adjacency(&self) -> BTreeMap<VertexId, Vec<Incidence>> {
        let mut adj: BTreeMap<VertexId, Vec<Incidence>> =
            self.vertices.iter().map(|(v, _)| (*v, Vec::new())).collect();
        for &(edge, (a, b)) in &self.bounded_edges {
            adj.entry(a).or_default().push(Incidence::Bounded { edge, other: b });
            adj.entry(b).or_default().push(Incidence::Bounded { edge, other: a });
        }
        for &(edge, v) in &self.positive_edges {
            adj.entry(v).or_default().push(Incidence::Positive { edge });
        }
        for list in adj.values_mut() {
            list.sort_by_key(|i| i.edge());
        }
        adj
    }

    pub fn valency(&self, v: VertexId) -> usize {
        self.bounded_edges.iter().filter(|(_, (a, b))| *a == v || *b == v).count()
            + self.positive_edges.iter().filter(|(_, w)| *w == v).count()
    }

    /// Index of a positive edge in the label order.
    pub fn label_index(&self, e: EdgeId) -> Option<usize> {
        self.labels.iter().position(|&x| x == e)
    }
}

pub fn validate_graph(g: &CoralGraph) -> Report {
    let mut r = Report::default();
    let vids: BTreeSet<VertexId> = g.vertices.iter().map(|(v, _)| *v).collect();
    if vids.len() != g.vertices.len() {
        r.push("duplicate vertex id");
    }
    let mut eids = BTreeSet::new();
    for e in g.positive_edges.iter().map(|(e, _)| e).chain(g.bounded_edges.iter().map(|(e, _)| e)) {
        if !eids.insert(*e) {
            r.push(format!("duplicate edge id {e}"));
        }
        match g.weights.get(e) {
            None => r.push(format!("missing weight on edge {e}")),
            Some(0) => r.push(format!("zero weight on edge {e}")),
            _ => {}
        }
    }
    for (e, v) in &g.positive_edges {
        if !vids.contains(v) {
            r.push(format!("edge {e} references unknown vertex {v}"));
        }
    }
    for (e, (a, b)) in &g.bounded_edges {
        for v in [a, b] {
            if !vids.contains(v) {
                r.push(format!("edge {e} references unknown vertex {v}"));
            }
        }
        if a == b {
            r.push("Betti number nonzero");
        }
    }
    let pos: BTreeSet<EdgeId> = g.positive_edges.iter().map(|(e, _)| *e).collect();
    let lab: BTreeSet<EdgeId> = g.labels.iter().copied().collect();
    if lab.len() != g.labels.len() || lab != pos {
        r.push("labels are not an ordering of the positive edges");
    }
    if g.negative_vertices().is_empty() {
        r.push("no negative vertex");
    }
    if g.positive_edges.is_empty() {
        r.push("no positive edge");
    }

    // Union–find for connectivity and cycles.
    let idx: BTreeMap<VertexId, usize> = vids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut parent: Vec<usize> = (0..idx.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (_, (a, b)) in &g.bounded_edges {
        let (Some(&ia), Some(&ib)) = (idx.get(a), idx.get(b)) else { continue };
        let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
        if ra == rb {
            r.push("Betti number nonzero");
        } else {
            parent[ra] = rb;
        }
    }
    let roots: BTreeSet<usize> = (0..idx.len()).map(|i| find(&mut parent, i)).collect();
    if roots.len() > 1 {
        r.push("graph is disconnected");
    }

    for &(v, class) in &g.vertices {
        let val = g.valency(v);
        match (class, val) {
            (VertexClass::Interior, 2) => r.push(format!("divalent vertex {v}")),
            (VertexClass::Interior, 0 | 1) => r.push(format!("univalent interior vertex {v}")),
            (VertexClass::Negative, 0) => r.push(format!("isolated negative vertex {v}")),
            _ => {}
        }
    }
    r.finish()
}

/// Flag directions and negative-vertex data on top of a coral graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct CoralType {
    pub graph: CoralGraph,
    /// Primitive direction of each flag (vertex, edge), pointing away from the vertex.
    pub flag_dirs: BTreeMap<(VertexId, EdgeId), LatticeVector>,
    /// Primitive direction from each negative vertex toward the origin.
    pub negvert_dirs: BTreeMap<VertexId, LatticeVector>,
    pub negvert_weights: BTreeMap<VertexId, u64>,
}

impl CoralType {
    pub fn flag(&self, v: VertexId, e: EdgeId) -> LatticeVector {
        self.flag_dirs[&(v, e)]
    }

    /// Direction of the positive edge `e` (pointing to infinity).
    pub fn positive_dir(&self, e: EdgeId) -> LatticeVector {
        let v = self.graph.positive_endpoint(e).expect("positive edge");
        self.flag(v, e)
    }

    /// Structural checks that do not involve positions.
    pub fn validate(&self) -> Report {
        let mut r = validate_graph(&self.graph);
        if !r.is_valid() {
            return r;
        }
        let g = &self.graph;
        for (e, (a, b)) in &g.bounded_edges {
            match (self.flag_dirs.get(&(*a, *e)), self.flag_dirs.get(&(*b, *e))) {
                (Some(u), Some(w)) => {
                    if *u != w.neg() {
                        r.push(format!("flags of edge {e} are not opposite"));
                    }
                    if !u.is_primitive() {
                        r.push(format!("flag direction of edge {e} is not primitive"));
                    }
                }
                _ => r.push(format!("missing flag direction on edge {e}")),
            }
        }
        for (e, v) in &g.positive_edges {
            match self.flag_dirs.get(&(*v, *e)) {
                None => r.push(format!("missing flag direction on edge {e}")),
                Some(u) => {
                    if !u.is_primitive() {
                        r.push(format!("flag direction of edge {e} is not primitive"));
                    }
                    if u.b <= 0 {
                        r.push(format!("positive edge {e} does not point upward"));
                    }
                }
            }
        }
        for v in g.negative_vertices() {
            match self.negvert_dirs.get(&v) {
                None => r.push(format!("missing direction at negative vertex {v}")),
                Some(u) if u.b >= 0 || !u.is_primitive() => {
                    r.push(format!("negative vertex {v} direction must be primitive with negative height"))
                }
                _ => {}
            }
            if self.negvert_weights.get(&v).copied().unwrap_or(0) == 0 {
                r.push(format!("missing weight at negative vertex {v}"));
            }
        }
        r.finish()
    }

    /// Weighted sum Σ w(e)·u_(v,e) over the edges at `v`.
    pub fn weighted_flag_sum(&self, v: VertexId) -> LatticeVector {
        let adj = self.graph.adjacency();
        adj[&v].iter().fold(LatticeVector::new(0, 0), |acc, inc| {
            let e = inc.edge();
            acc.add(self.flag(v, e).scale(self.graph.weight(e) as i64))
        })
    }

    pub fn extend_graph(&self) -> Result<ExtendedGraph, Error> {
        extend_graph(&self.graph, &self.negvert_weights)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum UnboundedKind {
    /// A positive edge of the coral graph.
    Positive(EdgeId),
    /// The edge of a removed univalent negative vertex.
    FromLeaf { edge: EdgeId, removed: VertexId },
    /// A half-edge inserted at a multivalent negative vertex.
    Inserted(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnboundedEdge {
    pub kind: UnboundedKind,
    pub vertex: VertexId,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedGraph {
    pub vertices: Vec<VertexId>,
    pub bounded_edges: Vec<(EdgeId, (VertexId, VertexId), u64)>,
    pub unbounded: Vec<UnboundedEdge>,
}

impl ExtendedGraph {
    pub fn betti_number(&self) -> usize {
        // Connected by construction; a tree iff |E| = |V| − 1.
        (self.bounded_edges.len() + 1).saturating_sub(self.vertices.len())
    }
}

/// Removes univalent negative vertices (their edge becomes an unbounded end)
/// and inserts an unbounded end of weight w_v at every other negative vertex.
pub fn extend_graph(
    g: &CoralGraph,
    negvert_weights: &BTreeMap<VertexId, u64>,
) -> Result<ExtendedGraph, Error> {
    let r = validate_graph(g);
    if !r.is_valid() {
        return Err(Error::InvalidGraph(r.violations));
    }
    let adj = g.adjacency();
    let mut removed = BTreeMap::new();
    let mut unbounded = Vec::new();
    for v in g.negative_vertices() {
        let inc = &adj[&v];
        if inc.len() == 1 {
            if let Incidence::Bounded { edge, other } = inc[0] {
                removed.insert(v, (edge, other));
                continue;
            }
        }
        let w = *negvert_weights
            .get(&v)
            .ok_or_else(|| Error::InvalidGraph(vec![format!("missing weight at negative vertex {v}")]))?;
        unbounded.push(UnboundedEdge { kind: UnboundedKind::Inserted(v), vertex: v, weight: w });
    }
    for (&v, &(edge, other)) in &removed {
        if removed.contains_key(&other) {
            // Two univalent negative vertices joined by one edge: no interior left.
            return Err(Error::InvalidGraph(vec!["edge between two univalent negative vertices".into()]));
        }
        unbounded.push(UnboundedEdge {
            kind: UnboundedKind::FromLeaf { edge, removed: v },
            vertex: other,
            weight: g.weight(edge),
        });
    }
    for &(e, v) in &g.positive_edges {
        unbounded.push(UnboundedEdge { kind: UnboundedKind::Positive(e), vertex: v, weight: g.weight(e) });
    }
    unbounded.sort_by_key(|u| u.kind);
    let mut vertices: Vec<VertexId> =
        g.vertices.iter().map(|(v, _)| *v).filter(|v| !removed.contains_key(v)).collect();
    vertices.sort();
    let mut bounded_edges: Vec<_> = g
        .bounded_edges
        .iter()
        .filter(|(_, (a, b))| !removed.contains_key(a) && !removed.contains_key(b))
        .map(|&(e, p)| (e, p, g.weight(e)))
        .collect();
    bounded_edges.sort();
    Ok(ExtendedGraph { vertices, bounded_edges, unbounded })
}
