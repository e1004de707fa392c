//! Tropical Morse trees on the universal cover ℝ of S¹, their velocities, and
//! the correspondence with general corals.
//!
//! A coral vertex at (x, y) projects radially to φ = x/y; negative vertices sit
//! at height 1 so φ is their first coordinate, and a positive end with
//! direction u projects to u₁/u₂. Edges are oriented toward the root. For the
//! weighted travel vector W = (X, Y) of an edge the acceleration is n = −Y and
//! the velocity at parameter φ is X − φ·Y, which is linear along the edge.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use crate::coral::{is_general, validate_coral, TropicalCoral};
use crate::coralgraph::{CoralGraph, CoralType, EdgeId, Report, VertexClass, VertexId};
use crate::lattice::{det2, primitive, primitive_of_point, LatticeVector, RationalPoint, Q};
use crate::Error;

/// A rooted ribbon tree with decoration and a map φ to ℝ.
///
/// `vertices` lists the neighbours of each vertex in anticlockwise cyclic
/// order. Edges are identified by their endpoint farther from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseTree {
    pub vertices: BTreeMap<VertexId, Vec<VertexId>>,
    pub root: VertexId,
    pub decoration: Vec<i64>,
    pub phi: BTreeMap<VertexId, Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeVelocity {
    pub accel: i64,
    /// ℓ_e = φ(head) − φ(tail).
    pub length: Q,
    pub start: Q,
    pub end: Q,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VelocityProfile {
    pub edges: BTreeMap<VertexId, EdgeVelocity>,
}

impl VelocityProfile {
    pub fn contracted(&self) -> BTreeSet<VertexId> {
        self.edges.iter().filter(|(_, e)| e.length.is_zero()).map(|(k, _)| *k).collect()
    }
}

/// Rooted structure read off the ribbon tree.
#[derive(Clone, Debug)]
struct Shape {
    parent: BTreeMap<VertexId, VertexId>,
    preorder: Vec<VertexId>,
    /// Non-root external vertices in region order.
    leaves: Vec<VertexId>,
    /// Acceleration of the edge above each non-root vertex.
    accel: BTreeMap<VertexId, i64>,
}

impl Shape {
    fn children(&self, m: &MorseTree, v: VertexId) -> Vec<VertexId> {
        rotate_after(&m.vertices[&v], self.parent.get(&v).copied())
    }
}

/// Neighbours listed starting just after `parent`, omitting it.
fn rotate_after(nbrs: &[VertexId], parent: Option<VertexId>) -> Vec<VertexId> {
    match parent.and_then(|p| nbrs.iter().position(|x| *x == p)) {
        Some(i) => nbrs[i + 1..].iter().chain(&nbrs[..i]).copied().collect(),
        None => nbrs.to_vec(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExternalRef {
    Negative(VertexId),
    Positive(EdgeId),
}

impl MorseTree {
    pub fn is_external(&self, v: VertexId) -> bool {
        self.vertices.get(&v).is_some_and(|n| n.len() == 1)
    }

    fn shape(&self) -> Result<Shape, Vec<String>> {
        let mut bad = Vec::new();
        for (v, nbrs) in &self.vertices {
            let set: BTreeSet<_> = nbrs.iter().collect();
            if set.len() != nbrs.len() {
                bad.push(format!("vertex {v} lists a neighbour twice"));
            }
            for w in nbrs {
                if *w == *v {
                    bad.push(format!("vertex {v} is its own neighbour"));
                } else if !self.vertices.get(w).is_some_and(|o| o.contains(v)) {
                    bad.push(format!("adjacency {v}-{w} is not symmetric"));
                }
            }
            match nbrs.len() {
                0 => bad.push(format!("isolated vertex {v}")),
                2 => bad.push(format!("divalent vertex {v}")),
                _ => {}
            }
            if !self.phi.contains_key(v) {
                bad.push(format!("φ undefined at vertex {v}"));
            }
        }
        if !self.is_external(self.root) {
            bad.push("root is not an external vertex".into());
        }
        if !bad.is_empty() {
            return Err(bad);
        }
        let n_edges: usize = self.vertices.values().map(Vec::len).sum::<usize>() / 2;
        if n_edges + 1 != self.vertices.len() {
            return Err(vec!["ribbon graph is not a tree".into()]);
        }
        let mut parent = BTreeMap::new();
        let mut preorder = Vec::new();
        let mut leaves = Vec::new();
        let mut stack = vec![(self.root, None)];
        while let Some((v, p)) = stack.pop() {
            preorder.push(v);
            if let Some(p) = p {
                parent.insert(v, p);
            }
            let kids = rotate_after(&self.vertices[&v], p);
            if kids.is_empty() && p.is_some() {
                leaves.push(v);
            }
            for k in kids.into_iter().rev() {
                stack.push((k, Some(v)));
            }
        }
        if preorder.len() != self.vertices.len() {
            return Err(vec!["ribbon graph is not a tree".into()]);
        }
        let d = leaves.len();
        if self.decoration.len() != d + 1 {
            return Err(vec![format!("decoration has {} entries, expected {}", self.decoration.len(), d + 1)]);
        }
        if self.decoration.iter().collect::<BTreeSet<_>>().len() != d + 1 {
            return Err(vec!["decoration entries are not distinct".into()]);
        }
        // Leaf ranges covered by each subtree, filled in reverse preorder.
        let leaf_index: BTreeMap<_, _> = leaves.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut range: BTreeMap<VertexId, (usize, usize)> = BTreeMap::new();
        for &v in preorder.iter().rev() {
            if v == self.root {
                continue;
            }
            let r = match leaf_index.get(&v) {
                Some(&i) => (i, i),
                None => {
                    let kids = rotate_after(&self.vertices[&v], parent.get(&v).copied());
                    (range[&kids[0]].0, range[kids.last().unwrap()].1)
                }
            };
            range.insert(v, r);
        }
        let accel = range.iter().map(|(v, (a, b))| (*v, self.decoration[b + 1] - self.decoration[*a])).collect();
        Ok(Shape { parent, preorder, leaves, accel })
    }

    /// Non-root external vertices in region order: leaf i sits between
    /// regions i and i+1.
    pub fn leaves(&self) -> Vec<VertexId> {
        self.shape().map(|s| s.leaves).unwrap_or_default()
    }

    /// Acceleration of each edge, keyed by its endpoint farther from the root.
    pub fn accelerations(&self) -> BTreeMap<VertexId, i64> {
        self.shape().map(|s| s.accel).unwrap_or_default()
    }

    /// Edges forced to be contracted: a leaf edge with n < 0, or the root
    /// edge with n > 0.
    pub fn predicted_contracted(&self) -> BTreeSet<VertexId> {
        let Ok(s) = self.shape() else { return BTreeSet::new() };
        s.accel
            .iter()
            .filter(|(v, n)| {
                let leaf = s.leaves.contains(v);
                let root_edge = s.parent[v] == self.root;
                (leaf && **n < 0) || (root_edge && **n > 0)
            })
            .map(|(v, _)| *v)
            .collect()
    }

    /// Relabels vertices in preorder from the root, rotates every cyclic
    /// list to start at the parent, and shifts the decoration to n₀ = 0.
    pub fn canonical(&self) -> MorseTree {
        let Ok(s) = self.shape() else { return self.clone() };
        let id: BTreeMap<_, _> = s.preorder.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut vertices = BTreeMap::new();
        for &v in &s.preorder {
            let nbrs = match s.parent.get(&v) {
                Some(&p) => std::iter::once(p).chain(s.children(self, v)).collect(),
                None => self.vertices[&v].clone(),
            };
            vertices.insert(id[&v], nbrs.iter().map(|w| id[w]).collect());
        }
        let n0 = self.decoration[0];
        MorseTree {
            vertices,
            root: 0,
            decoration: self.decoration.iter().map(|n| n - n0).collect(),
            phi: self.phi.iter().map(|(v, x)| (id[v], x.clone())).collect(),
        }
    }
}

/// Checks the tree structure, rationality of the external images, velocity
/// propagation, the sign rule and the contraction law. The profile is
/// returned only for valid trees.
pub fn validate_tmt(m: &MorseTree) -> (Report, Option<VelocityProfile>) {
    let mut r = Report::default();
    let s = match m.shape() {
        Ok(s) => s,
        Err(v) => {
            for x in v {
                r.push(x);
            }
            return (r.finish(), None);
        }
    };
    let mut prof = VelocityProfile::default();
    for &c in s.preorder.iter().rev() {
        let Some(&p) = s.parent.get(&c) else { continue };
        let n = s.accel[&c];
        let start = if m.is_external(c) {
            Q::zero()
        } else {
            s.children(m, c).iter().map(|k| prof.edges[k].end.clone()).sum()
        };
        let length = &m.phi[&p] - &m.phi[&c];
        let end = &start + Q::from_integer(n.into()) * &length;
        prof.edges.insert(c, EdgeVelocity { accel: n, length, start, end });
    }
    for (&c, e) in &prof.edges {
        let p = s.parent[&c];
        for x in [c, p].into_iter().filter(|x| m.is_external(*x)) {
            if !(&m.phi[&x] * Q::from_integer(e.accel.into())).is_integer() {
                r.push(format!("φ({x}) = {} is not in (1/{})ℤ", crate::lattice::fmt_q(&m.phi[&x]), e.accel.abs()));
            }
        }
        let sl = e.length.signum();
        if sl.is_zero() {
            if !e.start.is_zero() {
                r.push(format!("edge {c} is contracted but its velocity is nonzero"));
            }
        } else if [&e.start, &e.end].iter().any(|v| !v.is_zero() && v.signum() != sl) {
            r.push(format!("velocity on edge {c} points against its orientation"));
        }
        if p == m.root && !e.end.is_zero() {
            r.push(format!("velocity balancing fails at the root (v = {})", crate::lattice::fmt_q(&e.end)));
        }
    }
    let contracted = prof.contracted();
    let predicted = m.predicted_contracted();
    if contracted != predicted {
        r.push(format!("contracted edges {contracted:?} differ from the predicted {predicted:?}"));
    }
    let r = r.finish();
    let prof = r.is_valid().then_some(prof);
    (r, prof)
}

fn invalid(s: impl Into<String>) -> Error {
    Error::InvalidTmt(vec![s.into()])
}

/// The coral type determined by a valid tree. Vertex ids are kept; every edge
/// takes the id of its endpoint farther from the root.
pub fn tmt_to_type(m: &MorseTree) -> Result<CoralType, Error> {
    let (r, prof) = validate_tmt(m);
    let prof = prof.ok_or(Error::InvalidTmt(r.violations))?;
    let s = m.shape().map_err(Error::InvalidTmt)?;
    let contracted = prof.contracted();
    let external: Vec<VertexId> = s.leaves.iter().copied().chain([m.root]).collect();
    let root_child = m.vertices[&m.root][0];
    let edge_of = |v: VertexId| if v == m.root { root_child } else { v };
    let negative: BTreeSet<VertexId> = external.iter().copied().filter(|v| contracted.contains(&edge_of(*v))).collect();
    if negative.is_empty() {
        return Err(invalid("no contracted edge"));
    }
    if external.len() == m.vertices.len() {
        return Err(invalid("tree has no internal vertex"));
    }
    let mut g = CoralGraph::default();
    let mut t = CoralType::default();
    for &v in &s.preorder {
        if !m.is_external(v) {
            g.vertices.push((v, VertexClass::Interior));
        } else if negative.contains(&v) {
            g.vertices.push((v, VertexClass::Negative));
        }
    }
    g.vertices.sort();
    let is_coral = |v: VertexId| !m.is_external(v) || negative.contains(&v);
    for (&c, e) in &prof.edges {
        let p = s.parent[&c];
        let x = &e.start - Q::from_integer(e.accel.into()) * &m.phi[&c];
        if !x.is_integer() {
            return Err(invalid(format!("edge {c} has a non-integral travel vector")));
        }
        let x = x.to_integer().try_into().map_err(|_| Error::Overflow)?;
        let (u, w) = primitive(LatticeVector::new(x, -e.accel))?;
        g.weights.insert(c, w);
        match (is_coral(c), is_coral(p)) {
            (true, true) => g.bounded_edges.push((c, (c, p))),
            (true, false) => g.positive_edges.push((c, c)),
            (false, true) => g.positive_edges.push((c, p)),
            (false, false) => return Err(invalid("edge joins two positive vertices")),
        }
        if is_coral(c) {
            t.flag_dirs.insert((c, c), u);
        }
        if is_coral(p) {
            t.flag_dirs.insert((p, c), u.neg());
        }
    }
    g.labels = external.iter().filter(|v| !negative.contains(v)).map(|v| edge_of(*v)).collect();
    t.graph = g;
    for &v in &negative {
        let (u, w) = primitive(t.weighted_flag_sum(v).neg())?;
        let want = primitive_of_point(&RationalPoint::new(m.phi[&v].clone(), Q::one()))?.neg();
        if u != want {
            return Err(invalid(format!("negative vertex {v} is not balanced along its ray")));
        }
        t.negvert_dirs.insert(v, u);
        t.negvert_weights.insert(v, w);
    }
    let rep = t.validate();
    if !rep.is_valid() {
        return Err(Error::InvalidTmt(rep.violations));
    }
    Ok(t)
}

/// Lifts a valid tree to a coral. The first height places the interior
/// neighbour of the fixed negative vertex (the root when negative, otherwise
/// the first negative leaf) on its ray; every other interior vertex is then
/// forced onto its ray R_φ = ℝ·(φ, 1). Further heights, when given, are the
/// heights of the interior vertices not adjacent to a negative vertex in
/// preorder and must agree with the forced ones.
pub fn lift_tmt(m: &MorseTree, heights: &[Q]) -> Result<TropicalCoral, Error> {
    let t = tmt_to_type(m)?;
    let s = m.shape().map_err(Error::InvalidTmt)?;
    let l = t.graph.labels.len();
    if heights.is_empty() || (heights.len() != 1 && heights.len() + 1 != l) {
        return Err(Error::HeightsInfeasible(format!("expected 1 or {} heights, got {}", l.saturating_sub(1), heights.len())));
    }
    let r = &heights[0];
    if *r <= Q::one() {
        return Err(Error::HeightsInfeasible("interior heights must exceed 1".into()));
    }
    let negs = t.graph.negative_vertices();
    let fixed = if negs.contains(&m.root) {
        m.root
    } else {
        *s.leaves.iter().find(|v| negs.contains(v)).expect("a negative vertex exists")
    };
    let mut pos = BTreeMap::new();
    for &v in &negs {
        pos.insert(v, RationalPoint::new(m.phi[&v].clone(), Q::one()));
    }
    let v0 = m.vertices[&fixed][0];
    pos.insert(v0, RationalPoint::new(&m.phi[&fixed] * r, r.clone()));
    let adj = t.graph.adjacency();
    let mut queue = vec![v0];
    while let Some(x) = queue.pop() {
        for inc in &adj[&x] {
            let crate::coralgraph::Incidence::Bounded { edge, other } = *inc else { continue };
            if pos.contains_key(&other) {
                continue;
            }
            let u = t.flag(x, edge);
            let f = &m.phi[&other];
            let px = &pos[&x];
            let den = Q::from_integer(u.a.into()) - f * Q::from_integer(u.b.into());
            if den.is_zero() {
                return Err(Error::HeightsInfeasible(format!("edge {edge} is radial")));
            }
            let step = (f * &px.h - &px.x) / den;
            pos.insert(other, px.step(&step, u));
            queue.push(other);
        }
    }
    if heights.len() > 1 {
        let free: Vec<VertexId> = s
            .preorder
            .iter()
            .copied()
            .filter(|v| t.graph.class(*v) == Some(VertexClass::Interior))
            .filter(|v| adj[v].iter().all(|i| !negs.contains(&i.other_vertex().unwrap_or(usize::MAX))))
            .collect();
        if free.len() + 1 != heights.len() || free.iter().zip(&heights[1..]).any(|(v, h)| pos[v].h != *h) {
            return Err(Error::HeightsInfeasible("heights are inconsistent with the tree".into()));
        }
    }
    if let Some((v, p)) = pos.iter().find(|(v, p)| t.graph.class(**v) == Some(VertexClass::Interior) && p.h <= Q::one()) {
        return Err(Error::HeightsInfeasible(format!("interior vertex {v} at height {}", crate::lattice::fmt_q(&p.h))));
    }
    let c = TropicalCoral { ctype: t, positions: pos };
    let rep = validate_coral(&c);
    if !rep.is_valid() {
        return Err(Error::HeightsInfeasible(rep.violations.join("; ")));
    }
    Ok(c)
}

/// The negative vertex with the least x-coordinate, ties to the lowest id.
pub fn canonical_root(c: &TropicalCoral) -> Option<VertexId> {
    c.ctype.graph.negative_vertices().into_iter().min_by(|a, b| c.positions[a].x.cmp(&c.positions[b].x).then(a.cmp(b)))
}

/// Anticlockwise order of directions starting from the positive x-axis.
pub fn angular_cmp(u: LatticeVector, v: LatticeVector) -> Ordering {
    let half = |w: LatticeVector| if w.b > 0 || (w.b == 0 && w.a > 0) { 0 } else { 1 };
    half(u).cmp(&half(v)).then_with(|| 0.cmp(&det2(u, v)))
}

/// The projection Ψ. Positive ends become external vertices with ids
/// following the coral vertex ids in label order.
pub fn coral_to_tmt(c: &TropicalCoral, root: Option<ExternalRef>) -> Result<MorseTree, Error> {
    let rep = validate_coral(c);
    if !rep.is_valid() {
        return Err(Error::InvalidCoral(rep.violations));
    }
    if !is_general(c) {
        return Err(Error::NonGeneralCoral);
    }
    let t = &c.ctype;
    let g = &t.graph;
    if t.flag_dirs.values().chain(t.negvert_dirs.values()).any(|u| u.b == 0) {
        return Err(Error::NotGoodType);
    }
    let base = g.vertices.iter().map(|(v, _)| v + 1).max().unwrap_or(0);
    let leaf_of = |e: EdgeId| base + g.label_index(e).expect("labelled");
    let mut vertices = BTreeMap::new();
    let mut phi = BTreeMap::new();
    let adj = g.adjacency();
    for &(v, class) in &g.vertices {
        let p = &c.positions[&v];
        phi.insert(v, if class == VertexClass::Negative { p.x.clone() } else { &p.x / &p.h });
        let mut flags: Vec<(LatticeVector, VertexId)> = adj[&v]
            .iter()
            .map(|inc| {
                let e = inc.edge();
                (t.flag(v, e), inc.other_vertex().unwrap_or_else(|| leaf_of(e)))
            })
            .collect();
        flags.sort_by(|a, b| angular_cmp(a.0, b.0));
        vertices.insert(v, flags.into_iter().map(|(_, w)| w).collect::<Vec<_>>());
    }
    for &(e, v) in &g.positive_edges {
        let u = t.flag(v, e);
        vertices.insert(leaf_of(e), vec![v]);
        phi.insert(leaf_of(e), Q::new(u.a.into(), u.b.into()));
    }
    let root = match root {
        None => canonical_root(c).ok_or(Error::BadRoot)?,
        Some(ExternalRef::Negative(v)) if g.class(v) == Some(VertexClass::Negative) => v,
        Some(ExternalRef::Positive(e)) if g.label_index(e).is_some() => leaf_of(e),
        Some(_) => return Err(Error::BadRoot),
    };
    if vertices[&root].len() != 1 {
        return Err(Error::BadRoot);
    }
    // Accelerations from the weighted travel vectors toward the root.
    let mut m = MorseTree { vertices, root, decoration: vec![], phi };
    let mut accel: BTreeMap<VertexId, i64> = BTreeMap::new();
    let mut stack = vec![(root, None::<VertexId>)];
    let mut parent = BTreeMap::new();
    while let Some((v, p)) = stack.pop() {
        for &w in &m.vertices[&v] {
            if Some(w) != p {
                parent.insert(w, v);
                stack.push((w, Some(v)));
            }
        }
    }
    let edge_between = |a: VertexId, b: VertexId| -> (EdgeId, VertexId) {
        // Returns the coral edge and the coral endpoint.
        for (x, y) in [(a, b), (b, a)] {
            if let Some(incs) = adj.get(&x) {
                for inc in incs {
                    let e = inc.edge();
                    if inc.other_vertex() == Some(y) || (inc.other_vertex().is_none() && leaf_of(e) == y) {
                        return (e, x);
                    }
                }
            }
        }
        unreachable!("tree edge without coral edge")
    };
    for (&child, &par) in &parent {
        let (e, at) = edge_between(child, par);
        let u = t.flag(at, e);
        let travel = if at == child { u } else { u.neg() };
        accel.insert(child, -(travel.b * g.weight(e) as i64));
    }
    let mut leaves = Vec::new();
    let mut st = vec![(root, None)];
    while let Some((v, p)) = st.pop() {
        let kids = rotate_after(&m.vertices[&v], p);
        if kids.is_empty() && p.is_some() {
            leaves.push(v);
        }
        for k in kids.into_iter().rev() {
            st.push((k, Some(v)));
        }
    }
    let mut dec = vec![0i64];
    for leaf in &leaves {
        let next = dec.last().unwrap() + accel[leaf];
        dec.push(next);
    }
    if dec.iter().collect::<BTreeSet<_>>().len() != dec.len() {
        return Err(Error::NonDistinctDecoration);
    }
    m.decoration = dec;
    Ok(m)
}

/// Edges with vanishing φ-displacement, from the velocity profile.
pub fn contracted_edges(m: &MorseTree) -> Option<BTreeSet<VertexId>> {
    let s = m.shape().ok()?;
    Some(s.accel.keys().copied().filter(|c| m.phi[&s.parent[c]] == m.phi[c]).collect())
}

pub mod samples {
    use super::*;
    use crate::lattice::q;

    /// Decoration (0,3,5); leaves v₀₁ ↦ 2 and v₁₂ ↦ −3, root v₀₂ and the
    /// internal vertex ↦ 0.
    pub fn simple_morse() -> MorseTree {
        MorseTree {
            vertices: [(0, vec![1]), (1, vec![0, 2, 3]), (2, vec![1]), (3, vec![1])].into_iter().collect(),
            root: 0,
            decoration: vec![0, 3, 5],
            phi: [(0, q(0)), (1, q(0)), (2, q(2)), (3, q(-3))].into_iter().collect(),
        }
    }
}
