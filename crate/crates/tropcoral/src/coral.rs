//! Tropical corals: a type together with rational vertex positions on the
//! truncated cone {height ≥ 1}.

use std::collections::{BTreeMap, BTreeSet};

use num::One;
use serde::{Deserialize, Serialize};

use crate::coralgraph::{CoralGraph, CoralType, EdgeId, Incidence, Report, VertexClass, VertexId};
use crate::lattice::{fmt_q, primitive, primitive_of_point, LatticeVector, RationalPoint, Q};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCoral {
    pub ctype: CoralType,
    pub positions: BTreeMap<VertexId, RationalPoint>,
}

/// Weighted directions of the positive ends (in label order) and of the
/// negative vertices (w_v·u_v).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Degree {
    pub positive: Vec<LatticeVector>,
    pub negative: Vec<LatticeVector>,
}

impl Degree {
    pub fn new(positive: Vec<LatticeVector>, negative: Vec<LatticeVector>) -> Self {
        Degree { positive, negative }
    }

    pub fn l(&self) -> usize {
        self.positive.len()
    }

    pub fn m(&self) -> usize {
        self.negative.len()
    }

    /// Sum of all entries is zero (holds for the degree of every coral).
    pub fn is_balanced(&self) -> bool {
        self.positive.iter().chain(&self.negative).fold(LatticeVector::new(0, 0), |a, v| a.add(*v)).is_zero()
    }

    pub fn check(&self) -> Result<(), Error> {
        if self.positive.is_empty() || self.negative.is_empty() {
            return Err(Error::EmptyDegree);
        }
        if self.positive.iter().any(|v| v.b <= 0) || self.negative.iter().any(|v| v.b >= 0) {
            return Err(Error::Parse("positive entries need height > 0, negative entries height < 0".into()));
        }
        if !self.is_balanced() {
            return Err(Error::Unbalanced);
        }
        Ok(())
    }

    /// Primitive directions of the positive ends, in label order.
    pub fn positive_dirs(&self) -> Vec<LatticeVector> {
        self.positive.iter().map(|v| primitive(*v).expect("nonzero").0).collect()
    }

    /// Equality with positive entries compared in order and negative entries as a multiset.
    pub fn same_as(&self, other: &Degree) -> bool {
        let mut a = self.negative.clone();
        let mut b = other.negative.clone();
        a.sort();
        b.sort();
        self.positive == other.positive && a == b
    }
}

/// Position forced on a negative vertex with weighted direction `u` toward the origin.
pub fn forced_negative_position(u: LatticeVector) -> RationalPoint {
    RationalPoint::new(Q::new(u.a.into(), u.b.into()), Q::one())
}

pub fn validate_coral(c: &TropicalCoral) -> Report {
    let t = &c.ctype;
    let mut r = t.validate();
    if !r.is_valid() {
        return r;
    }
    let g = &t.graph;
    for (v, _) in &g.vertices {
        if !c.positions.contains_key(v) {
            r.push(format!("missing position for vertex {v}"));
        }
    }
    if !r.is_valid() {
        return r.finish();
    }
    let adj = g.adjacency();
    for &(v, class) in &g.vertices {
        let p = &c.positions[&v];
        match class {
            VertexClass::Interior => {
                if p.h <= Q::one() {
                    r.push(format!("interior vertex {v} not above height 1"));
                }
                if !t.weighted_flag_sum(v).is_zero() {
                    r.push(format!("interior balancing fails at vertex {v}"));
                }
            }
            VertexClass::Negative => {
                if p.h != Q::one() {
                    r.push(format!("negative vertex {v} not at height 1"));
                    continue;
                }
                let stored = t.negvert_dirs[&v];
                if *p != forced_negative_position(stored) {
                    r.push(format!("negative vertex {v} position does not match its direction"));
                }
                let toward_origin = primitive_of_point(&p.scale(&-Q::one())).expect("height 1");
                if toward_origin != stored {
                    r.push(format!("negative vertex {v} direction mismatch"));
                }
                let s = t.weighted_flag_sum(v).neg();
                match primitive(s) {
                    Ok((dir, w)) if dir == toward_origin => {
                        if t.negvert_weights[&v] != w {
                            r.push(format!("negative balancing fails at vertex {v}"));
                        }
                    }
                    _ => r.push(format!("negative balancing fails at vertex {v}: no positive integer weight")),
                }
            }
        }
        let mut germs = BTreeSet::new();
        for inc in &adj[&v] {
            if !germs.insert(t.flag(v, inc.edge())) {
                r.push(format!("two edges leave vertex {v} in the same direction"));
            }
        }
    }
    for &(e, (a, b)) in &g.bounded_edges {
        let d = c.positions[&b].sub(&c.positions[&a]);
        if d.positive_multiple_of(t.flag(a, e)).is_none() {
            r.push(format!("edge {e} geometry does not match its direction"));
        }
    }
    r.finish()
}

fn ensure_valid(c: &TropicalCoral) -> Result<(), Error> {
    let r = validate_coral(c);
    if r.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidCoral(r.violations))
    }
}

/// Reads the type off the geometry: bounded-edge flags from endpoint positions,
/// negative directions from the negative vertex positions.
pub fn type_of(c: &TropicalCoral) -> Result<CoralType, Error> {
    ensure_valid(c)?;
    let mut t = c.ctype.clone();
    for &(e, (a, b)) in &t.graph.bounded_edges {
        let u = primitive_of_point(&c.positions[&b].sub(&c.positions[&a]))?;
        t.flag_dirs.insert((a, e), u);
        t.flag_dirs.insert((b, e), u.neg());
    }
    for v in t.graph.negative_vertices() {
        let u = primitive_of_point(&c.positions[&v].scale(&-Q::one()))?;
        t.negvert_dirs.insert(v, u);
    }
    Ok(t)
}

pub fn degree_of(t: &CoralType) -> Degree {
    let g = &t.graph;
    let positive = g.labels.iter().map(|&e| t.positive_dir(e).scale(g.weight(e) as i64)).collect();
    let negative = g
        .negative_vertices()
        .into_iter()
        .map(|v| t.negvert_dirs[&v].scale(t.negvert_weights[&v] as i64))
        .collect();
    Degree { positive, negative }
}

pub fn is_general_type(t: &CoralType) -> bool {
    let g = &t.graph;
    g.vertices.iter().all(|&(v, c)| match c {
        VertexClass::Interior => g.valency(v) == 3,
        VertexClass::Negative => g.valency(v) == 1,
    })
}

pub fn is_general(c: &TropicalCoral) -> bool {
    is_general_type(&c.ctype)
}

/// Scales the coral by `s ≥ 1`; negative vertices stay at height 1 on their rays.
pub fn rescale(c: &TropicalCoral, s: &Q) -> Result<TropicalCoral, Error> {
    if *s < Q::one() {
        return Err(Error::BadScale);
    }
    if s.is_one() {
        return Ok(c.clone());
    }
    let g = &c.ctype.graph;
    let mut out = c.clone();
    for &(v, class) in &g.vertices {
        match class {
            VertexClass::Interior => {
                let p = out.positions[&v].scale(s);
                out.positions.insert(v, p);
            }
            VertexClass::Negative => {
                let bounded = g.bounded_edges.iter().filter(|(_, (a, b))| *a == v || *b == v).count();
                if g.valency(v) > 1 && bounded > 0 {
                    return Err(Error::RescaleChangesType);
                }
            }
        }
    }
    Ok(out)
}

/// Deterministic relabelling of a type (and optionally positions).
struct Canon {
    vmap: BTreeMap<VertexId, VertexId>,
    emap: BTreeMap<EdgeId, EdgeId>,
    bounded: Vec<(EdgeId, (VertexId, VertexId))>,
}

fn canon(t: &CoralType, positions: Option<&BTreeMap<VertexId, RationalPoint>>) -> Canon {
    let g = &t.graph;
    let adj = g.adjacency();
    let key = |v: VertexId| -> String {
        let mut k = match g.class(v) {
            Some(VertexClass::Negative) => {
                format!("N{}w{}", t.negvert_dirs.get(&v).copied().unwrap_or_default_vec(), t.negvert_weights.get(&v).copied().unwrap_or(0))
            }
            _ => "I".to_string(),
        };
        if let Some(p) = positions.and_then(|p| p.get(&v)) {
            k.push_str(&format!("@{},{}", fmt_q(&p.x), fmt_q(&p.h)));
        }
        k
    };
    fn encode(
        v: VertexId,
        from: Option<EdgeId>,
        t: &CoralType,
        adj: &BTreeMap<VertexId, Vec<Incidence>>,
        key: &dyn Fn(VertexId) -> String,
        memo: &mut BTreeMap<(VertexId, Option<EdgeId>), String>,
    ) -> String {
        if let Some(s) = memo.get(&(v, from)) {
            return s.clone();
        }
        let g = &t.graph;
        let mut parts: Vec<String> = Vec::new();
        for inc in &adj[&v] {
            let e = inc.edge();
            if Some(e) == from {
                continue;
            }
            let dir = t.flag_dirs.get(&(v, e)).copied().unwrap_or_default_vec();
            match *inc {
                Incidence::Positive { edge } => {
                    parts.push(format!("P{}w{}{}", g.label_index(edge).unwrap_or(usize::MAX), g.weight(edge), dir))
                }
                Incidence::Bounded { edge, other } => {
                    let sub = encode(other, Some(edge), t, adj, key, memo);
                    parts.push(format!("B{}w{}{}", dir, g.weight(edge), sub));
                }
            }
        }
        parts.sort();
        let s = format!("{}[{}]", key(v), parts.join(","));
        memo.insert((v, from), s.clone());
        s
    }
    let mut memo = BTreeMap::new();
    let mut roots = g.negative_vertices();
    if roots.is_empty() {
        roots = g.vertices.iter().map(|(v, _)| *v).collect();
    }
    let root = roots
        .into_iter()
        .map(|r| (encode(r, None, t, &adj, &key, &mut memo), r))
        .min()
        .map(|(_, r)| r)
        .expect("nonempty graph");

    let mut c = Canon { vmap: BTreeMap::new(), emap: BTreeMap::new(), bounded: Vec::new() };
    for (i, &e) in g.labels.iter().enumerate() {
        c.emap.insert(e, i);
    }
    let mut next_edge = g.labels.len();
    let mut stack = vec![(root, None::<EdgeId>)];
    while let Some((v, from)) = stack.pop() {
        let nv = c.vmap.len();
        c.vmap.insert(v, nv);
        let mut kids: Vec<(String, EdgeId, VertexId)> = adj[&v]
            .iter()
            .filter_map(|inc| match *inc {
                Incidence::Bounded { edge, other } if Some(edge) != from => {
                    Some((encode(other, Some(edge), t, &adj, &key, &mut memo), edge, other))
                }
                _ => None,
            })
            .collect();
        kids.sort();
        for (_, e, w) in kids.iter().rev() {
            stack.push((*w, Some(*e)));
        }
        // Edge ids in the order the children will be visited.
        for (_, e, w) in &kids {
            c.emap.insert(*e, next_edge);
            c.bounded.push((next_edge, (v, *w)));
            next_edge += 1;
        }
    }
    c
}

trait OrZeroVec {
    fn unwrap_or_default_vec(self) -> LatticeVector;
}

impl OrZeroVec for Option<LatticeVector> {
    fn unwrap_or_default_vec(self) -> LatticeVector {
        self.unwrap_or(LatticeVector::new(0, 0))
    }
}

fn apply(t: &CoralType, c: &Canon) -> CoralType {
    let g = &t.graph;
    let mut vertices: Vec<_> = g.vertices.iter().map(|(v, cl)| (c.vmap[v], *cl)).collect();
    vertices.sort();
    let mut positive_edges: Vec<_> = g.positive_edges.iter().map(|(e, v)| (c.emap[e], c.vmap[v])).collect();
    positive_edges.sort();
    let mut bounded_edges: Vec<_> =
        c.bounded.iter().map(|&(e, (a, b))| (e, (c.vmap[&a], c.vmap[&b]))).collect();
    bounded_edges.sort();
    let graph = CoralGraph {
        vertices,
        positive_edges,
        bounded_edges,
        weights: g.weights.iter().map(|(e, w)| (c.emap[e], *w)).collect(),
        labels: (0..g.labels.len()).collect(),
    };
    CoralType {
        graph,
        flag_dirs: t.flag_dirs.iter().map(|(&(v, e), u)| ((c.vmap[&v], c.emap[&e]), *u)).collect(),
        negvert_dirs: t.negvert_dirs.iter().map(|(v, u)| (c.vmap[v], *u)).collect(),
        negvert_weights: t.negvert_weights.iter().map(|(v, w)| (c.vmap[v], *w)).collect(),
    }
}

/// Canonical relabelling of a type; isomorphic types (respecting labels,
/// directions and weights) have identical canonical forms.
pub fn canonical_type(t: &CoralType) -> CoralType {
    apply(t, &canon(t, None))
}

/// Reorders the labels by the anticlockwise angle of the positive ends (then
/// weight), discarding the original labelling.
pub fn forget_labels(t: &CoralType) -> CoralType {
    let mut t = t.clone();
    let key = |e: &EdgeId| (t.positive_dir(*e), t.graph.weight(*e));
    let mut labels = t.graph.labels.clone();
    labels.sort_by(|a, b| {
        let (ua, wa) = key(a);
        let (ub, wb) = key(b);
        crate::morse::angular_cmp(ua, ub).then(wa.cmp(&wb))
    });
    t.graph.labels = labels;
    t
}

pub fn canonical_form(c: &TropicalCoral) -> TropicalCoral {
    let cn = canon(&c.ctype, Some(&c.positions));
    TropicalCoral {
        ctype: apply(&c.ctype, &cn),
        positions: c.positions.iter().map(|(v, p)| (cn.vmap[v], p.clone())).collect(),
    }
}

impl TropicalCoral {
    pub fn validate(&self) -> Report {
        validate_coral(self)
    }

    pub fn degree(&self) -> Degree {
        degree_of(&self.ctype)
    }

    /// Position at which the positive edge `e` starts.
    pub fn positive_start(&self, e: EdgeId) -> &RationalPoint {
        &self.positions[&self.ctype.graph.positive_endpoint(e).expect("positive edge")]
    }

    /// Lowest interior height, if there are interior vertices.
    pub fn min_interior_height(&self) -> Option<Q> {
        self.ctype.graph.interior_vertices().iter().map(|v| self.positions[v].h.clone()).min()
    }

    pub fn mirror(&self) -> TropicalCoral {
        let m = |u: LatticeVector| LatticeVector::new(-u.a, u.b);
        let mut t = self.ctype.clone();
        for u in t.flag_dirs.values_mut() {
            *u = m(*u);
        }
        for u in t.negvert_dirs.values_mut() {
            *u = m(*u);
        }
        let positions =
            self.positions.iter().map(|(v, p)| (*v, RationalPoint::new(-p.x.clone(), p.h.clone()))).collect();
        TropicalCoral { ctype: t, positions }
    }
}

/// Small reference corals used in documentation, tests and the CLI corpus.
pub mod samples {
    use super::*;
    use crate::lattice::q;
    use VertexClass::*;

    /// Negative vertex (0,1), interior (0,2), ends (−1,1) and (1,1); w_v = 2.
    pub fn y_coral() -> TropicalCoral {
        let v = LatticeVector::new;
        let graph = CoralGraph {
            vertices: vec![(0, Negative), (1, Interior)],
            positive_edges: vec![(1, 1), (2, 1)],
            bounded_edges: vec![(0, (0, 1))],
            weights: [(0, 2), (1, 1), (2, 1)].into_iter().collect(),
            labels: vec![1, 2],
        };
        let flag_dirs = [((0, 0), v(0, 1)), ((1, 0), v(0, -1)), ((1, 1), v(-1, 1)), ((1, 2), v(1, 1))]
            .into_iter()
            .collect();
        TropicalCoral {
            ctype: CoralType {
                graph,
                flag_dirs,
                negvert_dirs: [(0, v(0, -1))].into_iter().collect(),
                negvert_weights: [(0, 2)].into_iter().collect(),
            },
            positions: [(0, RationalPoint::from_ints(0, 1)), (1, RationalPoint::from_ints(0, 2))]
                .into_iter()
                .collect(),
        }
    }

    /// Negative vertex (0,1) with w_v = 5, interior vertex (0,2), ends (2,1) of
    /// weight 3 and (−3,1) of weight 2.
    pub fn simple_example() -> TropicalCoral {
        simple_example_at(q(2))
    }

    pub fn simple_example_at(height: Q) -> TropicalCoral {
        let v = LatticeVector::new;
        let graph = CoralGraph {
            vertices: vec![(0, Negative), (1, Interior)],
            positive_edges: vec![(1, 1), (2, 1)],
            bounded_edges: vec![(0, (0, 1))],
            weights: [(0, 5), (1, 3), (2, 2)].into_iter().collect(),
            labels: vec![1, 2],
        };
        let flag_dirs = [((0, 0), v(0, 1)), ((1, 0), v(0, -1)), ((1, 1), v(2, 1)), ((1, 2), v(-3, 1))]
            .into_iter()
            .collect();
        TropicalCoral {
            ctype: CoralType {
                graph,
                flag_dirs,
                negvert_dirs: [(0, v(0, -1))].into_iter().collect(),
                negvert_weights: [(0, 5)].into_iter().collect(),
            },
            positions: [(0, RationalPoint::from_ints(0, 1)), (1, RationalPoint::new(q(0), height))]
                .into_iter()
                .collect(),
        }
    }

    pub fn simple_degree() -> Degree {
        Degree::new(vec![LatticeVector::new(6, 3), LatticeVector::new(-6, 2)], vec![LatticeVector::new(0, -5)])
    }

    pub fn y_degree() -> Degree {
        Degree::new(vec![LatticeVector::new(-1, 1), LatticeVector::new(1, 1)], vec![LatticeVector::new(0, -2)])
    }
}
