//! Multiplicities, the tropical count, and the extension/restriction pair
//! between corals and plane tropical curves.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, One, Signed, Zero};

use crate::constraints::{certificate, check_general, is_good, type_systems, Constraint};
use crate::coral::{forced_negative_position, is_general, validate_coral, Degree, TropicalCoral};
use crate::coralgraph::{CoralGraph, CoralType, EdgeId, UnboundedKind, VertexClass, VertexId};
use crate::lattice::{det2, project_mod, LatticeVector, RationalPoint, Q};
use crate::moduli::{lengths_admissible, Parametric};
use crate::Error;

/// w₁·w₂·|det(u₁,u₂)| for the chosen pair of a balanced trivalent star.
pub fn mult_star(flags: &[(u64, LatticeVector)], pair: (usize, usize)) -> Result<u64, Error> {
    if flags.len() != 3 || pair.0 == pair.1 || pair.0 > 2 || pair.1 > 2 {
        return Err(Error::NotTrivalent);
    }
    let sum = flags.iter().fold(LatticeVector::new(0, 0), |a, (w, u)| a.add(u.scale(*w as i64)));
    if !sum.is_zero() {
        return Err(Error::InvalidCoral(vec!["star is not balanced".into()]));
    }
    let (w1, u1) = flags[pair.0];
    let (w2, u2) = flags[pair.1];
    Ok(w1 * w2 * det2(u1, u2).unsigned_abs())
}

/// Weighted flags at a vertex, in edge-id order.
pub fn star(t: &CoralType, v: VertexId) -> Vec<(u64, LatticeVector)> {
    t.graph.adjacency()[&v].iter().map(|inc| (t.graph.weight(inc.edge()), t.flag(v, inc.edge()))).collect()
}

pub fn mult_vertex(t: &CoralType, v: VertexId) -> Result<u64, Error> {
    if t.graph.class(v) != Some(VertexClass::Interior) {
        return Err(Error::NotTrivalent);
    }
    mult_star(&star(t, v), (0, 1))
}

pub fn mult_type(t: &CoralType) -> Result<u64, Error> {
    t.graph.interior_vertices().into_iter().map(|v| mult_vertex(t, v)).product()
}

pub fn mult_coral(c: &TropicalCoral) -> Result<u64, Error> {
    if !is_general(c) {
        return Err(Error::NonGeneralCoral);
    }
    mult_type(&c.ctype)
}

/// Product of the weights of the positive edges and of the edges adjacent to
/// negative vertices, each edge counted once.
pub fn weight_denominator(t: &CoralType) -> u64 {
    let g = &t.graph;
    let mut edges: BTreeSet<EdgeId> = g.positive_edges.iter().map(|(e, _)| *e).collect();
    let adj = g.adjacency();
    for v in g.negative_vertices() {
        edges.extend(adj[&v].iter().map(|i| i.edge()));
    }
    edges.iter().map(|e| g.weight(*e)).product()
}

/// Contribution Mult(Γ) / (∏ d_ij · ∏ e_ik) of a general type.
pub fn contribution(t: &CoralType) -> Result<Q, Error> {
    Ok(Q::new(BigInt::from(mult_type(t)?), BigInt::from(weight_denominator(t))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeContribution {
    pub ctype: CoralType,
    pub realized: Option<TropicalCoral>,
    /// Zero for unrealized types.
    pub contribution: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub total: Q,
    pub per_type: Vec<TypeContribution>,
}

/// The tropical count of corals of degree `d` matching `lam`. `lam` must be
/// good, general and in the stable range; otherwise `BadConstraint` carries
/// the stable-range certificate when one could be computed.
pub fn count(d: &Degree, lam: &Constraint) -> Result<CountResult, Error> {
    d.check()?;
    if lam.k() + 1 != d.l() || !is_good(lam, d) {
        return Err(Error::BadConstraint(None));
    }
    let systems = type_systems(d, lam)?;
    if check_general(&systems).is_err() {
        return Err(Error::BadConstraint(None));
    }
    let cert = certificate(&systems)?;
    if !cert.is_stable() {
        return Err(Error::BadConstraint(Some(Box::new(cert))));
    }
    realized_contributions(&systems)
}

pub(crate) fn realized_contributions(systems: &[crate::constraints::TypeSystem]) -> Result<CountResult, Error> {
    let mut total = Q::zero();
    let mut per_type = Vec::new();
    for ts in systems {
        let realized = match &ts.param {
            Parametric::Unique { t0, t1 } => {
                let x: Vec<Q> = t0.iter().zip(t1).map(|(a, b)| a + b).collect();
                lengths_admissible(&ts.model, &ts.ctype, &x).then(|| ts.model.coral(&ts.ctype, &x))
            }
            Parametric::Singular(_) => None,
        };
        let contribution = if realized.is_some() { contribution(&ts.ctype)? } else { Q::zero() };
        total += &contribution;
        per_type.push(TypeContribution { ctype: ts.ctype.clone(), realized, contribution });
    }
    Ok(CountResult { total, per_type })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EndKind {
    /// A positive end with its label index.
    Positive(usize),
    /// An end on a line through the origin (from a negative vertex).
    Origin,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CurveEnd {
    pub id: EdgeId,
    pub vertex: VertexId,
    /// Primitive direction pointing away from the vertex.
    pub dir: LatticeVector,
    pub weight: u64,
    pub kind: EndKind,
}

/// A plane tropical curve with tree domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalCurve {
    pub vertices: BTreeMap<VertexId, RationalPoint>,
    pub edges: Vec<(EdgeId, (VertexId, VertexId), u64)>,
    pub ends: Vec<CurveEnd>,
}

impl TropicalCurve {
    /// Balancing violations and tree-ness.
    pub fn check(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let mut sum: BTreeMap<VertexId, LatticeVector> =
            self.vertices.keys().map(|v| (*v, LatticeVector::new(0, 0))).collect();
        for (e, (a, b), w) in &self.edges {
            let (Some(pa), Some(pb)) = (self.vertices.get(a), self.vertices.get(b)) else {
                bad.push(format!("edge {e} references an unknown vertex"));
                continue;
            };
            match crate::lattice::primitive_of_point(&pb.sub(pa)) {
                Ok(u) => {
                    *sum.get_mut(a).unwrap() = sum[a].add(u.scale(*w as i64));
                    *sum.get_mut(b).unwrap() = sum[b].add(u.neg().scale(*w as i64));
                }
                Err(_) => bad.push(format!("edge {e} has zero length")),
            }
        }
        for end in &self.ends {
            match sum.get_mut(&end.vertex) {
                Some(s) => *s = s.add(end.dir.scale(end.weight as i64)),
                None => bad.push(format!("end {} references an unknown vertex", end.id)),
            }
        }
        for (v, s) in &sum {
            if !s.is_zero() {
                bad.push(format!("balancing fails at vertex {v}"));
            }
        }
        if self.edges.len() + 1 != self.vertices.len() {
            bad.push("Betti number nonzero or disconnected".into());
        }
        bad
    }

    /// Weighted directions of the ends as a degree (positive ends by label).
    pub fn degree(&self) -> Degree {
        let mut pos: Vec<_> = self
            .ends
            .iter()
            .filter_map(|e| match e.kind {
                EndKind::Positive(i) => Some((i, e.dir.scale(e.weight as i64))),
                EndKind::Origin => None,
            })
            .collect();
        pos.sort();
        let neg = self.ends.iter().filter(|e| e.kind == EndKind::Origin).map(|e| e.dir.scale(e.weight as i64));
        Degree::new(pos.into_iter().map(|(_, v)| v).collect(), neg.collect())
    }

    pub fn scale(&self, s: &Q) -> TropicalCurve {
        let mut out = self.clone();
        for p in out.vertices.values_mut() {
            *p = p.scale(s);
        }
        out
    }
}

/// Prolongs every negative vertex to an end along its line through the origin.
pub fn extend_coral(c: &TropicalCoral) -> Result<TropicalCurve, Error> {
    let r = validate_coral(c);
    if !r.is_valid() {
        return Err(Error::InvalidCoral(r.violations));
    }
    let t = &c.ctype;
    let x = t.extend_graph()?;
    let max_edge = t.graph.weights.keys().max().copied().unwrap_or(0);
    let mut ends = Vec::new();
    for u in &x.unbounded {
        let end = match u.kind {
            UnboundedKind::Positive(e) => CurveEnd {
                id: e,
                vertex: u.vertex,
                dir: t.flag(u.vertex, e),
                weight: u.weight,
                kind: EndKind::Positive(t.graph.label_index(e).expect("labelled")),
            },
            UnboundedKind::FromLeaf { edge, .. } => {
                CurveEnd { id: edge, vertex: u.vertex, dir: t.flag(u.vertex, edge), weight: u.weight, kind: EndKind::Origin }
            }
            UnboundedKind::Inserted(v) => CurveEnd {
                id: max_edge + 1 + v,
                vertex: v,
                dir: t.negvert_dirs[&v],
                weight: u.weight,
                kind: EndKind::Origin,
            },
        };
        ends.push(end);
    }
    ends.sort();
    let vertices = x.vertices.iter().map(|v| (*v, c.positions[v].clone())).collect();
    Ok(TropicalCurve { vertices, edges: x.bounded_edges, ends })
}

/// Cone spanned by the positive directions contains `p`.
fn in_positive_cone(p: &RationalPoint, d: &Degree) -> bool {
    let dirs = d.positive_dirs();
    if p.is_zero() {
        return true;
    }
    // Extreme rays: `lo` has every direction on its left, `hi` on its right.
    let lo = *dirs.iter().find(|a| dirs.iter().all(|b| det2(**a, *b) >= 0)).expect("pointed cone");
    let hi = *dirs.iter().find(|a| dirs.iter().all(|b| det2(*b, **a) >= 0)).expect("pointed cone");
    !p.det_with(lo).is_negative() && !(-p.det_with(hi)).is_negative()
}

/// Restricts a curve of degree `d` matching (λ, 0, …, 0) to a coral, after
/// rescaling by the least integer s ≥ 1 that lifts every vertex strictly above
/// height 1. Returns the coral and s; the coral matches s·λ.
pub fn restrict_curve_scaled(tc: &TropicalCurve, d: &Degree, lam: &Constraint) -> Result<(TropicalCoral, Q), Error> {
    let bad = tc.check();
    if !bad.is_empty() {
        return Err(Error::CurveMismatch(bad.join("; ")));
    }
    if !tc.degree().same_as(d) {
        return Err(Error::CurveMismatch("degree differs".into()));
    }
    if !is_good(lam, d) {
        return Err(Error::BadConstraint(None));
    }
    for end in &tc.ends {
        let p = &tc.vertices[&end.vertex];
        let val = project_mod(end.dir, p)?.value;
        let want = match end.kind {
            EndKind::Origin => Q::zero(),
            EndKind::Positive(i) if i < lam.k() => {
                if lam.entries[i].direction != end.dir {
                    return Err(Error::DirectionMismatch { expected: end.dir, found: lam.entries[i].direction });
                }
                lam.entries[i].value.clone()
            }
            EndKind::Positive(_) => continue,
        };
        if val != want {
            return Err(Error::CurveMismatch(format!("end {} does not match the constraint", end.id)));
        }
    }
    if tc.vertices.values().any(|p| !in_positive_cone(p, d)) {
        return Err(Error::NotGoodPosition);
    }
    let min_h = tc.vertices.values().map(|p| p.h.clone()).min().expect("nonempty curve");
    if !min_h.is_positive() {
        return Err(Error::NotGoodPosition);
    }
    let s = if min_h > Q::one() {
        Q::one()
    } else {
        Q::from_integer((Q::one() / &min_h).floor().to_integer() + BigInt::one())
    };
    debug_assert!(&s * &min_h > Q::one());

    // A single vertex with one positive end and one origin end: the line
    // through the origin, restricted to the single-edge coral.
    if tc.vertices.len() == 1 && tc.ends.len() == 2 && tc.edges.is_empty() {
        let pe = tc.ends.iter().find(|e| matches!(e.kind, EndKind::Positive(_)));
        let oe = tc.ends.iter().find(|e| e.kind == EndKind::Origin);
        if let (Some(pe), Some(oe)) = (pe, oe) {
            let graph = CoralGraph {
                vertices: vec![(0, VertexClass::Negative)],
                positive_edges: vec![(pe.id, 0)],
                bounded_edges: vec![],
                weights: [(pe.id, pe.weight)].into_iter().collect(),
                labels: vec![pe.id],
            };
            let ctype = CoralType {
                graph,
                flag_dirs: [((0, pe.id), pe.dir)].into_iter().collect(),
                negvert_dirs: [(0, oe.dir)].into_iter().collect(),
                negvert_weights: [(0, oe.weight)].into_iter().collect(),
            };
            let positions = [(0, forced_negative_position(oe.dir))].into_iter().collect();
            return Ok((TropicalCoral { ctype, positions }, Q::one()));
        }
    }

    let mut g = CoralGraph::default();
    let mut t = CoralType::default();
    let mut positions = BTreeMap::new();
    for (v, p) in &tc.vertices {
        g.vertices.push((*v, VertexClass::Interior));
        positions.insert(*v, p.scale(&s));
    }
    let mut next_v = tc.vertices.keys().max().map_or(0, |v| v + 1);
    for (e, (a, b), w) in &tc.edges {
        let u = crate::lattice::primitive_of_point(&tc.vertices[b].sub(&tc.vertices[a]))?;
        g.bounded_edges.push((*e, (*a, *b)));
        g.weights.insert(*e, *w);
        t.flag_dirs.insert((*a, *e), u);
        t.flag_dirs.insert((*b, *e), u.neg());
    }
    let mut labels = Vec::new();
    for end in &tc.ends {
        g.weights.insert(end.id, end.weight);
        t.flag_dirs.insert((end.vertex, end.id), end.dir);
        match end.kind {
            EndKind::Positive(i) => {
                g.positive_edges.push((end.id, end.vertex));
                labels.push((i, end.id));
            }
            EndKind::Origin => {
                let nv = next_v;
                next_v += 1;
                g.vertices.push((nv, VertexClass::Negative));
                g.bounded_edges.push((end.id, (end.vertex, nv)));
                t.flag_dirs.insert((nv, end.id), end.dir.neg());
                t.negvert_dirs.insert(nv, end.dir);
                t.negvert_weights.insert(nv, end.weight);
                positions.insert(nv, forced_negative_position(end.dir));
            }
        }
    }
    labels.sort();
    g.labels = labels.into_iter().map(|(_, e)| e).collect();
    t.graph = g;
    let coral = TropicalCoral { ctype: t, positions };
    let r = validate_coral(&coral);
    if !r.is_valid() {
        return Err(Error::InvalidCoral(r.violations));
    }
    Ok((coral, s))
}

pub fn restrict_curve(tc: &TropicalCurve, d: &Degree, lam: &Constraint) -> Result<TropicalCoral, Error> {
    restrict_curve_scaled(tc, d, lam).map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coral::samples::*;
    use crate::coral::{canonical_form, rescale};
    use crate::lattice::{q, qf, QuotientClass};

    fn lam(u: (i64, i64), v: Q) -> Constraint {
        Constraint::new(vec![QuotientClass::new(LatticeVector::new(u.0, u.1), v).unwrap()])
    }

    #[test]
    fn multiplicity_examples() {
        let v = LatticeVector::new;
        let s = [(3, v(2, 1)), (2, v(-3, 1)), (5, v(0, -1))];
        assert_eq!(mult_star(&s, (0, 1)).unwrap(), 30);
        assert_eq!(mult_star(&s, (0, 2)).unwrap(), 30);
        assert_eq!(mult_star(&s, (1, 2)).unwrap(), 30);
        let y = [(1, v(-1, 1)), (1, v(1, 1)), (2, v(0, -1))];
        assert_eq!(mult_star(&y, (0, 1)).unwrap(), 2);
        assert_eq!(mult_coral(&simple_example()).unwrap(), 30);
        assert_eq!(mult_coral(&y_coral()).unwrap(), 2);
        assert!(matches!(mult_vertex(&y_coral().ctype, 0), Err(Error::NotTrivalent)));
    }

    #[test]
    fn count_examples() {
        let r = count(&simple_degree(), &lam((2, 1), q(4))).unwrap();
        assert_eq!(r.total, q(1));
        assert_eq!(r.per_type.len(), 1);
        let r = count(&y_degree(), &lam((-1, 1), q(-3))).unwrap();
        assert_eq!(r.total, q(1));
    }

    #[test]
    fn unstable_constraint_is_rejected_with_certificate() {
        match count(&simple_degree(), &lam((2, 1), qf(1, 100))) {
            Err(Error::BadConstraint(Some(cert))) => assert!(!cert.is_stable()),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(count(&simple_degree(), &lam((2, 1), q(-1))), Err(Error::BadConstraint(None))));
    }

    #[test]
    fn extension_examples() {
        let x = extend_coral(&simple_example()).unwrap();
        assert_eq!(x.ends.len(), 3);
        assert!(x.check().is_empty());
        let o: Vec<_> = x.ends.iter().filter(|e| e.kind == EndKind::Origin).collect();
        assert_eq!(o.len(), 1);
        assert_eq!((o[0].dir, o[0].weight), (LatticeVector::new(0, -1), 5));
        let y = extend_coral(&y_coral()).unwrap();
        assert_eq!(y.ends.iter().find(|e| e.kind == EndKind::Origin).unwrap().weight, 2);
        assert_ne!(extend_coral(&rescale(&y_coral(), &q(2)).unwrap()).unwrap(), y);
    }

    #[test]
    fn restriction_round_trips() {
        for (c, d, l) in [
            (simple_example(), simple_degree(), lam((2, 1), q(4))),
            (y_coral(), y_degree(), lam((-1, 1), q(-2))),
        ] {
            let x = extend_coral(&c).unwrap();
            let (r, s) = restrict_curve_scaled(&x, &d, &l).unwrap();
            assert_eq!(s, q(1));
            assert_eq!(canonical_form(&r), canonical_form(&c));
        }
    }

    #[test]
    fn restriction_rescales_low_curves() {
        let x = extend_coral(&simple_example()).unwrap().scale(&qf(1, 2));
        let (r, s) = restrict_curve_scaled(&x, &simple_degree(), &lam((2, 1), q(2))).unwrap();
        assert_eq!(s, q(2));
        assert_eq!(canonical_form(&r), canonical_form(&simple_example()));
    }
}
