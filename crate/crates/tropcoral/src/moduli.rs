//! Enumeration of coral types of a degree, and exact realization of the
//! unique coral of a general type matching a general constraint.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use crate::constraints::Constraint;
use crate::coral::{canonical_type, forced_negative_position, is_general_type, Degree, TropicalCoral};
use crate::coralgraph::{CoralGraph, CoralType, EdgeId, Incidence, VertexClass, VertexId};
use crate::lattice::{det2, primitive, project_mod, q, LatticeVector, QuotientClass, RationalPoint, Q};
use crate::linalg::{rank, reduce};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeCatalog {
    pub degree: Degree,
    pub types: Vec<CoralType>,
}

/// All unrooted trivalent trees on leaves `0..n` (n ≥ 3), as edge lists over
/// nodes where `0..n` are leaves and `n..2n−2` internal nodes.
pub(crate) fn trivalent_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(n >= 3);
    let mut out = Vec::new();
    fn grow(edges: Vec<(usize, usize)>, k: usize, n: usize, next: usize, out: &mut Vec<Vec<(usize, usize)>>) {
        if k == n {
            out.push(edges);
            return;
        }
        for i in 0..edges.len() {
            let (a, b) = edges[i];
            let mut e = edges.clone();
            e[i] = (a, next);
            e.push((next, b));
            e.push((next, k));
            grow(e, k + 1, n, next + 1, out);
        }
    }
    grow(vec![(0, n), (1, n), (2, n)], 3, n, n + 1, &mut out);
    out
}

/// Builds the coral type of a leaf-labelled trivalent tree, or `None` if an
/// internal edge carries the zero vector or a vertex has parallel flags.
fn tree_to_type(edges: &[(usize, usize)], d: &Degree) -> Option<CoralType> {
    let l = d.l();
    let n = l + d.m();
    let leaf_vec = |i: usize| if i < l { d.positive[i] } else { d.negative[i - l] };
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    // Subtree sums rooted at leaf 0: sum[c] = Σ leaf vectors below c.
    let mut order = vec![(0usize, usize::MAX)];
    let mut parent = BTreeMap::new();
    let mut i = 0;
    while i < order.len() {
        let (v, p) = order[i];
        parent.insert(v, p);
        for &w in &adj[&v] {
            if w != p {
                order.push((w, v));
            }
        }
        i += 1;
    }
    let mut sum: BTreeMap<usize, LatticeVector> = BTreeMap::new();
    for &(v, p) in order.iter().rev() {
        let own = if v < n { leaf_vec(v) } else { LatticeVector::new(0, 0) };
        let s = adj[&v].iter().filter(|&&w| w != p).fold(own, |acc, w| acc.add(sum[w]));
        sum.insert(v, if v == 0 { leaf_vec(0) } else { s });
    }
    // Vector pointing from x across the edge toward y.
    let across = |x: usize, y: usize| -> LatticeVector {
        if parent.get(&y) == Some(&x) {
            sum[&y]
        } else {
            sum[&x].neg()
        }
    };
    for &(a, b) in edges {
        if across(a, b).is_zero() {
            return None;
        }
    }
    for v in n..(2 * n - 2) {
        let f: Vec<_> = adj[&v].iter().map(|&w| across(v, w)).collect();
        if det2(f[0], f[1]) == 0 {
            return None;
        }
    }

    // Vertex ids: internal node v ↦ v; negative leaf ↦ its node index.
    // Edge ids: positive leaf i ↦ i; other edges numbered from l.
    let mut g = CoralGraph { labels: (0..l).collect(), ..Default::default() };
    let mut t = CoralType::default();
    for v in n..(2 * n - 2) {
        g.vertices.push((v, VertexClass::Interior));
    }
    for j in l..n {
        g.vertices.push((j, VertexClass::Negative));
        let (u, w) = primitive(d.negative[j - l]).ok()?;
        t.negvert_dirs.insert(j, u);
        t.negvert_weights.insert(j, w);
    }
    let mut next = l;
    for &(a, b) in edges {
        let (x, y) = if a < n { (b, a) } else { (a, b) };
        let (u, w) = primitive(across(x, y)).ok()?;
        if y < l {
            g.positive_edges.push((y, x));
            g.weights.insert(y, w);
            t.flag_dirs.insert((x, y), u);
        } else {
            let e = next;
            next += 1;
            g.bounded_edges.push((e, (x, y)));
            g.weights.insert(e, w);
            t.flag_dirs.insert((x, e), u);
            t.flag_dirs.insert((y, e), u.neg());
        }
    }
    g.vertices.sort();
    g.positive_edges.sort();
    t.graph = g;
    Some(t)
}

/// The unique type when l = m = 1: a negative vertex carrying the positive edge.
fn single_edge_type(d: &Degree) -> Option<CoralType> {
    let (u, w) = primitive(d.positive[0]).ok()?;
    let (un, wn) = primitive(d.negative[0]).ok()?;
    if un != u.neg() || w != wn {
        return None;
    }
    let graph = CoralGraph {
        vertices: vec![(0, VertexClass::Negative)],
        positive_edges: vec![(0, 0)],
        bounded_edges: vec![],
        weights: [(0, w)].into_iter().collect(),
        labels: vec![0],
    };
    Some(CoralType {
        graph,
        flag_dirs: [((0, 0), u)].into_iter().collect(),
        negvert_dirs: [(0, un)].into_iter().collect(),
        negvert_weights: [(0, wn)].into_iter().collect(),
    })
}

fn general_types(d: &Degree) -> BTreeSet<CoralType> {
    let n = d.l() + d.m();
    if n == 2 {
        return single_edge_type(d).map(|t| canonical_type(&t)).into_iter().collect();
    }
    trivalent_trees(n).iter().filter_map(|e| tree_to_type(e, d)).map(|t| canonical_type(&t)).collect()
}

/// Contracts a set of bounded edges of a type. Returns `None` if a merged
/// vertex would contain two negative vertices or two equal germs, or if a
/// negative vertex would get a flag that does not point upward.
fn contract(t: &CoralType, edges: &BTreeSet<EdgeId>) -> Option<CoralType> {
    let g = &t.graph;
    let mut rep: BTreeMap<VertexId, VertexId> = g.vertices.iter().map(|(v, _)| (*v, *v)).collect();
    fn find(rep: &BTreeMap<VertexId, VertexId>, mut v: VertexId) -> VertexId {
        while rep[&v] != v {
            v = rep[&v];
        }
        v
    }
    let is_neg = |v: VertexId| g.class(v) == Some(VertexClass::Negative);
    let mut neg_of: BTreeMap<VertexId, Option<VertexId>> =
        g.vertices.iter().map(|(v, c)| (*v, (*c == VertexClass::Negative).then_some(*v))).collect();
    for &(e, (a, b)) in &g.bounded_edges {
        if !edges.contains(&e) {
            continue;
        }
        let (ra, rb) = (find(&rep, a), find(&rep, b));
        let (na, nb) = (neg_of[&ra], neg_of[&rb]);
        if na.is_some() && nb.is_some() {
            return None;
        }
        // Keep the negative vertex as representative.
        let (keep, drop) = if nb.is_some() { (rb, ra) } else { (ra, rb) };
        rep.insert(drop, keep);
        neg_of.insert(keep, na.or(nb));
    }
    let mut out = CoralType {
        graph: CoralGraph { labels: g.labels.clone(), ..Default::default() },
        negvert_dirs: t.negvert_dirs.clone(),
        negvert_weights: t.negvert_weights.clone(),
        ..Default::default()
    };
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for &(v, _) in &g.vertices {
        let r = find(&rep, v);
        if seen.insert(r) {
            let class = if is_neg(r) { VertexClass::Negative } else { VertexClass::Interior };
            out.graph.vertices.push((r, class));
        }
    }
    for &(e, (a, b)) in &g.bounded_edges {
        if edges.contains(&e) {
            continue;
        }
        let (ra, rb) = (find(&rep, a), find(&rep, b));
        out.graph.bounded_edges.push((e, (ra, rb)));
        out.graph.weights.insert(e, g.weight(e));
        out.flag_dirs.insert((ra, e), t.flag(a, e));
        out.flag_dirs.insert((rb, e), t.flag(b, e));
    }
    for &(e, v) in &g.positive_edges {
        let r = find(&rep, v);
        out.graph.positive_edges.push((e, r));
        out.graph.weights.insert(e, g.weight(e));
        out.flag_dirs.insert((r, e), t.flag(v, e));
    }
    let adj = out.graph.adjacency();
    for (&v, incs) in &adj {
        let mut germs = BTreeSet::new();
        for inc in incs {
            let u = out.flag(v, inc.edge());
            if !germs.insert(u) || (is_neg(v) && u.b <= 0) {
                return None;
            }
        }
    }
    Some(out)
}

/// Enumerates the types of degree `d`. General types are all leaf-labelled
/// trivalent trees with balanced directions; with `general_only = false`
/// the contractions of their bounded edges are added.
pub fn enumerate_types(d: &Degree, general_only: bool) -> Result<TypeCatalog, Error> {
    d.check()?;
    let general = general_types(d);
    let mut all = general.clone();
    if !general_only {
        for t in &general {
            let ids: Vec<EdgeId> = t.graph.bounded_edges.iter().map(|(e, _)| *e).collect();
            for mask in 1u64..(1u64 << ids.len()) {
                let set: BTreeSet<EdgeId> =
                    ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e).collect();
                if let Some(c) = contract(t, &set) {
                    all.insert(canonical_type(&c));
                }
            }
        }
    }
    Ok(TypeCatalog { degree: d.clone(), types: all.into_iter().collect() })
}

/// Affine expression c + Σ coef[i]·x_i.
#[derive(Clone, Debug)]
pub(crate) struct Affine {
    pub c: Q,
    pub coef: Vec<Q>,
}

impl Affine {
    fn constant(c: Q, n: usize) -> Self {
        Affine { c, coef: vec![Q::zero(); n] }
    }

    fn eval(&self, x: &[Q]) -> Q {
        self.coef.iter().zip(x).fold(self.c.clone(), |acc, (a, b)| acc + a * b)
    }
}

/// Linear model of a general type: unknown lengths of bounded edges and the
/// vertex positions as affine functions of them.
pub(crate) struct Model {
    pub unknowns: Vec<EdgeId>,
    pub pos: BTreeMap<VertexId, (Affine, Affine)>,
    /// Rows forcing the non-root negative vertices onto height 1.
    pub neg_rows: Vec<(Vec<Q>, Q)>,
    /// Rows ⟨rot90(u_i), h(v_i)⟩ − λ_i = 0 split as (coefficients, constant, λ_i).
    pub con_rows: Vec<(Vec<Q>, Q, Q)>,
}

pub(crate) fn check_constraint(t: &CoralType, lam: &Constraint) -> Result<(), Error> {
    let g = &t.graph;
    let k = g.labels.len().saturating_sub(1);
    if lam.entries.len() != k {
        return Err(Error::ConstraintLength { expected: k, found: lam.entries.len() });
    }
    for (i, cl) in lam.entries.iter().enumerate() {
        let u = t.positive_dir(g.labels[i]);
        if u != cl.direction {
            return Err(Error::DirectionMismatch { expected: u, found: cl.direction });
        }
    }
    Ok(())
}

pub(crate) fn build_model(t: &CoralType, lam: &Constraint) -> Result<Model, Error> {
    check_constraint(t, lam)?;
    let g = &t.graph;
    let unknowns: Vec<EdgeId> = g.bounded_edges.iter().map(|(e, _)| *e).collect();
    let n = unknowns.len();
    let col: BTreeMap<EdgeId, usize> = unknowns.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let negs = g.negative_vertices();
    let root = negs[0];
    let adj = g.adjacency();
    let p0 = forced_negative_position(t.negvert_dirs[&root]);
    let mut pos = BTreeMap::new();
    pos.insert(root, (Affine::constant(p0.x, n), Affine::constant(p0.h, n)));
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for inc in &adj[&v] {
            if let Incidence::Bounded { edge, other } = *inc {
                if pos.contains_key(&other) {
                    continue;
                }
                let u = t.flag(v, edge);
                let (mut x, mut y) = pos[&v].clone();
                x.coef[col[&edge]] += q(u.a);
                y.coef[col[&edge]] += q(u.b);
                pos.insert(other, (x, y));
                stack.push(other);
            }
        }
    }
    let mut neg_rows = Vec::new();
    for &v in &negs[1..] {
        let f = forced_negative_position(t.negvert_dirs[&v]);
        let (x, y) = &pos[&v];
        neg_rows.push((x.coef.clone(), &f.x - &x.c));
        neg_rows.push((y.coef.clone(), &f.h - &y.c));
    }
    let mut con_rows = Vec::new();
    for (i, cl) in lam.entries.iter().enumerate() {
        let v = g.positive_endpoint(g.labels[i]).expect("labelled edge");
        let u = cl.direction;
        let (x, y) = &pos[&v];
        // det(u, P) = P.h·u.a − P.x·u.b
        let coef = (0..n).map(|j| &y.coef[j] * q(u.a) - &x.coef[j] * q(u.b)).collect();
        let c = &y.c * q(u.a) - &x.c * q(u.b);
        con_rows.push((coef, c, cl.value.clone()));
    }
    Ok(Model { unknowns, pos, neg_rows, con_rows })
}

/// Solution of the realization system for the constraint s·λ.
pub(crate) enum Parametric {
    /// Lengths t(s) = t0 + s·t1.
    Unique { t0: Vec<Q>, t1: Vec<Q> },
    /// Rank-deficient system: consistent for s in the returned set.
    Singular(SingularSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum SingularSet {
    Never,
    Always,
    At(Q),
}

impl Model {
    pub fn n(&self) -> usize {
        self.unknowns.len()
    }

    pub fn assert_rank(&self) -> Result<(), Error> {
        let rows: Vec<Vec<Q>> = self.neg_rows.iter().map(|(r, _)| r.clone()).collect();
        let found = rank(&rows, self.n());
        if found != rows.len() {
            return Err(Error::RankAssertion { expected: rows.len(), found });
        }
        Ok(())
    }

    pub fn solve(&self) -> Parametric {
        let n = self.n();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (r, c) in &self.neg_rows {
            a.push(r.clone());
            b.push(vec![c.clone(), Q::zero()]);
        }
        for (r, c, lam) in &self.con_rows {
            a.push(r.clone());
            b.push(vec![-c, lam.clone()]);
        }
        let red = reduce(a, b, n);
        if red.rank == red.rhs.len() {
            if let (Some(t0), Some(t1)) = (red.solution(0), red.solution(1)) {
                return Parametric::Unique { t0, t1 };
            }
        }
        // Residual rows r0 + s·r1 must all vanish.
        let mut set = SingularSet::Always;
        for row in &red.rhs[red.rank..] {
            let (r0, r1) = (&row[0], &row[1]);
            let here = if r1.is_zero() {
                if r0.is_zero() {
                    SingularSet::Always
                } else {
                    SingularSet::Never
                }
            } else {
                SingularSet::At(-r0 / r1)
            };
            set = match (set, here) {
                (SingularSet::Never, _) | (_, SingularSet::Never) => SingularSet::Never,
                (SingularSet::Always, x) | (x, SingularSet::Always) => x,
                (SingularSet::At(a), SingularSet::At(b)) => {
                    if a == b {
                        SingularSet::At(a)
                    } else {
                        SingularSet::Never
                    }
                }
            };
        }
        Parametric::Singular(set)
    }

    /// Interior heights as affine functions h0 + s·h1 of the scale.
    pub fn heights(&self, t: &CoralType, t0: &[Q], t1: &[Q]) -> Vec<(VertexId, Q, Q)> {
        t.graph
            .interior_vertices()
            .into_iter()
            .map(|v| {
                let y = &self.pos[&v].1;
                let h0 = y.eval(t0);
                let h1 = y.eval(t1) - &y.c;
                (v, h0, h1)
            })
            .collect()
    }

    pub fn coral(&self, t: &CoralType, lengths: &[Q]) -> TropicalCoral {
        let positions = self
            .pos
            .iter()
            .map(|(v, (x, y))| (*v, RationalPoint::new(x.eval(lengths), y.eval(lengths))))
            .collect();
        TropicalCoral { ctype: t.clone(), positions }
    }
}

/// Outcome of solving a type at one constraint, before the positivity checks.
pub(crate) enum Solved {
    Unique(Vec<Q>),
    Inconsistent,
    Underdetermined,
}

pub(crate) fn solve_at(m: &Model, s: &Q) -> Solved {
    match m.solve() {
        Parametric::Unique { t0, t1 } => Solved::Unique(t0.iter().zip(&t1).map(|(a, b)| a + s * b).collect()),
        Parametric::Singular(SingularSet::Never) => Solved::Inconsistent,
        Parametric::Singular(SingularSet::Always) => Solved::Underdetermined,
        Parametric::Singular(SingularSet::At(x)) => {
            if &x == s {
                Solved::Underdetermined
            } else {
                Solved::Inconsistent
            }
        }
    }
}

pub(crate) fn lengths_admissible(m: &Model, t: &CoralType, lengths: &[Q]) -> bool {
    lengths.iter().all(|x| x.is_positive())
        && t.graph.interior_vertices().iter().all(|v| m.pos[v].1.eval(lengths) > Q::one())
}

/// Realizes the coral of general type `t` matching `lam`, if it exists.
pub fn realize(t: &CoralType, lam: &Constraint) -> Result<Option<TropicalCoral>, Error> {
    if !is_general_type(t) {
        return Err(Error::NonGeneralType);
    }
    let m = build_model(t, lam)?;
    m.assert_rank()?;
    match solve_at(&m, &Q::one()) {
        Solved::Unique(x) => Ok(lengths_admissible(&m, t, &x).then(|| m.coral(t, &x))),
        Solved::Inconsistent => Ok(None),
        Solved::Underdetermined => Err(Error::Underdetermined),
    }
}

/// Shape of the realization system of a general type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SystemReport {
    /// Dimension of the length space cut out by the negative vertices alone.
    pub free_dimension: usize,
    /// Number of solutions at λ: 0, 1, or `None` for infinitely many.
    pub solutions: Option<usize>,
}

/// Checks the rank assertion and reports how many length vectors solve the
/// system at λ (before positivity).
pub fn system_report(t: &CoralType, lam: &Constraint) -> Result<SystemReport, Error> {
    if !is_general_type(t) {
        return Err(Error::NonGeneralType);
    }
    let m = build_model(t, lam)?;
    m.assert_rank()?;
    let solutions = match solve_at(&m, &Q::one()) {
        Solved::Unique(_) => Some(1),
        Solved::Inconsistent => Some(0),
        Solved::Underdetermined => None,
    };
    Ok(SystemReport { free_dimension: m.n() - m.neg_rows.len(), solutions })
}

/// Quotient classes of the positive ends with the given 1-based label indices.
pub fn evaluation(c: &TropicalCoral, indices: &[usize]) -> Result<Vec<QuotientClass>, Error> {
    let g = &c.ctype.graph;
    indices
        .iter()
        .map(|&i| {
            if i == 0 || i > g.labels.len() {
                return Err(Error::BadIndex(i));
            }
            let e = g.labels[i - 1];
            project_mod(c.ctype.positive_dir(e), c.positive_start(e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coral::samples::*;
    use crate::coral::{canonical_form, degree_of, validate_coral};
    use crate::lattice::qf;

    fn lam(u: (i64, i64), v: Q) -> Constraint {
        Constraint::new(vec![QuotientClass::new(LatticeVector::new(u.0, u.1), v).unwrap()])
    }

    #[test]
    fn tree_counts_are_double_factorials() {
        assert_eq!(trivalent_trees(3).len(), 1);
        assert_eq!(trivalent_trees(4).len(), 3);
        assert_eq!(trivalent_trees(5).len(), 15);
        assert_eq!(trivalent_trees(6).len(), 105);
    }

    #[test]
    fn sample_degrees_have_one_type() {
        for (d, c) in [(simple_degree(), simple_example()), (y_degree(), y_coral())] {
            let cat = enumerate_types(&d, true).unwrap();
            assert_eq!(cat.types.len(), 1);
            assert_eq!(cat.types[0], canonical_form(&c).ctype);
            assert!(degree_of(&cat.types[0]).same_as(&d));
        }
    }

    #[test]
    fn empty_degree_is_rejected() {
        let d = Degree::new(vec![], vec![LatticeVector::new(0, -1)]);
        assert!(matches!(enumerate_types(&d, true), Err(Error::EmptyDegree)));
    }

    #[test]
    fn realize_simple_example() {
        let t = &enumerate_types(&simple_degree(), true).unwrap().types[0];
        let c = realize(t, &lam((2, 1), q(4))).unwrap().unwrap();
        assert!(validate_coral(&c).is_valid());
        assert_eq!(canonical_form(&c), canonical_form(&simple_example()));
        assert!(realize(t, &lam((2, 1), q(2))).unwrap().is_none());
    }

    #[test]
    fn realize_y_coral_at_height_three() {
        let t = &enumerate_types(&y_degree(), true).unwrap().types[0];
        let c = realize(t, &lam((-1, 1), q(-3))).unwrap().unwrap();
        let inner = c.ctype.graph.interior_vertices()[0];
        assert_eq!(c.positions[&inner], RationalPoint::from_ints(0, 3));
    }

    #[test]
    fn evaluation_examples() {
        let c = simple_example();
        let ev = evaluation(&c, &[1]).unwrap();
        assert_eq!(ev, vec![QuotientClass::new(LatticeVector::new(2, 1), q(4)).unwrap()]);
        assert!(evaluation(&c, &[]).unwrap().is_empty());
        assert!(matches!(evaluation(&c, &[3]), Err(Error::BadIndex(3))));
        let y = crate::coral::rescale(&y_coral(), &qf(3, 2)).unwrap();
        let vals: Vec<Q> = evaluation(&y, &[1, 2]).unwrap().into_iter().map(|c| c.value).collect();
        assert_eq!(vals, vec![q(-3), q(3)]);
    }

    #[test]
    fn degenerate_types_of_four_leaves() {
        // Three positive ends and one negative end: three trees, one 4-valent star.
        let v = LatticeVector::new;
        let d = Degree::new(vec![v(1, 1), v(-1, 1), v(0, 1)], vec![v(0, -3)]);
        let gen = enumerate_types(&d, true).unwrap();
        let all = enumerate_types(&d, false).unwrap();
        assert!(all.types.len() > gen.types.len());
        assert!(gen.types.iter().all(is_general_type));
        assert!(all.types.iter().filter(|t| !is_general_type(t)).count() >= 1);
    }
}
