//! Independent oracles and fixed corpora shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use tropcoral::coral::{canonical_type, Degree};
use tropcoral::coralgraph::{CoralGraph, CoralType, VertexClass};
use tropcoral::lattice::{det2, primitive, LatticeVector};
use tropcoral::random::random_degree_with;

/// A rooted binary tree over a bitmask of leaves.
#[derive(Clone, Debug)]
pub enum Bin {
    Leaf(usize),
    Node(u32, Box<Bin>, Box<Bin>),
}

impl Bin {
    pub fn mask(&self) -> u32 {
        match self {
            Bin::Leaf(i) => 1 << i,
            Bin::Node(m, _, _) => *m,
        }
    }
}

/// Every rooted binary tree whose leaves are the set bits of `mask`.
pub fn binary_trees(mask: u32) -> Vec<Bin> {
    if mask.count_ones() == 1 {
        return vec![Bin::Leaf(mask.trailing_zeros() as usize)];
    }
    let low = mask & mask.wrapping_neg();
    let rest = mask ^ low;
    let mut out = Vec::new();
    // Left part always contains the lowest leaf, so each split is seen once.
    let mut sub = rest;
    loop {
        let left = low | sub;
        let right = mask ^ left;
        if right != 0 {
            for a in binary_trees(left) {
                for b in binary_trees(right) {
                    out.push(Bin::Node(mask, Box::new(a.clone()), Box::new(b)));
                }
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    out
}

fn end(d: &Degree, i: usize) -> LatticeVector {
    if i < d.l() {
        d.positive[i]
    } else {
        d.negative[i - d.l()]
    }
}

fn mask_sum(d: &Degree, mask: u32) -> LatticeVector {
    (0..d.l() + d.m()).filter(|i| mask >> i & 1 == 1).fold(LatticeVector::new(0, 0), |a, i| a.add(end(d, i)))
}

struct Builder<'a> {
    d: &'a Degree,
    g: CoralGraph,
    t: CoralType,
    next_vertex: usize,
    next_edge: usize,
    ok: bool,
}

impl Builder<'_> {
    /// Adds the subtree `b` hanging from vertex `above`; the edge into it
    /// carries the sum of the subtree's end vectors.
    fn add(&mut self, b: &Bin, above: usize) {
        let v = mask_sum(self.d, b.mask());
        let Ok((u, w)) = primitive(v) else {
            self.ok = false;
            return;
        };
        match b {
            Bin::Leaf(i) if *i < self.d.l() => {
                self.g.positive_edges.push((*i, above));
                self.g.weights.insert(*i, w);
                self.t.flag_dirs.insert((above, *i), u);
            }
            Bin::Leaf(_) => {
                let nv = self.fresh_vertex(VertexClass::Negative);
                self.fresh_edge(above, nv, u, w);
                self.t.negvert_dirs.insert(nv, u);
                self.t.negvert_weights.insert(nv, w);
            }
            Bin::Node(_, l, r) => {
                let nv = self.fresh_vertex(VertexClass::Interior);
                self.fresh_edge(above, nv, u, w);
                let (fl, fr) = (mask_sum(self.d, l.mask()), mask_sum(self.d, r.mask()));
                if fl.is_zero() || fr.is_zero() || det2(fl, fr) == 0 {
                    self.ok = false;
                    return;
                }
                self.add(l, nv);
                self.add(r, nv);
            }
        }
    }

    fn fresh_vertex(&mut self, class: VertexClass) -> usize {
        let v = self.next_vertex;
        self.next_vertex += 1;
        self.g.vertices.push((v, class));
        v
    }

    fn fresh_edge(&mut self, a: usize, b: usize, u: LatticeVector, w: u64) {
        let e = self.next_edge;
        self.next_edge += 1;
        self.g.bounded_edges.push((e, (a, b)));
        self.g.weights.insert(e, w);
        self.t.flag_dirs.insert((a, e), u);
        self.t.flag_dirs.insert((b, e), u.neg());
    }
}

/// Exhaustive general types of `d` (l + m ≥ 3, leaf 0 positive): every
/// rooted binary tree on the other ends, hung below leaf 0.
pub fn oracle_types(d: &Degree) -> BTreeSet<CoralType> {
    let n = d.l() + d.m();
    let all = ((1u32 << n) - 1) & !1;
    let mut out = BTreeSet::new();
    for tree in binary_trees(all) {
        let Bin::Node(_, l, r) = &tree else { continue };
        let mut b = Builder {
            d,
            g: CoralGraph { labels: (0..d.l()).collect(), ..Default::default() },
            t: CoralType::default(),
            next_vertex: 0,
            next_edge: d.l(),
            ok: true,
        };
        let top = b.fresh_vertex(VertexClass::Interior);
        let (u0, w0) = primitive(d.positive[0]).expect("nonzero");
        b.g.positive_edges.push((0, top));
        b.g.weights.insert(0, w0);
        b.t.flag_dirs.insert((top, 0), u0);
        let (fl, fr) = (mask_sum(d, l.mask()), mask_sum(d, r.mask()));
        if fl.is_zero() || fr.is_zero() || det2(fl, fr) == 0 {
            continue;
        }
        b.add(l, top);
        b.add(r, top);
        if !b.ok {
            continue;
        }
        b.g.vertices.sort();
        b.g.positive_edges.sort();
        b.t.graph = b.g;
        out.insert(canonical_type(&b.t));
    }
    out
}

/// 30 fixed degrees with l + m ≤ 5.
pub fn oracle_corpus() -> Vec<Degree> {
    let shapes = [(2, 1), (3, 1), (2, 2), (4, 1), (3, 2)];
    (0..30u64).map(|i| {
        let (l, m) = shapes[i as usize % shapes.len()];
        random_degree_with(1000 + i, l, m)
    }).collect()
}
