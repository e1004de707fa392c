//! The ℤ-quotient: degrees modulo the shear (x, y) ↦ (x + k·b·y, y), tropical
//! area against the lines L_j = ℝ·(jb, 1), and the area-graded count.

use std::collections::{BTreeMap, BTreeSet};

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::constraints::{check_general, type_systems, Constraint};
use crate::coral::{Degree, TropicalCoral};
use crate::counting::{count, realized_contributions};
use crate::lattice::{det2, q, LatticeVector, QuotientClass, RationalPoint, Q};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientDegree {
    pub b: u64,
    /// Degree sheared so the first positive end has slope in [0, b).
    pub representative: Degree,
    /// Shear applied to the input degree.
    pub offset: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AreaSeries {
    /// Coefficient of q^A for every A ≤ `truncation`.
    pub coefficients: BTreeMap<u64, Q>,
    pub truncation: u64,
    /// Shifted degrees for which the shifted λ is not general; they
    /// contribute nothing.
    pub skipped: Vec<Degree>,
}

pub fn shear_vector(u: LatticeVector, k: i64, b: u64) -> LatticeVector {
    LatticeVector::new(u.a + k * b as i64 * u.b, u.b)
}

pub fn shear_degree(d: &Degree, k: i64, b: u64) -> Degree {
    let f = |v: &LatticeVector| shear_vector(*v, k, b);
    Degree::new(d.positive.iter().map(f).collect(), d.negative.iter().map(f).collect())
}

/// Directions follow the shear; the values det(u, x) are invariant.
pub fn shear_constraint(lam: &Constraint, k: i64, b: u64) -> Constraint {
    Constraint::new(
        lam.entries
            .iter()
            .map(|c| QuotientClass { direction: shear_vector(c.direction, k, b), value: c.value.clone() })
            .collect(),
    )
}

pub fn shear_coral(c: &TropicalCoral, k: i64, b: u64) -> TropicalCoral {
    let mut out = c.clone();
    let kb = q(k * b as i64);
    for p in out.positions.values_mut() {
        *p = RationalPoint::new(&p.x + &kb * &p.h, p.h.clone());
    }
    for u in out.ctype.flag_dirs.values_mut().chain(out.ctype.negvert_dirs.values_mut()) {
        *u = shear_vector(*u, k, b);
    }
    out
}

/// Shears `d` so that the first positive end has slope in [0, b).
pub fn normalize_mod_z(d: &Degree, b: u64) -> Result<QuotientDegree, Error> {
    if b == 0 {
        return Err(Error::BadScale);
    }
    let first = *d.positive.first().ok_or(Error::EmptyDegree)?;
    if first.b <= 0 {
        return Err(Error::Unbalanced);
    }
    let k = -first.a.div_euclid(b as i64 * first.b);
    Ok(QuotientDegree { b, representative: shear_degree(d, k, b), offset: k })
}

/// Side of L_j for a point, with points on the line pushed off by the
/// translation (dx, δ), δ > 0 below every |1/(jb)|.
fn side(p: &RationalPoint, v: LatticeVector, dx: i32, delta: &Q) -> i32 {
    let d = -p.det_with(v);
    if !d.is_zero() {
        return if d.is_positive() { 1 } else { -1 };
    }
    let e = q(dx as i64) - delta * q(v.a);
    if e.is_positive() {
        1
    } else {
        -1
    }
}

fn sign(x: i64) -> i32 {
    x.signum() as i32
}

/// Stable intersection of the coral (at height ≥ 1) with every L_j, after
/// translating by a small multiple of (dx, δ).
pub fn area_with_direction(c: &TropicalCoral, b: u64, dx: i32) -> u64 {
    let t = &c.ctype;
    let g = &t.graph;
    let mut slopes: Vec<Q> = c.positions.values().map(|p| &p.x / &p.h).collect();
    for &(e, _) in &g.positive_edges {
        let u = t.positive_dir(e);
        slopes.push(Q::new(u.a.into(), u.b.into()));
    }
    let bq = q(b as i64);
    let lo = (slopes.iter().min().expect("nonempty") / &bq).floor().to_integer();
    let hi = (slopes.iter().max().expect("nonempty") / &bq).ceil().to_integer();
    let lo: i64 = lo.try_into().expect("slope range fits");
    let hi: i64 = hi.try_into().expect("slope range fits");
    let reach = lo.abs().max(hi.abs()) * b as i64 + 1;
    let delta = Q::new(1.into(), (2 * reach).into());
    let mut total = 0u64;
    for j in lo..=hi {
        let v = LatticeVector::new(j * b as i64, 1);
        for &(e, (a0, a1)) in &g.bounded_edges {
            let u = t.flag(a0, e);
            if side(&c.positions[&a0], v, dx, &delta) != side(&c.positions[&a1], v, dx, &delta) {
                total += g.weight(e) * det2(u, v).unsigned_abs();
            }
        }
        for &(e, _) in &g.positive_edges {
            let u = t.positive_dir(e);
            let far = sign(det2(u, v));
            if far != 0 && side(c.positive_start(e), v, dx, &delta) != far {
                total += g.weight(e) * det2(u, v).unsigned_abs();
            }
        }
    }
    total
}

pub fn tropical_area(c: &TropicalCoral, b: u64) -> u64 {
    area_with_direction(c, b, 1)
}

/// Areas under the translations (1, δ) and (−1, δ); they agree for valid corals.
pub fn area_consistency(c: &TropicalCoral, b: u64) -> (u64, u64) {
    (area_with_direction(c, b, 1), area_with_direction(c, b, -1))
}

fn shift_ranges(d: &Degree, b: u64, a_max: u64) -> Vec<(LatticeVector, i64, i64)> {
    let first = d.positive[0];
    let phi1 = Q::new(first.a.into(), first.b.into());
    let bound = q(((a_max + 1) * b) as i64);
    let bq = q(b as i64);
    d.positive[1..]
        .iter()
        .chain(&d.negative)
        .map(|u| {
            let phi = Q::new(u.a.into(), u.b.into());
            let lo = ((&phi1 - &phi - &bound) / &bq).ceil().to_integer().try_into().expect("small");
            let hi = ((&phi1 - &phi + &bound) / &bq).floor().to_integer().try_into().expect("small");
            (*u, lo, hi)
        })
        .collect()
}

/// All shifts (k_i) of the non-fixed ends within the slope bound that keep
/// the degree balanced, i.e. Σ k_i·h_i = 0.
fn balanced_shifts(ranges: &[(LatticeVector, i64, i64)]) -> Vec<Vec<i64>> {
    fn go(r: &[(LatticeVector, i64, i64)], i: usize, acc: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == r.len() {
            if acc == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let (u, lo, hi) = r[i];
        for k in lo..=hi {
            cur.push(k);
            go(r, i + 1, acc + k * u.b, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(ranges, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Area-graded count over the ℤ-translates of the non-fixed ends. λ must be
/// good, general and stable for the representative. Shifted degrees where the
/// shifted λ is not general are listed in `skipped`.
pub fn count_series(qd: &QuotientDegree, lam: &Constraint, a_max: u64) -> Result<AreaSeries, Error> {
    let d = &qd.representative;
    let b = qd.b;
    count(d, lam)?;
    let ranges = shift_ranges(d, b, a_max);
    let mut seen = BTreeSet::new();
    let mut skipped = Vec::new();
    let mut coefficients: BTreeMap<u64, Q> = (0..=a_max).map(|a| (a, Q::zero())).collect();
    for ks in balanced_shifts(&ranges) {
        let l = d.l();
        let mut pos = d.positive.clone();
        let mut neg = d.negative.clone();
        for (i, k) in ks.iter().enumerate() {
            // Shearing a single end moves its slope by k·b at height 1.
            let slot = if i + 1 < l { &mut pos[i + 1] } else { &mut neg[i + 1 - l] };
            *slot = shear_vector(*slot, *k, b);
        }
        let mut key_neg = neg.clone();
        key_neg.sort();
        if !seen.insert((pos.clone(), key_neg)) {
            continue;
        }
        let shifted = Degree::new(pos, neg);
        let mut entries = lam.entries.clone();
        for (i, e) in entries.iter_mut().enumerate().skip(1) {
            e.direction = shear_vector(e.direction, ks[i - 1], b);
        }
        let lam_k = Constraint::new(entries);
        let systems = type_systems(&shifted, &lam_k)?;
        if check_general(&systems).is_err() {
            skipped.push(shifted);
            continue;
        }
        for tc in realized_contributions(&systems)?.per_type {
            if let Some(c) = tc.realized {
                let a = tropical_area(&c, b);
                if let Some(x) = coefficients.get_mut(&a) {
                    *x += tc.contribution;
                }
            }
        }
    }
    Ok(AreaSeries { coefficients, truncation: a_max, skipped })
}
