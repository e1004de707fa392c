//! Seeded generators for degrees, constraints and vertex stars, used by the
//! property tests and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{sample_stable, Constraint};
use crate::coral::Degree;
use crate::lattice::{primitive, LatticeVector};
use crate::Error;

/// Bound on every coordinate of a generated weighted end.
pub const ENTRY_BOUND: i64 = 6;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fits(v: LatticeVector) -> bool {
    v.a.abs() <= ENTRY_BOUND && v.b.abs() <= ENTRY_BOUND
}

/// Balanced degree with `l` positive and `m` negative ends, distinct positive
/// directions and entries bounded by [`ENTRY_BOUND`].
pub fn random_degree_with(seed: u64, l: usize, m: usize) -> Degree {
    let mut r = rng(seed);
    loop {
        let pos: Vec<LatticeVector> = (0..l)
            .map(|_| LatticeVector::new(r.gen_range(-ENTRY_BOUND..=ENTRY_BOUND), r.gen_range(1..=ENTRY_BOUND)))
            .collect();
        let mut dirs: Vec<_> = pos.iter().map(|v| primitive(*v).expect("nonzero").0).collect();
        dirs.sort();
        dirs.dedup();
        if dirs.len() != l {
            continue;
        }
        let total = pos.iter().fold(LatticeVector::new(0, 0), |a, v| a.add(*v));
        let neg = match m {
            1 => vec![total.neg()],
            _ => {
                let first = LatticeVector::new(r.gen_range(-ENTRY_BOUND..=ENTRY_BOUND), -r.gen_range(1..=ENTRY_BOUND));
                let second = total.neg().add(first.neg());
                vec![first, second]
            }
        };
        if neg.iter().all(|v| v.b < 0 && fits(*v)) {
            return Degree::new(pos, neg);
        }
    }
}

/// Degree with l + m ∈ {3, 4}, l ≥ 2.
pub fn random_degree(seed: u64) -> Degree {
    let shapes = [(2, 1), (3, 1), (2, 2)];
    let (l, m) = shapes[rng(seed ^ 0xD1B5_4A32_D192_ED03).gen_range(0..shapes.len())];
    random_degree_with(seed, l, m)
}

/// A random degree together with a good, general, stable constraint.
/// Degrees for which sampling fails are redrawn.
pub fn random_instance(seed: u64) -> (Degree, Constraint) {
    for sub in 0u64.. {
        let d = random_degree(seed.wrapping_mul(1_000_003).wrapping_add(sub));
        match sample_stable(&d, seed ^ sub) {
            Ok(lam) => return (d, lam),
            Err(Error::SamplingFailed(_)) | Err(Error::BadConstraint(_)) | Err(Error::NotGeneral(_)) => continue,
            Err(e) => panic!("unexpected error for {d:?}: {e}"),
        }
    }
    unreachable!()
}

/// A balanced trivalent star: three (weight, primitive direction) pairs with
/// pairwise independent directions.
pub fn random_star(seed: u64) -> [(u64, LatticeVector); 3] {
    let mut r = rng(seed);
    loop {
        let mut v = || LatticeVector::new(r.gen_range(-ENTRY_BOUND..=ENTRY_BOUND), r.gen_range(-ENTRY_BOUND..=ENTRY_BOUND));
        let (a, b) = (v(), v());
        let c = a.add(b).neg();
        if a.is_zero() || b.is_zero() || c.is_zero() || crate::lattice::det2(a, b) == 0 {
            continue;
        }
        let split = |x: LatticeVector| {
            let (u, w) = primitive(x).expect("nonzero");
            (w, u)
        };
        return [split(a), split(b), split(c)];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees_are_balanced_and_bounded() {
        for s in 0..50 {
            let d = random_degree(s);
            assert!(d.is_balanced());
            assert!(d.check().is_ok());
            assert!(d.positive.iter().chain(&d.negative).all(|v| fits(*v)));
            assert!(d.l() + d.m() <= 4);
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(random_degree(7), random_degree(7));
        assert_eq!(random_star(3), random_star(3));
    }
}
