//! Asymptotic constraints: matching, goodness, sampling of good general
//! constraints, and certification of the stable range.

use num::{BigInt, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coral::{Degree, TropicalCoral};
use crate::coralgraph::CoralType;
use crate::lattice::{ceil_q, det2, project_mod, q, qf, QuotientClass, Q};
use crate::moduli::{build_model, enumerate_types, Model, Parametric, SingularSet};
use crate::Error;

/// Values λ_1..λ_k on the first k labelled positive ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Constraint {
    pub entries: Vec<QuotientClass>,
}

impl Constraint {
    pub fn new(entries: Vec<QuotientClass>) -> Self {
        Constraint { entries }
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn scale(&self, s: &Q) -> Constraint {
        Constraint {
            entries: self
                .entries
                .iter()
                .map(|c| QuotientClass { direction: c.direction, value: &c.value * s })
                .collect(),
        }
    }
}

pub fn matches(c: &TropicalCoral, lam: &Constraint) -> Result<bool, Error> {
    let g = &c.ctype.graph;
    if lam.k() > g.labels.len() {
        return Err(Error::ConstraintLength { expected: g.labels.len().saturating_sub(1), found: lam.k() });
    }
    for (i, cl) in lam.entries.iter().enumerate() {
        let e = g.labels[i];
        let u = c.ctype.positive_dir(e);
        if u != cl.direction {
            return Err(Error::DirectionMismatch { expected: u, found: cl.direction });
        }
        if project_mod(u, c.positive_start(e))?.value != cl.value {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sign σ such that the image of the positive cone in N_R/R·u_i is {σ·x ≥ 0},
/// `Some(0)` if that image is {0}, or `None` if u_i is interior to the cone.
fn boundary_side(i: usize, d: &Degree) -> Option<i32> {
    let dirs = d.positive_dirs();
    let ui = dirs[i];
    let (mut pos, mut neg) = (false, false);
    for u in &dirs {
        match det2(ui, *u).signum() {
            1 => pos = true,
            -1 => neg = true,
            _ => {}
        }
    }
    match (pos, neg) {
        (true, true) => None,
        (true, false) => Some(1),
        (false, true) => Some(-1),
        (false, false) => Some(0),
    }
}

/// λ is good if for every labelled end on the boundary of the cone spanned by
/// the positive directions, λ_i lies in the interior of the cone's image.
pub fn is_good(lam: &Constraint, d: &Degree) -> bool {
    if lam.k() > d.l() {
        return false;
    }
    lam.entries.iter().enumerate().all(|(i, cl)| match boundary_side(i, d) {
        None => true,
        Some(0) => false,
        Some(s) => (q(s as i64) * &cl.value).is_positive(),
    })
}

/// Per-type outcome of rescaling λ by s ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    EmptyForAllScales,
    RealizedAtOne,
    /// Realized for s in (s_min, …) only; `witness` is one such s.
    RealizedAfterRescale {
        #[serde(with = "crate::lattice::qstr")]
        s_min: Q,
        #[serde(with = "crate::lattice::qstr")]
        witness: Q,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableRangeCertificate {
    pub verdicts: Vec<(CoralType, Verdict)>,
}

impl StableRangeCertificate {
    pub fn is_stable(&self) -> bool {
        !self.verdicts.iter().any(|(_, v)| matches!(v, Verdict::RealizedAfterRescale { .. }))
    }

    /// Least integer scale that realizes every type that needs a rescale.
    pub fn stabilizing_scale(&self) -> Q {
        self.verdicts
            .iter()
            .filter_map(|(_, v)| match v {
                Verdict::RealizedAfterRescale { s_min, .. } => Some(Q::from_integer(ceil_q(s_min) + BigInt::one())),
                _ => None,
            })
            .max()
            .unwrap_or_else(Q::one)
    }
}

/// A general type with its realization system.
pub(crate) struct TypeSystem {
    pub ctype: CoralType,
    pub model: Model,
    pub param: Parametric,
}

pub(crate) fn type_systems(d: &Degree, lam: &Constraint) -> Result<Vec<TypeSystem>, Error> {
    let cat = enumerate_types(d, true)?;
    let mut out = Vec::with_capacity(cat.types.len());
    for t in cat.types {
        let model = build_model(&t, lam)?;
        model.assert_rank()?;
        let param = model.solve();
        out.push(TypeSystem { ctype: t, model, param });
    }
    Ok(out)
}

/// Checks that no non-general coral can match λ: every general type's system
/// is uniquely solvable, and no solution sits on the boundary of the length
/// orthant (where it would degenerate to a contracted type).
pub(crate) fn check_general(systems: &[TypeSystem]) -> Result<(), String> {
    for (i, ts) in systems.iter().enumerate() {
        match &ts.param {
            Parametric::Unique { t0, t1 } => {
                let x: Vec<Q> = t0.iter().zip(t1).map(|(a, b)| a + b).collect();
                if x.iter().all(|v| !v.is_negative()) && x.iter().any(Zero::is_zero) {
                    return Err(format!("type {i} has a solution with a contracted edge"));
                }
            }
            Parametric::Singular(SingularSet::Never) => {}
            Parametric::Singular(SingularSet::At(s)) if !s.is_one() => {}
            Parametric::Singular(_) => return Err(format!("type {i} has an underdetermined system")),
        }
    }
    Ok(())
}

pub fn is_general(lam: &Constraint, d: &Degree) -> Result<bool, Error> {
    Ok(check_general(&type_systems(d, lam)?).is_ok())
}

/// The set {s ≥ 1 : a_j + s·b_j > 0 ∀j}, as (inf, sup) with sup = None for ∞.
fn feasible_scales(conds: &[(Q, Q)]) -> Option<(Q, Option<Q>)> {
    let mut lo = Q::one();
    let mut hi: Option<Q> = None;
    for (a, b) in conds {
        if b.is_zero() {
            if !a.is_positive() {
                return None;
            }
        } else {
            let r = -a / b;
            if b.is_positive() {
                if r > lo {
                    lo = r;
                }
            } else if hi.as_ref().is_none_or(|h| &r < h) {
                hi = Some(r);
            }
        }
    }
    if let Some(h) = &hi {
        if *h <= lo {
            return None;
        }
    }
    Some((lo, hi))
}

fn verdict(ts: &TypeSystem) -> Result<Verdict, Error> {
    match &ts.param {
        Parametric::Unique { t0, t1 } => {
            let mut conds: Vec<(Q, Q)> = t0.iter().cloned().zip(t1.iter().cloned()).collect();
            for (_, h0, h1) in ts.model.heights(&ts.ctype, t0, t1) {
                conds.push((h0 - Q::one(), h1));
            }
            if conds.iter().all(|(a, b)| (a + b).is_positive()) {
                return Ok(Verdict::RealizedAtOne);
            }
            match feasible_scales(&conds) {
                None => Ok(Verdict::EmptyForAllScales),
                Some((lo, hi)) => {
                    let witness = match hi {
                        None => &lo + Q::one(),
                        Some(h) => (&lo + h) / q(2),
                    };
                    Ok(Verdict::RealizedAfterRescale { s_min: lo, witness })
                }
            }
        }
        Parametric::Singular(SingularSet::Never) => Ok(Verdict::EmptyForAllScales),
        Parametric::Singular(SingularSet::At(s)) if *s < Q::one() => Ok(Verdict::EmptyForAllScales),
        Parametric::Singular(_) => Err(Error::NotGeneral("a type degenerates under rescaling".into())),
    }
}

/// Decides for every general type whether it is realized at λ, only after
/// rescaling λ by some s > 1, or never. λ is in the stable range iff no type
/// needs a rescale.
pub fn in_stable_range(lam: &Constraint, d: &Degree) -> Result<StableRangeCertificate, Error> {
    let systems = type_systems(d, lam)?;
    certificate(&systems)
}

pub(crate) fn certificate(systems: &[TypeSystem]) -> Result<StableRangeCertificate, Error> {
    let verdicts = systems.iter().map(|ts| Ok((ts.ctype.clone(), verdict(ts)?))).collect::<Result<_, Error>>()?;
    Ok(StableRangeCertificate { verdicts })
}

const ATTEMPTS: usize = 200;

fn random_value<R: Rng>(rng: &mut R, side: Option<i32>) -> Q {
    let den = rng.gen_range(1..=6i64);
    let num = rng.gen_range(1..=24 * den);
    let mag = qf(num, den);
    let s = match side {
        Some(s) if s != 0 => s as i64,
        _ => {
            if rng.gen_bool(0.5) {
                1
            } else {
                -1
            }
        }
    };
    mag * q(s)
}

/// Deterministic pseudo-random good general constraint for `d`.
pub fn sample_general_good(d: &Degree, seed: u64) -> Result<Constraint, Error> {
    d.check()?;
    let dirs = d.positive_dirs();
    let k = d.l() - 1;
    if k == 0 {
        return Ok(Constraint::new(vec![]));
    }
    for attempt in 0..ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(attempt as u64));
        let entries = (0..k)
            .map(|i| QuotientClass::new(dirs[i], random_value(&mut rng, boundary_side(i, d))))
            .collect::<Result<Vec<_>, _>>()?;
        let lam = Constraint::new(entries);
        if !is_good(&lam, d) {
            continue;
        }
        if check_general(&type_systems(d, &lam)?).is_ok() {
            return Ok(lam);
        }
    }
    Err(Error::SamplingFailed(ATTEMPTS))
}

/// Rescales a good general λ into the stable range, rechecking generality.
pub fn stabilize(lam: &Constraint, d: &Degree) -> Result<Constraint, Error> {
    let mut cur = lam.clone();
    for _ in 0..8 {
        let systems = type_systems(d, &cur)?;
        check_general(&systems).map_err(Error::NotGeneral)?;
        let cert = certificate(&systems)?;
        if cert.is_stable() {
            return Ok(cur);
        }
        cur = cur.scale(&cert.stabilizing_scale());
    }
    Err(Error::BadConstraint(None))
}

/// Good, general and stable constraint for `d`, derived from `seed`.
pub fn sample_stable(d: &Degree, seed: u64) -> Result<Constraint, Error> {
    let mut last = Error::SamplingFailed(ATTEMPTS);
    for sub in 0..16u64 {
        let lam = sample_general_good(d, seed.wrapping_add(sub << 32))?;
        match stabilize(&lam, d) {
            Ok(l) => return Ok(l),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coral::samples::*;
    use crate::lattice::LatticeVector;

    fn lam(u: (i64, i64), v: Q) -> Constraint {
        Constraint::new(vec![QuotientClass::new(LatticeVector::new(u.0, u.1), v).unwrap()])
    }

    #[test]
    fn matching_examples() {
        let c = simple_example();
        assert!(matches(&c, &lam((2, 1), q(4))).unwrap());
        assert!(!matches(&c, &lam((2, 1), q(5))).unwrap());
        assert!(matches!(matches(&c, &lam((1, 1), q(4))), Err(Error::DirectionMismatch { .. })));
        assert!(matches(&c, &Constraint::new(vec![])).unwrap());
    }

    #[test]
    fn goodness_examples() {
        let d = simple_degree();
        assert!(is_good(&lam((2, 1), q(4)), &d));
        assert!(!is_good(&lam((2, 1), q(-1)), &d));
        assert!(!is_good(&lam((2, 1), q(0)), &d));
        // (0,1) is strictly inside the cone of (1,1), (−1,1): any value is good.
        let v = LatticeVector::new;
        let d3 = Degree::new(vec![v(0, 1), v(1, 1), v(-1, 1)], vec![v(0, -3)]);
        let l3 = Constraint::new(vec![
            QuotientClass::new(v(0, 1), q(-7)).unwrap(),
            QuotientClass::new(v(1, 1), q(2)).unwrap(),
        ]);
        assert!(is_good(&l3, &d3));
    }

    #[test]
    fn stable_range_examples() {
        let d = simple_degree();
        let cert = in_stable_range(&lam((2, 1), q(4)), &d).unwrap();
        assert_eq!(cert.verdicts.len(), 1);
        assert_eq!(cert.verdicts[0].1, Verdict::RealizedAtOne);
        assert!(cert.is_stable());

        // λ = 1/100 puts the interior vertex at height 1/200.
        let cert = in_stable_range(&lam((2, 1), qf(1, 100)), &d).unwrap();
        assert!(!cert.is_stable());
        match &cert.verdicts[0].1 {
            Verdict::RealizedAfterRescale { s_min, .. } => assert_eq!(*s_min, q(200)),
            v => panic!("unexpected {v:?}"),
        }
        assert_eq!(cert.stabilizing_scale(), q(201));
        let fixed = stabilize(&lam((2, 1), qf(1, 100)), &d).unwrap();
        assert!(in_stable_range(&fixed, &d).unwrap().is_stable());

        // Negative value: the interior vertex would be below the origin.
        let cert = in_stable_range(&lam((2, 1), q(-3)), &d).unwrap();
        assert_eq!(cert.verdicts[0].1, Verdict::EmptyForAllScales);
    }

    #[test]
    fn single_end_is_trivially_stable() {
        let v = LatticeVector::new;
        let d = Degree::new(vec![v(1, 2)], vec![v(-1, -2)]);
        let lam = sample_general_good(&d, 3).unwrap();
        assert_eq!(lam.k(), 0);
        assert!(in_stable_range(&lam, &d).unwrap().is_stable());
    }

    #[test]
    fn sampler_is_deterministic_and_good() {
        let d = simple_degree();
        let a = sample_general_good(&d, 0).unwrap();
        let b = sample_general_good(&d, 0).unwrap();
        assert_eq!(a, b);
        assert!(is_good(&a, &d));
        assert!(is_general(&a, &d).unwrap());
    }
}
