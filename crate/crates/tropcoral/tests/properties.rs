//! Property tests over random lattice data and random realized corals.

use num::Signed;
use proptest::prelude::*;

use tropcoral::constraints::{in_stable_range, is_good, matches, Constraint};
use tropcoral::coral::{canonical_form, canonical_type, degree_of, forget_labels, rescale, type_of, validate_coral, Degree, TropicalCoral};
use tropcoral::coralgraph::validate_graph;
use tropcoral::counting::{count, extend_coral, mult_star, restrict_curve};
use tropcoral::io::{self, CoralFile, CurveFile, MorseFile, ProblemFile};
use tropcoral::lattice::{det2, fmt_q, parse_q, primitive, project_mod, qf, LatticeVector, RationalPoint};
use tropcoral::morse::{coral_to_tmt, tmt_to_type, validate_tmt};
use tropcoral::quotient::{area_consistency, shear_coral, tropical_area};
use tropcoral::random::{random_instance, random_star};
use tropcoral::Error;

fn vec2() -> impl Strategy<Value = LatticeVector> {
    (-50i64..=50, -50i64..=50).prop_map(|(a, b)| LatticeVector::new(a, b))
}

fn rational() -> impl Strategy<Value = tropcoral::lattice::Q> {
    (-200i64..=200, 1i64..=30).prop_map(|(n, d)| qf(n, d))
}

fn instance(seed: u64) -> (Degree, Constraint, Vec<TropicalCoral>) {
    let (d, lam) = random_instance(seed);
    let corals = count(&d, &lam).expect("sampled constraint counts").per_type.into_iter().filter_map(|t| t.realized).collect();
    (d, lam, corals)
}

/// Applies an integral matrix to a direction.
fn apply(m: [[i64; 2]; 2], v: LatticeVector) -> LatticeVector {
    LatticeVector::new(m[0][0] * v.a + m[0][1] * v.b, m[1][0] * v.a + m[1][1] * v.b)
}

proptest! {
    #[test]
    fn primitive_recomposes(v in vec2()) {
        prop_assume!(!v.is_zero());
        let (p, g) = primitive(v).unwrap();
        prop_assert!(p.is_primitive());
        prop_assert_eq!(p.scale(g as i64), v);
    }

    #[test]
    fn det_is_antisymmetric_and_bilinear(u in vec2(), v in vec2(), w in vec2(), k in -5i64..=5) {
        prop_assert_eq!(det2(u, v), -det2(v, u));
        prop_assert_eq!(det2(u.add(w.scale(k)), v), det2(u, v) + k * det2(w, v));
    }

    #[test]
    fn projection_ignores_motion_along_direction(v in vec2(), x in rational(), h in rational(), t in rational()) {
        prop_assume!(!v.is_zero());
        let (u, _) = primitive(v).unwrap();
        let p = RationalPoint::new(x, h);
        prop_assert_eq!(project_mod(u, &p).unwrap(), project_mod(u, &p.step(&t, u)).unwrap());
    }

    #[test]
    fn rationals_round_trip_as_strings(x in rational()) {
        prop_assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
    }

    #[test]
    fn mult_independent_of_pair(seed in any::<u64>()) {
        let s = random_star(seed);
        let a = mult_star(&s, (0, 1)).unwrap();
        prop_assert_eq!(a, mult_star(&s, (1, 2)).unwrap());
        prop_assert_eq!(a, mult_star(&s, (0, 2)).unwrap());
    }

    #[test]
    fn mult_invariant_under_unimodular_maps(seed in any::<u64>(), k in -4i64..=4, which in 0usize..3) {
        let m = [[[1, k], [0, 1]], [[0, -1], [1, 0]], [[1, 0], [k, 1]]][which];
        let s = random_star(seed);
        let t = s.map(|(w, u)| (w, apply(m, u)));
        prop_assert_eq!(mult_star(&s, (0, 1)).unwrap(), mult_star(&t, (0, 1)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn realized_corals_are_valid_general_and_match(seed in 0u64..5_000) {
        let (d, lam, corals) = instance(seed);
        for c in &corals {
            prop_assert!(validate_coral(c).is_valid());
            prop_assert!(tropcoral::coral::is_general(c));
            prop_assert!(matches(c, &lam).unwrap());
            prop_assert!(degree_of(&c.ctype).same_as(&d));
            prop_assert_eq!(c.ctype.graph.positive_edges.len(), d.l());
            prop_assert_eq!(c.ctype.graph.negative_vertices().len(), d.m());
            for v in c.ctype.graph.interior_vertices() {
                prop_assert!(c.ctype.weighted_flag_sum(v).is_zero());
            }
        }
    }

    #[test]
    fn count_is_nonnegative(seed in 0u64..5_000) {
        let (d, lam) = random_instance(seed);
        let r = count(&d, &lam).unwrap();
        prop_assert!(!r.total.is_negative());
        for t in &r.per_type {
            prop_assert_eq!(t.realized.is_some(), t.contribution.is_positive());
        }
    }

    #[test]
    fn rescaling_preserves_degree_and_matching(seed in 0u64..5_000, n in 1i64..=20, den in 1i64..=4) {
        prop_assume!(n >= den);
        let s = qf(n, den);
        let (d, lam, corals) = instance(seed);
        for c in &corals {
            match rescale(c, &s) {
                Ok(r) => {
                    prop_assert!(degree_of(&type_of(&r).unwrap()).same_as(&d));
                    prop_assert!(matches(&r, &lam.scale(&s)).unwrap());
                }
                Err(Error::RescaleChangesType) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn canonical_form_is_idempotent(seed in 0u64..5_000) {
        let (_, _, corals) = instance(seed);
        for c in &corals {
            let once = canonical_form(c);
            prop_assert_eq!(canonical_form(&once), once);
        }
    }

    #[test]
    fn validation_ignores_listing_order(seed in 0u64..5_000) {
        let (_, _, corals) = instance(seed);
        for c in &corals {
            let g = &c.ctype.graph;
            let mut h = g.clone();
            h.vertices.reverse();
            h.bounded_edges.reverse();
            h.positive_edges.reverse();
            let r = validate_graph(g);
            prop_assert_eq!(&r, &validate_graph(&h));
            prop_assert_eq!(&r, &validate_graph(g));
        }
    }

    #[test]
    fn extension_is_a_tree_with_all_ends(seed in 0u64..5_000) {
        let (d, lam, corals) = instance(seed);
        for c in &corals {
            let g = &c.ctype.graph;
            let x = tropcoral::coralgraph::extend_graph(g, &c.ctype.negvert_weights).unwrap();
            prop_assert_eq!(x.unbounded.len(), g.positive_edges.len() + g.negative_vertices().len());
            let tc = extend_coral(c).unwrap();
            prop_assert!(tc.check().is_empty());
            prop_assert_eq!(canonical_form(&restrict_curve(&tc, &d, &lam).unwrap()), canonical_form(c));
        }
    }

    #[test]
    fn morse_projection_recovers_the_type(seed in 0u64..5_000) {
        let (_, _, corals) = instance(seed);
        for c in &corals {
            match coral_to_tmt(c, None) {
                Ok(m) => {
                    prop_assert!(validate_tmt(&m).0.is_valid());
                    let t = tmt_to_type(&m).unwrap();
                    prop_assert_eq!(canonical_type(&forget_labels(&t)), canonical_type(&forget_labels(&c.ctype)));
                }
                Err(Error::NotGoodType) => {}
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn area_is_consistent_and_shear_invariant(seed in 0u64..5_000, b in 1u64..=3, k in -2i64..=2) {
        let (_, _, corals) = instance(seed);
        for c in &corals {
            let (a1, a2) = area_consistency(c, b);
            prop_assert_eq!(a1, a2);
            prop_assert_eq!(tropical_area(c, b), tropical_area(&shear_coral(c, k, b), b));
        }
    }

    #[test]
    fn stability_persists_under_rescaling(seed in 0u64..5_000, n in 1i64..=12) {
        let (d, lam) = random_instance(seed);
        let s = qf(n + 1, 2).max(qf(1, 1));
        prop_assert!(in_stable_range(&lam.scale(&s), &d).unwrap().is_stable());
    }

    #[test]
    fn goodness_ignores_order_of_unconstrained_ends(seed in 0u64..5_000) {
        let (d, lam) = random_instance(seed);
        prop_assume!(d.l() >= 3);
        let short = Constraint::new(lam.entries[..d.l() - 2].to_vec());
        let mut e = d.clone();
        let l = e.l();
        e.positive.swap(l - 2, l - 1);
        prop_assert_eq!(is_good(&short, &d), is_good(&short, &e));
    }

    #[test]
    fn files_round_trip(seed in 0u64..5_000) {
        let (d, lam, corals) = instance(seed);
        let p = ProblemFile { degree: d, constraint: lam };
        prop_assert_eq!(io::parse::<ProblemFile>(&io::render(&p)).unwrap(), p);
        for c in &corals {
            let f = CoralFile::from_coral(c);
            let back: CoralFile = io::parse(&io::render(&f)).unwrap();
            prop_assert_eq!(&back.to_coral().unwrap(), c);
            let cf = CurveFile::from_curve(&extend_coral(c).unwrap());
            prop_assert_eq!(io::parse::<CurveFile>(&io::render(&cf)).unwrap(), cf);
            if let Ok(m) = coral_to_tmt(c, None) {
                let mf = MorseFile::from_tree(&m);
                prop_assert_eq!(io::parse::<MorseFile>(&io::render(&mf)).unwrap().to_tree().unwrap(), m);
            }
        }
    }
}
