//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num::Zero;
use tropcoral::constraints::{sample_stable, Constraint};
use tropcoral::coral::samples::{simple_example, simple_example_at, y_coral};
use tropcoral::coral::{canonical_form, canonical_type, degree_of, type_of, TropicalCoral};
use tropcoral::counting::{count, extend_coral, mult_star, restrict_curve};
use tropcoral::lattice::{q, qf, LatticeVector, QuotientClass, Q};
use tropcoral::moduli::{enumerate_types, realize, system_report};
use tropcoral::morse::samples::simple_morse;
use tropcoral::morse::{coral_to_tmt, lift_tmt, validate_tmt, ExternalRef, MorseTree};
use tropcoral::quotient::{area_consistency, shear_coral, tropical_area};
use tropcoral::random::{random_instance, random_star};
use tropcoral::Error;

const STARS: u64 = 500;
const ROUND_TRIP_DEGREES: u64 = 200;
const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(60);
const PIPELINE_BUDGET: Duration = Duration::from_secs(1);
const INDEPENDENCE_DEGREES: u64 = 50;
const AREA_INSTANCES: usize = 20;
const MORSE_TREES: usize = 20;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn realized_corals(d: &tropcoral::coral::Degree, lam: &Constraint) -> Result<Vec<TropicalCoral>, Error> {
    Ok(count(d, lam)?.per_type.into_iter().filter_map(|t| t.realized).collect())
}

fn simple_pipeline() -> Outcome {
    let start = Instant::now();
    let m = simple_morse();
    let (report, prof) = validate_tmt(&m);
    let Some(prof) = prof else {
        return outcome(false, format!("tree invalid: {:?}", report.violations));
    };
    // 3·(0−2) − 2·(−3−0) = 0, read off the velocities entering the vertex.
    let leaves = m.leaves();
    let balance: Q = leaves.iter().map(|v| prof.edges[v].end.clone()).sum();
    let identity = q(3) * (q(0) - q(2)) - q(2) * (q(-3) - q(0));
    let c = match lift_tmt(&m, &[q(2)]) {
        Ok(c) => c,
        Err(e) => return outcome(false, format!("lift failed: {e}")),
    };
    let interior = c.ctype.graph.interior_vertices();
    let at_02 = interior.len() == 1 && c.positions[&interior[0]] == tropcoral::lattice::RationalPoint::from_ints(0, 2);
    let wv = c.ctype.negvert_weights.values().copied().collect::<Vec<_>>() == vec![5];
    let d = degree_of(&c.ctype);
    let lam = Constraint::new(vec![QuotientClass::new(LatticeVector::new(2, 1), q(4)).unwrap()]);
    let total = count(&d, &lam).map(|r| r.total);
    let elapsed = start.elapsed();
    let ok = balance.is_zero()
        && identity.is_zero()
        && at_02
        && wv
        && total.as_ref().is_ok_and(|t| *t == q(1))
        && elapsed < PIPELINE_BUDGET;
    outcome(ok, format!("balance={balance} count={total:?} interior(0,2)={at_02} w_v=5:{wv} in {elapsed:?}"))
}

fn pair_independence() -> Outcome {
    let mut bad = 0;
    for s in 0..STARS {
        let star = random_star(s);
        let ms: Vec<u64> = [(0, 1), (0, 2), (1, 2)].iter().map(|p| mult_star(&star, *p).unwrap()).collect();
        if ms[0] != ms[1] || ms[1] != ms[2] {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{STARS} stars, {bad} disagreements"))
}

struct RoundTrips {
    corals: usize,
    a: usize,
    b: usize,
    b_checked: usize,
    b_not_good: usize,
    c: usize,
    errors: Vec<String>,
}

fn morse_round_trip(c: &TropicalCoral) -> Result<bool, Error> {
    let m = coral_to_tmt(c, None)?;
    let fixed = m.root;
    let r = c.positions[&m.vertices[&fixed][0]].h.clone();
    for h in [r.clone(), r * q(2)] {
        let lifted = lift_tmt(&m, &[h])?;
        let back = coral_to_tmt(&lifted, Some(ExternalRef::Negative(fixed)))?;
        if back.canonical() != m.canonical() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn round_trips() -> (Outcome, RoundTrips) {
    let start = Instant::now();
    let mut st = RoundTrips { corals: 0, a: 0, b: 0, b_checked: 0, b_not_good: 0, c: 0, errors: vec![] };
    for seed in 0..ROUND_TRIP_DEGREES {
        let (d, lam) = random_instance(seed);
        let corals = match realized_corals(&d, &lam) {
            Ok(c) => c,
            Err(e) => {
                st.errors.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        for c in corals {
            st.corals += 1;
            match extend_coral(&c).and_then(|x| restrict_curve(&x, &d, &lam)) {
                Ok(r) if canonical_form(&r) == canonical_form(&c) => {}
                Ok(_) => st.a += 1,
                Err(e) => {
                    st.a += 1;
                    st.errors.push(format!("seed {seed} (a): {e}"));
                }
            }
            match morse_round_trip(&c) {
                Ok(true) => st.b_checked += 1,
                Ok(false) => {
                    st.b_checked += 1;
                    st.b += 1;
                }
                Err(Error::NotGoodType) => st.b_not_good += 1,
                Err(e) => {
                    st.b_checked += 1;
                    st.b += 1;
                    st.errors.push(format!("seed {seed} (b): {e}"));
                }
            }
            match type_of(&c).and_then(|t| realize(&t, &lam)) {
                Ok(Some(r)) if canonical_form(&r) == canonical_form(&c) => {}
                Ok(_) => st.c += 1,
                Err(e) => {
                    st.c += 1;
                    st.errors.push(format!("seed {seed} (c): {e}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = st.a == 0 && st.b == 0 && st.c == 0 && st.errors.is_empty() && elapsed < ROUND_TRIP_BUDGET;
    let mut detail = format!(
        "{ROUND_TRIP_DEGREES} degrees, {} corals; failures a={} b={} c={}; Morse checks {} (skipped {} not of good type) in {elapsed:?}",
        st.corals, st.a, st.b, st.c, st.b_checked, st.b_not_good
    );
    if let Some(e) = st.errors.first() {
        detail.push_str(&format!("; first error: {e}"));
    }
    (outcome(ok, detail), st)
}

fn constraint_independence() -> Outcome {
    let mut bad = Vec::new();
    let mut distinct = 0;
    for seed in 0..INDEPENDENCE_DEGREES {
        let (d, lam1) = random_instance(10_000 + seed);
        let lam2 = match (1..20).find_map(|k| sample_stable(&d, 77_777 * k + seed).ok().filter(|l| *l != lam1)) {
            Some(l) => l,
            None => {
                bad.push(format!("seed {seed}: no second constraint"));
                continue;
            }
        };
        distinct += 1;
        match (count(&d, &lam1), count(&d, &lam2)) {
            (Ok(a), Ok(b)) if a.total == b.total => {}
            (a, b) => bad.push(format!("seed {seed}: {:?} vs {:?}", a.map(|r| r.total), b.map(|r| r.total))),
        }
    }
    outcome(bad.is_empty(), format!("{distinct} degrees with two constraints; {} mismatches {:?}", bad.len(), bad.first()))
}

fn oracle_equivalence() -> Outcome {
    let corpus = common::oracle_corpus();
    let mut bad = Vec::new();
    let mut types = 0;
    for (i, d) in corpus.iter().enumerate() {
        let ours: BTreeSet<_> = match enumerate_types(d, true) {
            Ok(c) => c.types.iter().map(canonical_type).collect(),
            Err(e) => {
                bad.push(format!("degree {i}: {e}"));
                continue;
            }
        };
        types += ours.len();
        if ours != common::oracle_types(d) {
            bad.push(format!("degree {i}"));
        }
    }
    outcome(bad.is_empty(), format!("{} degrees, {types} types; mismatches {bad:?}", corpus.len()))
}

fn uniqueness() -> Outcome {
    let mut pairs = 0;
    let mut bad = Vec::new();
    for seed in 0..ROUND_TRIP_DEGREES {
        let (d, lam) = random_instance(seed);
        let cat = enumerate_types(&d, true).expect("valid degree");
        for t in &cat.types {
            pairs += 1;
            match system_report(t, &lam) {
                Ok(r) if r.free_dimension == d.l() - 1 && matches!(r.solutions, Some(0 | 1)) => {}
                other => bad.push(format!("seed {seed}: {other:?}")),
            }
        }
    }
    outcome(bad.is_empty(), format!("{pairs} (type, constraint) pairs; {} violations {:?}", bad.len(), bad.first()))
}

fn area_corpus() -> Vec<(TropicalCoral, u64)> {
    let mut out = vec![
        // Vertex on L_0 with the radial edge along it.
        (simple_example(), 1),
        (simple_example(), 2),
        (simple_example().mirror(), 1),
        (simple_example_at(qf(7, 2)), 1),
        (simple_example_at(q(3)), 3),
        (y_coral(), 1),
        (y_coral(), 2),
        (shear_coral(&y_coral(), 1, 1), 1),
    ];
    let mut seed = 0;
    while out.len() < AREA_INSTANCES {
        let (d, lam) = random_instance(500 + seed);
        seed += 1;
        for c in realized_corals(&d, &lam).expect("stable instance") {
            if out.len() < AREA_INSTANCES {
                out.push((c, 1 + seed % 2));
            }
        }
    }
    out
}

fn area_well_defined() -> Outcome {
    let mut bad = Vec::new();
    let corpus = area_corpus();
    let mut areas = Vec::new();
    for (i, (c, b)) in corpus.iter().enumerate() {
        let (x, y) = area_consistency(c, *b);
        if x != y {
            bad.push(format!("instance {i}: perturbations give {x} and {y}"));
        }
        for k in [-2, -1, 1, 2] {
            let s = tropical_area(&shear_coral(c, k, *b), *b);
            if s != x {
                bad.push(format!("instance {i}: shear {k} gives {s}, expected {x}"));
            }
        }
        areas.push(x);
    }
    let simple = tropical_area(&simple_example(), 1);
    if simple != 15 {
        bad.push(format!("simple example area {simple}"));
    }
    outcome(bad.is_empty(), format!("{} instances, areas {areas:?}; {bad:?}", corpus.len()))
}

fn morse_corpus() -> Vec<MorseTree> {
    let mut out = vec![simple_morse()];
    if let Ok(m) = coral_to_tmt(&simple_example(), Some(ExternalRef::Positive(1))) {
        out.push(m);
    }
    out.push(coral_to_tmt(&y_coral(), None).expect("good type"));
    let mut seed = 0;
    while out.len() < MORSE_TREES {
        let (d, lam) = random_instance(900 + seed);
        seed += 1;
        for c in realized_corals(&d, &lam).expect("stable instance") {
            let roots: Vec<ExternalRef> = std::iter::once(None)
                .chain(c.ctype.graph.labels.iter().map(|e| Some(ExternalRef::Positive(*e))))
                .flatten()
                .collect();
            for r in std::iter::once(None).chain(roots.into_iter().map(Some)) {
                if out.len() < MORSE_TREES {
                    if let Ok(m) = coral_to_tmt(&c, r) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

fn contraction_law() -> Outcome {
    let corpus = morse_corpus();
    let mut bad = Vec::new();
    let mut contracted_total = 0;
    for (i, m) in corpus.iter().enumerate() {
        let (r, prof) = validate_tmt(m);
        match prof {
            Some(p) => {
                let c = p.contracted();
                contracted_total += c.len();
                if c != m.predicted_contracted() || c.is_empty() {
                    bad.push(format!("tree {i}"));
                }
            }
            None => bad.push(format!("tree {i} invalid: {:?}", r.violations)),
        }
    }
    outcome(bad.is_empty(), format!("{} trees, {contracted_total} contracted edges; {bad:?}", corpus.len()))
}

fn main() {
    let (rt, _) = round_trips();
    let results = [
        ("1 SimpleExample pipeline", simple_pipeline()),
        ("2 multiplicity pair-independence", pair_independence()),
        ("3 round trips", rt),
        ("4 constraint independence", constraint_independence()),
        ("5 oracle equivalence", oracle_equivalence()),
        ("6 uniqueness and rank", uniqueness()),
        ("7 area well-definedness", area_well_defined()),
        ("8 Morse contraction law", contraction_law()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} criterion {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
