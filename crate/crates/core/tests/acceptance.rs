//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use slope_crystal::crystal::f_op;
use slope_crystal::graph::{generate, parallel_iso_check, CrystalGraph};
use slope_crystal::monomial::{
    constants_from_slope, corner_order_violation, e_bracket, e_direct, f_bracket, f_direct, monomial_closure,
    psi, stats, verify_psi_commutes, EdgeConstants, Monomial,
};
use slope_crystal::partition::{multipartitions_up_to, ColoredMultiPartition, Partition, Residue};
use slope_crystal::regularity::height_count_identity;
use slope_crystal::slope::{LexScalar, SlopeBase, SlopeDatum, SlopeMode};
use slope_crystal::verify::{exhaustive, operator_consistency};

const ENUM_DEPTH: usize = 8;
const ISO_DEPTH: usize = 10;
const PSI_DEPTH: usize = 8;

struct Config {
    n: u32,
    coloring: Vec<Residue>,
    data: Vec<SlopeDatum>,
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn datum(mode: SlopeMode, omega: BigRational, omega_bar: BigRational, xi: &[i64]) -> SlopeDatum {
    let base = SlopeBase::new(omega, omega_bar, xi.iter().map(|&v| rat(v, 1)).collect());
    SlopeDatum::build(mode, base).expect("aligned test datum")
}

fn configs() -> Vec<Config> {
    let data = |xi1: &[i64], xi2: &[i64], xi3: &[i64], xi4: &[i64]| {
        vec![
            datum(SlopeMode::Generic, rat(3, 2), rat(1, 1), xi1),
            datum(SlopeMode::Row, rat(1, 1), rat(1, 1), xi2),
            datum(SlopeMode::RowPrime, rat(2, 1), rat(1, 1), xi3),
            datum(SlopeMode::Generic, rat(1, 1), rat(5, 2), xi4),
        ]
    };
    vec![
        Config { n: 2, coloring: vec![0], data: data(&[1], &[1], &[1], &[2]) },
        Config { n: 3, coloring: vec![0], data: data(&[1], &[1], &[1], &[2]) },
        Config { n: 3, coloring: vec![0, 1], data: data(&[1, 2], &[1, 2], &[1, 3], &[2, 1]) },
    ]
}

fn label(c: &Config) -> String {
    format!("n={} p={:?}", c.n, c.coloring)
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

/// Criteria 1, 2 and the exhaustive half of 6 share one enumeration.
fn enumeration_checks(cfgs: &[Config]) -> (Outcome, Outcome, Outcome) {
    let mut sets = Vec::new();
    let mut tangent = Vec::new();
    let mut gaps = Vec::new();
    let mut totals = (0, 0);
    for c in cfgs {
        for xi in &c.data {
            let report = exhaustive(xi, c.n, &c.coloring, ENUM_DEPTH).expect("valid configuration");
            totals.0 += report.counts.enumerated;
            totals.1 += report.counts.regular;
            for f in &report.failures {
                let line = format!("{} {} {}: {} {}", label(c), xi.to_json(), f.check, f.vertex.to_json(), f.detail);
                match f.check {
                    "tangent_oracle" => tangent.push(line),
                    "gap_pairs" => gaps.push(line),
                    _ => sets.push(line),
                }
            }
        }
    }
    let summarize = |failures: Vec<String>, ok: String| match failures.first() {
        None => pass(ok),
        Some(first) => fail(format!("{} failure(s), first: {first}", failures.len())),
    };
    (
        summarize(sets, format!("{} multi-partitions checked, {} regular", totals.0, totals.1)),
        summarize(tangent, format!("{} multi-partitions checked", totals.0)),
        summarize(gaps, format!("{} regular multi-partitions have no gap pairs", totals.1)),
    )
}

fn criterion_iso(cfgs: &[Config], graphs: &[Vec<CrystalGraph>]) -> Outcome {
    let mut pairs = 0;
    for (c, gs) in cfgs.iter().zip(graphs) {
        for a in 0..gs.len() {
            for b in a + 1..gs.len() {
                pairs += 1;
                if let slope_crystal::graph::IsoOutcome::Mismatch(w) = parallel_iso_check(&gs[a], &gs[b]) {
                    return fail(format!(
                        "{} data {} vs {}: word [{}] {}",
                        label(c),
                        c.data[a].to_json(),
                        c.data[b].to_json(),
                        w.word_string(),
                        w.reason
                    ));
                }
                if gs[a].weight_multiplicities() != gs[b].weight_multiplicities() {
                    return fail(format!("{} weight multiplicities differ", label(c)));
                }
            }
        }
    }
    pass(format!("{pairs} pairs isomorphic at depth {ISO_DEPTH}"))
}

fn criterion_psi() -> Outcome {
    // hand-checked instance
    let xi = datum(SlopeMode::Row, rat(1, 1), rat(1, 1), &[1]);
    let c = constants_from_slope(&xi, 2).unwrap();
    let empty = ColoredMultiPartition::empty(2, vec![0]).unwrap();
    let one = f_op(&xi, &empty, 0).unwrap().unwrap();
    let expected = Monomial::from_factors(2, &[(1, 4, 2), (0, 5, -1)]);
    let root = Monomial::var(2, 0, 3, 1);
    if psi(&xi, &one).unwrap() != expected || f_direct(&c, &root, 0) != Some(expected) {
        return fail("hand instance Ψ(f0 ∅) = Y(1,4)^2 Y(0,5)^-1 = f0 Y(0,3) does not hold");
    }

    let cases: Vec<(u32, Vec<Residue>, Vec<i64>)> = vec![
        (2, vec![0], vec![1, 1, 1]),
        (2, vec![0], vec![2, 1, 1]),
        (2, vec![0], vec![1, 3, 2]),
        (3, vec![0], vec![1, 1, 1]),
        (3, vec![0], vec![2, 1, 1]),
        (3, vec![0, 1], vec![1, 1, 1, 1]),
        (3, vec![0, 1], vec![2, 1, 1, 3]),
        (3, vec![0, 2], vec![1, 2, 3, 1]),
        (2, vec![0, 0], vec![1, 1, 1, 2]),
    ];
    let mut vertices = 0;
    for (n, coloring, ints) in cases {
        let xi = SlopeDatum::make_row(SlopeBase::from_ints(&ints)).unwrap();
        let tag = format!("n={n} p={coloring:?} base={ints:?}");
        let c = constants_from_slope(&xi, n).unwrap();
        let g = generate(&xi, n, &coloring, PSI_DEPTH, false).unwrap();
        vertices += g.vertices().len();
        let outcome = verify_psi_commutes(&xi, &c, &g).unwrap();
        if let slope_crystal::monomial::PsiOutcome::Counterexample(w) = outcome {
            return fail(format!("{tag}: {} at {} residue {:?}", w.check, w.vertex.to_json(), w.residue));
        }
        let root = psi(&xi, g.root()).unwrap();
        let wt = stats(&root, 0).wt;
        let lambda: Vec<i64> = g.root().color_type().iter().map(|&v| v as i64).collect();
        if wt != lambda {
            return fail(format!("{tag}: wt Ψ(∅) = {wt:?}, expected {lambda:?}"));
        }
        let closure = monomial_closure(&c, &root, PSI_DEPTH);
        if let slope_crystal::graph::IsoOutcome::Mismatch(w) = parallel_iso_check(&g, &closure) {
            return fail(format!("{tag}: monomial closure differs at [{}] {}", w.word_string(), w.reason));
        }
        for v in g.vertices() {
            if let Some((a, r)) = corner_order_violation(&xi, v) {
                return fail(format!("{tag}: corner order fails at {} for a={a} r={r}", v.to_json()));
            }
        }
    }
    pass(format!("{vertices} vertices over 9 integral data at depth {PSI_DEPTH}, closures isomorphic"))
}

fn random_monomial(rng: &mut StdRng, n: u32) -> Monomial {
    let count = rng.gen_range(0..12);
    let factors: Vec<(Residue, i64, i64)> = (0..count)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(-20..=20), rng.gen_range(-3..=3)))
        .collect();
    Monomial::from_factors(n, &factors)
}

fn random_constants(rng: &mut StdRng, n: u32) -> EdgeConstants {
    let k = rng.gen_range(1..=5);
    let c_plus: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=4)).collect();
    let c_minus = (0..n as usize).map(|t| k - c_plus[(t + n as usize - 1) % n as usize]).collect();
    EdgeConstants::new(n, c_plus, c_minus).unwrap()
}

fn criterion_operators() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let mut configs = 0;
    for n in [2u32, 3, 5] {
        let mut constants = vec![
            EdgeConstants::uniform(n, 1, 1).unwrap(),
            EdgeConstants::uniform(n, 1, 2).unwrap(),
            EdgeConstants::uniform(n, 3, 1).unwrap(),
        ];
        constants.extend((0..2).map(|_| random_constants(&mut rng, n)));
        for c in constants {
            configs += 1;
            for _ in 0..1000 {
                let m = random_monomial(&mut rng, n);
                for color in 0..n {
                    if f_direct(&c, &m, color) != f_bracket(&c, &m, color)
                        || e_direct(&c, &m, color) != e_bracket(&c, &m, color)
                    {
                        return fail(format!("n={n} K={} residue {color}: definitions disagree on {m}", c.k()));
                    }
                }
            }
        }
    }
    pass(format!("1000 random monomials on each of {configs} constant sets, n in {{2,3,5}}"))
}

fn criterion_height_counts(cfgs: &[Config], base: Outcome) -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let pools: Vec<Vec<ColoredMultiPartition>> =
        cfgs.iter().map(|c| multipartitions_up_to(c.n, &c.coloring, ENUM_DEPTH).unwrap()).collect();
    let mut boundary = 0;
    for sample in 0..500 {
        let ci = rng.gen_range(0..cfgs.len());
        let c = &cfgs[ci];
        let xi = &c.data[rng.gen_range(0..c.data.len())];
        let mp = &pools[ci][rng.gen_range(0..pools[ci].len())];
        let color = rng.gen_range(0..c.n);
        let above: Vec<LexScalar> = mp.cells().map(|b| xi.height(b)).filter(|h| *h > xi.max_xi()).collect();
        let h = if !above.is_empty() && rng.gen_bool(0.5) {
            boundary += 1;
            above[rng.gen_range(0..above.len())].clone()
        } else {
            &xi.max_xi() + &LexScalar::from_rational(rat(rng.gen_range(1..=40), rng.gen_range(1..=4)))
        };
        match height_count_identity(xi, mp, color, &h) {
            Ok(true) => {}
            Ok(false) => {
                return fail(format!("sample {sample}: identity fails for {} residue {color} H={h}", mp.to_json()))
            }
            Err(e) => return fail(format!("sample {sample}: {e}")),
        }
    }
    if !base.ok {
        return base;
    }
    pass(format!("500 samples ({boundary} at box heights); {}", base.detail))
}

fn criterion_anchored_values() -> Outcome {
    let lambda = Partition::new(vec![7, 6, 5, 5, 5, 3, 3, 1]).unwrap();
    let (arm, leg) = (lambda.arm(3, 2), lambda.leg(3, 2));
    if (arm, leg) != (3, 4) {
        return fail(format!("arm/leg of (3,2) = ({arm}, {leg}), expected (3, 4)"));
    }
    let mp = ColoredMultiPartition::from_parts(3, vec![0, 1, 1, 2], vec![vec![3, 2], vec![2, 1], vec![2, 2], vec![2]])
        .unwrap();
    if mp.content() != vec![5, 4, 5] {
        return fail(format!("content = {:?}, expected [5, 4, 5]", mp.content()));
    }
    pass("arm/leg (3, 4); content (5, 4, 5)")
}

fn criterion_inverse(cfgs: &[Config], graphs: &[Vec<CrystalGraph>]) -> Outcome {
    let mut vertices = 0;
    for (c, gs) in cfgs.iter().zip(graphs) {
        for (xi, g) in c.data.iter().zip(gs) {
            vertices += g.vertices().len();
            if let Some(f) = operator_consistency(xi, g).unwrap() {
                return fail(format!("{} {}: {} at {} {}", label(c), xi.to_json(), f.check, f.vertex.to_json(), f.detail));
            }
        }
    }
    pass(format!("{vertices} vertices at depth {ISO_DEPTH}"))
}

fn main() -> ExitCode {
    let cfgs = configs();
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut timed = |id, name, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = f();
        results.push((id, name, outcome, start.elapsed().as_secs_f64()));
    };

    let start = Instant::now();
    let (sets, tangent, gaps) = enumeration_checks(&cfgs);
    let enum_secs = start.elapsed().as_secs_f64();
    let graphs: Vec<Vec<CrystalGraph>> = cfgs
        .iter()
        .map(|c| c.data.iter().map(|xi| generate(xi, c.n, &c.coloring, ISO_DEPTH, false).unwrap()).collect())
        .collect();

    let mut sets = Some(sets);
    let mut tangent = Some(tangent);
    let mut gaps = Some(gaps);
    timed(1, "regularity equals generation", &mut || sets.take().unwrap());
    timed(2, "tangent oracle", &mut || tangent.take().unwrap());
    timed(3, "cross-realization isomorphism", &mut || criterion_iso(&cfgs, &graphs));
    timed(4, "monomial morphism", &mut criterion_psi);
    timed(5, "operator definitions agree", &mut criterion_operators);
    timed(6, "counting lemmas", &mut || criterion_height_counts(&cfgs, gaps.take().unwrap()));
    timed(7, "anchored values", &mut criterion_anchored_values);
    timed(8, "e/f inverse and bracket statistics", &mut || criterion_inverse(&cfgs, &graphs));

    println!("shared enumeration: {enum_secs:.1}s");
    let mut all_ok = true;
    for (id, name, outcome, secs) in &results {
        all_ok &= outcome.ok;
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id}: {name} ({secs:.1}s) - {}", outcome.detail);
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
