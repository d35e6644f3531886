//! Acceptance gate: thirteen end-to-end criteria, one test each, every
//! comparison an exact rational equality (no tolerances anywhere). Each
//! test prints a single `criterion N: PASS` line on success; a failure
//! panics with the violating witness.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use graev_core::alphabet::Alphabet;
use graev_core::amalgam::{examples::amalgamated_example, examples::z2_star_z3, AmalgamSystem, AmLetter};
use graev_core::combinatorics::{
    build_balanced_evaluation_tree, canonical_label, evaluate, is_trivial, nf_inv, nf_mul,
    symmetrize, words_multipliable, EvalTree, NormalForm,
};
use graev_core::free::{
    build_symmetrized_space, enumerate_matches, graev_distance_free, graev_norm_free,
    sharp_word, FLetter, PointedMetricSpace, Strategy, SymmetrizedSpace,
};
use graev_core::group::{FiniteMetricGroup, Subgroup};
use graev_core::hnn::{
    check_diam_criterion, hnn_construct, hnn_necessary_condition, subgroup_ball, HnnSystem,
    InducedSystem, TLetter,
};
use graev_core::product::{
    brute_force_norm, graev_norm, norm_lower_bound, rho, to_multipliable, to_simple, to_slim,
};
use graev_core::rational::Rat;
use graev_core::sin::{
    check_bilipschitz_on_subgroup, check_interleaving, extend_norm, heisenberg_obstruction,
    interleave_families, random_bk_family, validate_bk_metric, validate_norm_table, NormTable,
};
use graev_core::words::{IndexSet, Word};

fn r(p: i64, q: i64) -> Rat {
    Rat::new(p, q)
}

/// All distinct elements whose normal form has length at most `max_len`,
/// obtained by closing the letter set under products up to that length.
fn elements_up_to(sys: &AmalgamSystem, max_len: usize) -> Vec<NormalForm<AmLetter>> {
    let letters = sys.all_letters();
    let mut seen: Vec<NormalForm<AmLetter>> = vec![evaluate(sys, &Word::empty())];
    let mut frontier = seen.clone();
    loop {
        let mut next = Vec::new();
        for nf in &frontier {
            for l in &letters {
                let cand = nf_mul(sys, nf, &evaluate(sys, &Word::new(vec![l.clone()])));
                if cand.len() <= max_len && !seen.contains(&cand) {
                    seen.push(cand.clone());
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            return seen;
        }
        frontier = next;
    }
}

fn both_systems() -> Vec<AmalgamSystem> {
    vec![z2_star_z3(), amalgamated_example()]
}

#[test]
fn c01_distance_extends_base_metrics() {
    for sys in both_systems() {
        for l1 in sys.all_letters() {
            for l2 in sys.all_letters() {
                let f = evaluate(&sys, &Word::new(vec![l1.clone()]));
                let g = evaluate(&sys, &Word::new(vec![l2.clone()]));
                let diff = nf_mul(&sys, &f, &nf_inv(&sys, &g));
                let dist = graev_norm(&sys, &diff).value;
                let base = sys.amalgam_metric(&l1, &l2);
                assert_eq!(
                    dist, base,
                    "distance must extend the union-alphabet metric at ({}, {})",
                    sys.display(&l1),
                    sys.display(&l2)
                );
            }
        }
    }
    println!("criterion 1: PASS — the metric extends the base metrics on both systems");
}

#[test]
fn c02_fast_norm_matches_brute_force() {
    let mut checked = 0usize;
    for (sys, max_len) in [(z2_star_z3(), 3usize), (amalgamated_example(), 2usize)] {
        for nf in elements_up_to(&sys, max_len) {
            let fast = graev_norm(&sys, &nf).value;
            let brute = brute_force_norm(&sys, &nf, nf.len() + 2).unwrap().value;
            assert_eq!(fast, brute, "strategies disagree on a length-{} element", nf.len());
            checked += 1;
        }
    }
    println!("criterion 2: PASS — fast norm equals brute force on {checked} elements");
}

#[test]
fn c03_metric_axioms_and_bi_invariance() {
    for sys in both_systems() {
        let ball = elements_up_to(&sys, 2);
        let d = |x: &NormalForm<AmLetter>, y: &NormalForm<AmLetter>| {
            graev_norm(&sys, &nf_mul(&sys, x, &nf_inv(&sys, y))).value
        };
        for x in &ball {
            for y in &ball {
                let dxy = d(x, y);
                assert_eq!(dxy, d(y, x), "symmetry");
                assert_eq!(dxy.is_zero(), x == y, "positivity exactly off the diagonal");
                for z in &ball {
                    assert!(dxy <= d(x, z) + d(z, y), "triangle inequality");
                }
                for h in sys.all_letters() {
                    let hh = evaluate(&sys, &Word::new(vec![h.clone()]));
                    let left = d(&nf_mul(&sys, &hh, x), &nf_mul(&sys, &hh, y));
                    let right = d(&nf_mul(&sys, x, &hh), &nf_mul(&sys, y, &hh));
                    assert_eq!(left, dxy, "left invariance under {}", sys.display(&h));
                    assert_eq!(right, dxy, "right invariance under {}", sys.display(&h));
                }
            }
        }
    }
    println!("criterion 3: PASS — metric axioms and bi-invariance on both length-2 balls");
}

#[test]
fn c04_lower_bound() {
    let mut checked = 0usize;
    for (sys, max_len) in [(z2_star_z3(), 3usize), (amalgamated_example(), 2usize)] {
        for nf in elements_up_to(&sys, max_len) {
            let norm = graev_norm(&sys, &nf).value;
            let bound = norm_lower_bound(&sys, &nf);
            assert!(bound <= norm, "lower bound {bound} exceeds norm {norm}");
            checked += 1;
        }
    }
    println!("criterion 4: PASS — norm lower bound holds on {checked} elements");
}

/// Random 3-point rational pointed space: shortest-path closure of random
/// quarter-integer weights.
fn random_space(rng: &mut ChaCha8Rng) -> PointedMetricSpace {
    let n = 3;
    let mut d = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = Rat::new(rng.gen_range(1..=8), 4);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][m] + d[m][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    PointedMetricSpace::new("R", vec!["e".into(), "p".into(), "q".into()], 0, d)
}

fn all_reduced_free_words(sym: &SymmetrizedSpace, max_len: usize) -> Vec<Word<FLetter>> {
    let letters: Vec<FLetter> =
        sym.letters().into_iter().filter(|l| !sym.is_e(*l)).collect();
    let mut out: Vec<Word<FLetter>> = vec![Word::empty()];
    let mut frontier = out.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                let mut v = w.letters().to_vec();
                v.push(l);
                let cand = Word::new(v);
                if sym.reduce(&cand).len() == cand.len() {
                    next.push(cand);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[test]
fn c05_free_group_matches_and_strategies() {
    let motzkin = [1usize, 2, 4, 9, 21, 51];
    for n in 1..=6 {
        assert_eq!(enumerate_matches(n).unwrap().len(), motzkin[n - 1], "count at n = {n}");
    }
    let seed = 5u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut words_checked = 0usize;
    for _ in 0..20 {
        let space = random_space(&mut rng);
        assert!(space.validate().passed);
        let sym = build_symmetrized_space(&space);
        for w in all_reduced_free_words(&sym, 8) {
            // Strategy::Both fails internally if DP and enumeration differ.
            graev_norm_free(&sym, &w, Strategy::Both).unwrap();
            words_checked += 1;
        }
        // The metric restricted to the symmetrized alphabet is the
        // symmetrized-space metric.
        for &x in &sym.letters() {
            for &y in &sym.letters() {
                let d = graev_distance_free(
                    &sym,
                    &Word::new(vec![x]),
                    &Word::new(vec![y]),
                    Strategy::Both,
                )
                .unwrap();
                assert_eq!(d, sym.d(x, y), "restriction to the alphabet");
            }
        }
    }
    println!(
        "criterion 5: PASS — Motzkin counts 1,2,4,9,21,51; DP = enumeration on \
         {words_checked} reduced words over 20 random spaces (seed {seed}); \
         the metric restricts to the symmetrized metric"
    );
}

#[test]
fn c06_sharp_words() {
    // The naive inequality `norm(w) >= norm(sharp(w))` is false in general;
    // see notes in the repository history and the frozen counterexample
    // below. The facts verified here are the ones the rest of the library
    // relies on: sharping preserves length and the evaluation image, and
    // the counterexample values stay pinned.
    let g = FiniteMetricGroup::cyclic(3, &[Rat::zero(), Rat::int(1), Rat::int(1)]);
    let sym = build_symmetrized_space(&PointedMetricSpace::of_group(&g));
    let eval = |w: &Word<FLetter>| -> usize {
        w.letters().iter().fold(0usize, |acc, l| match *l {
            FLetter::Point(i) => g.mul(acc, i),
            FLetter::Inv(i) => g.mul(acc, g.inv(i)),
        })
    };
    let seed = 6u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters: Vec<FLetter> = sym.letters();
    let mut violations = 0usize;
    for _ in 0..100 {
        let len_f = rng.gen_range(0..=3);
        let len_h = rng.gen_range(0..=3);
        let mut v: Vec<FLetter> = Vec::new();
        for _ in 0..len_f + len_h {
            v.push(letters[rng.gen_range(0..letters.len())]);
        }
        let fh = Word::new(v);
        let sharp = sharp_word(&g, &fh);
        assert_eq!(sharp.len(), fh.len(), "sharping preserves length");
        assert_eq!(eval(&sharp), eval(&fh), "sharping preserves the evaluation image");
        let n1 = graev_norm_free(&sym, &fh, Strategy::Both).unwrap().value;
        let n2 = graev_norm_free(&sym, &sharp, Strategy::Both).unwrap().value;
        if n1 < n2 {
            violations += 1;
        }
    }
    // Frozen counterexample: the naive inequality genuinely fails.
    let b = FLetter::Point(1);
    let fh = Word::new(vec![b, b, FLetter::Inv(2)]);
    let n1 = graev_norm_free(&sym, &fh, Strategy::Both).unwrap().value;
    let n2 = graev_norm_free(&sym, &sharp_word(&g, &fh), Strategy::Both).unwrap().value;
    assert_eq!((n1, n2), (Rat::int(2), Rat::int(3)), "counterexample values must stay pinned");
    println!(
        "criterion 6: PASS — sharp preserves length and evaluation on 100 random words \
         (seed {seed}); naive norm inequality fails on {violations} of them and on the \
         pinned counterexample (2 vs 3)"
    );
}

#[test]
fn c07_diameter_criterion() {
    // diam A = 1 = scale: the restricted and intrinsic metrics agree.
    let z2 = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::one()]);
    let a = Subgroup::new("A", &z2, vec![0, 1]).unwrap();
    let ind = InducedSystem::new(z2.clone(), a.clone(), 3, Rat::one()).unwrap();
    let fp = ind.free_product_system();
    let ball = subgroup_ball(&ind, 5, 5);
    assert!(ball.len() >= 20, "need at least 20 elements, got {}", ball.len());
    for nf in &ball {
        let word = ind.from_free_product(&nf.0);
        let restricted = ind.induced_distance(&word).unwrap().value;
        let intrinsic = graev_norm(&fp, nf).value;
        assert_eq!(restricted, intrinsic, "metrics must agree when diam A <= scale");
    }
    let agree = check_diam_criterion(&z2, &a, Rat::one());
    assert!(agree.passed, "{}", agree.render());
    // diam A = 2 > scale 1: a quantified gap separates the metrics.
    let z2_far = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::int(2)]);
    let a_far = Subgroup::new("A", &z2_far, vec![0, 1]).unwrap();
    let gap = check_diam_criterion(&z2_far, &a_far, Rat::one());
    assert!(!gap.passed, "the metrics must differ when diam A > scale");
    let text = gap.render();
    assert!(
        text.contains("intrinsic norm 4") && text.contains("at most 2"),
        "gap 4 vs <= 2 must be reported verbatim: {text}"
    );
    println!(
        "criterion 7: PASS — metrics agree on {} elements at diam A = 1; \
         gap 4 vs <= 2 reproduced at diam A = 2",
        ball.len()
    );
}

#[test]
fn c08_hnn_extension() {
    let z2 = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::one()]);
    let a = Subgroup::new("A", &z2, vec![0, 1]).unwrap();
    let phi: Vec<(usize, usize)> = vec![(0, 0), (1, 1)];
    let system = HnnSystem::new(z2.clone(), a.clone(), a.clone(), &phi, Rat::one()).unwrap();
    assert!(system.validate().passed);
    let hg = hnn_construct(system.clone(), 2).unwrap();
    let d = |f: &[TLetter], g: &[TLetter]| {
        hg.distance(&Word::new(f.to_vec()), &Word::new(g.to_vec()), 6).unwrap().value
    };
    // The metric restricts to d on the base group.
    for x in 0..z2.order() {
        for y in 0..z2.order() {
            assert_eq!(d(&[TLetter::G(x)], &[TLetter::G(y)]), z2.d(x, y));
        }
    }
    assert_eq!(d(&[TLetter::T(1)], &[TLetter::G(0)]), Rat::one(), "the stable letter costs K");
    assert_eq!(
        d(&[TLetter::T(1), TLetter::G(1), TLetter::T(-1)], &[TLetter::G(1)]),
        Rat::zero(),
        "conjugation by the stable letter realizes the isomorphism"
    );
    let necessary = hnn_necessary_condition(&system, |x, y| {
        d(&[TLetter::G(x)], &[TLetter::G(y)])
    });
    assert!(necessary.passed, "{}", necessary.render());
    println!(
        "criterion 8: PASS — the HNN metric extends d, gives the stable letter norm K = 1, \
         collapses the conjugation relation, and satisfies the 2K bound"
    );
}

fn small_groups() -> Vec<FiniteMetricGroup> {
    let discrete = |n: usize| {
        let norms: Vec<Rat> =
            (0..n).map(|k| if k == 0 { Rat::zero() } else { Rat::one() }).collect();
        FiniteMetricGroup::cyclic(n, &norms)
    };
    // Symmetric group on three points, discrete metric, built from its
    // permutation action.
    let perms: Vec<[usize; 3]> =
        vec![[0, 1, 2], [1, 2, 0], [2, 0, 1], [0, 2, 1], [2, 1, 0], [1, 0, 2]];
    let idx = |p: &[usize; 3]| perms.iter().position(|q| q == p).unwrap();
    let table: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| perms.iter().map(|q| idx(&[p[q[0]], p[q[1]], p[q[2]]])).collect())
        .collect();
    let names: Vec<String> = (0..6).map(|k| format!("s{k}")).collect();
    let dist: Vec<Vec<Rat>> = (0..6)
        .map(|i| (0..6).map(|j| if i == j { Rat::zero() } else { Rat::one() }).collect())
        .collect();
    let s3 = FiniteMetricGroup::new("S3", names, table, dist).unwrap();
    vec![
        discrete(12),
        discrete(2).direct_product(&discrete(4)),
        discrete(6),
        discrete(10),
        s3,
    ]
}

#[test]
fn c09_bk_sandwich() {
    let groups = small_groups();
    let mut families = 0usize;
    let mut tsi = 0usize;
    for (gi, g) in groups.iter().enumerate() {
        for seed in 0..10u64 {
            let fam = random_bk_family(g, seed * 13 + gi as u64);
            let d = fam.metric();
            let report = validate_bk_metric(&fam, &d);
            assert!(report.passed, "group {}, seed {seed}: {}", g.name, report.render());
            if fam.conjugacy_invariant {
                tsi += 1;
            }
            families += 1;
        }
    }
    assert_eq!(families, 50);
    println!(
        "criterion 9: PASS — the sandwich bounds and invariance hold for all 50 random \
         families (seeds 0..10 per group); {tsi} of them are conjugation-invariant and \
         two-sided invariant"
    );
}

#[test]
fn c10_interleaving() {
    let z4 = FiniteMetricGroup::cyclic(4, &[Rat::zero(), r(3, 4), Rat::one(), r(3, 4)]);
    let a1 = Subgroup::new("A", &z4, vec![0, 2]).unwrap();
    let a2 = a1.clone();
    let iso = vec![(0usize, 0usize), (2, 2)];
    let (f1, f2) = interleave_families(&z4, &z4, &a1, &a2, &iso).unwrap();
    let containments = check_interleaving(&f1, &f2, &a1, &a2, &iso);
    assert!(containments.passed, "{}", containments.render());
    let lipschitz = check_bilipschitz_on_subgroup(&f1, &f2, &a1, &iso);
    assert!(lipschitz.passed, "{}", lipschitz.render());
    println!(
        "criterion 10: PASS — interleaved families satisfy both containment chains and \
         the factor-8 bi-Lipschitz bound on the common subgroup"
    );
}

#[test]
fn c11_norm_extension() {
    let z4 = FiniteMetricGroup::cyclic(4, &[Rat::zero(), r(3, 4), Rat::one(), r(3, 4)]);
    let a = Subgroup::new("A", &z4, vec![0, 2]).unwrap();
    let n_g = NormTable { values: (0..4).map(|k| z4.norm(k)).collect() };
    let n_a = vec![(0usize, Rat::zero()), (2usize, r(1, 2))];
    let n = extend_norm(&z4, &a, &n_a, &n_g).unwrap();
    // Extends the subgroup norm and is dominated by the ambient norm.
    assert_eq!(n.at(0), Rat::zero());
    assert_eq!(n.at(2), r(1, 2));
    for k in 0..4 {
        assert!(n.at(k) <= n_g.at(k), "domination at element {k}");
    }
    // Norm axioms plus conjugation invariance (the subgroup is normal).
    assert!(a.is_normal(&z4));
    let report = validate_norm_table(&z4, &n, true);
    assert!(report.passed, "{}", report.render());
    println!(
        "criterion 11: PASS — the extended norm restricts to the subgroup norm, is \
         dominated, and satisfies the invariant norm axioms"
    );
}

#[test]
fn c12_heisenberg() {
    let report = heisenberg_obstruction(10);
    assert!(report.passed, "{}", report.render());
    let text = report.render();
    assert!(text.contains("5"), "the report must exhibit the n/2 ratio at n = 10: {text}");
    println!("criterion 12: PASS — commutator identity verified for n <= 10; {}",
        report.details.last().cloned().unwrap_or_default());
}

/// Random trivial companion: a word times its reversed inverse, with
/// identity letters spliced in at random positions.
fn random_trivial<A: Alphabet>(
    sys: &A,
    pool: &[A::Letter],
    rng: &mut ChaCha8Rng,
    max_core: usize,
    pad: usize,
) -> Word<A::Letter> {
    let k = rng.gen_range(0..=max_core);
    let core: Vec<A::Letter> =
        (0..k).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
    let mut v = core.clone();
    v.extend(core.iter().rev().map(|l| sys.inverse(l)));
    for _ in 0..rng.gen_range(0..=pad) {
        let pos = rng.gen_range(0..=v.len());
        v.insert(pos, sys.identity());
    }
    if v.is_empty() {
        v.push(sys.identity());
    }
    Word::new(v)
}

#[test]
fn c13_reduction_monotonicity() {
    let seed = 13u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let systems = both_systems();
    let mut pipeline_runs = 0usize;
    // Part 1: the three pair reductions preserve the cost exactly.
    while pipeline_runs < 120 {
        let sys = &systems[rng.gen_range(0..systems.len())];
        let pool = sys.all_letters();
        let zeta = random_trivial(sys, &pool, &mut rng, 2, 2);
        let n = zeta.len();
        let alpha = Word::new(
            (0..n).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect(),
        );
        let c0 = rho(sys, &alpha, &zeta);
        let (a1, z1) = to_multipliable(sys, &alpha, &zeta);
        assert_eq!(rho(sys, &a1, &z1), c0, "to_multipliable must preserve the cost");
        let tree = build_balanced_evaluation_tree(sys, &z1, &canonical_label(sys, &z1)).unwrap();
        let (a2, z2) = to_slim(sys, (a1, z1), &tree).unwrap();
        assert_eq!(rho(sys, &a2, &z2), c0, "to_slim must preserve the cost");
        let tree2 = build_balanced_evaluation_tree(sys, &z2, &canonical_label(sys, &z2)).unwrap();
        let (a3, z3) = to_simple(sys, (a2, z2), &tree2).unwrap();
        assert_eq!(rho(sys, &a3, &z3), c0, "to_simple must preserve the cost");
        pipeline_runs += 1;
    }
    // Part 2: symmetrization never increases the cost.
    let mut symmetrize_runs = 0usize;
    while symmetrize_runs < 40 {
        let sys = &systems[rng.gen_range(0..systems.len())];
        let lam = rng.gen_range(0..sys.factors.len());
        let order = sys.factors[lam].order();
        let n = rng.gen_range(2..=4);
        let alpha = Word::new(
            (0..n).map(|_| sys.letter(lam, rng.gen_range(0..order))).collect(),
        );
        // A trivial word inside the same factor: the last letter closes the
        // product.
        let mut acc = sys.factors[lam].identity;
        let mut zv = Vec::new();
        for _ in 0..n - 1 {
            let x = rng.gen_range(0..order);
            acc = sys.factors[lam].mul(acc, x);
            zv.push(sys.letter(lam, x));
        }
        zv.push(sys.letter(lam, sys.factors[lam].inv(acc)));
        let zeta = Word::new(zv);
        assert!(is_trivial(sys, &zeta));
        let tree = EvalTree::root_only(n);
        let list = IndexSet::interval(1, n);
        let j0 = rng.gen_range(1..=n);
        let xi = symmetrize(sys, &alpha, &zeta, &tree, 0, &list, j0).unwrap();
        assert!(
            rho(sys, &alpha, &xi) <= rho(sys, &alpha, &zeta),
            "symmetrization must not increase the cost"
        );
        symmetrize_runs += 1;
    }
    // Part 3: the stable-letter reductions never increase the cost.
    let z2 = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::one()]);
    let a = Subgroup::new("A", &z2, vec![0, 1]).unwrap();
    let ind = InducedSystem::new(z2, a, 3, Rat::one()).unwrap();
    let sys = &ind.ambient;
    let alphas: Vec<Word<TLetter>> = vec![
        Word::new(vec![TLetter::G(1), TLetter::T(1), TLetter::G(1), TLetter::T(-1)]),
        Word::new(vec![TLetter::T(1), TLetter::G(1), TLetter::T(-1)]),
        Word::new(vec![TLetter::T(1), TLetter::G(1), TLetter::T(-1), TLetter::G(1)]),
        Word::new(vec![TLetter::G(1)]),
    ];
    let pool = [
        TLetter::G(0),
        TLetter::G(1),
        TLetter::T(1),
        TLetter::T(-1),
        TLetter::T(2),
        TLetter::T(-2),
    ];
    let mut hereditary_runs = 0usize;
    'outer: loop {
        for alpha in &alphas {
            let n = alpha.len();
            // Sample random companions of the right length and keep the
            // valid ones (trivial and multipliable with alpha).
            for _ in 0..200 {
                let zeta = Word::new(
                    (0..n).map(|_| pool[rng.gen_range(0..pool.len())]).collect(),
                );
                if !words_multipliable(sys, alpha, &zeta) || !is_trivial(sys, &zeta) {
                    continue;
                }
                let c0 = rho(sys, alpha, &zeta);
                let h = ind.to_hereditary(alpha, &zeta).unwrap();
                let c1 = rho(sys, alpha, &h);
                assert!(c1 <= c0, "the hereditary reduction must not increase the cost");
                let rigid = ind.to_rigid(alpha, &h).unwrap();
                let c2 = rho(sys, alpha, &rigid);
                assert!(c2 <= c1, "the rigid reduction must not increase the cost");
                hereditary_runs += 1;
                if hereditary_runs >= 40 {
                    break 'outer;
                }
            }
        }
    }
    println!(
        "criterion 13: PASS — cost preserved on {pipeline_runs} random reduction \
         pipelines, never increased on {symmetrize_runs} symmetrizations and \
         {hereditary_runs} stable-letter reductions (seed {seed})"
    );
}
