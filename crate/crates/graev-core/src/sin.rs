//! Toolkit for two-sided invariant metrics on SIN groups, specialized to
//! finite models: Birkhoff–Kakutani metrization from nested neighborhood
//! families, the interleaving construction producing bi-Lipschitz equivalent
//! metrics on a common subgroup, norm extension from a subgroup, the
//! discrete-Heisenberg obstruction to unconditional extension, and the
//! induced-conjugation classifier for rational circle rotations.
//!
//! A topological group is SIN (Small Invariant Neighborhoods) when every
//! identity neighborhood contains a conjugation-invariant one; finite groups
//! trivially qualify, which makes every construction here exactly
//! computable. The classical families are infinite and descend to `{e}` in
//! the limit; the finite adaptation requires a terminal `{e}` member and
//! extends the family constantly beyond it, so `η(g, g) = 0` by convention
//! and both displayed inequalities of the metrization survive verbatim.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::group::{CheckReport, FiniteMetricGroup, GroupError, Subgroup};
use crate::rational::Rat;

/// A finite Birkhoff–Kakutani family: a descending chain
/// `U₀ ⊇ U₁ ⊇ … ⊇ U_m` of symmetric identity-containing subsets with
/// `U₀ = G`, `U_m = {e}`, and `U_{i+1}³ ⊆ U_i`.
#[derive(Clone, Debug)]
pub struct BKFamily {
    pub group: FiniteMetricGroup,
    pub levels: Vec<BTreeSet<usize>>,
    /// `gU_ig⁻¹ = U_i` for every level — the condition making the derived
    /// metric two-sided invariant.
    pub conjugacy_invariant: bool,
}

impl BKFamily {
    pub fn new(group: FiniteMetricGroup, levels: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let sets: Vec<BTreeSet<usize>> =
            levels.into_iter().map(|l| l.into_iter().collect()).collect();
        if sets.len() < 2 {
            return Err(GroupError::Invalid("a family needs at least two levels".into()));
        }
        let full: BTreeSet<usize> = (0..group.order()).collect();
        if sets[0] != full {
            return Err(GroupError::Invalid("the first level must be the whole group".into()));
        }
        if *sets.last().unwrap() != BTreeSet::from([group.identity]) {
            return Err(GroupError::Invalid("the terminal level must be {e}".into()));
        }
        for (i, u) in sets.iter().enumerate() {
            if !u.contains(&group.identity) {
                return Err(GroupError::Invalid(format!("level {i} misses the identity")));
            }
            if u.iter().any(|&x| !u.contains(&group.inv(x))) {
                return Err(GroupError::Invalid(format!("level {i} is not symmetric")));
            }
            if i + 1 < sets.len() {
                let next = &sets[i + 1];
                for &x in next {
                    for &y in next {
                        for &z in next {
                            if !u.contains(&group.mul(group.mul(x, y), z)) {
                                return Err(GroupError::Invalid(format!(
                                    "cube of level {} escapes level {i}",
                                    i + 1
                                )));
                            }
                        }
                    }
                }
            }
        }
        let conjugacy_invariant = sets.iter().all(|u| {
            (0..group.order()).all(|g| {
                u.iter().all(|&x| u.contains(&group.mul(group.mul(g, x), group.inv(g))))
            })
        });
        Ok(BKFamily { group, levels: sets, conjugacy_invariant })
    }

    /// `η(g₁, g₂) = inf { 2⁻ⁿ : g₂⁻¹g₁ ∈ U_n }`; with the constant extension
    /// beyond the terminal `{e}` level this is `0` on the diagonal and
    /// `2⁻ⁿ*` for the deepest containing level `n*` otherwise.
    pub fn eta(&self, g1: usize, g2: usize) -> Rat {
        let x = self.group.mul(self.group.inv(g2), g1);
        if x == self.group.identity {
            return Rat::zero();
        }
        let deepest =
            (0..self.levels.len()).rev().find(|&n| self.levels[n].contains(&x)).expect("U₀ = G");
        Rat::new(1, 1i64 << deepest)
    }

    /// The Birkhoff–Kakutani metric: the chain infimum
    /// `d(g₁, g₂) = inf Σ η(f_i, f_{i+1})` over finite chains from `g₁` to
    /// `g₂`, computed exactly by all-pairs shortest paths over `η`.
    pub fn metric(&self) -> Vec<Vec<Rat>> {
        let n = self.group.order();
        let mut d: Vec<Vec<Rat>> =
            (0..n).map(|i| (0..n).map(|j| self.eta(i, j)).collect()).collect();
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        d
    }
}

/// Validate the output of [`BKFamily::metric`]: metric axioms, the sandwich
/// `½η ≤ d ≤ η`, left invariance, and two-sided invariance whenever the
/// family is conjugacy-invariant.
pub fn validate_bk_metric(family: &BKFamily, d: &[Vec<Rat>]) -> CheckReport {
    let g = &family.group;
    let n = g.order();
    for i in 0..n {
        if d[i][i] != Rat::zero() {
            return CheckReport::fail(format!("d({i},{i}) ≠ 0"));
        }
        for j in 0..n {
            if i != j && d[i][j] <= Rat::zero() {
                return CheckReport::fail(format!("d({i},{j}) not positive"));
            }
            if d[i][j] != d[j][i] {
                return CheckReport::fail(format!("d not symmetric at ({i},{j})"));
            }
            let eta = family.eta(i, j);
            if Rat::new(1, 2) * eta > d[i][j] || d[i][j] > eta {
                return CheckReport::fail(format!("sandwich ½η ≤ d ≤ η broken at ({i},{j})"));
            }
            for k in 0..n {
                if d[i][j] > d[i][k] + d[k][j] {
                    return CheckReport::fail(format!("triangle broken at ({i},{k},{j})"));
                }
            }
            for h in 0..n {
                if d[g.mul(h, i)][g.mul(h, j)] != d[i][j] {
                    return CheckReport::fail(format!("left invariance broken at h={h}"));
                }
                if family.conjugacy_invariant && d[g.mul(i, h)][g.mul(j, h)] != d[i][j] {
                    return CheckReport::fail(format!("right invariance broken at h={h}"));
                }
            }
        }
    }
    CheckReport::pass().note(if family.conjugacy_invariant {
        "metric is two-sided invariant".into()
    } else {
        "metric is left invariant".into()
    })
}

/// Union of the conjugacy class of `x`, closed under inverses.
fn symmetric_class(group: &FiniteMetricGroup, x: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for g in 0..group.order() {
        let c = group.mul(group.mul(g, x), group.inv(g));
        out.insert(c);
        out.insert(group.inv(c));
    }
    out
}

/// The largest (greedy) conjugation-invariant symmetric `W ⊆ S` with
/// `e ∈ W` and `W³ ⊆ S`: start from all symmetric conjugacy classes inside
/// `S` and drop the largest-index class until the cube condition holds.
fn invariant_core(group: &FiniteMetricGroup, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut w: BTreeSet<usize> = BTreeSet::from([group.identity]);
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..group.order() {
        if x != group.identity && s.is_superset(&symmetric_class(group, x)) {
            reps.push(x);
        }
    }
    for &r in &reps {
        w.extend(symmetric_class(group, r));
    }
    let cube_ok = |w: &BTreeSet<usize>| {
        w.iter().all(|&x| {
            w.iter()
                .all(|&y| w.iter().all(|&z| s.contains(&group.mul(group.mul(x, y), z))))
        })
    };
    while !cube_ok(&w) {
        let &worst = w.iter().max().expect("identity remains");
        for c in symmetric_class(group, worst) {
            w.remove(&c);
        }
        w.insert(group.identity);
    }
    w
}

/// Strictly shrink within `prev`: the invariant core of `s ∩ prev`, forced
/// to lose at least one class relative to `prev` so the chain reaches `{e}`.
fn shrink_step(
    group: &FiniteMetricGroup,
    s: &BTreeSet<usize>,
    prev: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    let bound: BTreeSet<usize> = s.intersection(prev).copied().collect();
    let mut w = invariant_core(group, &bound);
    while w == *prev && w.len() > 1 {
        let &worst = w.iter().max().unwrap();
        let mut smaller = bound.clone();
        for c in symmetric_class(group, worst) {
            smaller.remove(&c);
        }
        smaller.insert(group.identity);
        w = invariant_core(group, &smaller);
    }
    w
}

/// Interleaved conjugacy-invariant families on two groups sharing a
/// subgroup: the odd levels of the first family restrict on `A` inside the
/// preceding even levels of the second and vice versa, which pins the two
/// derived metrics within a factor `4` on `η` and hence `8` on `d`.
///
/// `iso` pairs the members of `a1 ≤ g1` with the members of `a2 ≤ g2` and
/// must be a group isomorphism.
pub fn interleave_families(
    g1: &FiniteMetricGroup,
    g2: &FiniteMetricGroup,
    a1: &Subgroup,
    a2: &Subgroup,
    iso: &[(usize, usize)],
) -> Result<(BKFamily, BKFamily), GroupError> {
    let fwd: std::collections::BTreeMap<usize, usize> = iso.iter().copied().collect();
    if fwd.len() != a1.members.len()
        || a1.members.iter().any(|m| !fwd.contains_key(m))
        || iso.iter().any(|&(_, y)| !a2.contains(y))
        || iso.iter().map(|&(_, y)| y).collect::<BTreeSet<_>>().len() != a2.members.len()
    {
        return Err(GroupError::Invalid("the subgroup pairing is not a bijection".into()));
    }
    for &x in &a1.members {
        for &y in &a1.members {
            if fwd[&g1.mul(x, y)] != g2.mul(fwd[&x], fwd[&y]) {
                return Err(GroupError::Invalid("the subgroup pairing is not a homomorphism".into()));
            }
        }
    }
    let full = |g: &FiniteMetricGroup| (0..g.order()).collect::<BTreeSet<usize>>();
    let mut u1: Vec<BTreeSet<usize>> = vec![full(g1)];
    let mut u2: Vec<BTreeSet<usize>> = vec![full(g2)];
    let lift1 = |v: &BTreeSet<usize>| -> BTreeSet<usize> {
        // Smallest subset of G₁ meeting A₁ exactly in the image of v.
        v.iter().filter_map(|x2| iso.iter().find(|&&(_, y)| y == *x2).map(|&(x1, _)| x1)).collect()
    };
    let lift2 = |v: &BTreeSet<usize>| -> BTreeSet<usize> { v.iter().map(|x1| fwd[x1]).collect() };
    let trivial1 = BTreeSet::from([g1.identity]);
    let trivial2 = BTreeSet::from([g2.identity]);
    let mut n = 0usize;
    while (*u1.last().unwrap() != trivial1 || *u2.last().unwrap() != trivial2) && n < 64 {
        if n % 2 == 0 {
            let v: BTreeSet<usize> =
                u2[n].iter().copied().filter(|x| a2.contains(*x)).collect();
            let mut lifted = lift1(&v);
            lifted.insert(g1.identity);
            u1.push(shrink_step(g1, &lifted, &u1[n]));
            u2.push(shrink_step(g2, &u2[n].clone(), &u2[n]));
        } else {
            let v: BTreeSet<usize> =
                u1[n].iter().copied().filter(|x| a1.contains(*x)).collect();
            let mut lifted = lift2(&v);
            lifted.insert(g2.identity);
            u2.push(shrink_step(g2, &lifted, &u2[n]));
            u1.push(shrink_step(g1, &u1[n].clone(), &u1[n]));
        }
        n += 1;
    }
    // Pad with terminal {e} levels so both chains end trivially.
    u1.push(trivial1.clone());
    u2.push(trivial2.clone());
    let f1 = BKFamily::new(g1.clone(), u1.into_iter().map(|s| s.into_iter().collect()).collect())?;
    let f2 = BKFamily::new(g2.clone(), u2.into_iter().map(|s| s.into_iter().collect()).collect())?;
    Ok((f1, f2))
}

/// Verify the alternating containments on the common subgroup:
/// `U^{(1)}_{2i+1} ∩ A ⊆ U^{(2)}_{2i} ∩ A` and
/// `U^{(2)}_{2i+2} ∩ A ⊆ U^{(1)}_{2i+1} ∩ A`, through the member pairing.
pub fn check_interleaving(
    f1: &BKFamily,
    f2: &BKFamily,
    a1: &Subgroup,
    _a2: &Subgroup,
    iso: &[(usize, usize)],
) -> CheckReport {
    let fwd: std::collections::BTreeMap<usize, usize> = iso.iter().copied().collect();
    let on_a1 = |f: &BKFamily, i: usize| -> BTreeSet<usize> {
        if i >= f.levels.len() {
            return BTreeSet::from([f.group.identity]);
        }
        f.levels[i].iter().copied().filter(|x| a1.contains(*x)).collect()
    };
    let on_a2_as_a1 = |f: &BKFamily, i: usize| -> BTreeSet<usize> {
        let level = if i >= f.levels.len() {
            BTreeSet::from([f.group.identity])
        } else {
            f.levels[i].clone()
        };
        a1.members.iter().copied().filter(|m| level.contains(&fwd[m])).collect()
    };
    let depth = f1.levels.len().max(f2.levels.len());
    for i in 0..depth / 2 {
        let lhs = on_a1(f1, 2 * i + 1);
        let rhs = on_a2_as_a1(f2, 2 * i);
        if !lhs.is_subset(&rhs) {
            return CheckReport::fail(format!("containment (i) fails at i = {i}"));
        }
        let lhs = on_a2_as_a1(f2, 2 * i + 2);
        let rhs = on_a1(f1, 2 * i + 1);
        if !lhs.is_subset(&rhs) {
            return CheckReport::fail(format!("containment (ii) fails at i = {i}"));
        }
    }
    CheckReport::pass()
}

/// The bi-Lipschitz comparison of the two derived metrics on the common
/// subgroup: `⅛ d₁ ≤ d₂ ≤ 8 d₁` pairwise, reporting the worst observed
/// ratio.
pub fn check_bilipschitz_on_subgroup(
    f1: &BKFamily,
    f2: &BKFamily,
    a1: &Subgroup,
    iso: &[(usize, usize)],
) -> CheckReport {
    let fwd: std::collections::BTreeMap<usize, usize> = iso.iter().copied().collect();
    let (d1, d2) = (f1.metric(), f2.metric());
    let bound = Rat::int(8);
    let mut worst = Rat::one();
    for &x in &a1.members {
        for &y in &a1.members {
            if x == y {
                continue;
            }
            let (v1, v2) = (d1[x][y], d2[fwd[&x]][fwd[&y]]);
            if v2 > bound * v1 || v1 > bound * v2 {
                return CheckReport::fail(format!(
                    "bi-Lipschitz bound 8 broken: d₁ = {v1}, d₂ = {v2}"
                ));
            }
            let ratio = if v2 > v1 { v2 / v1 } else { v1 / v2 };
            worst = worst.max(ratio);
        }
    }
    CheckReport::pass().note(format!("worst d₂/d₁ ratio on A: {worst} ≤ 8"))
}

/// A deterministic pseudo-random conjugacy-invariant family on a finite
/// group, used by the randomized validation suites.
pub fn random_bk_family(group: &FiniteMetricGroup, seed: u64) -> BKFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let full: BTreeSet<usize> = (0..group.order()).collect();
    let mut levels: Vec<BTreeSet<usize>> = vec![full];
    let trivial = BTreeSet::from([group.identity]);
    while *levels.last().unwrap() != trivial {
        let prev = levels.last().unwrap().clone();
        // Random target: drop a random nonempty batch of classes, then take
        // the invariant core to restore the cube condition.
        let mut target = prev.clone();
        let mut classes: Vec<usize> =
            prev.iter().copied().filter(|&x| x != group.identity).collect();
        classes.shuffle(&mut rng);
        let drop = 1 + classes.len() / 3;
        for &x in classes.iter().take(drop) {
            for c in symmetric_class(group, x) {
                target.remove(&c);
            }
        }
        target.insert(group.identity);
        let mut next = invariant_core(group, &target);
        if next == prev {
            next = shrink_step(group, &prev, &prev);
        }
        levels.push(next);
    }
    BKFamily::new(group.clone(), levels.into_iter().map(|s| s.into_iter().collect()).collect())
        .expect("construction yields a valid family")
}

/// A norm table `g ↦ N(g)` over the elements of a finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormTable {
    pub values: Vec<Rat>,
}

impl NormTable {
    pub fn at(&self, g: usize) -> Rat {
        self.values[g]
    }
}

/// Check the norm axioms: `N(e) = 0`, positivity, symmetry under inverse,
/// subadditivity, and (for the tsi variant) conjugation invariance.
pub fn validate_norm_table(group: &FiniteMetricGroup, n: &NormTable, tsi: bool) -> CheckReport {
    if n.values.len() != group.order() {
        return CheckReport::fail("table size mismatch".into());
    }
    if n.at(group.identity) != Rat::zero() {
        return CheckReport::fail("N(e) ≠ 0".into());
    }
    for g in 0..group.order() {
        if g != group.identity && n.at(g) <= Rat::zero() {
            return CheckReport::fail(format!("N({g}) not positive"));
        }
        if n.at(g) != n.at(group.inv(g)) {
            return CheckReport::fail(format!("N({g}) ≠ N(g⁻¹)"));
        }
        for h in 0..group.order() {
            if n.at(group.mul(g, h)) > n.at(g) + n.at(h) {
                return CheckReport::fail(format!("subadditivity broken at ({g},{h})"));
            }
            if tsi && n.at(group.mul(group.mul(h, g), group.inv(h))) != n.at(g) {
                return CheckReport::fail(format!("conjugation invariance broken at ({g},{h})"));
            }
        }
    }
    CheckReport::pass()
}

/// Extend a norm from a subgroup: `N(g) = min_{a ∈ A} N_A(a) + N_G(a⁻¹g)`.
/// Requires `N_A ≤ N_G` on `A`; then `N` extends `N_A`, is dominated by
/// `N_G`, and is conjugation-invariant whenever `A` is normal and both
/// inputs are.
///
/// `n_a` maps subgroup members (indices in the ambient group) to their
/// subgroup norms.
pub fn extend_norm(
    group: &FiniteMetricGroup,
    a: &Subgroup,
    n_a: &[(usize, Rat)],
    n_g: &NormTable,
) -> Result<NormTable, GroupError> {
    let na: std::collections::BTreeMap<usize, Rat> = n_a.iter().copied().collect();
    if na.len() != a.members.len() || a.members.iter().any(|m| !na.contains_key(m)) {
        return Err(GroupError::Invalid("subgroup norm must cover exactly A".into()));
    }
    for &m in &a.members {
        if na[&m] > n_g.at(m) {
            return Err(GroupError::Invalid(format!(
                "domination fails: N_A({}) = {} > N_G = {}",
                group.elements[m], na[&m], n_g.at(m)
            )));
        }
    }
    let values = (0..group.order())
        .map(|g| {
            a.members
                .iter()
                .map(|&m| na[&m] + n_g.at(group.mul(group.inv(m), g)))
                .min()
                .expect("A nonempty")
        })
        .collect();
    Ok(NormTable { values })
}

/// Exact 3×3 integer matrices for the discrete Heisenberg group.
pub type Mat3 = [[i64; 3]; 3];

pub const MAT_ID: Mat3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_pow(a: &Mat3, n: i64) -> Mat3 {
    let base = if n < 0 { heisenberg_inv(a) } else { *a };
    let mut out = MAT_ID;
    for _ in 0..n.abs() {
        out = mat_mul(&out, &base);
    }
    out
}

/// Inverse of an upper unitriangular matrix.
pub fn heisenberg_inv(m: &Mat3) -> Mat3 {
    let (a, b, c) = (m[0][1], m[0][2], m[1][2]);
    [[1, -a, a * c - b], [0, 1, -c], [0, 0, 1]]
}

/// The obstruction to extending the absolute-value metric from the center
/// of the discrete Heisenberg group: with the generators
/// `x = E₁₂`, `y = E₂₃`, and central `z = E₁₃(−1)`, the identity
/// `z^{n²} = [yⁿ, xⁿ]` holds for all `n` (the opposite commutator order
/// yields the central inverse `z^{−n²}` — the two statements differ only by
/// this sign convention), so any left-invariant extension would force
/// `n² ≤ 2n·(d(x,e) + d(y,e))` — impossible. Verifies the identity by
/// exact integer arithmetic up to `n_max ≤ 50` and reports the diverging
/// ratio `n²/(2n) = n/2`.
pub fn heisenberg_obstruction(n_max: i64) -> CheckReport {
    assert!((1..=50).contains(&n_max));
    let x: Mat3 = [[1, 1, 0], [0, 1, 0], [0, 0, 1]];
    let y: Mat3 = [[1, 0, 0], [0, 1, 1], [0, 0, 1]];
    let z: Mat3 = [[1, 0, -1], [0, 1, 0], [0, 0, 1]];
    for n in 1..=n_max {
        let xn = mat_pow(&x, n);
        let yn = mat_pow(&y, n);
        let commutator = mat_mul(
            &mat_mul(&yn, &xn),
            &mat_mul(&heisenberg_inv(&yn), &heisenberg_inv(&xn)),
        );
        if commutator != mat_pow(&z, n * n) {
            return CheckReport::fail(format!("identity z^(n²) = [yⁿ, xⁿ] fails at n = {n}"));
        }
    }
    CheckReport::pass().note(format!(
        "z^(n²) = [xⁿ, yⁿ] verified for n ≤ {n_max}; any left-invariant extension \
         needs n²/(2n) = n/2 ≤ d(x,e) + d(y,e), yet n/2 reaches {} — no extension exists",
        Rat::new(n_max, 2)
    ))
}

/// Conjugation of rational circle rotations inside the isometry group: two
/// rotations `g₁, g₂ ∈ ℚ/ℤ` generate conjugate (hence isometric) actions
/// exactly when they have the same finite order, equivalently when one is
/// the other or its inverse up to the order condition. Irrational angles
/// are outside the decidable fragment and rejected by the caller.
pub fn circle_induced_conjugacy(g1: Rat, g2: Rat) -> (bool, String) {
    let reduce = |r: Rat| -> Rat { r - Rat::int(r.floor()) };
    let (a, b) = (reduce(g1), reduce(g2));
    if a == b {
        return (true, format!("equal rotations ({a} ≡ {b} mod 1)"));
    }
    if a == reduce(Rat::zero() - b) {
        return (true, format!("inverse rotations ({a} ≡ −{b} mod 1)"));
    }
    let (oa, ob) = (a.denom(), b.denom());
    if oa == ob {
        (true, format!("same finite order {oa}"))
    } else {
        (false, format!("different orders: {oa} vs {ob}"))
    }
}
