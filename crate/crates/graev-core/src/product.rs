//! The Graev pseudo-norm and metric on an amalgam of metric groups: the
//! letterwise cost `ρ`, the reduction pipeline (multipliable → slim → simple),
//! symmetric-pair enumeration, the computable norm with witnesses, lower
//! bounds, a maximality check, and an independent brute-force oracle.
//!
//! Every infimum is realized as a minimum over a finite, deterministic
//! candidate set: the common subgroup `A` is finite (so optimal `A`-insertions
//! exist), minimizing witnesses have the length of the reduced form, and each
//! reduced form admits only finitely many symmetric companion words.

use std::collections::{BTreeMap, BTreeSet};

use crate::alphabet::Alphabet;
use crate::combinatorics::{
    enumerate_reduced_forms, evaluate, external_letters, is_multipliable_set, is_slim_tree,
    is_trivial, left_transfer, nf_inv, nf_mul, right_transfer, symmetrize, words_multipliable,
    EvalTree, NormalForm, WordError,
};
use crate::group::CheckReport;
use crate::rational::Rat;
use crate::words::{maximal_subintervals, IndexSet, Word};

/// `ρ(α, β)`: the sum of letterwise amalgam distances. Panics when the words
/// have different lengths.
pub fn rho<A: Alphabet>(sys: &A, alpha: &Word<A::Letter>, beta: &Word<A::Letter>) -> Rat {
    assert_eq!(alpha.len(), beta.len(), "rho requires words of equal length");
    (1..=alpha.len()).map(|i| sys.dist(alpha.at(i), beta.at(i))).sum()
}

/// Is `(α, ζ)` an `f`-pair: equal lengths, `α̂ = f`, `ζ̂ = e`?
pub fn is_f_pair<A: Alphabet>(
    sys: &A,
    f: &NormalForm<A::Letter>,
    alpha: &Word<A::Letter>,
    zeta: &Word<A::Letter>,
) -> bool {
    alpha.len() == zeta.len() && evaluate(sys, alpha) == *f && is_trivial(sys, zeta)
}

/// An `f`-pair whose words are letterwise multipliable.
pub fn is_multipliable_pair<A: Alphabet>(
    sys: &A,
    f: &NormalForm<A::Letter>,
    alpha: &Word<A::Letter>,
    zeta: &Word<A::Letter>,
) -> bool {
    is_f_pair(sys, f, alpha, zeta) && words_multipliable(sys, alpha, zeta)
}

/// Is `ζ` simple with respect to `tree`: the tree is slim for `ζ` and every
/// `A`-letter of `ζ` is the identity?
pub fn is_simple_word<A: Alphabet>(sys: &A, zeta: &Word<A::Letter>, tree: &EvalTree) -> bool {
    is_slim_tree(sys, zeta, tree)
        && (1..=zeta.len()).all(|i| !sys.in_base(zeta.at(i)) || sys.is_identity(zeta.at(i)))
}

/// Turn an `f`-pair into a multipliable `f`-pair without increasing `ρ`.
///
/// Positions whose letters already share a factor are kept; a cross-factor
/// position `i` is split into two, `α(i) ⌢ e` against `a_i ⌢ a_i⁻¹ζ(i)`,
/// where `a_i ∈ A` exactly minimizes `d(α(i), a_i) + d(a_i, ζ(i))` (ties
/// broken by the letter order). Since `A` is finite the minimum is attained,
/// so `ρ` of the result equals `ρ` of the input.
pub fn to_multipliable<A: Alphabet>(
    sys: &A,
    alpha: &Word<A::Letter>,
    zeta: &Word<A::Letter>,
) -> (Word<A::Letter>, Word<A::Letter>) {
    assert_eq!(alpha.len(), zeta.len(), "to_multipliable requires an f-pair");
    let base = sys.base_elements();
    let mut b = Vec::new();
    let mut z = Vec::new();
    for i in 1..=alpha.len() {
        let (g, h) = (alpha.at(i), zeta.at(i));
        if sys.multipliable(g, h) {
            b.push(g.clone());
            z.push(h.clone());
        } else {
            let a = base
                .iter()
                .min_by_key(|a| (sys.dist(g, a) + sys.dist(a, h), (*a).clone()))
                .expect("A is nonempty")
                .clone();
            b.push(g.clone());
            b.push(sys.identity());
            z.push(a.clone());
            z.push(sys.multiply(&sys.inverse(&a), h));
        }
    }
    (Word::new(b), Word::new(z))
}

/// Turn a multipliable pair into a slim pair for the given evaluation tree,
/// preserving `ρ` exactly.
///
/// Works level by level from the deepest nodes to the root. The nodes of one
/// level split into maximal runs of adjacent intervals; all runs but the last
/// are emptied by a right transfer and the last run by a left transfer, with
/// the boundary trichotomy when there is a single run.
pub fn to_slim<A: Alphabet>(
    sys: &A,
    pair: (Word<A::Letter>, Word<A::Letter>),
    tree: &EvalTree,
) -> Result<(Word<A::Letter>, Word<A::Letter>), WordError> {
    let n = pair.1.len();
    let height = (0..tree.len()).map(|t| tree.height(t)).max().unwrap_or(0);
    let mut cur = pair;
    for k in 0..=height {
        let level = height - k;
        let mut nodes: Vec<usize> = (0..tree.len()).filter(|&t| tree.height(t) == level).collect();
        nodes.sort_by_key(|&t| tree.nodes[t].interval.0);
        let m = nodes.len();
        if m == 0 {
            continue;
        }
        let ints: Vec<IndexSet> = nodes.iter().map(|&t| tree.interval_set(t)).collect();
        // Runs of adjacent intervals; the covering relation of the schedule
        // collapses to adjacency because same-level intervals are disjoint
        // and sorted.
        let mut classes: Vec<(usize, usize)> = Vec::new();
        let mut start = 0;
        for r in 1..m {
            if ints[r - 1].mm() + 1 < ints[r].m() {
                classes.push((start, r - 1));
                start = r;
            }
        }
        classes.push((start, m - 1));
        let p = classes.len();
        if p >= 2 {
            let (_, hi_prev) = classes[p - 2];
            let (lo_last, _) = classes[p - 1];
            cur = right_transfer(sys, cur, &ints[..=hi_prev])?;
            cur = left_transfer(sys, cur, &ints[lo_last..])?;
        } else if ints[m - 1].mm() < n {
            cur = right_transfer(sys, cur, &ints)?;
        } else if ints[0].m() > 1 {
            cur = left_transfer(sys, cur, &ints)?;
        } else {
            cur = right_transfer(sys, cur, &ints[..m - 1])?;
        }
    }
    Ok(cur)
}

/// Turn a slim pair (with a balanced slim tree) into a simple pair,
/// preserving `ρ` exactly: every `A`-letter of the trivial word becomes `e`.
///
/// Non-identity `A`-letters inside each residual piece are pushed onto the
/// nearest external letter: singleton right transfers up to the last external
/// position of the piece, then singleton left transfers from it. A word with
/// no external letters at all is emptied by one full pass of right transfers.
pub fn to_simple<A: Alphabet>(
    sys: &A,
    pair: (Word<A::Letter>, Word<A::Letter>),
    tree: &EvalTree,
) -> Result<(Word<A::Letter>, Word<A::Letter>), WordError> {
    let n = pair.1.len();
    let ext = external_letters(sys, &pair.1);
    if ext.is_empty() {
        let singles: Vec<IndexSet> = (1..n).map(|i| IndexSet::interval(i, i)).collect();
        return right_transfer(sys, pair, &singles);
    }
    let mut u: Vec<usize> = Vec::new();
    let mut v: Vec<usize> = Vec::new();
    for t in 0..tree.len() {
        for piece in maximal_subintervals(&tree.residual(t)) {
            let f: IndexSet = piece.iter().filter(|i| ext.contains(*i)).collect();
            if f.is_empty() {
                return Err(WordError::Invalid(format!(
                    "residual piece {piece} of node {t} has no external letters (tree not balanced)"
                )));
            }
            u.extend((piece.m()..=f.mm()).filter(|&i| !ext.contains(i)));
            v.extend((f.mm()..=piece.mm()).filter(|&i| !ext.contains(i)));
        }
    }
    u.sort_unstable();
    u.dedup();
    v.sort_unstable();
    v.dedup();
    let us: Vec<IndexSet> = u.iter().map(|&i| IndexSet::interval(i, i)).collect();
    let vs: Vec<IndexSet> = v.iter().map(|&i| IndexSet::interval(i, i)).collect();
    let cur = right_transfer(sys, pair, &us)?;
    left_transfer(sys, cur, &vs)
}

/// A laminar interval shape used to enumerate slim tree skeletons.
#[derive(Clone, Debug)]
struct Shape {
    lo: usize,
    hi: usize,
    children: Vec<Shape>,
}

/// All forests of disjoint shapes inside `[lo, hi]`, each shape an interval
/// of length at least two (singleton nodes only force letters that are
/// already forced and are skipped as redundant).
fn forests(lo: usize, hi: usize) -> Vec<Vec<Shape>> {
    let mut out = vec![Vec::new()];
    if lo >= hi {
        return out;
    }
    for a in lo..hi {
        for b in (a + 1)..=hi {
            for s in shapes_at(a, b) {
                for rest in forests(b + 1, hi) {
                    let mut forest = vec![s.clone()];
                    forest.extend(rest);
                    out.push(forest);
                }
            }
        }
    }
    out
}

/// All shapes with interval `[a, b]`: children live strictly inside.
fn shapes_at(a: usize, b: usize) -> Vec<Shape> {
    forests(a + 1, b.saturating_sub(1))
        .into_iter()
        .map(|children| Shape { lo: a, hi: b, children })
        .collect()
}

fn add_shape(tree: &mut EvalTree, parent: usize, s: &Shape) {
    let id = tree.add_child(parent, (s.lo, s.hi));
    for c in &s.children {
        add_shape(tree, id, c);
    }
}

/// Every slim tree skeleton on `[1, n]`: the root interval with a laminar
/// family of proper subintervals below it. A single child equal to the whole
/// interval only re-roots the tree and is skipped.
fn all_trees(n: usize) -> Vec<EvalTree> {
    let mut out = Vec::new();
    for forest in forests(1, n) {
        if forest.len() == 1 && forest[0].lo == 1 && forest[0].hi == n {
            continue;
        }
        let mut tree = EvalTree::root_only(n);
        for s in &forest {
            add_shape(&mut tree, 0, s);
        }
        out.push(tree);
    }
    out
}

/// All trivial words `ζ` making `(α, ζ)` a symmetric pair with respect to
/// some slim tree, sorted and deduplicated.
///
/// For each tree skeleton, each node independently either keeps its residual
/// letters at `e` or picks an admissible list (at least two positions whose
/// `α`-letters share a factor) together with the collection position `j₀`;
/// the listed positions receive the symmetrization pattern. This realizes
/// exactly the pairs fixed by one symmetrization per node, and there are
/// finitely many of them.
pub fn symmetric_zetas<A: Alphabet>(sys: &A, alpha: &Word<A::Letter>) -> Vec<Word<A::Letter>> {
    let n = alpha.len();
    if n == 0 {
        return vec![Word::empty()];
    }
    assert!(n <= 16, "symmetric enumeration is limited to words of length 16");
    let e_word = Word::new(vec![sys.identity(); n]);
    let mut out: BTreeSet<Word<A::Letter>> = BTreeSet::new();
    for tree in all_trees(n) {
        // Per-node choices: `None` keeps the residual at `e`.
        let mut choices: Vec<Vec<Option<(IndexSet, usize)>>> = Vec::new();
        for t in 0..tree.len() {
            let idx: Vec<usize> = tree.residual(t).as_slice().to_vec();
            let mut c: Vec<Option<(IndexSet, usize)>> = vec![None];
            for mask in 1u32..(1 << idx.len()) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let s: IndexSet = idx
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, &i)| i)
                    .collect();
                if !is_multipliable_set(sys, alpha, &s) {
                    continue;
                }
                for j0 in s.iter() {
                    c.push(Some((s.clone(), j0)));
                }
            }
            choices.push(c);
        }
        let mut pick = vec![0usize; choices.len()];
        loop {
            let mut zeta = e_word.clone();
            let mut ok = true;
            for (t, &k) in pick.iter().enumerate() {
                if let Some((list, j0)) = &choices[t][k] {
                    match symmetrize(sys, alpha, &zeta, &tree, t, list, *j0) {
                        Ok(z) => zeta = z,
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if ok {
                debug_assert!(is_trivial(sys, &zeta));
                debug_assert!(is_slim_tree(sys, &zeta, &tree));
                out.insert(zeta);
            }
            let mut d = 0;
            loop {
                if d == pick.len() {
                    break;
                }
                pick[d] += 1;
                if pick[d] < choices[d].len() {
                    break;
                }
                pick[d] = 0;
                d += 1;
            }
            if d == pick.len() {
                break;
            }
        }
    }
    out.into_iter().collect()
}

/// The symmetric pairs `(α, ζ)` for a reduced word `α`, in deterministic
/// order.
pub fn enumerate_symmetric_pairs<A: Alphabet>(
    sys: &A,
    alpha: &Word<A::Letter>,
) -> Vec<(Word<A::Letter>, Word<A::Letter>)> {
    symmetric_zetas(sys, alpha).into_iter().map(|z| (alpha.clone(), z)).collect()
}

/// How to compute a norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormStrategy {
    /// Minimum of `ρ` over reduced forms and their symmetric companions.
    Symmetric,
    /// Exhaustive minimum over multipliable pairs up to the given length.
    BruteForce { max_len: usize },
    /// Run both and require agreement.
    Both { max_len: usize },
}

/// A norm value together with its minimizing witness pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraevResult<L> {
    pub value: Rat,
    /// Witness word evaluating to the queried element.
    pub alpha: Word<L>,
    /// Witness trivial word; `ρ(alpha, zeta) = value`.
    pub zeta: Word<L>,
    /// Number of candidates examined.
    pub candidates: usize,
    /// Human-readable provenance of the computation.
    pub strategy: String,
}

/// The Graev norm `N(f)`: the minimum of `ρ(α, ζ)` over all reduced forms
/// `α` of `f` and all symmetric companions `ζ`. The witness is the first
/// minimizer in enumeration order.
pub fn graev_norm<A: Alphabet>(sys: &A, f: &NormalForm<A::Letter>) -> GraevResult<A::Letter> {
    let mut best: Option<(Rat, Word<A::Letter>, Word<A::Letter>)> = None;
    let mut candidates = 0;
    for alpha in enumerate_reduced_forms(sys, f) {
        for zeta in symmetric_zetas(sys, &alpha) {
            candidates += 1;
            let v = rho(sys, &alpha, &zeta);
            if best.as_ref().is_none_or(|(b, _, _)| v < *b) {
                best = Some((v, alpha.clone(), zeta));
            }
        }
    }
    let (value, alpha, zeta) = best.expect("at least one candidate pair exists");
    GraevResult { value, alpha, zeta, candidates, strategy: "symmetric-enumeration".into() }
}

fn push_letter<A: Alphabet>(
    sys: &A,
    nf: &NormalForm<A::Letter>,
    l: &A::Letter,
) -> NormalForm<A::Letter> {
    evaluate(sys, &nf.0.concat(&Word::new(vec![l.clone()])))
}

/// Independent oracle for the norm: dynamic programming over pairs of
/// normal forms, equivalent to an exhaustive minimum of `ρ(α, ζ)` over all
/// multipliable `f`-pairs with `|α| ≤ max_len` and letters from the full
/// union alphabet. Exact whenever `max_len ≥ length(f)`, because a
/// minimizing simple reduced pair has exactly that length.
pub fn brute_force_norm<A: Alphabet>(
    sys: &A,
    f: &NormalForm<A::Letter>,
    max_len: usize,
) -> Result<GraevResult<A::Letter>, WordError> {
    if max_len < f.len() {
        return Err(WordError::Invalid(format!(
            "brute-force length bound {max_len} is below the element length {}",
            f.len()
        )));
    }
    let letters = sys.all_letters();
    let mut pairs = Vec::new();
    for g in &letters {
        for z in &letters {
            if sys.multipliable(g, z) {
                pairs.push((g.clone(), z.clone(), sys.dist(g, z)));
            }
        }
    }
    let e_nf = evaluate(sys, &Word::empty());
    type Entry<L> = (Rat, Word<L>, Word<L>);
    let mut dp: BTreeMap<(NormalForm<A::Letter>, NormalForm<A::Letter>), Entry<A::Letter>> =
        BTreeMap::from([((e_nf.clone(), e_nf.clone()), (Rat::zero(), Word::empty(), Word::empty()))]);
    let mut best: Option<Entry<A::Letter>> = None;
    let mut candidates = 0;
    let target = (f.clone(), e_nf);
    if let Some(hit) = dp.get(&target) {
        best = Some(hit.clone());
    }
    for _ in 0..max_len {
        let mut next: BTreeMap<_, Entry<A::Letter>> = BTreeMap::new();
        for ((na, nz), (cost, wa, wz)) in &dp {
            if best.as_ref().is_some_and(|(b, _, _)| *cost >= *b) {
                continue;
            }
            for (g, z, c) in &pairs {
                candidates += 1;
                let key = (push_letter(sys, na, g), push_letter(sys, nz, z));
                let entry = (
                    *cost + *c,
                    wa.concat(&Word::new(vec![g.clone()])),
                    wz.concat(&Word::new(vec![z.clone()])),
                );
                match next.get_mut(&key) {
                    Some(old) if *old <= entry => {}
                    Some(old) => *old = entry,
                    None => {
                        next.insert(key, entry);
                    }
                }
            }
        }
        dp = next;
        if let Some(hit) = dp.get(&target) {
            if best.as_ref().is_none_or(|(b, _, _)| hit.0 < *b) {
                best = Some(hit.clone());
            }
        }
    }
    let (value, alpha, zeta) =
        best.expect("reachable: the canonical form paired with identities is a candidate");
    Ok(GraevResult { value, alpha, zeta, candidates, strategy: format!("brute-force({max_len})") })
}

/// Compute the norm with the requested strategy; `Both` verifies that the
/// symmetric enumeration and the oracle agree exactly.
pub fn graev_norm_with<A: Alphabet>(
    sys: &A,
    f: &NormalForm<A::Letter>,
    strategy: NormStrategy,
) -> Result<GraevResult<A::Letter>, WordError> {
    match strategy {
        NormStrategy::Symmetric => Ok(graev_norm(sys, f)),
        NormStrategy::BruteForce { max_len } => brute_force_norm(sys, f, max_len),
        NormStrategy::Both { max_len } => {
            let s = graev_norm(sys, f);
            let b = brute_force_norm(sys, f, max_len)?;
            if s.value != b.value {
                return Err(WordError::Invalid(format!(
                    "strategy disagreement: symmetric enumeration gives {} but brute force gives {}",
                    s.value, b.value
                )));
            }
            Ok(GraevResult {
                candidates: s.candidates + b.candidates,
                strategy: format!("both({max_len})"),
                ..s
            })
        }
    }
}

/// The Graev distance `d̲(f, g) = N(f g⁻¹)`.
pub fn graev_distance<A: Alphabet>(
    sys: &A,
    f: &NormalForm<A::Letter>,
    g: &NormalForm<A::Letter>,
) -> Rat {
    graev_norm(sys, &nf_mul(sys, f, &nf_inv(sys, g))).value
}

/// Lower bound `N(f) ≥ min_i d(α(i), A)` over the letters of a reduced form;
/// the bound does not depend on the chosen form.
pub fn norm_lower_bound<A: Alphabet>(sys: &A, f: &NormalForm<A::Letter>) -> Rat {
    let bound = (1..=f.len()).map(|i| sys.dist_to_base(f.0.at(i))).min().unwrap_or(Rat::zero());
    debug_assert!(enumerate_reduced_forms(sys, f).iter().all(|w| {
        (1..=w.len()).map(|i| sys.dist_to_base(w.at(i))).min().unwrap_or(Rat::zero()) == bound
    }));
    bound
}

/// Check that a candidate metric is dominated by the Graev metric on the
/// supplied pairs. Pairs lying inside the union of the factors additionally
/// must agree with the amalgam metric exactly (a candidate that does not
/// extend `d` is reported as a failure).
pub fn check_maximality<A, C>(
    sys: &A,
    pairs: &[(NormalForm<A::Letter>, NormalForm<A::Letter>)],
    candidate: C,
) -> CheckReport
where
    A: Alphabet,
    C: Fn(&NormalForm<A::Letter>, &NormalForm<A::Letter>) -> Rat,
{
    let as_letter = |nf: &NormalForm<A::Letter>| -> Option<A::Letter> {
        match nf.len() {
            0 => Some(sys.identity()),
            1 => Some(nf.0.at(1).clone()),
            _ => None,
        }
    };
    for (x, y) in pairs {
        let c = candidate(x, y);
        if let (Some(lx), Some(ly)) = (as_letter(x), as_letter(y)) {
            let d = sys.dist(&lx, &ly);
            if c != d {
                return CheckReport::fail(format!(
                    "candidate does not extend the amalgam metric at ({}, {}): {c} vs {d}",
                    sys.display(&lx),
                    sys.display(&ly)
                ));
            }
        }
        let g = graev_distance(sys, x, y);
        if c > g {
            return CheckReport::fail(format!(
                "candidate exceeds the Graev distance on a length-({}, {}) pair: {c} > {g}",
                x.len(),
                y.len()
            ));
        }
    }
    CheckReport::pass()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::examples::{amalgamated_example, z2_star_z3};
    use crate::amalgam::{AmLetter, AmalgamSystem};
    use crate::combinatorics::{build_balanced_evaluation_tree, canonical_label};
    use crate::group::FiniteMetricGroup;

    fn a() -> AmLetter {
        AmLetter::Fac(0, 1)
    }

    fn b() -> AmLetter {
        AmLetter::Fac(1, 1)
    }

    fn b2() -> AmLetter {
        AmLetter::Fac(1, 2)
    }

    fn e() -> AmLetter {
        AmLetter::Base(0)
    }

    fn nf(sys: &AmalgamSystem, letters: Vec<AmLetter>) -> NormalForm<AmLetter> {
        evaluate(sys, &Word::new(letters))
    }

    /// All distinct elements representable by words of length at most `len`.
    fn elements_up_to(sys: &AmalgamSystem, len: usize) -> Vec<NormalForm<AmLetter>> {
        let letters = sys.all_letters();
        let mut words: Vec<Word<AmLetter>> = vec![Word::empty()];
        let mut out: BTreeSet<NormalForm<AmLetter>> = BTreeSet::new();
        out.insert(evaluate(sys, &Word::empty()));
        for _ in 0..len {
            let mut next = Vec::new();
            for w in &words {
                for l in &letters {
                    let mut v = w.clone();
                    v.0.push(*l);
                    out.insert(evaluate(sys, &v));
                    next.push(v);
                }
            }
            words = next;
        }
        out.into_iter().collect()
    }

    #[test]
    fn rho_examples() {
        let sys = z2_star_z3();
        let ab = Word::new(vec![a(), b()]);
        assert_eq!(rho(&sys, &ab, &ab), Rat::zero());
        assert_eq!(rho(&sys, &ab, &Word::new(vec![e(), e()])), Rat::int(2));
        let am = amalgamated_example();
        let g1 = am.letter(0, am.factors[0].element_index("(0,1)").unwrap());
        let g2 = am.letter(1, 1);
        let ee = Word::new(vec![am.identity(), am.identity()]);
        assert_eq!(rho(&am, &Word::new(vec![g1, g2]), &ee), Rat::new(7, 4));
    }

    #[test]
    fn to_multipliable_examples() {
        let sys = z2_star_z3();
        // Already multipliable: unchanged.
        let alpha = Word::new(vec![a(), b()]);
        let zeta = Word::new(vec![e(), e()]);
        assert_eq!(to_multipliable(&sys, &alpha, &zeta), (alpha.clone(), zeta));
        // Cross-factor position splits; rho is preserved exactly.
        let zeta = Word::new(vec![b(), b2()]);
        let f = evaluate(&sys, &alpha);
        let before = rho(&sys, &alpha, &zeta);
        let (beta, xi) = to_multipliable(&sys, &alpha, &zeta);
        // Only position 1 (a vs b) is cross-factor and splits.
        assert_eq!(beta.len(), 3);
        assert!(is_multipliable_pair(&sys, &f, &beta, &xi));
        assert_eq!(rho(&sys, &beta, &xi), before);
        // With a nontrivial A the split picks the exact minimizing insertion.
        let am = amalgamated_example();
        let g1 = am.letter(0, am.factors[0].element_index("(0,1)").unwrap());
        let g2 = am.letter(1, 1);
        let alpha = Word::new(vec![g1, g2]);
        let zeta = Word::new(vec![g2, am.inverse(&g2)]);
        let f = evaluate(&am, &alpha);
        let (beta, xi) = to_multipliable(&am, &alpha, &zeta);
        assert!(is_multipliable_pair(&am, &f, &beta, &xi));
        assert_eq!(rho(&am, &beta, &xi), rho(&am, &alpha, &zeta));
    }

    #[test]
    fn slim_and_simple_pipeline() {
        let sys = z2_star_z3();
        for (alpha, zeta) in [
            (Word::new(vec![a(), b(), b2(), a()]), Word::new(vec![a(), b(), b2(), a()])),
            (Word::new(vec![a(), b(), b(), a()]), Word::new(vec![a(), b(), b2(), a()])),
            (Word::new(vec![e(), b(), b2(), a()]), Word::new(vec![a(), b2(), b(), a()])),
        ] {
            let f = evaluate(&sys, &alpha);
            assert!(is_multipliable_pair(&sys, &f, &alpha, &zeta));
            let label = canonical_label(&sys, &zeta);
            let tree = build_balanced_evaluation_tree(&sys, &zeta, &label).unwrap();
            let before = rho(&sys, &alpha, &zeta);
            let (beta, xi) = to_slim(&sys, (alpha.clone(), zeta.clone()), &tree).unwrap();
            assert!(is_multipliable_pair(&sys, &f, &beta, &xi));
            assert!(is_slim_tree(&sys, &xi, &tree), "not slim:\n{}", tree.render());
            assert_eq!(rho(&sys, &beta, &xi), before);
            let (gamma, omega) = to_simple(&sys, (beta, xi), &tree).unwrap();
            assert!(is_multipliable_pair(&sys, &f, &gamma, &omega));
            assert!(is_simple_word(&sys, &omega, &tree));
            assert_eq!(rho(&sys, &gamma, &omega), before);
        }
    }

    #[test]
    fn simple_reduction_all_base_case() {
        let am = amalgamated_example();
        let g1 = am.letter(0, am.factors[0].element_index("(0,1)").unwrap());
        let base = AmLetter::Base(1);
        let alpha = Word::new(vec![g1, g1]);
        let zeta = Word::new(vec![base, am.inverse(&base)]);
        let f = evaluate(&am, &alpha);
        assert!(is_multipliable_pair(&am, &f, &alpha, &zeta));
        let tree = EvalTree::root_only(2);
        assert!(is_slim_tree(&am, &zeta, &tree));
        let before = rho(&am, &alpha, &zeta);
        let (beta, xi) = to_simple(&am, (alpha, zeta), &tree).unwrap();
        assert_eq!(xi, Word::new(vec![am.identity(), am.identity()]));
        assert!(is_multipliable_pair(&am, &f, &beta, &xi));
        assert_eq!(rho(&am, &beta, &xi), before);
    }

    #[test]
    fn symmetric_zeta_examples() {
        let sys = z2_star_z3();
        // Length one: only the identity word.
        assert_eq!(symmetric_zetas(&sys, &Word::new(vec![a()])), vec![Word::new(vec![e()])]);
        // Cross-factor two-letter word: only e ⌢ e.
        assert_eq!(
            symmetric_zetas(&sys, &Word::new(vec![a(), b()])),
            vec![Word::new(vec![e(), e()])]
        );
        // b ⌢ a ⌢ b admits the two nontrivial symmetrizations of {1, 3}.
        let zetas = symmetric_zetas(&sys, &Word::new(vec![b(), a(), b()]));
        let expect: BTreeSet<Word<AmLetter>> = [
            Word::new(vec![e(), e(), e()]),
            Word::new(vec![b2(), e(), b()]),
            Word::new(vec![b(), e(), b2()]),
        ]
        .into_iter()
        .collect();
        assert_eq!(zetas.into_iter().collect::<BTreeSet<_>>(), expect);
        // Pairs are reported against the fixed alpha, deterministically.
        let pairs = enumerate_symmetric_pairs(&sys, &Word::new(vec![a(), b()]));
        assert_eq!(pairs.len(), 1);
        assert!(is_f_pair(&sys, &nf(&sys, vec![a(), b()]), &pairs[0].0, &pairs[0].1));
    }

    #[test]
    fn graev_norm_desk_values() {
        let sys = z2_star_z3();
        assert_eq!(graev_norm(&sys, &nf(&sys, vec![])).value, Rat::zero());
        assert_eq!(graev_norm(&sys, &nf(&sys, vec![a()])).value, Rat::int(1));
        assert_eq!(graev_norm(&sys, &nf(&sys, vec![b()])).value, Rat::int(1));
        let res = graev_norm(&sys, &nf(&sys, vec![a(), b()]));
        assert_eq!(res.value, Rat::int(2));
        // Witness invariants.
        assert!(is_multipliable_pair(&sys, &nf(&sys, vec![a(), b()]), &res.alpha, &res.zeta));
        assert_eq!(rho(&sys, &res.alpha, &res.zeta), res.value);
        assert!(res.candidates >= 1);
        assert_eq!(res.strategy, "symmetric-enumeration");
    }

    #[test]
    fn symmetrization_lowers_the_norm_of_bab() {
        let sys = z2_star_z3();
        let f = nf(&sys, vec![b(), a(), b()]);
        let sym = graev_norm(&sys, &f);
        let oracle = brute_force_norm(&sys, &f, 5).unwrap();
        assert_eq!(sym.value, oracle.value);
        // The naive all-identity companion costs 3; symmetrization wins.
        assert_eq!(sym.value, Rat::int(2));
        assert!(sym.zeta != Word::new(vec![e(), e(), e()]));
    }

    #[test]
    fn oracle_equivalence_free_product() {
        let sys = z2_star_z3();
        for f in elements_up_to(&sys, 3) {
            let max_len = f.len() + 2;
            let res = graev_norm_with(&sys, &f, NormStrategy::Both { max_len }).unwrap();
            assert_eq!(rho(&sys, &res.alpha, &res.zeta), res.value);
        }
    }

    #[test]
    fn oracle_equivalence_amalgamated() {
        let am = amalgamated_example();
        for f in elements_up_to(&am, 2) {
            let max_len = f.len() + 2;
            graev_norm_with(&am, &f, NormStrategy::Both { max_len }).unwrap();
        }
    }

    #[test]
    fn pseudo_norm_axioms_exhaustive() {
        for sys in [z2_star_z3(), amalgamated_example()] {
            let elements = elements_up_to(&sys, 2);
            for f in &elements {
                let n = graev_norm(&sys, f).value;
                assert_eq!(n.is_zero(), f.is_identity(), "norm must separate the identity");
                assert_eq!(graev_norm(&sys, &nf_inv(&sys, f)).value, n, "N(f) = N(f^-1)");
            }
            for f1 in &elements {
                let n1 = graev_norm(&sys, f1).value;
                for f2 in &elements {
                    let n2 = graev_norm(&sys, f2).value;
                    let prod = nf_mul(&sys, f1, f2);
                    assert!(
                        graev_norm(&sys, &prod).value <= n1 + n2,
                        "triangle inequality fails"
                    );
                }
            }
        }
    }

    #[test]
    fn extension_on_all_letter_pairs() {
        for sys in [z2_star_z3(), amalgamated_example()] {
            for x in sys.all_letters() {
                for y in sys.all_letters() {
                    let dx = graev_distance(&sys, &nf(&sys, vec![x]), &nf(&sys, vec![y]));
                    assert_eq!(dx, sys.dist(&x, &y), "Graev metric must extend d");
                }
            }
        }
    }

    #[test]
    fn bi_invariance_on_samples() {
        let sys = z2_star_z3();
        let samples =
            [nf(&sys, vec![]), nf(&sys, vec![a()]), nf(&sys, vec![a(), b()]), nf(&sys, vec![b2()])];
        for h in sys.all_letters() {
            let hn = nf(&sys, vec![h]);
            for f1 in &samples {
                for f2 in &samples {
                    let d = graev_distance(&sys, f1, f2);
                    let left = graev_distance(&sys, &nf_mul(&sys, &hn, f1), &nf_mul(&sys, &hn, f2));
                    let right =
                        graev_distance(&sys, &nf_mul(&sys, f1, &hn), &nf_mul(&sys, f2, &hn));
                    assert_eq!(left, d);
                    assert_eq!(right, d);
                }
            }
        }
    }

    #[test]
    fn norm_lower_bound_examples() {
        let sys = z2_star_z3();
        assert_eq!(norm_lower_bound(&sys, &nf(&sys, vec![b()])), Rat::int(1));
        let ab = nf(&sys, vec![a(), b()]);
        let bound = norm_lower_bound(&sys, &ab);
        assert_eq!(bound, Rat::int(1));
        assert!(bound <= graev_norm(&sys, &ab).value);
        // Elements of A: the bound degenerates to zero.
        let am = amalgamated_example();
        assert_eq!(norm_lower_bound(&am, &nf(&am, vec![AmLetter::Base(1)])), Rat::zero());
    }

    #[test]
    fn brute_force_bounds_and_errors() {
        let sys = z2_star_z3();
        assert_eq!(brute_force_norm(&sys, &nf(&sys, vec![]), 1).unwrap().value, Rat::zero());
        assert_eq!(brute_force_norm(&sys, &nf(&sys, vec![a()]), 2).unwrap().value, Rat::int(1));
        let res = brute_force_norm(&sys, &nf(&sys, vec![a(), b()]), 4).unwrap();
        assert_eq!(res.value, Rat::int(2));
        assert_eq!(res.strategy, "brute-force(4)");
        assert!(brute_force_norm(&sys, &nf(&sys, vec![a(), b()]), 1).is_err());
    }

    #[test]
    fn symmetrization_never_increases_rho() {
        let sys = z2_star_z3();
        let alpha = Word::new(vec![b(), a(), b()]);
        let zeta = Word::new(vec![e(), e(), e()]);
        let tree = EvalTree::root_only(3);
        let base = rho(&sys, &alpha, &zeta);
        let list = IndexSet::new(vec![1, 3]);
        for j0 in [1, 3] {
            let xi = symmetrize(&sys, &alpha, &zeta, &tree, 0, &list, j0).unwrap();
            assert!(rho(&sys, &alpha, &xi) <= base);
            // Symmetrizing an already symmetric word changes nothing.
            let again = symmetrize(&sys, &alpha, &xi, &tree, 0, &list, j0).unwrap();
            assert_eq!(again, xi);
        }
    }

    #[test]
    fn maximality_checks() {
        let sys = z2_star_z3();
        let elements = elements_up_to(&sys, 2);
        let mut pairs = Vec::new();
        for x in &elements {
            for y in &elements {
                pairs.push((x.clone(), y.clone()));
            }
        }
        // The Graev metric dominates itself and extends d.
        let report = check_maximality(&sys, &pairs, |x, y| graev_distance(&sys, x, y));
        assert!(report.passed, "{}", report.render());
        // Pull back the Z/2 factor metric through the hom collapsing Z/3.
        let z2 = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::int(1)]);
        let collapse = |f: &NormalForm<AmLetter>| -> usize {
            let mut acc = 0;
            for l in f.0.letters() {
                if let AmLetter::Fac(0, g) = l {
                    acc = z2.mul(acc, *g);
                }
            }
            acc
        };
        let pulled = |x: &NormalForm<AmLetter>, y: &NormalForm<AmLetter>| -> Rat {
            z2.d(collapse(x), collapse(y))
        };
        let long_pairs: Vec<_> = pairs
            .iter()
            .filter(|(x, y)| x.len() == 2 && y.len() == 2)
            .cloned()
            .collect();
        let report = check_maximality(&sys, &long_pairs, pulled);
        assert!(report.passed, "{}", report.render());
        // The same pullback fails the extension requirement on factor Z/3.
        let letter_pairs = vec![(nf(&sys, vec![b()]), nf(&sys, vec![]))];
        let report = check_maximality(&sys, &letter_pairs, pulled);
        assert!(!report.passed);
        assert!(report.details[0].contains("extend"));
        // A doubled metric is caught as a violation.
        let report = check_maximality(&sys, &[(nf(&sys, vec![a(), b()]), nf(&sys, vec![]))], |x, y| {
            graev_distance(&sys, x, y) * Rat::int(2)
        });
        assert!(!report.passed);
        assert!(report.details[0].contains("exceeds"));
    }

    #[test]
    fn single_factor_norm_is_the_group_norm() {
        let z4 = FiniteMetricGroup::cyclic(
            4,
            &[Rat::zero(), Rat::new(3, 4), Rat::int(1), Rat::new(3, 4)],
        );
        let sys = AmalgamSystem::free_product(vec![z4.clone()]).unwrap();
        for g in 0..z4.order() {
            let f = nf(&sys, vec![sys.letter(0, g)]);
            assert_eq!(graev_norm(&sys, &f).value, z4.norm(g));
        }
    }
}
