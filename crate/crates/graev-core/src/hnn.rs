//! Stable-letter machinery: the Graev metric of the free product `G * ⟨t⟩`
//! restricted to the subgroup generated by `G` and `tAt⁻¹`, the intrinsic
//! free-product metric on that subgroup, the equality criterion
//! `diam A ≤ 1`, and two-sided invariant metrics on HNN extensions.
//!
//! The subgroup `⟨G, tAt⁻¹⟩` of `G * ⟨t⟩` is abstractly a free product
//! `G * tAt⁻¹`, so it carries two natural metrics: the restriction of the
//! ambient Graev metric, and the Graev metric of the abstract free product
//! (computed by [`crate::product`] over a two-factor system). They agree
//! exactly when `diam A` is at most the stable-letter scale. The proof
//! pipeline — multipliable → hereditary → rigid companion words — is
//! implemented verbatim and doubles as the fast algorithm for the restricted
//! metric: the minimum over rigid pairs is found by dynamic programming.
//!
//! The HNN extension `H = ⟨G, t | tat⁻¹ = φ(a)⟩` is handled through Britton
//! normal forms; its metric is the maximal two-sided invariant pseudometric
//! dominated by the letter costs `d` on `G` and `K·|m − n|` on `⟨t⟩`,
//! computed by the same pair-minimization dynamic program as the brute-force
//! oracle, evaluated in `H` (so the conjugation relation holds by
//! construction and `d̲(tat⁻¹, φ(a)) = 0`).

use std::collections::BTreeMap;

use crate::alphabet::Alphabet;
use crate::amalgam::{AmLetter, AmalgamSystem};
use crate::combinatorics::{
    build_balanced_evaluation_tree, canonical_label, evaluate, is_reduced, is_trivial, symmetrize,
    EvalTree, NormalForm, WordError,
};
use crate::group::{CheckReport, FiniteMetricGroup, GroupError, Subgroup};
use crate::product::{self, rho, GraevResult};
use crate::rational::Rat;
use crate::words::{IndexSet, Word};

/// A letter of the union alphabet `G ∪ ⟨t⟩`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TLetter {
    /// An element of the base group, by index. `G(identity)` is the letter `e`.
    G(usize),
    /// The stable-letter power `t^k`; the invariant `k ≠ 0` is maintained by
    /// all constructors (`t^0` is normalized to `G(identity)`).
    T(i64),
}

/// The alphabet of the free product `G * ⟨t⟩` where `⟨t⟩ ≅ ℤ` carries the
/// metric `d(t^m, t^n) = t_unit · |m − n|`. The common subgroup is trivial,
/// so reduced forms are unique.
#[derive(Clone, Debug)]
pub struct StableAlphabet {
    pub group: FiniteMetricGroup,
    /// Enumeration cap on `|k|` for the letters `t^k` listed by
    /// [`Alphabet::all_letters`]; arithmetic itself is uncapped.
    pub t_cap: i64,
    /// Scale of the stable letter: `d(t, e) = t_unit`.
    pub t_unit: Rat,
}

impl StableAlphabet {
    pub fn new(group: FiniteMetricGroup, t_cap: i64, t_unit: Rat) -> Self {
        assert!(t_cap >= 1, "the enumeration cap must allow t itself");
        assert!(t_unit > Rat::zero(), "the stable-letter scale must be positive");
        StableAlphabet { group, t_cap, t_unit }
    }

    /// The letter `t^k`, normalizing `t^0` to the identity letter.
    pub fn t(&self, k: i64) -> TLetter {
        if k == 0 {
            TLetter::G(self.group.identity)
        } else {
            TLetter::T(k)
        }
    }
}

impl Alphabet for StableAlphabet {
    type Letter = TLetter;

    fn identity(&self) -> TLetter {
        TLetter::G(self.group.identity)
    }

    fn factor_of(&self, l: &TLetter) -> Option<usize> {
        match *l {
            TLetter::G(g) if g == self.group.identity => None,
            TLetter::G(_) => Some(0),
            TLetter::T(_) => Some(1),
        }
    }

    fn multiply(&self, a: &TLetter, b: &TLetter) -> TLetter {
        match (*a, *b) {
            (TLetter::G(x), TLetter::G(y)) => TLetter::G(self.group.mul(x, y)),
            (TLetter::T(m), TLetter::T(n)) => self.t(m + n),
            (TLetter::G(x), t @ TLetter::T(_)) if x == self.group.identity => t,
            (t @ TLetter::T(_), TLetter::G(y)) if y == self.group.identity => t,
            _ => panic!("letters in different factors cannot be multiplied"),
        }
    }

    fn inverse(&self, l: &TLetter) -> TLetter {
        match *l {
            TLetter::G(g) => TLetter::G(self.group.inv(g)),
            TLetter::T(k) => TLetter::T(-k),
        }
    }

    fn base_elements(&self) -> Vec<TLetter> {
        vec![self.identity()]
    }

    fn all_letters(&self) -> Vec<TLetter> {
        let mut out: Vec<TLetter> = (0..self.group.order()).map(TLetter::G).collect();
        for k in 1..=self.t_cap {
            out.push(TLetter::T(k));
            out.push(TLetter::T(-k));
        }
        out
    }

    fn dist(&self, a: &TLetter, b: &TLetter) -> Rat {
        match (*a, *b) {
            (TLetter::G(x), TLetter::G(y)) => self.group.d(x, y),
            (TLetter::T(m), TLetter::T(n)) => self.t_unit * Rat::int((m - n).abs()),
            (TLetter::G(x), TLetter::T(k)) | (TLetter::T(k), TLetter::G(x)) => {
                // Cross-factor letters meet only through the trivial common
                // subgroup: d(g, t^k) = d(g, e) + d(e, t^k).
                self.group.norm(x) + self.t_unit * Rat::int(k.abs())
            }
        }
    }

    fn display(&self, l: &TLetter) -> String {
        match *l {
            TLetter::G(g) => self.group.elements[g].clone(),
            TLetter::T(1) => "t".into(),
            TLetter::T(k) => format!("t^{k}"),
        }
    }
}

/// Sum of the `t`-exponents of a word (a homomorphism into `ℤ`).
pub fn t_exponent_sum(w: &Word<TLetter>) -> i64 {
    w.letters().iter().map(|l| if let TLetter::T(k) = l { *k } else { 0 }).sum()
}

/// Total stable-letter degree: the sum of `|k|` over the `t^k` letters.
pub fn t_degree(w: &Word<TLetter>) -> i64 {
    w.letters().iter().map(|l| if let TLetter::T(k) = l { k.abs() } else { 0 }).sum()
}

/// A word over `G ∪ ⟨t⟩` with its stable-letter bookkeeping and a degree cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableLetterWord {
    pub word: Word<TLetter>,
    pub degree: i64,
    pub exponent_sum: i64,
}

impl StableLetterWord {
    pub fn new(word: Word<TLetter>, cap: i64) -> Result<Self, WordError> {
        let degree = t_degree(&word);
        if degree > cap {
            return Err(WordError::Invalid(format!(
                "stable-letter degree {degree} exceeds the cap {cap}"
            )));
        }
        Ok(StableLetterWord { exponent_sum: t_exponent_sum(&word), degree, word })
    }

    /// Every stable-letter exponent is `±1`.
    pub fn has_unit_exponents(&self) -> bool {
        self.word.letters().iter().all(|l| !matches!(l, TLetter::T(k) if k.abs() != 1))
    }
}

/// A trivial word is hereditary when every `⟨t⟩`-letter it carries is `t^{±1}`.
pub fn is_hereditary_word(sys: &StableAlphabet, zeta: &Word<TLetter>) -> bool {
    is_trivial(sys, zeta)
        && zeta.letters().iter().all(|l| !matches!(l, TLetter::T(k) if k.abs() != 1))
}

/// In a hereditary word the letters `t` and `t⁻¹` occur equally often
/// (the exponent sum of a trivial word vanishes).
pub fn hereditary_balance(zeta: &Word<TLetter>) -> (usize, usize) {
    let up = zeta.letters().iter().filter(|l| matches!(l, TLetter::T(1))).count();
    let down = zeta.letters().iter().filter(|l| matches!(l, TLetter::T(-1))).count();
    (up, down)
}

/// The subgroup data `A ≤ G` sitting inside `G * ⟨t⟩` as `⟨G, tAt⁻¹⟩`.
#[derive(Clone, Debug)]
pub struct InducedSystem {
    pub ambient: StableAlphabet,
    pub a: Subgroup,
}

impl InducedSystem {
    pub fn new(
        group: FiniteMetricGroup,
        a: Subgroup,
        t_cap: i64,
        t_unit: Rat,
    ) -> Result<Self, GroupError> {
        if a.members.iter().any(|&m| m >= group.order()) {
            return Err(GroupError::Invalid("subgroup member out of range".into()));
        }
        Ok(InducedSystem { ambient: StableAlphabet::new(group, t_cap, t_unit), a })
    }

    /// Does the reduced word spell an element of `⟨G, tAt⁻¹⟩`? Such elements
    /// reduce to alternations of `G`-letters and blocks `t ⌢ a ⌢ t⁻¹` with
    /// `a ∈ A ∖ {e}`.
    pub fn is_member(&self, f: &NormalForm<TLetter>) -> bool {
        let w = &f.0;
        let e = self.ambient.group.identity;
        let mut i = 1;
        while i <= w.len() {
            match *w.at(i) {
                TLetter::G(_) => i += 1,
                TLetter::T(1) => {
                    let ok = i + 2 <= w.len()
                        && matches!(*w.at(i + 1), TLetter::G(a) if a != e && self.a.contains(a))
                        && matches!(*w.at(i + 2), TLetter::T(-1));
                    if !ok {
                        return false;
                    }
                    i += 3;
                }
                TLetter::T(_) => return false,
            }
        }
        true
    }

    /// Hereditary pair: `α` the reduced form of a subgroup element, the pair
    /// multipliable, `ζ` hereditary, and every `⟨t⟩`-letter of `ζ` equal to
    /// the `α`-letter above it.
    pub fn is_hereditary_pair(&self, alpha: &Word<TLetter>, zeta: &Word<TLetter>) -> bool {
        let sys = &self.ambient;
        is_reduced(sys, alpha)
            && self.is_member(&NormalForm(alpha.clone()))
            && crate::combinatorics::words_multipliable(sys, alpha, zeta)
            && is_hereditary_word(sys, zeta)
            && (1..=zeta.len())
                .all(|i| !matches!(zeta.at(i), TLetter::T(_)) || zeta.at(i) == alpha.at(i))
    }

    /// Rigid pair: hereditary, and `ζ` repeats `α` at *every* stable-letter
    /// position of `α` (no `e` is allowed under a `t^{±1}`).
    pub fn is_rigid_pair(&self, alpha: &Word<TLetter>, zeta: &Word<TLetter>) -> bool {
        self.is_hereditary_pair(alpha, zeta)
            && (1..=alpha.len())
                .all(|i| !matches!(alpha.at(i), TLetter::T(_)) || zeta.at(i) == alpha.at(i))
    }

    /// Reduce a multipliable companion of the reduced form `α` to a
    /// hereditary one without increasing `ρ`: node by node, symmetrize over
    /// the external letters and redistribute the collected power `t^N` onto
    /// single letters `t^{±1}` and identities of equal total cost.
    pub fn to_hereditary(
        &self,
        alpha: &Word<TLetter>,
        zeta: &Word<TLetter>,
    ) -> Result<Word<TLetter>, WordError> {
        let sys = &self.ambient;
        if !is_reduced(sys, alpha) || !self.is_member(&NormalForm(alpha.clone())) {
            return Err(WordError::Invalid(
                "first word must be the reduced form of a subgroup element".into(),
            ));
        }
        if !crate::combinatorics::words_multipliable(sys, alpha, zeta) || !is_trivial(sys, zeta) {
            return Err(WordError::Invalid("companion must be trivial and multipliable".into()));
        }
        let tree = build_balanced_evaluation_tree(sys, zeta, &canonical_label(sys, zeta))?;
        let mut xi = zeta.clone();
        for s in 0..tree.len() {
            let rs = tree.residual(s);
            let violated = rs.iter().any(|j| {
                matches!(alpha.at(j), TLetter::T(_))
                    && xi.at(j) != alpha.at(j)
                    && !sys.is_identity(xi.at(j))
            });
            if !violated {
                continue;
            }
            let list =
                IndexSet::new(rs.iter().filter(|&i| !sys.is_identity(xi.at(i))).collect());
            let i1 = list.m();
            let delta = symmetrize(sys, alpha, &xi, &tree, s, &list, i1)?;
            let idx: Vec<usize> = list.as_slice().to_vec();
            let eps1 = match *alpha.at(i1) {
                TLetter::T(k) => k,
                _ => {
                    return Err(WordError::Invalid(
                        "external letters of a stable-letter node must be t-letters".into(),
                    ))
                }
            };
            let n_exp = match *delta.at(i1) {
                TLetter::T(k) => k,
                TLetter::G(g) if g == sys.group.identity => 0,
                _ => unreachable!("the collected letter lies in ⟨t⟩"),
            };
            if n_exp == 0 || n_exp == eps1 {
                xi = delta;
                continue;
            }
            // Redistribute t^N over single letters: keep t^{ε₁} at the head
            // when the signs agree (erasing |N|−1 opposite-sign letters),
            // otherwise erase the head together with |N| opposite-sign
            // letters. Among admissible indices we take the least ones.
            let before = rho(sys, alpha, &delta);
            let same_sign = n_exp.signum() == eps1.signum();
            let need = if same_sign { n_exp.abs() - 1 } else { n_exp.abs() } as usize;
            let chosen: Vec<usize> = idx[1..]
                .iter()
                .copied()
                .filter(|&i| {
                    matches!(*alpha.at(i), TLetter::T(k) if k.signum() == -n_exp.signum())
                })
                .take(need)
                .collect();
            if chosen.len() < need {
                return Err(WordError::Invalid(
                    "cannot balance the collected stable-letter power".into(),
                ));
            }
            xi = delta;
            xi.set(i1, if same_sign { alpha.at(i1).clone() } else { sys.identity() });
            for i in chosen {
                xi.set(i, sys.identity());
            }
            debug_assert_eq!(rho(sys, alpha, &xi), before);
        }
        debug_assert!(is_trivial(sys, &xi));
        debug_assert!(self.is_hereditary_pair(alpha, &xi));
        Ok(xi)
    }

    /// Reduce a hereditary pair to a rigid one without increasing `ρ`:
    /// build a structure tree for `ζ` and replace the companion on every
    /// residual by the canonical rigid companion of the matching `α`-subword.
    pub fn to_rigid(
        &self,
        alpha: &Word<TLetter>,
        zeta: &Word<TLetter>,
    ) -> Result<Word<TLetter>, WordError> {
        let sys = &self.ambient;
        if !self.is_hereditary_pair(alpha, zeta) {
            return Err(WordError::Invalid("input pair is not hereditary".into()));
        }
        let tree = build_structure_tree(sys, zeta)?;
        let mut xi = zeta.clone();
        for s in 0..tree.len() {
            let rs = tree.residual(s);
            let interval = tree.interval_set(s);
            let q: Vec<usize> = if s == 0 {
                rs.iter().collect()
            } else {
                rs.iter().filter(|&i| i != interval.m() && i != interval.mm()).collect()
            };
            if q.is_empty() {
                continue;
            }
            let sub_alpha = Word::new(q.iter().map(|&i| alpha.at(i).clone()).collect());
            let companion = rigid_companion(sys, &sub_alpha)?;
            for (j, &i) in q.iter().enumerate() {
                xi.set(i, companion.at(j + 1).clone());
            }
            if s != 0 {
                xi.set(interval.m(), alpha.at(interval.m()).clone());
                xi.set(interval.mm(), alpha.at(interval.mm()).clone());
            }
        }
        debug_assert!(is_trivial(sys, &xi));
        debug_assert!(self.is_rigid_pair(alpha, &xi));
        Ok(xi)
    }

    /// The moreover clause of the rigid reduction: after every letter `t` of
    /// `α`, the rigid companion carries a letter of `A`.
    pub fn letter_after_t_in_a(&self, alpha: &Word<TLetter>, xi: &Word<TLetter>) -> bool {
        (1..alpha.len()).all(|i| {
            !matches!(*alpha.at(i), TLetter::T(k) if k > 0)
                || matches!(*xi.at(i + 1), TLetter::G(a) if self.a.contains(a))
        })
    }

    /// The restriction of the ambient Graev metric: the exact minimum of
    /// `ρ(α, ξ)` over rigid pairs above the unique reduced form `α`, found by
    /// dynamic programming over prefix normal forms. Requires
    /// `diam A ≤ t_unit`; beyond that bound the restricted and intrinsic
    /// metrics genuinely differ and the rigid reduction is not available.
    pub fn induced_distance(&self, f: &Word<TLetter>) -> Result<GraevResult<TLetter>, WordError> {
        let sys = &self.ambient;
        if self.a.diameter(&sys.group) > sys.t_unit {
            return Err(WordError::Invalid(format!(
                "diam A = {} exceeds the stable-letter scale {}; the metrics differ",
                self.a.diameter(&sys.group),
                sys.t_unit
            )));
        }
        let nf = evaluate(sys, f);
        if !self.is_member(&nf) {
            return Err(WordError::Invalid(
                "element lies outside the subgroup generated by G and tAt⁻¹".into(),
            ));
        }
        let alpha = nf.0.clone();
        let e_nf = evaluate(sys, &Word::empty());
        type Entry = (Rat, Word<TLetter>);
        let mut dp: BTreeMap<NormalForm<TLetter>, Entry> =
            BTreeMap::from([(e_nf.clone(), (Rat::zero(), Word::empty()))]);
        let mut candidates = 0usize;
        for i in 1..=alpha.len() {
            let choices: Vec<(TLetter, Rat)> = match *alpha.at(i) {
                t @ TLetter::T(_) => vec![(t, Rat::zero())],
                TLetter::G(g) => (0..sys.group.order())
                    .map(|x| (TLetter::G(x), sys.group.d(g, x)))
                    .collect(),
            };
            let mut next: BTreeMap<NormalForm<TLetter>, Entry> = BTreeMap::new();
            for (nfz, (cost, wz)) in &dp {
                for (l, c) in &choices {
                    candidates += 1;
                    let key = evaluate(sys, &nfz.0.concat(&Word::new(vec![l.clone()])));
                    let entry = (*cost + *c, wz.concat(&Word::new(vec![l.clone()])));
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
        }
        let (value, zeta) = dp
            .get(&e_nf)
            .cloned()
            .ok_or_else(|| WordError::Invalid("no trivial rigid companion exists".into()))?;
        Ok(GraevResult { value, alpha, zeta, candidates, strategy: "rigid-enumeration".into() })
    }

    /// The subgroup `A` as a standalone finite metric group (the factor
    /// `tAt⁻¹` of the abstract free product, metrized by conjugation
    /// invariance).
    pub fn a_group(&self) -> FiniteMetricGroup {
        let g = &self.ambient.group;
        let mem = &self.a.members;
        let pos = |x: usize| mem.iter().position(|&m| m == x).expect("A is closed");
        let elements: Vec<String> = mem.iter().map(|&m| g.elements[m].clone()).collect();
        let table: Vec<Vec<usize>> =
            mem.iter().map(|&x| mem.iter().map(|&y| pos(g.mul(x, y))).collect()).collect();
        let dist: Vec<Vec<Rat>> =
            mem.iter().map(|&x| mem.iter().map(|&y| g.d(x, y)).collect()).collect();
        FiniteMetricGroup::new(format!("{}-conj", self.a.name), elements, table, dist)
            .expect("a closed subgroup is a group")
    }

    /// The abstract free product `G * tAt⁻¹` as a two-factor system with
    /// trivial amalgamation.
    pub fn free_product_system(&self) -> AmalgamSystem {
        AmalgamSystem::free_product(vec![self.ambient.group.clone(), self.a_group()])
            .expect("two valid factors")
    }

    /// Translate a subgroup element into the abstract free product: blocks
    /// `t ⌢ a ⌢ t⁻¹` become single second-factor letters.
    pub fn as_free_product(&self, f: &NormalForm<TLetter>) -> Result<NormalForm<AmLetter>, WordError> {
        if !self.is_member(f) {
            return Err(WordError::Invalid("not a subgroup element".into()));
        }
        let fp = self.free_product_system();
        let w = &f.0;
        let mut letters = Vec::new();
        let mut i = 1;
        while i <= w.len() {
            match *w.at(i) {
                TLetter::G(g) => {
                    letters.push(fp.letter(0, g));
                    i += 1;
                }
                TLetter::T(_) => {
                    let TLetter::G(a) = *w.at(i + 1) else { unreachable!("member shape") };
                    let j = self.a.members.iter().position(|&m| m == a).expect("member shape");
                    letters.push(fp.letter(1, j));
                    i += 3;
                }
            }
        }
        Ok(evaluate(&fp, &Word::new(letters)))
    }

    /// Translate an abstract free-product word back into `G * ⟨t⟩` letters.
    pub fn from_free_product(&self, w: &Word<AmLetter>) -> Word<TLetter> {
        let fp = self.free_product_system();
        let mut letters = Vec::new();
        for l in w.letters() {
            match *l {
                AmLetter::Base(_) => {}
                AmLetter::Fac(0, g) => letters.push(TLetter::G(g)),
                AmLetter::Fac(1, j) => {
                    let a = self.a.members[j];
                    letters.push(TLetter::T(1));
                    letters.push(TLetter::G(a));
                    letters.push(TLetter::T(-1));
                }
                AmLetter::Fac(..) => unreachable!("two factors"),
            }
        }
        let _ = fp;
        Word::new(letters)
    }

    /// The intrinsic Graev norm of the abstract free product `G * tAt⁻¹`.
    pub fn free_product_norm(&self, f: &NormalForm<TLetter>) -> Result<GraevResult<AmLetter>, WordError> {
        let fp = self.free_product_system();
        let image = self.as_free_product(f)?;
        Ok(product::graev_norm(&fp, &image))
    }
}

/// Build a structure tree for a hereditary word: repeatedly extract an
/// innermost interval spanned by a cancelling `t^{±1} … t^{∓1}` pair with
/// `G`-interior, collapse it, and re-inflate the recursively built tree.
/// The first (leftmost) qualifying interval is taken, which makes the
/// construction deterministic.
pub fn build_structure_tree(
    sys: &StableAlphabet,
    zeta: &Word<TLetter>,
) -> Result<EvalTree, WordError> {
    if !is_hereditary_word(sys, zeta) {
        return Err(WordError::Invalid("structure trees exist for hereditary words only".into()));
    }
    build_tree_rec(sys, zeta)
}

fn build_tree_rec(sys: &StableAlphabet, zeta: &Word<TLetter>) -> Result<EvalTree, WordError> {
    let n = zeta.len();
    let tpos: Vec<(usize, i64)> = (1..=n)
        .filter_map(|i| match *zeta.at(i) {
            TLetter::T(k) => Some((i, k)),
            _ => None,
        })
        .collect();
    if tpos.is_empty() {
        return Ok(EvalTree::root_only(n));
    }
    // Innermost cancelling interval: consecutive stable letters of opposite
    // sign whose span evaluates to the identity.
    let (lo, hi) = tpos
        .windows(2)
        .find_map(|w| {
            let ((p, sp), (q, sq)) = (w[0], w[1]);
            (sp == -sq && is_trivial(sys, &zeta.subword(&IndexSet::interval(p, q))))
                .then_some((p, q))
        })
        .ok_or_else(|| {
            WordError::Invalid("no cancelling stable-letter interval in a trivial word".into())
        })?;
    let m = hi - lo + 1;
    if m == n {
        let mut t = EvalTree::root_only(n);
        t.add_child(0, (1, n));
        return Ok(t);
    }
    let delta = Word::new(
        zeta.letters()
            .iter()
            .enumerate()
            .filter(|(i0, _)| {
                let i = i0 + 1;
                !(lo..=hi).contains(&i)
            })
            .map(|(_, l)| l.clone())
            .collect(),
    );
    let sub = build_tree_rec(sys, &delta)?;
    // Re-inflate: intervals entirely before the cut stay, intervals spanning
    // the cut stretch by m, intervals at or beyond it shift by m. The root
    // always covers the full word.
    let mut out = sub.clone();
    for (idx, node) in out.nodes.iter_mut().enumerate() {
        let (jlo, jhi) = node.interval;
        node.interval = if idx == 0 {
            (1, n)
        } else if jhi < lo {
            (jlo, jhi)
        } else if jlo < lo {
            (jlo, jhi + m)
        } else {
            (jlo + m, jhi + m)
        };
    }
    // Attach the extracted interval: to the root when it touches either end
    // of the word, otherwise to the deepest collapsed interval spanning the
    // cut position.
    let parent = if lo == 1 || hi == n {
        0
    } else {
        (0..sub.nodes.len())
            .filter(|&s| {
                let (jlo, jhi) = sub.nodes[s].interval;
                jlo < lo && lo <= jhi
            })
            .max_by_key(|&s| sub.height(s))
            .unwrap_or(0)
    };
    out.add_child(parent, (lo, hi));
    Ok(out)
}

/// Check every condition of the structure-tree definition separately.
pub fn validate_structure_tree(
    sys: &StableAlphabet,
    zeta: &Word<TLetter>,
    tree: &EvalTree,
) -> CheckReport {
    let n = zeta.len();
    if !is_hereditary_word(sys, zeta) {
        return CheckReport::fail("the word is not hereditary".into());
    }
    if tree.nodes[0].interval != (1, n) {
        return CheckReport::fail("root interval must cover the word".into());
    }
    for s in 0..tree.len() {
        let interval = tree.interval_set(s);
        if !is_trivial(sys, &zeta.subword(&interval)) {
            return CheckReport::fail(format!("interval {interval} does not evaluate to e"));
        }
        if s != 0 {
            let (a, b) = (zeta.at(interval.m()), zeta.at(interval.mm()));
            let ok = matches!((a, b), (TLetter::T(p), TLetter::T(q)) if *p == -*q);
            if !ok {
                return CheckReport::fail(format!(
                    "endpoints of {interval} are not opposite stable letters"
                ));
            }
        }
        let rs = tree.residual(s);
        for i in rs.iter() {
            let endpoint = s != 0 && (i == interval.m() || i == interval.mm());
            if !endpoint && !matches!(zeta.at(i), TLetter::G(_)) {
                return CheckReport::fail(format!(
                    "interior residual position {i} of node {s} is not a G-letter"
                ));
            }
        }
    }
    for s in 0..tree.len() {
        for s2 in 0..tree.len() {
            if s == s2 {
                continue;
            }
            let (i1, i2) = (tree.interval_set(s), tree.interval_set(s2));
            if tree.height(s) <= tree.height(s2) && i1.intersects(&i2) && !tree.is_descendant(s2, s)
            {
                return CheckReport::fail(format!(
                    "intervals of nodes {s} and {s2} overlap without nesting"
                ));
            }
        }
        if let Some(p) = tree.nodes[s].parent {
            if p != 0 {
                let (ip, is) = (tree.interval_set(p), tree.interval_set(s));
                if !(ip.m() < is.m() && is.mm() < ip.mm()) {
                    return CheckReport::fail(format!(
                        "child {s} is not strictly inside its non-root parent {p}"
                    ));
                }
            }
        }
    }
    CheckReport::pass()
}

/// The canonical rigid companion of an alternating subword: identities at
/// the `G`-positions are symmetrized into the `α`-letters with one position
/// per scope collecting the product of the remaining inverses; stable-letter
/// positions repeat `α`. Handles both orientations (`t … t⁻¹` blocks with
/// outer `G`-segments, and `t⁻¹ … t` blocks with outer `A`-segments) as well
/// as stable-letter-free subwords.
pub fn rigid_companion(
    sys: &StableAlphabet,
    w: &Word<TLetter>,
) -> Result<Word<TLetter>, WordError> {
    let n = w.len();
    if n == 0 {
        return Ok(Word::empty());
    }
    let tpos: Vec<(usize, i64)> = (1..=n)
        .filter_map(|i| match *w.at(i) {
            TLetter::T(k) => Some((i, k)),
            _ => None,
        })
        .collect();
    if tpos.iter().any(|&(_, k)| k.abs() != 1) {
        return Err(WordError::Invalid("stable letters must have unit exponents".into()));
    }
    if tpos.windows(2).any(|p| p[0].1 == p[1].1) {
        return Err(WordError::Invalid("stable letters must alternate in sign".into()));
    }
    if tpos.len() % 2 != 0 {
        return Err(WordError::Invalid("stable letters must cancel in pairs".into()));
    }
    let delta = Word::new(
        w.letters()
            .iter()
            .map(|l| match l {
                TLetter::T(_) => l.clone(),
                TLetter::G(_) => sys.identity(),
            })
            .collect(),
    );
    let mut tree = EvalTree::root_only(n);
    let mut xi = delta;
    if tpos.is_empty() {
        let list = IndexSet::interval(1, n);
        return symmetrize(sys, w, &xi, &tree, 0, &list, 1);
    }
    let pairs: Vec<(usize, usize)> =
        tpos.chunks(2).map(|c| (c[0].0, c[1].0)).collect();
    if tpos[0].1 == 1 {
        // Blocks t ⌢ (A-segment) ⌢ t⁻¹ separated by outer G-segments: one
        // symmetrization over the root residual, then one per block interior.
        let mut inner = Vec::new();
        for &(ik, ik2) in &pairs {
            let sk = tree.add_child(0, (ik, ik2));
            if ik2 > ik + 1 {
                inner.push((tree.add_child(sk, (ik + 1, ik2 - 1)), ik + 1));
            }
        }
        let r0 = tree.residual(0);
        if !r0.is_empty() {
            xi = symmetrize(sys, w, &xi, &tree, 0, &r0, r0.m())?;
        }
        for (node, j0) in inner {
            let rs = tree.residual(node);
            xi = symmetrize(sys, w, &xi, &tree, node, &rs, j0)?;
        }
    } else {
        // Mirror orientation: t⁻¹ ⌢ (G-segment) ⌢ t blocks inside outer
        // A-segments; the interior G-segments are symmetrized jointly, then
        // the interior A-segments blockwise, and the outer A-segments last.
        let i1 = pairs[0].0;
        let ilast = pairs.last().unwrap().1;
        let u = tree.add_child(0, (i1, ilast));
        let mut inner = Vec::new();
        let s_node = if ilast > i1 + 1 {
            let s_node = tree.add_child(u, (i1 + 1, ilast - 1));
            for k in 0..pairs.len() - 1 {
                let (up, next_down) = (pairs[k].1, pairs[k + 1].0);
                let sk = tree.add_child(s_node, (up, next_down));
                if next_down > up + 1 {
                    inner.push((tree.add_child(sk, (up + 1, next_down - 1)), up + 1));
                }
            }
            Some(s_node)
        } else {
            None
        };
        if let Some(s_node) = s_node {
            let rs = tree.residual(s_node);
            if !rs.is_empty() {
                xi = symmetrize(sys, w, &xi, &tree, s_node, &rs, rs.m())?;
            }
        }
        for (node, j0) in inner {
            let rs = tree.residual(node);
            xi = symmetrize(sys, w, &xi, &tree, node, &rs, j0)?;
        }
        let r0 = tree.residual(0);
        if !r0.is_empty() {
            xi = symmetrize(sys, w, &xi, &tree, 0, &r0, r0.m())?;
        }
    }
    debug_assert!(is_trivial(sys, &xi));
    Ok(xi)
}

/// Compare the restricted ambient metric with the intrinsic free-product
/// metric on a finite ball of `⟨G, tAt⁻¹⟩`. When `diam A ≤ scale` the two
/// agree on every element (equality is certified exhaustively on the ball);
/// otherwise a witness `a ∈ A` with `d(a, e) > scale` separates them:
/// the intrinsic norm of `a · (ta⁻¹t⁻¹)` is `2·d(a, e)` while the ambient
/// norm is at most `2·scale`.
pub fn check_diam_criterion(
    group: &FiniteMetricGroup,
    a: &Subgroup,
    scale: Rat,
) -> CheckReport {
    let ind = match InducedSystem::new(group.clone(), a.clone(), 3, scale) {
        Ok(s) => s,
        Err(e) => return CheckReport::fail(format!("invalid system: {e}")),
    };
    let diam = a.diameter(group);
    if diam <= scale {
        let ball = subgroup_ball(&ind, 2, 2);
        let fp = ind.free_product_system();
        let mut checked = 0usize;
        for nf in &ball {
            let word = ind.from_free_product(&nf.0);
            let restricted = match ind.induced_distance(&word) {
                Ok(r) => r.value,
                Err(e) => return CheckReport::fail(format!("restricted metric failed: {e}")),
            };
            let intrinsic = product::graev_norm(&fp, nf).value;
            if restricted != intrinsic {
                return CheckReport::fail(format!(
                    "metrics disagree on an element: restricted {restricted} vs intrinsic {intrinsic}"
                ));
            }
            checked += 1;
        }
        CheckReport::pass().note(format!(
            "diam A = {diam} ≤ {scale}: metrics agree on all {checked} ball elements"
        ))
    } else {
        // Witness with d(a, e) > scale (exists since the diameter is
        // two-sided invariant).
        let &w = a
            .members
            .iter()
            .max_by_key(|&&m| group.norm(m))
            .expect("A is nonempty");
        let winv = group.inv(w);
        let commutator = Word::new(vec![
            TLetter::G(w),
            TLetter::T(1),
            TLetter::G(winv),
            TLetter::T(-1),
        ]);
        let nf = evaluate(&ind.ambient, &commutator);
        let intrinsic = ind
            .free_product_norm(&nf)
            .map(|r| r.value)
            .unwrap_or_else(|_| Rat::zero());
        // The mixed companion a ⌢ e ⌢ a⁻¹ ⌢ e certifies the ambient bound.
        let companion = Word::new(vec![
            TLetter::G(w),
            TLetter::G(group.identity),
            TLetter::G(winv),
            TLetter::G(group.identity),
        ]);
        let ambient_bound = rho(&ind.ambient, &commutator, &companion);
        CheckReport::fail(format!(
            "diam A = {diam} > {scale}: witness {} has intrinsic norm {intrinsic} \
             but ambient norm at most {ambient_bound}",
            group.elements[w]
        ))
        .note(format!("gap: {intrinsic} > {ambient_bound}"))
    }
}

/// All elements of the abstract free product `G * tAt⁻¹` with at most
/// `max_blocks` conjugated-subgroup letters and `max_g` base-group letters,
/// as normal forms (the identity included).
pub fn subgroup_ball(
    ind: &InducedSystem,
    max_blocks: usize,
    max_g: usize,
) -> Vec<NormalForm<AmLetter>> {
    let fp = ind.free_product_system();
    let g_letters: Vec<AmLetter> = (0..ind.ambient.group.order())
        .filter(|&g| g != ind.ambient.group.identity)
        .map(|g| fp.letter(0, g))
        .collect();
    let a_id = ind
        .a
        .members
        .iter()
        .position(|&m| m == ind.ambient.group.identity)
        .expect("identity in A");
    let block_letters: Vec<AmLetter> = (0..ind.a.members.len())
        .filter(|&j| j != a_id)
        .map(|j| fp.letter(1, j))
        .collect();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<AmLetter>, Option<usize>, usize, usize)> =
        vec![(Vec::new(), None, 0, 0)];
    while let Some((word, last, blocks, gs)) = stack.pop() {
        out.push(NormalForm(Word::new(word.clone())));
        if last != Some(0) && gs < max_g {
            for l in &g_letters {
                let mut next = word.clone();
                next.push(l.clone());
                stack.push((next, Some(0), blocks, gs + 1));
            }
        }
        if last != Some(1) && blocks < max_blocks {
            for l in &block_letters {
                let mut next = word.clone();
                next.push(l.clone());
                stack.push((next, Some(1), blocks + 1, gs));
            }
        }
    }
    out
}

/// Exhaustive check of the cancellation estimate
/// `d(g₁⋯g_{n−1}, a₁g₁a₂⋯a_{n−1}g_{n−1}a_n) ≤ n` for subgroup letters of
/// norm at most one.
pub fn a_cancellation_check(group: &FiniteMetricGroup, a: &Subgroup, n: usize) -> CheckReport {
    assert!(n >= 2);
    let small: Vec<usize> =
        a.members.iter().copied().filter(|&m| group.norm(m) <= Rat::one()).collect();
    let mut gs = vec![0usize; n - 1];
    loop {
        let mut asel = vec![0usize; n];
        loop {
            let mut plain = group.identity;
            let mut dressed = group.identity;
            for i in 0..n - 1 {
                plain = group.mul(plain, gs[i]);
                dressed = group.mul(group.mul(dressed, small[asel[i]]), gs[i]);
            }
            dressed = group.mul(dressed, small[asel[n - 1]]);
            if group.d(plain, dressed) > Rat::int(n as i64) {
                return CheckReport::fail(format!(
                    "cancellation bound violated: d = {} > {n}",
                    group.d(plain, dressed)
                ));
            }
            // Odometer over the subgroup letters.
            let mut k = 0;
            loop {
                if k == n {
                    break;
                }
                asel[k] += 1;
                if asel[k] < small.len() {
                    break;
                }
                asel[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        let mut k = 0;
        loop {
            if k == n - 1 {
                return CheckReport::pass();
            }
            gs[k] += 1;
            if gs[k] < group.order() {
                break;
            }
            gs[k] = 0;
            k += 1;
        }
    }
}

/// Finite-separation version of closedness: every ball element outside
/// `⟨G, tAt⁻¹⟩` keeps the proof's positive margin
/// `ε = min(t_unit, min_i d(α(i), e), min d(α(i), A))` from every subgroup
/// element of the ball.
pub fn finite_separation_check(ind: &InducedSystem, max_len: usize) -> CheckReport {
    let sys = &ind.ambient;
    let letters = sys.all_letters();
    // Enumerate reduced words up to the length bound.
    let mut ball: Vec<NormalForm<TLetter>> = vec![evaluate(sys, &Word::empty())];
    let mut frontier = ball.clone();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for nf in &frontier {
            for l in &letters {
                if sys.is_identity(l) {
                    continue;
                }
                let cand = evaluate(sys, &nf.0.concat(&Word::new(vec![l.clone()])));
                if cand.len() == nf.len() + 1 && !ball.contains(&cand) && !next.contains(&cand) {
                    next.push(cand);
                }
            }
        }
        ball.extend(next.iter().cloned());
        frontier = next;
    }
    let (members, outsiders): (Vec<_>, Vec<_>) =
        ball.into_iter().partition(|nf| ind.is_member(nf));
    let mut checked = 0usize;
    for f in &outsiders {
        let eps1 = (1..=f.len()).map(|i| sys.dist(f.0.at(i), &sys.identity())).min();
        let eps2 = (1..=f.len())
            .filter_map(|i| match *f.0.at(i) {
                TLetter::G(g) if !ind.a.contains(g) => Some(
                    ind.a.members.iter().map(|&m| sys.group.d(g, m)).min().expect("A nonempty"),
                ),
                _ => None,
            })
            .min()
            .unwrap_or(sys.t_unit);
        let eps = [sys.t_unit, eps1.unwrap_or(sys.t_unit), eps2].into_iter().min().unwrap();
        for h in &members {
            let d = product::graev_distance(sys, f, h);
            checked += 1;
            if d < eps {
                return CheckReport::fail(format!(
                    "separation margin broken: distance {d} < ε = {eps}"
                ));
            }
        }
    }
    CheckReport::pass().note(format!(
        "{} outsiders kept their margin from {} subgroup elements ({checked} pairs)",
        outsiders.len(),
        members.len()
    ))
}

/// The data of an HNN extension `H = ⟨G, t | tat⁻¹ = φ(a), a ∈ A⟩` with an
/// isometric isomorphism `φ: A → B` and stable-letter scale `K`.
#[derive(Clone, Debug)]
pub struct HnnSystem {
    pub group: FiniteMetricGroup,
    pub a: Subgroup,
    pub b: Subgroup,
    phi_map: BTreeMap<usize, usize>,
    phi_inv_map: BTreeMap<usize, usize>,
    pub k: Rat,
}

impl HnnSystem {
    pub fn new(
        group: FiniteMetricGroup,
        a: Subgroup,
        b: Subgroup,
        phi_pairs: &[(usize, usize)],
        k: Rat,
    ) -> Result<Self, GroupError> {
        if k <= Rat::zero() {
            return Err(GroupError::Invalid("the scale K must be positive".into()));
        }
        let phi_map: BTreeMap<usize, usize> = phi_pairs.iter().copied().collect();
        if phi_map.len() != a.members.len()
            || a.members.iter().any(|m| !phi_map.contains_key(m))
        {
            return Err(GroupError::Invalid("phi must be defined exactly on A".into()));
        }
        let mut phi_inv_map = BTreeMap::new();
        for (&x, &y) in &phi_map {
            if !b.contains(y) {
                return Err(GroupError::Invalid("phi must map into B".into()));
            }
            if phi_inv_map.insert(y, x).is_some() {
                return Err(GroupError::Invalid("phi must be injective".into()));
            }
        }
        if phi_inv_map.len() != b.members.len() {
            return Err(GroupError::Invalid("phi must be onto B".into()));
        }
        for &x in &a.members {
            for &y in &a.members {
                if phi_map[&group.mul(x, y)] != group.mul(phi_map[&x], phi_map[&y]) {
                    return Err(GroupError::Invalid("phi is not a homomorphism".into()));
                }
                if group.d(phi_map[&x], phi_map[&y]) != group.d(x, y) {
                    return Err(GroupError::Invalid("phi is not isometric".into()));
                }
            }
        }
        Ok(HnnSystem { group, a, b, phi_map, phi_inv_map, k })
    }

    pub fn phi(&self, a: usize) -> usize {
        self.phi_map[&a]
    }

    pub fn phi_inv(&self, b: usize) -> usize {
        self.phi_inv_map[&b]
    }

    /// Full report: isomorphism data plus the diameter hypothesis
    /// `diam A ≤ K` of the extension theorem.
    pub fn validate(&self) -> CheckReport {
        let diam = self.a.diameter(&self.group);
        if diam > self.k {
            return CheckReport::fail(format!(
                "diam A = {diam} exceeds K = {}; no metric extension is certified",
                self.k
            ));
        }
        CheckReport::pass().note(format!("diam A = {diam} ≤ K = {}", self.k))
    }
}

/// Construct the metrized HNN extension handle; requires `diam A ≤ K`.
pub fn hnn_construct(system: HnnSystem, t_cap: i64) -> Result<HnnGroup, GroupError> {
    if system.a.diameter(&system.group) > system.k {
        return Err(GroupError::Invalid(format!(
            "diam A = {} exceeds K = {}",
            system.a.diameter(&system.group),
            system.k
        )));
    }
    assert!(t_cap >= 1);
    Ok(HnnGroup { system, t_cap })
}

/// The metrized HNN extension: Britton normal forms for the group structure,
/// and distance queries through the pair-minimization dynamic program over
/// a capped stable-letter degree.
#[derive(Clone, Debug)]
pub struct HnnGroup {
    pub system: HnnSystem,
    pub t_cap: i64,
}

impl HnnGroup {
    /// The canonical (Britton) normal form: pinch-free with the `A`-part of
    /// every segment following a `t` (resp. the `B`-part following a `t⁻¹`)
    /// pushed left through the stable letter via the defining relation, so
    /// that segment equality of normal forms decides equality in `H`.
    pub fn normal_form(&self, w: &Word<TLetter>) -> Word<TLetter> {
        let g = &self.system.group;
        // Alternating representation: gs[0] t^{eps[0]} gs[1] t^{eps[1]} …
        // with unit exponents.
        let mut gs: Vec<usize> = vec![g.identity];
        let mut eps: Vec<i64> = Vec::new();
        let push_unit = |gs: &mut Vec<usize>, eps: &mut Vec<i64>, s: i64| {
            if let Some(&last) = eps.last() {
                if last == -s {
                    let top = *gs.last().unwrap();
                    let pinched = if s < 0 {
                        self.system.a.contains(top).then(|| self.system.phi(top))
                    } else {
                        self.system.b.contains(top).then(|| self.system.phi_inv(top))
                    };
                    if let Some(img) = pinched {
                        gs.pop();
                        eps.pop();
                        let l = gs.last_mut().unwrap();
                        *l = g.mul(*l, img);
                        return;
                    }
                }
            }
            eps.push(s);
            gs.push(g.identity);
        };
        let feed = |gs: &mut Vec<usize>, eps: &mut Vec<i64>, l: &TLetter| match *l {
            TLetter::G(x) => {
                let last = gs.last_mut().unwrap();
                *last = g.mul(*last, x);
            }
            TLetter::T(k) => {
                for _ in 0..k.abs() {
                    push_unit(gs, eps, k.signum());
                }
            }
        };
        for l in w.letters() {
            feed(&mut gs, &mut eps, l);
        }
        // Coset normalization with pinch re-reduction to a fixpoint.
        loop {
            for i in (0..eps.len()).rev() {
                let gi = gs[i + 1];
                let (sub, rep) = if eps[i] == 1 {
                    coset_decompose(g, &self.system.a, gi)
                } else {
                    coset_decompose(g, &self.system.b, gi)
                };
                if rep != gi {
                    let img = if eps[i] == 1 { self.system.phi(sub) } else { self.system.phi_inv(sub) };
                    gs[i + 1] = rep;
                    gs[i] = g.mul(gs[i], img);
                }
            }
            let pinch = (0..eps.len().saturating_sub(1)).find(|&i| {
                (eps[i] == 1 && eps[i + 1] == -1 && self.system.a.contains(gs[i + 1]))
                    || (eps[i] == -1 && eps[i + 1] == 1 && self.system.b.contains(gs[i + 1]))
            });
            match pinch {
                None => break,
                Some(i) => {
                    let img = if eps[i] == 1 {
                        self.system.phi(gs[i + 1])
                    } else {
                        self.system.phi_inv(gs[i + 1])
                    };
                    let merged = g.mul(g.mul(gs[i], img), gs[i + 2]);
                    gs.splice(i..=i + 2, [merged]);
                    eps.drain(i..=i + 1);
                }
            }
        }
        // Re-assemble, merging stable-letter runs.
        let mut letters: Vec<TLetter> = Vec::new();
        if gs[0] != g.identity {
            letters.push(TLetter::G(gs[0]));
        }
        let mut i = 0;
        while i < eps.len() {
            let mut k = eps[i];
            while i + 1 < eps.len() && gs[i + 1] == g.identity && eps[i + 1] == eps[i] {
                k += eps[i + 1];
                i += 1;
            }
            letters.push(TLetter::T(k));
            if gs[i + 1] != g.identity {
                letters.push(TLetter::G(gs[i + 1]));
            }
            i += 1;
        }
        Word::new(letters)
    }

    /// Do two words represent the same element of `H`?
    pub fn same_element(&self, x: &Word<TLetter>, y: &Word<TLetter>) -> bool {
        self.normal_form(x) == self.normal_form(y)
    }

    fn invert_word(&self, w: &Word<TLetter>) -> Word<TLetter> {
        let g = &self.system.group;
        Word::new(
            w.letters()
                .iter()
                .rev()
                .map(|l| match *l {
                    TLetter::G(x) => TLetter::G(g.inv(x)),
                    TLetter::T(k) => TLetter::T(-k),
                })
                .collect(),
        )
    }

    /// The norm `d̲(f, e)`: the minimum total letter cost over pairs of words
    /// `(α, ζ)` with `α̂ = f` and `ζ̂ = e` in `H`, multipliable letter by
    /// letter, with at most `max_len` letters and stable-letter degree at
    /// most the cap. Letter costs are `d` on `G` and `K·|m − n|` on `⟨t⟩`.
    /// This is the largest two-sided invariant pseudometric dominated by the
    /// letter costs and respecting the relation `tat⁻¹ = φ(a)`; the search
    /// space truncation makes the result an upper bound that is exact
    /// whenever a minimizing pair fits in the caps.
    pub fn norm(&self, f: &Word<TLetter>, max_len: usize) -> Result<GraevResult<TLetter>, WordError> {
        let g = &self.system.group;
        let target_nf = self.normal_form(f);
        if t_degree(&target_nf) > self.t_cap {
            return Err(WordError::Invalid(format!(
                "stable-letter degree {} exceeds the cap {}",
                t_degree(&target_nf),
                self.t_cap
            )));
        }
        let mut letters: Vec<TLetter> = (0..g.order()).map(TLetter::G).collect();
        for k in 1..=self.t_cap {
            letters.push(TLetter::T(k));
            letters.push(TLetter::T(-k));
        }
        let cost = |a: &TLetter, b: &TLetter| -> Option<Rat> {
            match (*a, *b) {
                (TLetter::G(x), TLetter::G(y)) => Some(g.d(x, y)),
                (TLetter::T(m), TLetter::T(n)) => Some(self.system.k * Rat::int((m - n).abs())),
                (TLetter::G(x), TLetter::T(k)) | (TLetter::T(k), TLetter::G(x)) => (x
                    == g.identity)
                    .then(|| self.system.k * Rat::int(k.abs())),
            }
        };
        let mut pairs = Vec::new();
        for x in &letters {
            for y in &letters {
                if let Some(c) = cost(x, y) {
                    pairs.push((x.clone(), y.clone(), c));
                }
            }
        }
        let empty = Word::empty();
        type Entry = (Rat, Word<TLetter>, Word<TLetter>);
        let mut dp: BTreeMap<(Word<TLetter>, Word<TLetter>), Entry> = BTreeMap::from([(
            (empty.clone(), empty.clone()),
            (Rat::zero(), Word::empty(), Word::empty()),
        )]);
        let target = (target_nf.clone(), empty.clone());
        let mut best: Option<Entry> = dp.get(&target).cloned();
        let mut candidates = 0usize;
        for _ in 0..max_len {
            let mut next: BTreeMap<(Word<TLetter>, Word<TLetter>), Entry> = BTreeMap::new();
            for ((na, nz), (c, wa, wz)) in &dp {
                if best.as_ref().is_some_and(|(b, _, _)| *c >= *b) {
                    continue;
                }
                for (x, y, pc) in &pairs {
                    candidates += 1;
                    let ka = self.normal_form(&na.concat(&Word::new(vec![x.clone()])));
                    let kz = self.normal_form(&nz.concat(&Word::new(vec![y.clone()])));
                    if t_degree(&ka) > self.t_cap || t_degree(&kz) > self.t_cap {
                        continue;
                    }
                    let entry = (
                        *c + *pc,
                        wa.concat(&Word::new(vec![x.clone()])),
                        wz.concat(&Word::new(vec![y.clone()])),
                    );
                    let key = (ka, kz);
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
        let (value, alpha, zeta) = best.ok_or_else(|| {
            WordError::Invalid("length bound too small to reach the element".into())
        })?;
        Ok(GraevResult {
            value,
            alpha,
            zeta,
            candidates,
            strategy: format!("hnn-pairs({max_len})"),
        })
    }

    /// `d̲(f, g) = ‖f g⁻¹‖` under the same truncation.
    pub fn distance(
        &self,
        f: &Word<TLetter>,
        g: &Word<TLetter>,
        max_len: usize,
    ) -> Result<GraevResult<TLetter>, WordError> {
        self.norm(&f.concat(&self.invert_word(g)), max_len)
    }
}

/// Decompose `g = s · r` with `s` in the subgroup and `r` the canonical
/// (minimal-index) representative of the coset `S·g`.
fn coset_decompose(g: &FiniteMetricGroup, s: &Subgroup, x: usize) -> (usize, usize) {
    let rep = s
        .members
        .iter()
        .map(|&a| g.mul(a, x))
        .min()
        .expect("subgroup is nonempty");
    let sub = g.mul(x, g.inv(rep));
    debug_assert!(s.contains(sub));
    debug_assert_eq!(g.mul(sub, rep), x);
    (sub, rep)
}

/// Necessary condition for extending `d` to a two-sided invariant metric
/// with `d'(t, e) = K`: the conjugation relation forces
/// `d'(a, φ(a)) ≤ 2K` for every `a ∈ A`.
pub fn hnn_necessary_condition<F: Fn(usize, usize) -> Rat>(
    system: &HnnSystem,
    d_prime: F,
) -> CheckReport {
    let bound = Rat::int(2) * system.k;
    let mut worst = Rat::zero();
    for &a in &system.a.members {
        let v = d_prime(a, system.phi(a));
        if v > bound {
            return CheckReport::fail(format!(
                "necessary condition broken: d'({}, φ) = {v} > 2K = {bound}",
                system.group.elements[a]
            ));
        }
        worst = worst.max(v);
    }
    CheckReport::pass().note(format!("sup d'(a, φ(a)) = {worst} ≤ 2K = {bound}"))
}
