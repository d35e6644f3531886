//! Word machinery over amalgam alphabets: normal forms, reduced-form
//! enumeration, alternating words, congruent intervals, balanced evaluation
//! trees, transfers, and symmetrization.
//!
//! Everything here is generic over [`Alphabet`], so the same code serves the
//! finite amalgam systems and the stable-letter alphabet `G ∪ ⟨t⟩`.

use std::fmt::Write as _;

use crate::alphabet::Alphabet;
use crate::group::CheckReport;
use crate::words::{maximal_subintervals, IndexSet, Label, Word};

/// Errors raised by the reduction machinery.
#[derive(Debug, Clone, thiserror::Error)]
pub enum WordError {
    #[error("word is not trivial (evaluates to a nonzero-length normal form)")]
    NotTrivial,
    #[error("word has no external letters")]
    NoExternalLetters,
    #[error("inadmissible transfer sequence: {0}")]
    BadTransfer(String),
    #[error("inadmissible symmetrization list: {0}")]
    BadSymmetrization(String),
    #[error("{0}")]
    Invalid(String),
}

/// The canonical reduced form of an amalgam element.
///
/// Reduced means no two adjacent letters are multipliable; the canonical
/// representative is chosen greedily from the left: at each position the
/// `A`-insertion making the letter least in the deterministic letter order.
/// The empty word represents the identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NormalForm<L>(pub Word<L>);

impl<L: Clone> NormalForm<L> {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn word(&self) -> &Word<L> {
        &self.0
    }
}

/// Multiply out and fully reduce a word; result has no identity letters and
/// no two adjacent multipliable letters.
pub fn reduce<A: Alphabet>(sys: &A, w: &Word<A::Letter>) -> Word<A::Letter> {
    let mut stack: Vec<A::Letter> = Vec::new();
    for l in w.letters() {
        let mut cur = l.clone();
        loop {
            if sys.is_identity(&cur) {
                break;
            }
            match stack.last() {
                Some(top) if sys.multipliable(top, &cur) => {
                    cur = sys.multiply(top, &cur);
                    stack.pop();
                }
                _ => {
                    stack.push(cur);
                    break;
                }
            }
        }
    }
    Word::new(stack)
}

/// Canonicalize a reduced word by greedy left-to-right `A`-insertions.
fn canonicalize<A: Alphabet>(sys: &A, w: Word<A::Letter>) -> Word<A::Letter> {
    let n = w.len();
    if n <= 1 {
        return w;
    }
    let base = sys.base_elements();
    let mut out = w;
    for i in 1..n {
        let best = base
            .iter()
            .min_by_key(|a| sys.multiply(out.at(i), a))
            .expect("A nonempty")
            .clone();
        let carried = sys.inverse(&best);
        out.set(i, sys.multiply(out.at(i), &best));
        out.set(i + 1, sys.multiply(&carried, out.at(i + 1)));
    }
    out
}

/// The evaluation map: multiply the letters of `w` in the amalgam and return
/// the canonical reduced form.
pub fn evaluate<A: Alphabet>(sys: &A, w: &Word<A::Letter>) -> NormalForm<A::Letter> {
    NormalForm(canonicalize(sys, reduce(sys, w)))
}

/// Does `w` evaluate to the identity?
pub fn is_trivial<A: Alphabet>(sys: &A, w: &Word<A::Letter>) -> bool {
    reduce(sys, w).is_empty()
}

/// No two adjacent letters multipliable.
pub fn is_reduced<A: Alphabet>(sys: &A, w: &Word<A::Letter>) -> bool {
    (1..w.len()).all(|i| !sys.multipliable(w.at(i), w.at(i + 1)))
}

/// Evaluate a subword and return `Some(a)` when the value lies in `A`
/// (`a` is then the letter), `None` otherwise.
pub fn eval_in_base<A: Alphabet>(sys: &A, w: &Word<A::Letter>, f: &IndexSet) -> Option<A::Letter> {
    let nf = reduce(sys, &w.subword(f));
    match nf.len() {
        0 => Some(sys.identity()),
        1 if sys.in_base(nf.at(1)) => Some(nf.at(1).clone()),
        _ => None,
    }
}

/// Group operations on normal forms.
pub fn nf_mul<A: Alphabet>(
    sys: &A,
    x: &NormalForm<A::Letter>,
    y: &NormalForm<A::Letter>,
) -> NormalForm<A::Letter> {
    evaluate(sys, &x.0.concat(&y.0))
}

pub fn nf_inv<A: Alphabet>(sys: &A, x: &NormalForm<A::Letter>) -> NormalForm<A::Letter> {
    let letters: Vec<A::Letter> = x.0.letters().iter().rev().map(|l| sys.inverse(l)).collect();
    evaluate(sys, &Word::new(letters))
}

/// All reduced words evaluating to `f`, produced from the canonical form by
/// the `A`-insertions `β(i) = a_{i-1}^{-1} α(i) a_i`; there are exactly
/// `|A|^(len-1)` of them.
pub fn enumerate_reduced_forms<A: Alphabet>(
    sys: &A,
    f: &NormalForm<A::Letter>,
) -> Vec<Word<A::Letter>> {
    let n = f.len();
    if n <= 1 {
        return vec![f.0.clone()];
    }
    let base = sys.base_elements();
    let mut forms = vec![f.0.clone()];
    for i in 1..n {
        let mut next = Vec::with_capacity(forms.len() * base.len());
        for w in &forms {
            for a in &base {
                let mut v = w.clone();
                v.set(i, sys.multiply(v.at(i), a));
                v.set(i + 1, sys.multiply(&sys.inverse(a), v.at(i + 1)));
                next.push(v);
            }
        }
        forms = next;
    }
    forms.sort();
    forms.dedup();
    forms
}

/// The increasing list of positions whose letters are outside `A`.
pub fn external_letters<A: Alphabet>(sys: &A, w: &Word<A::Letter>) -> IndexSet {
    (1..=w.len()).filter(|&i| !sys.in_base(w.at(i))).collect()
}

/// Alternating: consecutive external letters are non-multipliable.
pub fn is_alternating<A: Alphabet>(sys: &A, w: &Word<A::Letter>) -> bool {
    let ext = external_letters(sys, w);
    ext.as_slice()
        .windows(2)
        .all(|p| !sys.multipliable(w.at(p[0]), w.at(p[1])))
}

/// The canonical label: `0` iff the letter lies in `A`, else its factor.
pub fn canonical_label<A: Alphabet>(sys: &A, w: &Word<A::Letter>) -> Label {
    Label(w.letters().iter().map(|l| sys.factor_of(l)).collect())
}

/// Is the position set `F` `w`-multipliable (all letters pairwise in a
/// common factor)?
pub fn is_multipliable_set<A: Alphabet>(sys: &A, w: &Word<A::Letter>, f: &IndexSet) -> bool {
    let mut factor: Option<usize> = None;
    for i in f.iter() {
        if let Some(fac) = sys.factor_of(w.at(i)) {
            if *factor.get_or_insert(fac) != fac {
                return false;
            }
        }
    }
    true
}

/// Are the words letterwise multipliable?
pub fn words_multipliable<A: Alphabet>(
    sys: &A,
    x: &Word<A::Letter>,
    y: &Word<A::Letter>,
) -> bool {
    x.len() == y.len() && (1..=x.len()).all(|i| sys.multipliable(x.at(i), y.at(i)))
}

/// Find a congruent interval `I` of the trivial labeled word `(ζ, l)`:
/// `ζ̂[I] ∈ A`, `I` is `ζ`-multipliable, contains an external letter, and
/// satisfies the boundary label conditions. Implemented by the maximal
/// multipliable spans around external letters followed by the label-zero
/// enlargement.
pub fn find_congruent_interval<A: Alphabet>(
    sys: &A,
    zeta: &Word<A::Letter>,
    label: &Label,
) -> Result<IndexSet, WordError> {
    if !is_trivial(sys, zeta) {
        return Err(WordError::NotTrivial);
    }
    let ext = external_letters(sys, zeta);
    if ext.is_empty() {
        return Err(WordError::NoExternalLetters);
    }
    let n = zeta.len();
    let idx: Vec<usize> = ext.as_slice().to_vec();
    let m = idx.len();
    // Maximal multipliable spans: for the k-th external letter, the largest
    // j-range of external letters whose enclosing position interval is
    // ζ-multipliable.
    let mut candidates: Vec<IndexSet> = Vec::new();
    for k in 0..m {
        let mut mk = k;
        while mk > 0 && is_multipliable_set(sys, zeta, &IndexSet::interval(idx[mk - 1], idx[k])) {
            mk -= 1;
        }
        let mut bigm = k;
        while bigm + 1 < m
            && is_multipliable_set(sys, zeta, &IndexSet::interval(idx[k], idx[bigm + 1]))
        {
            bigm += 1;
        }
        let interval = IndexSet::interval(idx[mk], idx[bigm]);
        if !candidates.contains(&interval) {
            candidates.push(interval);
        }
    }
    let j = candidates
        .into_iter()
        .find(|i| eval_in_base(sys, zeta, i).is_some())
        .ok_or_else(|| {
            WordError::Invalid("no multipliable span evaluates into A (word not trivial?)".into())
        })?;
    // Enlarge along label-zero positions.
    let jl = (1..j.m())
        .rev()
        .find(|&i| label.at(i).is_some())
        .map_or(1, |i| i + 1);
    let jr = (j.mm() + 1..=n)
        .find(|&i| label.at(i).is_some())
        .map_or(n, |i| i - 1);
    Ok(IndexSet::interval(jl, jr))
}

/// A rooted tree of intervals certifying node-by-node evaluation into `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalTree {
    /// Node 0 is the root.
    pub nodes: Vec<TreeNode>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    /// Inclusive interval `I_t = [lo, hi]`.
    pub interval: (usize, usize),
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

impl EvalTree {
    /// The singleton tree `{∅}` with the full interval.
    pub fn root_only(n: usize) -> Self {
        EvalTree { nodes: vec![TreeNode { interval: (1, n), parent: None, children: vec![] }] }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn interval_set(&self, t: usize) -> IndexSet {
        let (lo, hi) = self.nodes[t].interval;
        IndexSet::interval(lo, hi)
    }

    /// Height: distance to the root.
    pub fn height(&self, mut t: usize) -> usize {
        let mut h = 0;
        while let Some(p) = self.nodes[t].parent {
            t = p;
            h += 1;
        }
        h
    }

    /// Is `s` a strict descendant of `t` (i.e. `s ≺ t`)?
    pub fn is_descendant(&self, s: usize, t: usize) -> bool {
        let mut cur = s;
        while let Some(p) = self.nodes[cur].parent {
            if p == t {
                return true;
            }
            cur = p;
        }
        false
    }

    /// `R_t = I_t ∖ ∪_{t' ≺ t} I_{t'}`.
    pub fn residual(&self, t: usize) -> IndexSet {
        let mut r = self.interval_set(t);
        for s in 0..self.nodes.len() {
            if self.is_descendant(s, t) {
                r = r.difference(&self.interval_set(s));
            }
        }
        r
    }

    /// Add a new child of `parent` and return its id.
    pub fn add_child(&mut self, parent: usize, interval: (usize, usize)) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode { interval, parent: Some(parent), children: vec![] });
        self.nodes[parent].children.push(id);
        id
    }

    /// Render as an indented listing of `I_t` and `R_t`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_node(0, 0, &mut out);
        out
    }

    fn render_node(&self, t: usize, depth: usize, out: &mut String) {
        let (lo, hi) = self.nodes[t].interval;
        let _ = writeln!(
            out,
            "{}node {}: I = [{},{}], R = {}",
            "  ".repeat(depth),
            if t == 0 { "root".to_string() } else { t.to_string() },
            lo,
            hi,
            self.residual(t)
        );
        for &c in &self.nodes[t].children {
            self.render_node(c, depth + 1, out);
        }
    }
}

/// Check every condition of the evaluation-tree definition separately;
/// `balanced` additionally checks the two non-degeneracy items.
pub fn validate_evaluation_tree<A: Alphabet>(
    sys: &A,
    zeta: &Word<A::Letter>,
    label: &Label,
    tree: &EvalTree,
    balanced: bool,
) -> CheckReport {
    let n = zeta.len();
    // Structural sanity of the node records themselves.
    for (t, node) in tree.nodes.iter().enumerate() {
        let (lo, hi) = node.interval;
        if lo < 1 || hi > n || lo > hi {
            return CheckReport::fail(format!("node {t} carries an invalid interval [{lo},{hi}]"));
        }
        for &c in &node.children {
            if tree.nodes[c].parent != Some(t) {
                return CheckReport::fail(format!("node {t} has inconsistent child link {c}"));
            }
        }
    }
    if tree.nodes[0].parent.is_some() {
        return CheckReport::fail("node 0 must be the root".into());
    }
    // (i) Root interval is [1, n].
    if tree.nodes[0].interval != (1, n) {
        return CheckReport::fail(format!(
            "item (i): root interval is {:?}, expected [1,{n}]",
            tree.nodes[0].interval
        ));
    }
    // (ii) Every node evaluates into A.
    for t in 0..tree.len() {
        if eval_in_base(sys, zeta, &tree.interval_set(t)).is_none() {
            return CheckReport::fail(format!("item (ii): node {t} does not evaluate into A"));
        }
    }
    // (iii) Endpoint label conditions for non-root nodes.
    for t in 1..tree.len() {
        let (lo, hi) = tree.nodes[t].interval;
        for p in [lo, hi] {
            if sys.in_base(zeta.at(p)) && label.at(p).is_some() {
                return CheckReport::fail(format!(
                    "item (iii): node {t} endpoint {p} lies in A but has nonzero label"
                ));
            }
        }
    }
    // (iv) Intersection order.
    for s in 0..tree.len() {
        for t in 0..tree.len() {
            if s != t
                && tree.height(t) <= tree.height(s)
                && tree.interval_set(s).intersects(&tree.interval_set(t))
                && !tree.is_descendant(s, t)
            {
                return CheckReport::fail(format!(
                    "item (iv): nodes {s} and {t} intersect without descent"
                ));
            }
        }
    }
    // (v) Strict inclusion below non-root nodes.
    for t in 1..tree.len() {
        for s in 0..tree.len() {
            if tree.is_descendant(s, t) {
                let (lo_t, hi_t) = tree.nodes[t].interval;
                let (lo_s, hi_s) = tree.nodes[s].interval;
                if !(lo_t < lo_s && hi_s < hi_t) {
                    return CheckReport::fail(format!(
                        "item (v): node {s} is not strictly inside node {t}"
                    ));
                }
            }
        }
    }
    // (vi) Residual sets are ζ-multipliable.
    for t in 0..tree.len() {
        if !is_multipliable_set(sys, zeta, &tree.residual(t)) {
            return CheckReport::fail(format!("item (vi): residual of node {t} not multipliable"));
        }
    }
    if balanced {
        // (vii) Every maximal sub-interval of every residual set carries an
        // external label (vacuous for the singleton tree).
        if tree.len() > 1 {
            for t in 0..tree.len() {
                for piece in maximal_subintervals(&tree.residual(t)) {
                    if piece.iter().all(|i| label.at(i).is_none()) {
                        return CheckReport::fail(format!(
                            "item (vii): residual piece {piece} of node {t} has only zero labels"
                        ));
                    }
                }
            }
        }
        // (viii) Positions adjacent to a child boundary carry nonzero labels.
        for t in 0..tree.len() {
            let rt = tree.residual(t);
            for s in 0..tree.len() {
                if tree.is_descendant(s, t) {
                    let (lo_s, hi_s) = tree.nodes[s].interval;
                    if lo_s >= 2 && rt.contains(lo_s - 1) && label.at(lo_s - 1).is_none() {
                        return CheckReport::fail(format!(
                            "item (viii): position {} left of node {s} has zero label",
                            lo_s - 1
                        ));
                    }
                    if hi_s < n && rt.contains(hi_s + 1) && label.at(hi_s + 1).is_none() {
                        return CheckReport::fail(format!(
                            "item (viii): position {} right of node {s} has zero label",
                            hi_s + 1
                        ));
                    }
                }
            }
        }
    }
    CheckReport::pass()
}

/// Is `tree` a slim evaluation tree for `ζ` (every node evaluates to `e`)?
pub fn is_slim_tree<A: Alphabet>(sys: &A, zeta: &Word<A::Letter>, tree: &EvalTree) -> bool {
    (0..tree.len()).all(|t| {
        eval_in_base(sys, zeta, &tree.interval_set(t))
            .is_some_and(|a| sys.is_identity(&a))
    })
}

/// Build a balanced evaluation tree for the trivial labeled word `(ζ, l)` by
/// the inductive collapse of congruent intervals.
pub fn build_balanced_evaluation_tree<A: Alphabet>(
    sys: &A,
    zeta: &Word<A::Letter>,
    label: &Label,
) -> Result<EvalTree, WordError> {
    if !is_trivial(sys, zeta) {
        return Err(WordError::NotTrivial);
    }
    let n = zeta.len();
    if n == 0 {
        return Err(WordError::Invalid("cannot build a tree for the empty word".into()));
    }
    if external_letters(sys, zeta).is_empty() {
        return Ok(EvalTree::root_only(n));
    }
    let i = find_congruent_interval(sys, zeta, label)?;
    let lambda0 = i
        .iter()
        .find_map(|p| (!sys.in_base(zeta.at(p))).then(|| label.at(p)))
        .flatten()
        .ok_or_else(|| WordError::Invalid("congruent interval has no external letter".into()))?;
    let p = i.len();
    if p == n {
        return Ok(EvalTree::root_only(n));
    }
    // Collapse I to a single A-letter carrying the label λ0 and recurse.
    let mi = i.m();
    let collapsed = eval_in_base(sys, zeta, &i)
        .ok_or_else(|| WordError::Invalid("congruent interval does not evaluate into A".into()))?;
    let mut xi_letters = Vec::with_capacity(n - p + 1);
    let mut xi_label = Vec::with_capacity(n - p + 1);
    for pos in 1..=n - p + 1 {
        if pos < mi {
            xi_letters.push(zeta.at(pos).clone());
            xi_label.push(label.at(pos));
        } else if pos == mi {
            xi_letters.push(collapsed.clone());
            xi_label.push(Some(lambda0));
        } else {
            xi_letters.push(zeta.at(pos + p - 1).clone());
            xi_label.push(label.at(pos + p - 1));
        }
    }
    let sub = build_balanced_evaluation_tree(sys, &Word::new(xi_letters), &Label(xi_label))?;
    // Re-inflate intervals: positions strictly after m(I) shift right by p-1;
    // intervals covering m(I) stretch by p-1 on the right.
    let mut tree = EvalTree { nodes: Vec::with_capacity(sub.len() + 1) };
    for node in &sub.nodes {
        let (lo, hi) = node.interval;
        let interval = if hi < mi {
            (lo, hi)
        } else if lo <= mi {
            (lo, hi + p - 1)
        } else {
            (lo + p - 1, hi + p - 1)
        };
        tree.nodes.push(TreeNode { interval, parent: node.parent, children: node.children.clone() });
    }
    // The smallest (deepest) node containing m(I) becomes the parent of the
    // new node carrying I itself.
    let t0 = (0..sub.len())
        .filter(|&t| {
            let (lo, hi) = sub.nodes[t].interval;
            lo <= mi && mi <= hi
        })
        .max_by_key(|&t| sub.height(t))
        .expect("the root contains m(I)");
    tree.add_child(t0, (i.m(), i.mm()));
    Ok(tree)
}

/// A single right `(a, i)`-transfer of a multipliable pair.
fn single_right_transfer<A: Alphabet>(
    sys: &A,
    pair: &mut (Word<A::Letter>, Word<A::Letter>),
    a: &A::Letter,
    i: usize,
) {
    let ainv = sys.inverse(a);
    for w in [&mut pair.0, &mut pair.1] {
        let at_i = sys.multiply(w.at(i), &ainv);
        let at_i1 = sys.multiply(a, w.at(i + 1));
        w.set(i, at_i);
        w.set(i + 1, at_i1);
    }
}

/// A single left `(a, i)`-transfer of a multipliable pair.
fn single_left_transfer<A: Alphabet>(
    sys: &A,
    pair: &mut (Word<A::Letter>, Word<A::Letter>),
    a: &A::Letter,
    i: usize,
) {
    let ainv = sys.inverse(a);
    for w in [&mut pair.0, &mut pair.1] {
        let at_i = sys.multiply(&ainv, w.at(i));
        let at_i1 = sys.multiply(w.at(i - 1), a);
        w.set(i, at_i);
        w.set(i - 1, at_i1);
    }
}

fn check_transfer_sequence<A: Alphabet>(
    sys: &A,
    zeta: &Word<A::Letter>,
    intervals: &[IndexSet],
    right: bool,
) -> Result<(), WordError> {
    let n = zeta.len();
    for (k, i) in intervals.iter().enumerate() {
        if i.is_empty() || !i.is_interval() || i.mm() > n {
            return Err(WordError::BadTransfer(format!("entry {k} is not an interval in [1,{n}]")));
        }
        if k + 1 < intervals.len() && i.mm() >= intervals[k + 1].m() {
            return Err(WordError::BadTransfer("intervals must be strictly increasing".into()));
        }
        if eval_in_base(sys, zeta, i).is_none() {
            return Err(WordError::BadTransfer(format!("entry {k} does not evaluate into A")));
        }
    }
    if let (Some(last), true) = (intervals.last(), right) {
        if last.mm() >= n {
            return Err(WordError::BadTransfer("M of the last interval must be < n".into()));
        }
    }
    if let (Some(first), false) = (intervals.first(), right) {
        if first.m() <= 1 {
            return Err(WordError::BadTransfer("m of the first interval must be > 1".into()));
        }
    }
    Ok(())
}

/// The iterated right `{I_k}`-transfer of a multipliable pair `(α, ζ)`.
pub fn right_transfer<A: Alphabet>(
    sys: &A,
    pair: (Word<A::Letter>, Word<A::Letter>),
    intervals: &[IndexSet],
) -> Result<(Word<A::Letter>, Word<A::Letter>), WordError> {
    check_transfer_sequence(sys, &pair.1, intervals, true)?;
    let mut cur = pair;
    for i in intervals {
        let a = eval_in_base(sys, &cur.1, i).ok_or_else(|| {
            WordError::BadTransfer("intermediate interval does not evaluate into A".into())
        })?;
        single_right_transfer(sys, &mut cur, &a, i.mm());
    }
    Ok(cur)
}

/// The iterated left `{I_k}`-transfer: transfers are applied in decreasing
/// order from the last interval to the first.
pub fn left_transfer<A: Alphabet>(
    sys: &A,
    pair: (Word<A::Letter>, Word<A::Letter>),
    intervals: &[IndexSet],
) -> Result<(Word<A::Letter>, Word<A::Letter>), WordError> {
    check_transfer_sequence(sys, &pair.1, intervals, false)?;
    let mut cur = pair;
    for i in intervals.iter().rev() {
        let a = eval_in_base(sys, &cur.1, i).ok_or_else(|| {
            WordError::BadTransfer("intermediate interval does not evaluate into A".into())
        })?;
        single_left_transfer(sys, &mut cur, &a, i.m());
    }
    Ok(cur)
}

/// Symmetrize `ζ` at node `t` of a slim tree: positions of the admissible
/// list take the `α`-letters, except `j0`, which collects the product of the
/// remaining inverses. The result is again slim for the same tree and never
/// increases `ρ`.
pub fn symmetrize<A: Alphabet>(
    sys: &A,
    alpha: &Word<A::Letter>,
    zeta: &Word<A::Letter>,
    tree: &EvalTree,
    t: usize,
    list: &IndexSet,
    j0: usize,
) -> Result<Word<A::Letter>, WordError> {
    let rt = tree.residual(t);
    if !list.is_subset_of(&rt) {
        return Err(WordError::BadSymmetrization(format!("list {list} is not inside R_t = {rt}")));
    }
    if !list.contains(j0) {
        return Err(WordError::BadSymmetrization(format!("j0 = {j0} is not in the list")));
    }
    for i in rt.iter() {
        if !sys.is_identity(zeta.at(i)) && !list.contains(i) {
            return Err(WordError::BadSymmetrization(format!(
                "position {i} has a non-identity letter but is not listed"
            )));
        }
    }
    if !is_multipliable_set(sys, alpha, list) {
        return Err(WordError::BadSymmetrization("list is not α-multipliable".into()));
    }
    if list.len() == 1 {
        return Ok(zeta.clone());
    }
    let idx: Vec<usize> = list.as_slice().to_vec();
    let k0 = idx.iter().position(|&i| i == j0).unwrap();
    let mut collected = sys.identity();
    for &i in idx[..k0].iter().rev() {
        collected = sys.multiply(&collected, &sys.inverse(alpha.at(i)));
    }
    for &i in idx[k0 + 1..].iter().rev() {
        collected = sys.multiply(&collected, &sys.inverse(alpha.at(i)));
    }
    let mut xi = zeta.clone();
    for &i in &idx {
        xi.set(i, if i == j0 { collected.clone() } else { alpha.at(i).clone() });
    }
    Ok(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::examples::{amalgamated_example, z2_star_z3};
    use crate::amalgam::AmLetter;

    fn a_letter() -> AmLetter {
        AmLetter::Fac(0, 1)
    }

    fn b_letter() -> AmLetter {
        AmLetter::Fac(1, 1)
    }

    #[test]
    fn evaluate_reduces() {
        let sys = z2_star_z3();
        let g = a_letter();
        let w = Word::new(vec![g, g]);
        assert!(is_trivial(&sys, &w));
        assert!(evaluate(&sys, &w).is_identity());
        let ab = Word::new(vec![a_letter(), b_letter()]);
        assert_eq!(evaluate(&sys, &ab).len(), 2);
    }

    #[test]
    fn reduced_forms_counts() {
        let sys = amalgamated_example();
        // A length-2 element has |A| = 2 reduced forms.
        let g1 = sys.letter(0, sys.factors[0].element_index("(0,1)").unwrap());
        let g2 = sys.letter(1, 1);
        let f = evaluate(&sys, &Word::new(vec![g1, g2]));
        assert_eq!(f.len(), 2);
        let forms = enumerate_reduced_forms(&sys, &f);
        assert_eq!(forms.len(), 2);
        for w in &forms {
            assert!(is_reduced(&sys, w));
            assert_eq!(evaluate(&sys, w), f);
        }
        // Single-letter elements have exactly one reduced form.
        let single = evaluate(&sys, &Word::new(vec![g1]));
        assert_eq!(enumerate_reduced_forms(&sys, &single).len(), 1);
    }

    #[test]
    fn reduced_forms_share_length_and_double_cosets() {
        let sys = amalgamated_example();
        let g1 = sys.letter(0, sys.factors[0].element_index("(0,1)").unwrap());
        let g2 = sys.letter(1, 1);
        let f = evaluate(&sys, &Word::new(vec![g1, g2]));
        let forms = enumerate_reduced_forms(&sys, &f);
        use crate::alphabet::Alphabet;
        for w in &forms {
            assert_eq!(w.len(), f.len());
            for i in 1..=w.len() {
                // A w(i) A = A f(i) A: w(i) = a * f(i) * a' for some a, a' in A.
                let hit = sys.base_elements().iter().any(|a| {
                    sys.base_elements().iter().any(|a2| {
                        sys.multiply(&sys.multiply(a, f.0.at(i)), a2) == *w.at(i)
                    })
                });
                assert!(hit, "double coset mismatch at position {i}");
            }
        }
    }

    #[test]
    fn alternating_examples() {
        let sys = z2_star_z3();
        let a = a_letter();
        let b = b_letter();
        let e = AmLetter::Base(0);
        assert!(is_alternating(&sys, &Word::new(vec![e, e])));
        assert!(is_alternating(&sys, &Word::new(vec![a, e, b])));
        assert!(!is_alternating(&sys, &Word::new(vec![a, e, a])));
        // Alternating with nonempty external list implies non-trivial.
        assert!(!is_trivial(&sys, &Word::new(vec![a, e, b])));
    }

    #[test]
    fn congruent_interval_examples() {
        let sys = z2_star_z3();
        let a = a_letter();
        let b = b_letter();
        let b2 = AmLetter::Fac(1, 2);
        let w = Word::new(vec![a, a]);
        let l = canonical_label(&sys, &w);
        assert_eq!(find_congruent_interval(&sys, &w, &l).unwrap(), IndexSet::interval(1, 2));
        // g1 h h^-1 g1^-1: the inner pair is the congruent interval.
        let w = Word::new(vec![a, b, b2, a]);
        let l = canonical_label(&sys, &w);
        assert_eq!(find_congruent_interval(&sys, &w, &l).unwrap(), IndexSet::interval(2, 3));
        // All letters in A: precondition violated.
        let w = Word::new(vec![AmLetter::Base(0)]);
        let l = canonical_label(&sys, &w);
        assert!(matches!(
            find_congruent_interval(&sys, &w, &l),
            Err(WordError::NoExternalLetters)
        ));
    }

    #[test]
    fn balanced_tree_roundtrip() {
        let sys = z2_star_z3();
        let a = a_letter();
        let b = b_letter();
        let b2 = AmLetter::Fac(1, 2);
        for w in [
            Word::new(vec![a, a]),
            Word::new(vec![a, b, b2, a]),
            Word::new(vec![b, a, a, b2]),
            Word::new(vec![a, b, b, b, a]),
            Word::new(vec![AmLetter::Base(0), AmLetter::Base(0)]),
        ] {
            assert!(is_trivial(&sys, &w), "test word must be trivial");
            let l = canonical_label(&sys, &w);
            let tree = build_balanced_evaluation_tree(&sys, &w, &l).unwrap();
            let report = validate_evaluation_tree(&sys, &w, &l, &tree, true);
            assert!(report.passed, "{}\n{}", report.render(), tree.render());
        }
    }

    #[test]
    fn tree_validation_rejects_bad_root() {
        let sys = z2_star_z3();
        let a = a_letter();
        let w = Word::new(vec![a, a]);
        let l = canonical_label(&sys, &w);
        let tree = EvalTree::root_only(1);
        assert!(!validate_evaluation_tree(&sys, &w, &l, &tree, false).passed);
    }

    #[test]
    fn transfer_single_interval() {
        let sys = amalgamated_example();
        // α = g1 ⌢ g2, ζ = a ⌢ a (A-letters), transfer {1} pushes a right.
        let g1 = sys.letter(0, sys.factors[0].element_index("(0,1)").unwrap());
        let g2 = sys.letter(1, 1);
        let a = AmLetter::Base(1);
        let ainv = sys.inverse(&a);
        let alpha = Word::new(vec![g1, g2]);
        let zeta = Word::new(vec![a, ainv]);
        assert!(is_trivial(&sys, &zeta));
        let (beta, xi) =
            right_transfer(&sys, (alpha.clone(), zeta.clone()), &[IndexSet::interval(1, 1)])
                .unwrap();
        // ξ̂[{1}] = e afterwards.
        assert!(sys.is_identity(&eval_in_base(&sys, &xi, &IndexSet::interval(1, 1)).unwrap()));
        assert_eq!(evaluate(&sys, &beta), evaluate(&sys, &alpha));
        assert!(is_trivial(&sys, &xi));
        // Empty interval list: unchanged.
        let (b2, x2) = right_transfer(&sys, (alpha.clone(), zeta.clone()), &[]).unwrap();
        assert_eq!((b2, x2), (alpha, zeta));
    }

    #[test]
    fn symmetrize_preserves_slimness() {
        let sys = z2_star_z3();
        let b = b_letter();
        let _b2 = AmLetter::Fac(1, 2);
        // α = b ⌢ b ⌢ b, ζ = e ⌢ e ⌢ e, symmetrize the whole root list.
        let alpha = Word::new(vec![b, b, b]);
        let zeta = Word::new(vec![AmLetter::Base(0); 3]);
        let tree = EvalTree::root_only(3);
        let list = IndexSet::interval(1, 3);
        let xi = symmetrize(&sys, &alpha, &zeta, &tree, 0, &list, 1).unwrap();
        assert!(is_trivial(&sys, &xi));
        assert!(is_slim_tree(&sys, &xi, &tree));
        // ξ(1) = b^-1 b^-1 = b, ξ(2) = ξ(3) = b.
        assert_eq!(xi, Word::new(vec![b, b, b]));
        // m = 1 returns ζ unchanged.
        let one = IndexSet::interval(2, 2);
        assert_eq!(symmetrize(&sys, &alpha, &zeta, &tree, 0, &one, 2).unwrap(), zeta);
    }
}
