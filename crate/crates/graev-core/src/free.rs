//! The Graev metric on the free group `F(X)` over a pointed metric space:
//! the symmetrized alphabet `X̄`, non-crossing matches, the words `w^θ`, the
//! match-minimum distance (interval dynamic program plus a full enumeration
//! oracle), and the ♯-map for free groups over metric groups.

use crate::group::{CheckReport, FiniteMetricGroup};
use crate::rational::Rat;
use crate::words::Word;

/// Default cap for full match enumeration (Motzkin growth).
pub const MATCH_ENUMERATION_BOUND: usize = 12;

/// A finite pointed metric space `(X, e, d)` with exact rational distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedMetricSpace {
    pub name: String,
    pub points: Vec<String>,
    /// Index of the basepoint `e`.
    pub basepoint: usize,
    /// `dist[i][j]` = d(points[i], points[j]).
    pub dist: Vec<Vec<Rat>>,
}

impl PointedMetricSpace {
    pub fn new(
        name: impl Into<String>,
        points: Vec<String>,
        basepoint: usize,
        dist: Vec<Vec<Rat>>,
    ) -> Self {
        PointedMetricSpace { name: name.into(), points, basepoint, dist }
    }

    /// The pointed space underlying a metric group: points are the group
    /// elements, the basepoint is the identity.
    pub fn of_group(g: &FiniteMetricGroup) -> Self {
        PointedMetricSpace {
            name: g.name.clone(),
            points: g.elements.clone(),
            basepoint: g.identity,
            dist: g.dist.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> Rat {
        self.dist[i][j]
    }

    pub fn point_index(&self, name: &str) -> Option<usize> {
        self.points.iter().position(|p| p == name)
    }

    /// Metric axioms and basepoint sanity.
    pub fn validate(&self) -> CheckReport {
        let n = self.len();
        if n == 0 {
            return CheckReport::fail("space must be nonempty".into());
        }
        if self.basepoint >= n {
            return CheckReport::fail("basepoint index out of range".into());
        }
        if self.dist.len() != n || self.dist.iter().any(|r| r.len() != n) {
            return CheckReport::fail("distance matrix must be n x n".into());
        }
        for i in 0..n {
            for j in 0..n {
                let dij = self.d(i, j);
                if (i == j) != dij.is_zero() {
                    return CheckReport::fail(format!(
                        "separation fails at ({}, {})",
                        self.points[i], self.points[j]
                    ));
                }
                if dij < Rat::zero() || dij != self.d(j, i) {
                    return CheckReport::fail(format!(
                        "symmetry/positivity fails at ({}, {})",
                        self.points[i], self.points[j]
                    ));
                }
                for k in 0..n {
                    if self.d(i, k) > dij + self.d(j, k) {
                        return CheckReport::fail(format!(
                            "triangle fails at ({}, {}, {})",
                            self.points[i], self.points[j], self.points[k]
                        ));
                    }
                }
            }
        }
        CheckReport::pass()
    }
}

/// A letter of the symmetrized alphabet `X̄ = X ∪ X⁻¹`: a point or a formal
/// inverse of a point. `e⁻¹` is normalized to `e`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FLetter {
    Point(usize),
    Inv(usize),
}

/// The symmetrized alphabet with the extended distance: the amalgam of
/// `(X, d)` and `(X⁻¹, d)` over the basepoint.
#[derive(Clone, Debug)]
pub struct SymmetrizedSpace {
    pub space: PointedMetricSpace,
}

impl SymmetrizedSpace {
    pub fn new(space: PointedMetricSpace) -> Self {
        SymmetrizedSpace { space }
    }

    pub fn e(&self) -> FLetter {
        FLetter::Point(self.space.basepoint)
    }

    /// Normalize `e⁻¹ = e`.
    pub fn letter(&self, l: FLetter) -> FLetter {
        match l {
            FLetter::Inv(i) if i == self.space.basepoint => FLetter::Point(i),
            other => other,
        }
    }

    pub fn inverse(&self, l: FLetter) -> FLetter {
        self.letter(match l {
            FLetter::Point(i) => FLetter::Inv(i),
            FLetter::Inv(i) => FLetter::Point(i),
        })
    }

    pub fn is_e(&self, l: FLetter) -> bool {
        self.letter(l) == self.e()
    }

    /// All `2|X| - 1` letters.
    pub fn letters(&self) -> Vec<FLetter> {
        let mut out: Vec<FLetter> = (0..self.space.len()).map(FLetter::Point).collect();
        out.extend(
            (0..self.space.len())
                .filter(|&i| i != self.space.basepoint)
                .map(FLetter::Inv),
        );
        out
    }

    /// The extended metric on `X̄`.
    pub fn d(&self, a: FLetter, b: FLetter) -> Rat {
        let e = self.space.basepoint;
        match (self.letter(a), self.letter(b)) {
            (FLetter::Point(i), FLetter::Point(j)) | (FLetter::Inv(i), FLetter::Inv(j)) => {
                self.space.d(i, j)
            }
            (FLetter::Point(i), FLetter::Inv(j)) | (FLetter::Inv(j), FLetter::Point(i)) => {
                self.space.d(i, e) + self.space.d(e, j)
            }
        }
    }

    pub fn display(&self, l: FLetter) -> String {
        match self.letter(l) {
            FLetter::Point(i) => self.space.points[i].clone(),
            FLetter::Inv(i) => format!("{}^-1", self.space.points[i]),
        }
    }

    /// Freely reduce: drop `e` letters and cancel adjacent formal inverses.
    pub fn reduce(&self, w: &Word<FLetter>) -> Word<FLetter> {
        let mut stack: Vec<FLetter> = Vec::new();
        for &l in w.letters() {
            let l = self.letter(l);
            if self.is_e(l) {
                continue;
            }
            if stack.last() == Some(&self.inverse(l)) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word::new(stack)
    }

    /// `f · g⁻¹`, freely reduced.
    pub fn mul_inv(&self, f: &Word<FLetter>, g: &Word<FLetter>) -> Word<FLetter> {
        let mut v = f.letters().to_vec();
        v.extend(g.letters().iter().rev().map(|&l| self.inverse(l)));
        self.reduce(&Word::new(v))
    }
}

/// Build `X̄` from `X`.
pub fn build_symmetrized_space(x: &PointedMetricSpace) -> SymmetrizedSpace {
    SymmetrizedSpace::new(x.clone())
}

/// A non-crossing involution `θ` of `[1, n]`, stored 1-based.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Match(pub Vec<usize>);

impl Match {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    /// Involution and non-crossing checks.
    pub fn is_valid(&self) -> bool {
        let n = self.len();
        let ok = (1..=n).all(|i| {
            let t = self.at(i);
            (1..=n).contains(&t) && self.at(t) == i
        });
        ok && !(1..=n).any(|i| {
            (i + 1..=n).any(|j| j < self.at(i) && self.at(i) < self.at(j))
        })
    }
}

impl std::fmt::Display for Match {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (k, t) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum FreeError {
    #[error("match enumeration bound exceeded: n = {0} > {MATCH_ENUMERATION_BOUND}")]
    BoundExceeded(usize),
    #[error("word length {0} does not match θ domain size {1}")]
    SizeMismatch(usize, usize),
    #[error("dynamic program and enumeration disagree: {0} vs {1}")]
    StrategyMismatch(Rat, Rat),
}

/// All matches on `[1, n]` in lexicographic order of the `θ` array; the count
/// is the `n`-th Motzkin number.
pub fn enumerate_matches(n: usize) -> Result<Vec<Match>, FreeError> {
    if n > MATCH_ENUMERATION_BOUND {
        return Err(FreeError::BoundExceeded(n));
    }
    let mut out = Vec::new();
    let mut theta = vec![0usize; n];
    fn rec(theta: &mut Vec<usize>, i: usize, out: &mut Vec<Match>) {
        let n = theta.len();
        let pos = (i..=n).find(|&p| p == 0 || theta[p - 1] == 0);
        let pos = match pos {
            Some(p) if p >= 1 && p <= n => p,
            _ => {
                out.push(Match(theta.clone()));
                return;
            }
        };
        // Fixed point first (lexicographically least), then pairings with
        // increasing partner; non-crossing is maintained by only pairing with
        // unassigned positions not separated by an assigned boundary.
        theta[pos - 1] = pos;
        rec(theta, pos + 1, out);
        theta[pos - 1] = 0;
        for j in pos + 1..=n {
            if theta[j - 1] != 0 {
                // Crossing any already-paired position is impossible here:
                // positions are filled left to right, so everything right of
                // `pos` is unassigned.
                break;
            }
            theta[pos - 1] = j;
            theta[j - 1] = pos;
            rec(theta, pos + 1, out);
            theta[pos - 1] = 0;
            theta[j - 1] = 0;
        }
    }
    if n == 0 {
        out.push(Match(vec![]));
    } else {
        rec(&mut theta, 1, &mut out);
    }
    // Filter to non-crossing (pairing left-to-right can still cross when an
    // enclosed region pairs outside; the explicit check keeps this correct
    // and the counts pin it to the Motzkin numbers).
    out.retain(Match::is_valid);
    out.sort();
    out.dedup();
    Ok(out)
}

/// The word `w^θ`: `e` at fixed points, `w(i)` when `θ(i) > i`, and the
/// formal inverse `w(θ(i))⁻¹` when `θ(i) < i`.
pub fn theta_word(
    sym: &SymmetrizedSpace,
    w: &Word<FLetter>,
    theta: &Match,
) -> Result<Word<FLetter>, FreeError> {
    if w.len() != theta.len() {
        return Err(FreeError::SizeMismatch(w.len(), theta.len()));
    }
    let mut out = Vec::with_capacity(w.len());
    for i in 1..=w.len() {
        let t = theta.at(i);
        out.push(if t == i {
            sym.e()
        } else if t > i {
            *w.at(i)
        } else {
            sym.inverse(*w.at(t))
        });
    }
    let result = Word::new(out);
    debug_assert!(sym.reduce(&result).is_empty(), "w^θ must be trivial in F(X)");
    Ok(result)
}

/// `ρ(u, v) = Σ d(u(i), v(i))` for words of equal length.
pub fn rho(sym: &SymmetrizedSpace, u: &Word<FLetter>, v: &Word<FLetter>) -> Rat {
    assert_eq!(u.len(), v.len(), "ρ needs words of equal length");
    (1..=u.len()).map(|i| sym.d(*u.at(i), *v.at(i))).sum()
}

/// Evaluation strategy for the match minimum.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    /// Interval dynamic program, O(n³).
    Dp,
    /// Full enumeration of all matches (Motzkin-many).
    Enumerate,
    /// Run both and require exact agreement.
    Both,
}

/// Result of a norm computation: the value and the lexicographically least
/// minimizing match.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormWitness {
    pub value: Rat,
    pub theta: Match,
}

fn dp_norm(sym: &SymmetrizedSpace, w: &Word<FLetter>) -> NormWitness {
    let n = w.len();
    // cost[i][j]: minimum over matches of [i+1, j] (0-based half-open on a
    // 1-based word: interval of positions i+1..=j), cost[i][i] = 0 (empty).
    let mut cost = vec![vec![Rat::zero(); n + 1]; n + 1];
    for len in 1..=n {
        for i in (1..=n - len + 1).rev() {
            let j = i + len - 1;
            // θ(i) = i: w^θ(i) = e, rest is [i+1, j].
            let mut m = sym.d(*w.at(i), sym.e()) + cost_of(&cost, i + 1, j);
            // θ(i) = k: w^θ(i) = w(i) (cost 0), w^θ(k) = w(i)⁻¹.
            for k in i + 1..=j {
                let c = sym.d(*w.at(k), sym.inverse(*w.at(i)))
                    + cost_of(&cost, i + 1, k - 1)
                    + cost_of(&cost, k + 1, j);
                if c < m {
                    m = c;
                }
            }
            set_cost(&mut cost, i, j, m);
        }
    }
    // Reconstruct the lexicographically least optimal θ greedily.
    let mut theta = vec![0usize; n];
    let mut stack = vec![(1usize, n)];
    while let Some((i, j)) = stack.pop() {
        if i > j {
            continue;
        }
        let target = cost_of(&cost, i, j);
        let fixed = sym.d(*w.at(i), sym.e()) + cost_of(&cost, i + 1, j);
        if fixed == target {
            theta[i - 1] = i;
            stack.push((i + 1, j));
            continue;
        }
        let k = (i + 1..=j)
            .find(|&k| {
                sym.d(*w.at(k), sym.inverse(*w.at(i)))
                    + cost_of(&cost, i + 1, k - 1)
                    + cost_of(&cost, k + 1, j)
                    == target
            })
            .expect("DP table inconsistent");
        theta[i - 1] = k;
        theta[k - 1] = i;
        stack.push((k + 1, j));
        stack.push((i + 1, k - 1));
    }
    NormWitness { value: cost_of(&cost, 1, n), theta: Match(theta) }
}

fn cost_of(cost: &[Vec<Rat>], i: usize, j: usize) -> Rat {
    if i > j {
        Rat::zero()
    } else {
        cost[i][j]
    }
}

fn set_cost(cost: &mut [Vec<Rat>], i: usize, j: usize, v: Rat) {
    cost[i][j] = v;
}

fn enum_norm(sym: &SymmetrizedSpace, w: &Word<FLetter>) -> Result<NormWitness, FreeError> {
    let matches = enumerate_matches(w.len())?;
    let mut best: Option<NormWitness> = None;
    for theta in matches {
        let v = rho(sym, w, &theta_word(sym, w, &theta)?);
        let better = match &best {
            None => true,
            Some(b) => v < b.value,
        };
        if better {
            best = Some(NormWitness { value: v, theta });
        }
    }
    Ok(best.expect("at least one match exists"))
}

/// The Graev norm `d̲(f, e)`: reduce `f` and minimize `ρ(w, w^θ)` over all
/// matches of `[1, |w|]`.
pub fn graev_norm_free(
    sym: &SymmetrizedSpace,
    f: &Word<FLetter>,
    strategy: Strategy,
) -> Result<NormWitness, FreeError> {
    let w = sym.reduce(f);
    if w.is_empty() {
        return Ok(NormWitness { value: Rat::zero(), theta: Match(vec![]) });
    }
    match strategy {
        Strategy::Dp => Ok(dp_norm(sym, &w)),
        Strategy::Enumerate => enum_norm(sym, &w),
        Strategy::Both => {
            let d = dp_norm(sym, &w);
            let e = enum_norm(sym, &w)?;
            if d.value != e.value {
                return Err(FreeError::StrategyMismatch(d.value, e.value));
            }
            debug_assert_eq!(d.theta, e.theta, "witness tie-breaking must agree");
            Ok(d)
        }
    }
}

/// The Graev distance `d̲(f, g) = d̲(f g⁻¹, e)`.
pub fn graev_distance_free(
    sym: &SymmetrizedSpace,
    f: &Word<FLetter>,
    g: &Word<FLetter>,
    strategy: Strategy,
) -> Result<Rat, FreeError> {
    Ok(graev_norm_free(sym, &sym.mul_inv(f, g), strategy)?.value)
}

/// The ♯-map for a free group over a metric group `G`: formal inverses are
/// replaced by group inverses; the length is unchanged.
pub fn sharp_word(g: &FiniteMetricGroup, u: &Word<FLetter>) -> Word<FLetter> {
    Word::new(
        u.letters()
            .iter()
            .map(|&l| match l {
                FLetter::Point(i) => FLetter::Point(i),
                FLetter::Inv(i) => FLetter::Point(g.inv(i)),
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use proptest::strategy::Strategy as _;

    use super::Strategy;

    /// X = {e, x, y} with d(x,e) = d(y,e) = 1, d(x,y) = 2.
    fn two_point_space() -> PointedMetricSpace {
        PointedMetricSpace::new(
            "X",
            vec!["e".into(), "x".into(), "y".into()],
            0,
            vec![
                vec![Rat::zero(), Rat::int(1), Rat::int(1)],
                vec![Rat::int(1), Rat::zero(), Rat::int(2)],
                vec![Rat::int(1), Rat::int(2), Rat::zero()],
            ],
        )
    }

    #[test]
    fn symmetrized_space_identities() {
        let x = two_point_space();
        assert!(x.validate().passed);
        let sym = build_symmetrized_space(&x);
        assert_eq!(sym.letters().len(), 2 * 3 - 1);
        let (px, py) = (FLetter::Point(1), FLetter::Point(2));
        assert_eq!(sym.d(px, sym.inverse(px)), Rat::int(2));
        assert_eq!(sym.d(sym.inverse(px), sym.inverse(py)), sym.d(px, py));
        assert_eq!(sym.d(px, sym.inverse(py)), Rat::int(2));
        // e^-1 = e.
        assert_eq!(sym.letter(FLetter::Inv(0)), sym.e());
        // Singleton space.
        let pt = PointedMetricSpace::new("pt", vec!["e".into()], 0, vec![vec![Rat::zero()]]);
        assert_eq!(build_symmetrized_space(&pt).letters().len(), 1);
    }

    #[test]
    fn match_counts_are_motzkin() {
        let motzkin = [1usize, 1, 2, 4, 9, 21, 51, 127, 323, 835, 2188];
        for (n, &m) in motzkin.iter().enumerate() {
            assert_eq!(enumerate_matches(n).unwrap().len(), m, "n = {n}");
        }
        assert!(enumerate_matches(MATCH_ENUMERATION_BOUND + 1).is_err());
    }

    #[test]
    fn matches_are_valid_and_sorted() {
        let ms = enumerate_matches(4).unwrap();
        assert!(ms.iter().all(Match::is_valid));
        assert!(ms.windows(2).all(|p| p[0] < p[1]));
        // n = 2: identity then swap.
        let ms = enumerate_matches(2).unwrap();
        assert_eq!(ms, vec![Match(vec![1, 2]), Match(vec![2, 1])]);
    }

    #[test]
    fn theta_word_cases() {
        let sym = build_symmetrized_space(&two_point_space());
        let (x, y) = (FLetter::Point(1), FLetter::Point(2));
        let w = Word::new(vec![x, y]);
        let id = Match(vec![1, 2]);
        assert_eq!(theta_word(&sym, &w, &id).unwrap(), Word::new(vec![sym.e(), sym.e()]));
        let swap = Match(vec![2, 1]);
        assert_eq!(theta_word(&sym, &w, &swap).unwrap(), Word::new(vec![x, sym.inverse(x)]));
        let w3 = Word::new(vec![x, y, FLetter::Point(2)]);
        let m3 = Match(vec![3, 2, 1]);
        assert_eq!(
            theta_word(&sym, &w3, &m3).unwrap(),
            Word::new(vec![x, sym.e(), sym.inverse(x)])
        );
        assert!(theta_word(&sym, &w, &m3).is_err());
    }

    #[test]
    fn graev_distance_examples() {
        let sym = build_symmetrized_space(&two_point_space());
        let (x, y) = (FLetter::Point(1), FLetter::Point(2));
        let f = Word::new(vec![x, sym.inverse(y)]);
        // d(f, f) = 0.
        assert_eq!(graev_distance_free(&sym, &f, &f, Strategy::Both).unwrap(), Rat::zero());
        // Extension property on a letter.
        assert_eq!(
            graev_distance_free(&sym, &Word::new(vec![x]), &Word::empty(), Strategy::Both)
                .unwrap(),
            Rat::int(1)
        );
        // d(x y^-1, e) = 2: identity match gives 1+1, swap gives 0+2.
        assert_eq!(
            graev_distance_free(&sym, &f, &Word::empty(), Strategy::Both).unwrap(),
            Rat::int(2)
        );
        // The witness is the lexicographically least minimizer: the identity.
        let w = graev_norm_free(&sym, &f, Strategy::Both).unwrap();
        assert_eq!(w.theta, Match(vec![1, 2]));
    }

    #[test]
    fn extension_property_all_letters() {
        let sym = build_symmetrized_space(&two_point_space());
        for a in sym.letters() {
            for b in sym.letters() {
                let f = Word::new(vec![a]);
                let g = Word::new(vec![b]);
                assert_eq!(
                    graev_distance_free(&sym, &f, &g, Strategy::Both).unwrap(),
                    sym.d(a, b),
                    "extension fails at ({}, {})",
                    sym.display(a),
                    sym.display(b)
                );
            }
        }
    }

    #[test]
    fn bi_invariance_short_words() {
        let sym = build_symmetrized_space(&two_point_space());
        let letters = sym.letters();
        let words: Vec<Word<FLetter>> = letters
            .iter()
            .flat_map(|&a| letters.iter().map(move |&b| Word::new(vec![a, b])))
            .collect();
        for h in &letters {
            for f1 in &words {
                for f2 in &words {
                    let d = graev_distance_free(&sym, f1, f2, Strategy::Dp).unwrap();
                    let hf1 = Word::new(vec![*h]).concat(f1);
                    let hf2 = Word::new(vec![*h]).concat(f2);
                    assert_eq!(graev_distance_free(&sym, &hf1, &hf2, Strategy::Dp).unwrap(), d);
                    let f1h = f1.concat(&Word::new(vec![*h]));
                    let f2h = f2.concat(&Word::new(vec![*h]));
                    assert_eq!(graev_distance_free(&sym, &f1h, &f2h, Strategy::Dp).unwrap(), d);
                }
            }
        }
    }

    #[test]
    fn sharp_map_examples() {
        let g = FiniteMetricGroup::cyclic(3, &[Rat::zero(), Rat::int(1), Rat::int(1)]);
        let b = FLetter::Point(1);
        let binv = FLetter::Inv(1);
        // Formal inverse of b becomes the group inverse b^2.
        assert_eq!(sharp_word(&g, &Word::new(vec![binv])), Word::new(vec![FLetter::Point(2)]));
        // Letters of X are unchanged.
        let u = Word::new(vec![b, FLetter::Point(2)]);
        assert_eq!(sharp_word(&g, &u), u);
        let v = Word::new(vec![b, FLetter::Inv(2)]);
        assert_eq!(sharp_word(&g, &v), Word::new(vec![b, FLetter::Point(1)]));
    }

    /// Evaluate a word over the symmetrized group alphabet in the group
    /// itself (formal inverses become group inverses).
    fn eval_in_group(g: &FiniteMetricGroup, w: &Word<FLetter>) -> usize {
        w.letters().iter().fold(g.identity, |acc, &l| match l {
            FLetter::Point(i) => g.mul(acc, i),
            FLetter::Inv(i) => g.mul(acc, g.inv(i)),
        })
    }

    #[test]
    fn sharp_preserves_evaluation() {
        // The ♯-map does not change the image under the evaluation
        // homomorphism F(G) -> G; in particular it maps the kernel into
        // itself.
        let g = FiniteMetricGroup::cyclic(3, &[Rat::zero(), Rat::int(1), Rat::int(1)]);
        let sym = build_symmetrized_space(&PointedMetricSpace::of_group(&g));
        let letters = sym.letters();
        for &h1 in &letters {
            for &h2 in &letters {
                for &h3 in &letters {
                    let h = Word::new(vec![h1, h2, h3]);
                    let s = sharp_word(&g, &h);
                    assert_eq!(s.len(), h.len());
                    assert_eq!(eval_in_group(&g, &s), eval_in_group(&g, &h));
                }
            }
        }
    }

    #[test]
    fn kernel_min_recovers_group_distance() {
        // min over short kernel words h of d(g h, e) in F(G) is d(g, e):
        // quotienting F(G) by the kernel of evaluation recovers the group
        // metric, and no kernel correction can go below it.
        let g = FiniteMetricGroup::cyclic(3, &[Rat::zero(), Rat::int(1), Rat::int(1)]);
        let sym = build_symmetrized_space(&PointedMetricSpace::of_group(&g));
        let letters = sym.letters();
        let mut kernel: Vec<Word<FLetter>> = vec![Word::empty()];
        for &h1 in &letters {
            for &h2 in &letters {
                kernel.push(Word::new(vec![h1, h2]));
                for &h3 in &letters {
                    kernel.push(Word::new(vec![h1, h2, h3]));
                }
            }
        }
        kernel.retain(|h| eval_in_group(&g, h) == g.identity);
        assert!(kernel.len() > 4);
        for x in 0..3 {
            let f = Word::new(vec![FLetter::Point(x)]);
            let best = kernel
                .iter()
                .map(|h| graev_norm_free(&sym, &f.concat(h), Strategy::Dp).unwrap().value)
                .min()
                .unwrap();
            assert_eq!(best, g.norm(x));
        }
    }

    #[test]
    fn sharp_inequality_counterexample_frozen() {
        // The naive expectation d(fh, e) >= d(fh♯, e) fails in general; this
        // pins the counterexample so the behaviour is documented.
        let g = FiniteMetricGroup::cyclic(3, &[Rat::zero(), Rat::int(1), Rat::int(1)]);
        let sym = build_symmetrized_space(&PointedMetricSpace::of_group(&g));
        let b = FLetter::Point(1);
        let fh = Word::new(vec![b, b, FLetter::Inv(2)]);
        let fh_sharp = sharp_word(&g, &fh);
        assert_eq!(graev_norm_free(&sym, &fh, Strategy::Both).unwrap().value, Rat::int(2));
        assert_eq!(graev_norm_free(&sym, &fh_sharp, Strategy::Both).unwrap().value, Rat::int(3));
    }

    /// Random metric on k+1 points via shortest-path closure of a random
    /// symmetric weight matrix with quarter-integer entries.
    fn arb_space(k: usize) -> impl proptest::strategy::Strategy<Value = PointedMetricSpace> {
        proptest::collection::vec(1i64..=8, k * (k + 1) / 2).prop_map(move |weights| {
            let n = k + 1;
            let mut d = vec![vec![Rat::zero(); n]; n];
            let mut it = weights.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    let w = Rat::new(it.next().unwrap(), 4);
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
            PointedMetricSpace::new(
                "R",
                (0..n).map(|i| if i == 0 { "e".into() } else { format!("p{i}") }).collect(),
                0,
                d,
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

        #[test]
        fn dp_agrees_with_enumeration(
            space in arb_space(2),
            raw in proptest::collection::vec((0usize..3, proptest::bool::ANY), 1..=6),
        ) {
            prop_assert!(space.validate().passed);
            let sym = build_symmetrized_space(&space);
            let w = Word::new(
                raw.into_iter()
                    .map(|(i, inv)| if inv { FLetter::Inv(i) } else { FLetter::Point(i) })
                    .collect(),
            );
            let both = graev_norm_free(&sym, &w, Strategy::Both);
            prop_assert!(both.is_ok(), "{:?}", both);
        }

        #[test]
        fn theta_words_are_trivial(
            raw in proptest::collection::vec((0usize..3, proptest::bool::ANY), 1..=6),
        ) {
            let sym = build_symmetrized_space(&two_point_space());
            let w = Word::new(
                raw.into_iter()
                    .map(|(i, inv)| if inv { FLetter::Inv(i) } else { FLetter::Point(i) })
                    .collect(),
            );
            for theta in enumerate_matches(w.len()).unwrap() {
                let wt = theta_word(&sym, &w, &theta).unwrap();
                prop_assert!(sym.reduce(&wt).is_empty());
            }
        }

        #[test]
        fn triangle_inequality_random(
            space in arb_space(2),
            raw in proptest::collection::vec((0usize..3, proptest::bool::ANY), 3..=9),
        ) {
            let sym = build_symmetrized_space(&space);
            let letters: Vec<FLetter> = raw
                .into_iter()
                .map(|(i, inv)| if inv { FLetter::Inv(i) } else { FLetter::Point(i) })
                .collect();
            let third = letters.len() / 3;
            let f = Word::new(letters[..third].to_vec());
            let g = Word::new(letters[third..2 * third].to_vec());
            let h = Word::new(letters[2 * third..].to_vec());
            let dfg = graev_distance_free(&sym, &f, &g, Strategy::Dp).unwrap();
            let dgh = graev_distance_free(&sym, &g, &h, Strategy::Dp).unwrap();
            let dfh = graev_distance_free(&sym, &f, &h, Strategy::Dp).unwrap();
            prop_assert!(dfh <= dfg + dgh);
        }
    }
}
