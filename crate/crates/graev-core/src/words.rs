//! Index-set and word combinatorics shared by every other module.
//!
//! Positions in words are 1-based throughout, matching the interval notation
//! `[1, n]` used by all the reduction procedures. The empty word is admitted
//! and represents the identity.

use std::fmt;

/// A sorted, duplicate-free set of positive positions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(mut positions: Vec<usize>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        assert!(positions.first().is_none_or(|&p| p >= 1), "positions are 1-based");
        IndexSet(positions)
    }

    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// The interval `[lo, hi]` (inclusive); empty when `lo > hi`.
    pub fn interval(lo: usize, hi: usize) -> Self {
        IndexSet((lo..=hi).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Minimal element `m(F)`. Panics on the empty set.
    pub fn m(&self) -> usize {
        *self.0.first().expect("m(F) of empty set")
    }

    /// Maximal element `M(F)`. Panics on the empty set.
    pub fn mm(&self) -> usize {
        *self.0.last().expect("M(F) of empty set")
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Is this set a contiguous interval?
    pub fn is_interval(&self) -> bool {
        self.is_empty() || self.mm() - self.m() + 1 == self.len()
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        IndexSet::new(v)
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|i| !other.contains(*i)).collect())
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|i| other.contains(*i))
    }

    pub fn intersects(&self, other: &IndexSet) -> bool {
        self.0.iter().any(|i| other.contains(*i))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        IndexSet::new(iter.into_iter().collect())
    }
}

/// Decompose `F` into its maximal sub-intervals `I_1 < I_2 < ...` with
/// `F = ∪ I_k` and `M(I_k) + 1 < m(I_{k+1})`.
pub fn maximal_subintervals(f: &IndexSet) -> Vec<IndexSet> {
    let mut out = Vec::new();
    let mut run: Vec<usize> = Vec::new();
    for i in f.iter() {
        if let Some(&last) = run.last() {
            if i != last + 1 {
                out.push(IndexSet(std::mem::take(&mut run)));
            }
        }
        run.push(i);
    }
    if !run.is_empty() {
        out.push(IndexSet(run));
    }
    out
}

/// A finite word: an ordered sequence of letters, indexed from 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Word<L>(pub Vec<L>);

impl<L: Clone> Word<L> {
    pub fn new(letters: Vec<L>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letter at 1-based position `i`.
    pub fn at(&self, i: usize) -> &L {
        assert!(i >= 1 && i <= self.0.len(), "position {i} out of range 1..={}", self.0.len());
        &self.0[i - 1]
    }

    pub fn set(&mut self, i: usize, l: L) {
        assert!(i >= 1 && i <= self.0.len());
        self.0[i - 1] = l;
    }

    pub fn letters(&self) -> &[L] {
        &self.0
    }

    pub fn concat(&self, other: &Word<L>) -> Word<L> {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `w[F]`: the letters of `w` at the positions of `F`, in increasing order.
    pub fn subword(&self, f: &IndexSet) -> Word<L> {
        assert!(
            f.is_empty() || f.mm() <= self.len(),
            "index set {f} exceeds word length {}",
            self.len()
        );
        Word(f.iter().map(|i| self.at(i).clone()).collect())
    }
}

/// A label `l : [1,n] → Λ ∪ {0}`; `None` is the `0` label.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Label(pub Vec<Option<usize>>);

impl Label {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Label at 1-based position `i`.
    pub fn at(&self, i: usize) -> Option<usize> {
        self.0[i - 1]
    }

    pub fn set(&mut self, i: usize, v: Option<usize>) {
        self.0[i - 1] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subword_examples() {
        let w = Word::new(vec!["a", "b", "c"]);
        assert_eq!(w.subword(&IndexSet::new(vec![1, 3])), Word::new(vec!["a", "c"]));
        assert_eq!(w.subword(&IndexSet::empty()), Word::empty());
        let v = Word::new(vec!["g0", "t", "a1", "t-", "g1"]);
        assert_eq!(
            v.subword(&IndexSet::new(vec![2, 3, 4])),
            Word::new(vec!["t", "a1", "t-"])
        );
    }

    #[test]
    fn maximal_subintervals_examples() {
        assert_eq!(
            maximal_subintervals(&IndexSet::new(vec![1, 2, 3])),
            vec![IndexSet::new(vec![1, 2, 3])]
        );
        assert_eq!(
            maximal_subintervals(&IndexSet::new(vec![1, 2, 5, 6, 9])),
            vec![
                IndexSet::new(vec![1, 2]),
                IndexSet::new(vec![5, 6]),
                IndexSet::new(vec![9])
            ]
        );
        assert!(maximal_subintervals(&IndexSet::empty()).is_empty());
    }

    #[test]
    fn subword_full_range_roundtrip() {
        let w = Word::new(vec![1, 2, 3, 4]);
        assert_eq!(w.subword(&IndexSet::interval(1, 4)), w);
    }
}
