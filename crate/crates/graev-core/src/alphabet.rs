//! The letter alphabet abstraction shared by the word machinery.
//!
//! All reduction procedures operate on words over a union of factor groups
//! amalgamated over a common subgroup `A`. The two instantiations are the
//! finite [`crate::amalgam::AmalgamSystem`] and the stable-letter alphabet
//! `G ∪ ⟨t⟩` of [`crate::hnn`], whose infinite cyclic factor is handled
//! symbolically. Everything downstream (normal forms, evaluation trees,
//! transfers, symmetrization, symmetric-pair enumeration, the Graev norm)
//! is generic over this trait.

use std::fmt::Debug;
use std::hash::Hash;

use crate::rational::Rat;

/// A factor-tagged alphabet with the amalgam metric.
pub trait Alphabet {
    /// A letter: an element of some factor group of the amalgam.
    ///
    /// The `Ord` instance is the deterministic letter order used for
    /// canonical coset representatives and witness tie-breaking.
    type Letter: Clone + Eq + Ord + Hash + Debug;

    /// The identity letter `e` (the only letter shared by all factors when
    /// `A = {e}`).
    fn identity(&self) -> Self::Letter;

    /// `None` iff the letter lies in the common subgroup `A`; otherwise the
    /// index of the unique factor containing it.
    fn factor_of(&self, l: &Self::Letter) -> Option<usize>;

    /// Product of two multipliable letters (letters sharing a factor).
    /// Implementations may panic when the letters are not multipliable.
    fn multiply(&self, a: &Self::Letter, b: &Self::Letter) -> Self::Letter;

    fn inverse(&self, l: &Self::Letter) -> Self::Letter;

    /// The elements of the common subgroup `A`, as letters. Must be finite;
    /// this is what makes every infimum in the theory an attained minimum.
    fn base_elements(&self) -> Vec<Self::Letter>;

    /// Every letter of the union alphabet, in canonical order. Must be
    /// finite; this is the search space of the brute-force oracles.
    fn all_letters(&self) -> Vec<Self::Letter>;

    /// The amalgam metric between any two letters: the factor distance when
    /// they share a factor, otherwise the minimum over `a ∈ A` of
    /// `d(g1, a) + d(a, g2)`.
    fn dist(&self, a: &Self::Letter, b: &Self::Letter) -> Rat;

    fn display(&self, l: &Self::Letter) -> String;

    /// Letters lie in a common factor (both in `A`, either in `A`, or the
    /// same factor).
    fn multipliable(&self, a: &Self::Letter, b: &Self::Letter) -> bool {
        match (self.factor_of(a), self.factor_of(b)) {
            (None, _) | (_, None) => true,
            (Some(x), Some(y)) => x == y,
        }
    }

    fn in_base(&self, l: &Self::Letter) -> bool {
        self.factor_of(l).is_none()
    }

    fn is_identity(&self, l: &Self::Letter) -> bool {
        *l == self.identity()
    }

    /// d(g, A) = min over a in A of d(g, a).
    fn dist_to_base(&self, l: &Self::Letter) -> Rat {
        self.base_elements()
            .iter()
            .map(|a| self.dist(l, a))
            .min()
            .expect("A is nonempty")
    }
}
