//! Amalgam systems: families of finite metric groups sharing a common
//! subgroup `A` with agreeing metrics, the union alphabet, and the amalgam
//! metric `d`.

use std::collections::HashMap;

use crate::alphabet::Alphabet;
use crate::group::{CheckReport, FiniteMetricGroup, GroupError};
use crate::rational::Rat;

/// A letter of the union alphabet `G = ∪ G_λ`.
///
/// Elements of the common subgroup are represented by `Base` (their index in
/// `A`); all other elements carry their factor tag. The constructor
/// normalizes, so a `Fac` letter is never an `A`-image — this is what
/// identifies the factors exactly along `A`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum AmLetter {
    /// Index into the abstract subgroup `A`.
    Base(usize),
    /// `(factor index, element index)`, element outside the `A`-image.
    Fac(usize, usize),
}

/// A family of finite metric groups with a designated common subgroup.
#[derive(Clone, Debug)]
pub struct AmalgamSystem {
    pub factors: Vec<FiniteMetricGroup>,
    /// Size of the common subgroup `A`.
    pub a_size: usize,
    /// `embeddings[λ][a]` = element index of the `a`-th element of `A`
    /// inside factor `λ`. `embeddings[λ][0]` is the identity.
    pub embeddings: Vec<Vec<usize>>,
    /// Reverse maps: factor element index -> index in `A`.
    rev: Vec<HashMap<usize, usize>>,
    /// Cayley table of `A` itself (induced from factor 0).
    a_table: Vec<Vec<usize>>,
    a_inverse: Vec<usize>,
}

impl AmalgamSystem {
    /// Build a system. `embeddings[λ]` lists, for each element of `A`
    /// (index 0 is the identity of `A`), its image in factor `λ`.
    pub fn new(
        factors: Vec<FiniteMetricGroup>,
        embeddings: Vec<Vec<usize>>,
    ) -> Result<Self, GroupError> {
        if factors.is_empty() {
            return Err(GroupError::Invalid("system needs at least one factor".into()));
        }
        if embeddings.len() != factors.len() {
            return Err(GroupError::Invalid("one embedding per factor required".into()));
        }
        let a_size = embeddings[0].len();
        if a_size == 0 || embeddings.iter().any(|e| e.len() != a_size) {
            return Err(GroupError::Invalid("embeddings must share the size of A".into()));
        }
        for (lam, emb) in embeddings.iter().enumerate() {
            if emb[0] != factors[lam].identity {
                return Err(GroupError::Invalid(format!(
                    "embedding into factor {lam} must send index 0 to the identity"
                )));
            }
        }
        let mut rev = Vec::new();
        for (lam, emb) in embeddings.iter().enumerate() {
            let mut m = HashMap::new();
            for (a, &g) in emb.iter().enumerate() {
                if m.insert(g, a).is_some() {
                    return Err(GroupError::Invalid(format!(
                        "embedding into factor {lam} is not injective"
                    )));
                }
            }
            rev.push(m);
        }
        // Group structure of A induced from factor 0; closure required.
        let g0 = &factors[0];
        let mut a_table = vec![vec![0; a_size]; a_size];
        let mut a_inverse = vec![0; a_size];
        for a in 0..a_size {
            for b in 0..a_size {
                let p = g0.mul(embeddings[0][a], embeddings[0][b]);
                a_table[a][b] = *rev[0].get(&p).ok_or_else(|| {
                    GroupError::Invalid("A-image not closed under product in factor 0".into())
                })?;
            }
            a_inverse[a] = *rev[0].get(&g0.inv(embeddings[0][a])).ok_or_else(|| {
                GroupError::Invalid("A-image not closed under inverse in factor 0".into())
            })?;
        }
        Ok(AmalgamSystem { factors, a_size, embeddings, rev, a_table, a_inverse })
    }

    /// A free product: every factor shares only the identity.
    pub fn free_product(factors: Vec<FiniteMetricGroup>) -> Result<Self, GroupError> {
        let embeddings = factors.iter().map(|f| vec![f.identity]).collect();
        AmalgamSystem::new(factors, embeddings)
    }

    /// Normalize a factor element to a letter.
    pub fn letter(&self, factor: usize, element: usize) -> AmLetter {
        match self.rev[factor].get(&element) {
            Some(&a) => AmLetter::Base(a),
            None => AmLetter::Fac(factor, element),
        }
    }

    /// Resolve a letter into the given factor (letters in `A` live in every
    /// factor). Returns `None` when the letter lies in a different factor.
    pub fn in_factor(&self, l: &AmLetter, factor: usize) -> Option<usize> {
        match *l {
            AmLetter::Base(a) => Some(self.embeddings[factor][a]),
            AmLetter::Fac(f, g) => (f == factor).then_some(g),
        }
    }

    /// Every letter of the union alphabet, in canonical order.
    pub fn all_letters(&self) -> Vec<AmLetter> {
        let mut out: Vec<AmLetter> = (0..self.a_size).map(AmLetter::Base).collect();
        for (lam, f) in self.factors.iter().enumerate() {
            for g in 0..f.order() {
                if !self.rev[lam].contains_key(&g) {
                    out.push(AmLetter::Fac(lam, g));
                }
            }
        }
        out
    }

    /// The amalgam metric on the union alphabet.
    pub fn amalgam_metric(&self, g1: &AmLetter, g2: &AmLetter) -> Rat {
        self.dist(g1, g2)
    }

    /// Exhaustive structural validation: embedding monomorphisms, metric
    /// agreement on `A`, and metric axioms of the amalgam metric on the
    /// whole union alphabet.
    pub fn check(&self) -> CheckReport {
        for (lam, f) in self.factors.iter().enumerate() {
            // Embedding is a homomorphism (injectivity was enforced at build).
            for a in 0..self.a_size {
                for b in 0..self.a_size {
                    let lhs = f.mul(self.embeddings[lam][a], self.embeddings[lam][b]);
                    let rhs = self.embeddings[lam][self.a_table[a][b]];
                    if lhs != rhs {
                        return CheckReport::fail(format!(
                            "embedding into factor {lam} is not a homomorphism at A-indices ({a},{b})"
                        ));
                    }
                }
            }
            // Metrics agree on A with factor 0.
            for a in 0..self.a_size {
                for b in 0..self.a_size {
                    let d0 = self.factors[0].d(self.embeddings[0][a], self.embeddings[0][b]);
                    let dl = f.d(self.embeddings[lam][a], self.embeddings[lam][b]);
                    if d0 != dl {
                        return CheckReport::fail(format!(
                            "metrics disagree on A at indices ({a},{b}): {d0} in factor 0 vs {dl} in factor {lam}"
                        ));
                    }
                }
            }
        }
        // Amalgam metric axioms on the union alphabet.
        let letters = self.all_letters();
        for x in &letters {
            for y in &letters {
                let dxy = self.dist(x, y);
                if (x == y) != dxy.is_zero() {
                    return CheckReport::fail(format!(
                        "amalgam metric separation fails at ({}, {})",
                        self.display(x),
                        self.display(y)
                    ));
                }
                if dxy != self.dist(y, x) {
                    return CheckReport::fail(format!(
                        "amalgam metric symmetry fails at ({}, {})",
                        self.display(x),
                        self.display(y)
                    ));
                }
                for z in &letters {
                    if self.dist(x, z) > dxy + self.dist(y, z) {
                        return CheckReport::fail(format!(
                            "amalgam metric triangle fails at ({}, {}, {})",
                            self.display(x),
                            self.display(y),
                            self.display(z)
                        ));
                    }
                }
            }
        }
        CheckReport::pass()
    }
}

impl Alphabet for AmalgamSystem {
    type Letter = AmLetter;

    fn identity(&self) -> AmLetter {
        AmLetter::Base(0)
    }

    fn factor_of(&self, l: &AmLetter) -> Option<usize> {
        match *l {
            AmLetter::Base(_) => None,
            AmLetter::Fac(f, _) => Some(f),
        }
    }

    fn multiply(&self, a: &AmLetter, b: &AmLetter) -> AmLetter {
        match (*a, *b) {
            (AmLetter::Base(x), AmLetter::Base(y)) => AmLetter::Base(self.a_table[x][y]),
            _ => {
                let f = self
                    .factor_of(a)
                    .or_else(|| self.factor_of(b))
                    .expect("at least one letter outside A");
                let x = self.in_factor(a, f).expect("letters not multipliable");
                let y = self.in_factor(b, f).expect("letters not multipliable");
                self.letter(f, self.factors[f].mul(x, y))
            }
        }
    }

    fn inverse(&self, l: &AmLetter) -> AmLetter {
        match *l {
            AmLetter::Base(a) => AmLetter::Base(self.a_inverse[a]),
            AmLetter::Fac(f, g) => self.letter(f, self.factors[f].inv(g)),
        }
    }

    fn base_elements(&self) -> Vec<AmLetter> {
        (0..self.a_size).map(AmLetter::Base).collect()
    }

    fn all_letters(&self) -> Vec<AmLetter> {
        AmalgamSystem::all_letters(self)
    }

    fn dist(&self, a: &AmLetter, b: &AmLetter) -> Rat {
        match (self.factor_of(a), self.factor_of(b)) {
            (Some(f1), Some(f2)) if f1 != f2 => (0..self.a_size)
                .map(|x| {
                    let e1 = self.embeddings[f1][x];
                    let e2 = self.embeddings[f2][x];
                    self.factors[f1].d(self.in_factor(a, f1).unwrap(), e1)
                        + self.factors[f2].d(e2, self.in_factor(b, f2).unwrap())
                })
                .min()
                .unwrap(),
            (f1, f2) => {
                let f = f1.or(f2).unwrap_or(0);
                self.factors[f].d(self.in_factor(a, f).unwrap(), self.in_factor(b, f).unwrap())
            }
        }
    }

    fn display(&self, l: &AmLetter) -> String {
        match *l {
            AmLetter::Base(a) => self.factors[0].elements[self.embeddings[0][a]].clone(),
            AmLetter::Fac(f, g) => {
                if self.factors.len() == 1 {
                    self.factors[f].elements[g].clone()
                } else {
                    format!("{}.{}", self.factors[f].name, self.factors[f].elements[g])
                }
            }
        }
    }
}

/// Desk systems used across the test-suite and docs.
pub mod examples {
    use super::*;

    /// `Z/2 * Z/3` with unit metrics on both factors (`A = {e}`).
    pub fn z2_star_z3() -> AmalgamSystem {
        let z2 = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::int(1)]);
        let mut z3 = FiniteMetricGroup::cyclic(3, &[Rat::zero(), Rat::int(1), Rat::int(1)]);
        z3.name = "Z3".into();
        z3.elements = vec!["e".into(), "b".into(), "b2".into()];
        let mut z2 = z2;
        z2.name = "Z2".into();
        z2.elements = vec!["e".into(), "a".into()];
        AmalgamSystem::free_product(vec![z2, z3]).unwrap()
    }

    /// `(Z/2 x Z/2) *_{Z/2} Z/4`: Hamming metric on the first factor,
    /// norms (3/4, 1, 3/4) on `Z/4`; `A = Z/2` embedded as `{(0,0),(1,0)}`
    /// and `{0,2}`, with `d_A(a, e) = 1` on both sides.
    pub fn amalgamated_example() -> AmalgamSystem {
        let z2_unit = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::int(1)]);
        let g1 = z2_unit.direct_product(&z2_unit);
        let g2 = FiniteMetricGroup::cyclic(
            4,
            &[Rat::zero(), Rat::new(3, 4), Rat::int(1), Rat::new(3, 4)],
        );
        // (1,0) has index 2 in the product enumeration; 2 has index 2 in Z/4.
        let e1 = g1.identity;
        let a1 = g1.element_index("(1,0)").unwrap();
        AmalgamSystem::new(vec![g1, g2], vec![vec![e1, a1], vec![0, 2]]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn single_factor_always_valid() {
        let g = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::int(1)]);
        let sys = AmalgamSystem::free_product(vec![g]).unwrap();
        assert!(sys.check().passed);
    }

    #[test]
    fn desk_systems_are_valid() {
        assert!(z2_star_z3().check().passed);
        assert!(amalgamated_example().check().passed);
    }

    #[test]
    fn amalgam_metric_cross_factor_example() {
        let sys = amalgamated_example();
        // d((0,1), 1) = min{1 + 3/4, 2 + 3/4} = 7/4.
        let g1 = sys.letter(0, sys.factors[0].element_index("(0,1)").unwrap());
        let g2 = sys.letter(1, 1);
        assert_eq!(sys.amalgam_metric(&g1, &g2), Rat::new(7, 4));
        // Identity letters of different factors coincide at distance 0.
        let e1 = sys.letter(0, sys.factors[0].identity);
        let e2 = sys.letter(1, 0);
        assert_eq!(e1, e2);
        assert_eq!(sys.amalgam_metric(&e1, &e2), Rat::zero());
    }

    #[test]
    fn amalgam_metric_same_factor_is_factor_distance() {
        let sys = amalgamated_example();
        let x = sys.letter(1, 1);
        let y = sys.letter(1, 3);
        assert_eq!(sys.amalgam_metric(&x, &y), sys.factors[1].d(1, 3));
    }

    #[test]
    fn disagreeing_a_metrics_rejected() {
        let z2_unit = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::int(1)]);
        let g1 = z2_unit.direct_product(&z2_unit);
        // d(2,0) = 2 disagrees with d_A = 1 on the other side.
        let g2 = FiniteMetricGroup::cyclic(
            4,
            &[Rat::zero(), Rat::int(1), Rat::int(2), Rat::int(1)],
        );
        let e1 = g1.identity;
        let a1 = g1.element_index("(1,0)").unwrap();
        let sys = AmalgamSystem::new(vec![g1, g2], vec![vec![e1, a1], vec![0, 2]]).unwrap();
        let report = sys.check();
        assert!(!report.passed);
        assert!(report.details[0].contains("disagree"));
    }

    #[test]
    fn union_alphabet_size() {
        // |G1 ∪ G2| = 4 + 4 - 2 shared A-elements = 6.
        assert_eq!(amalgamated_example().all_letters().len(), 6);
        assert_eq!(z2_star_z3().all_letters().len(), 4);
    }
}
