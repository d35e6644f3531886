//! Finite groups presented by Cayley tables carrying exact rational
//! two-sided-invariant (tsi) metrics, subgroups, and factor metrics.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::rational::Rat;

/// Outcome of a structural validation: either everything passed, or the first
/// violation is described with witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub passed: bool,
    pub details: Vec<String>,
}

impl CheckReport {
    pub fn pass() -> Self {
        CheckReport { passed: true, details: Vec::new() }
    }

    pub fn fail(msg: String) -> Self {
        CheckReport { passed: false, details: vec![msg] }
    }

    pub fn note(mut self, msg: String) -> Self {
        self.details.push(msg);
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", if self.passed { "valid" } else { "INVALID" });
        for d in &self.details {
            let _ = writeln!(s, "  {d}");
        }
        s
    }
}

/// Errors raised by group and subgroup constructors.
#[derive(Debug, Clone, thiserror::Error)]
pub enum GroupError {
    #[error("{0}")]
    Invalid(String),
    #[error("subgroup is not normal: witness g={g}, h={h}")]
    NotNormal { g: String, h: String },
}

/// A finite group with named elements, full Cayley table, and an exact
/// rational tsi distance matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMetricGroup {
    pub name: String,
    pub elements: Vec<String>,
    /// `table[i][j]` = index of `elements[i] * elements[j]`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub inverse: Vec<usize>,
    /// `dist[i][j]` = d(elements[i], elements[j]).
    pub dist: Vec<Vec<Rat>>,
}

impl FiniteMetricGroup {
    /// Build from a Cayley table and distance matrix, locating the identity
    /// and inverse table; group and metric axioms are *not* checked here
    /// (use [`validate_group`] / [`validate_tsi_metric`]).
    pub fn new(
        name: impl Into<String>,
        elements: Vec<String>,
        table: Vec<Vec<usize>>,
        dist: Vec<Vec<Rat>>,
    ) -> Result<Self, GroupError> {
        let n = elements.len();
        if n == 0 {
            return Err(GroupError::Invalid("group must be nonempty".into()));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(GroupError::Invalid("Cayley table must be n x n".into()));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(GroupError::Invalid("Cayley table entry out of range".into()));
        }
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(GroupError::Invalid("distance matrix must be n x n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| GroupError::Invalid("no identity element in table".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| {
                    GroupError::Invalid(format!("element {} has no inverse", elements[g]))
                })?;
        }
        Ok(FiniteMetricGroup { name: name.into(), elements, table, identity, inverse, dist })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn d(&self, g: usize, h: usize) -> Rat {
        self.dist[g][h]
    }

    /// d(g, e): the norm of `g`.
    pub fn norm(&self, g: usize) -> Rat {
        self.dist[g][self.identity]
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    /// The cyclic group Z/n with elements `0..n-1` and the given norms
    /// (`norms[k]` = d(k, 0); `norms[0]` must be 0).
    pub fn cyclic(n: usize, norms: &[Rat]) -> Self {
        assert_eq!(norms.len(), n);
        let elements: Vec<String> = (0..n).map(|k| k.to_string()).collect();
        let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let dist: Vec<Vec<Rat>> =
            (0..n).map(|i| (0..n).map(|j| norms[(n + i - j) % n]).collect()).collect();
        FiniteMetricGroup::new(format!("Z{n}"), elements, table, dist).unwrap()
    }

    /// Direct product with the sum metric.
    pub fn direct_product(&self, other: &Self) -> Self {
        let n1 = self.order();
        let n2 = other.order();
        let idx = |a: usize, b: usize| a * n2 + b;
        let elements: Vec<String> = (0..n1)
            .flat_map(|a| (0..n2).map(move |b| (a, b)))
            .map(|(a, b)| format!("({},{})", self.elements[a], other.elements[b]))
            .collect();
        let mut table = vec![vec![0; n1 * n2]; n1 * n2];
        let mut dist = vec![vec![Rat::zero(); n1 * n2]; n1 * n2];
        for a1 in 0..n1 {
            for b1 in 0..n2 {
                for a2 in 0..n1 {
                    for b2 in 0..n2 {
                        table[idx(a1, b1)][idx(a2, b2)] = idx(self.mul(a1, a2), other.mul(b1, b2));
                        dist[idx(a1, b1)][idx(a2, b2)] = self.d(a1, a2) + other.d(b1, b2);
                    }
                }
            }
        }
        FiniteMetricGroup::new(
            format!("{}x{}", self.name, other.name),
            elements,
            table,
            dist,
        )
        .unwrap()
    }

    /// Rescale every distance by the positive factor `c`.
    pub fn rescaled(&self, c: Rat) -> Self {
        let mut g = self.clone();
        for row in &mut g.dist {
            for v in row.iter_mut() {
                *v = *v * c;
            }
        }
        g
    }
}

/// A subgroup given by its sorted element-index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    pub name: String,
    pub members: Vec<usize>,
}

impl Subgroup {
    /// Verify closure under product and inverse, and membership of the identity.
    pub fn new(
        name: impl Into<String>,
        group: &FiniteMetricGroup,
        mut members: Vec<usize>,
    ) -> Result<Self, GroupError> {
        members.sort_unstable();
        members.dedup();
        if !members.contains(&group.identity) {
            return Err(GroupError::Invalid("subgroup must contain the identity".into()));
        }
        let set: BTreeSet<usize> = members.iter().copied().collect();
        for &a in &members {
            if !set.contains(&group.inv(a)) {
                return Err(GroupError::Invalid(format!(
                    "subgroup not closed under inverse at {}",
                    group.elements[a]
                )));
            }
            for &b in &members {
                if !set.contains(&group.mul(a, b)) {
                    return Err(GroupError::Invalid(format!(
                        "subgroup not closed under product at ({}, {})",
                        group.elements[a], group.elements[b]
                    )));
                }
            }
        }
        Ok(Subgroup { name: name.into(), members })
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn is_normal(&self, group: &FiniteMetricGroup) -> bool {
        (0..group.order()).all(|g| {
            self.members
                .iter()
                .all(|&h| self.contains(group.mul(group.mul(g, h), group.inv(g))))
        })
    }

    /// diam(A) = max distance between members.
    pub fn diameter(&self, group: &FiniteMetricGroup) -> Rat {
        self.members
            .iter()
            .flat_map(|&a| self.members.iter().map(move |&b| group.d(a, b)))
            .max()
            .unwrap_or_else(Rat::zero)
    }
}

/// Check the group axioms of a Cayley table: associativity, identity, inverses.
pub fn validate_group(table: &[Vec<usize>]) -> CheckReport {
    let n = table.len();
    if n == 0 || table.iter().any(|r| r.len() != n) {
        return CheckReport::fail("table is not square and nonempty".into());
    }
    if let Some((i, j)) =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| table[i][j] >= n)
    {
        return CheckReport::fail(format!("entry ({i},{j}) out of range"));
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if table[table[i][j]][k] != table[i][table[j][k]] {
                    return CheckReport::fail(format!("associativity fails at ({i},{j},{k})"));
                }
            }
        }
    }
    let Some(e) = (0..n).find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g)) else {
        return CheckReport::fail("no two-sided identity".into());
    };
    for g in 0..n {
        if !(0..n).any(|h| table[g][h] == e && table[h][g] == e) {
            return CheckReport::fail(format!("element {g} has no inverse"));
        }
    }
    CheckReport::pass()
}

/// Check metric axioms, two-sided invariance, and the equivalent product
/// inequality d(g1 g2, f1 f2) <= d(g1, f1) + d(g2, f2), all exhaustively.
pub fn validate_tsi_metric(g: &FiniteMetricGroup) -> CheckReport {
    let n = g.order();
    for i in 0..n {
        if !g.d(i, i).is_zero() {
            return CheckReport::fail(format!("d({0},{0}) != 0", g.elements[i]));
        }
        for j in 0..n {
            if i != j && g.d(i, j).is_zero() {
                return CheckReport::fail(format!(
                    "d({},{}) = 0 for distinct elements",
                    g.elements[i], g.elements[j]
                ));
            }
            if g.d(i, j) != g.d(j, i) {
                return CheckReport::fail(format!(
                    "symmetry fails at ({},{})",
                    g.elements[i], g.elements[j]
                ));
            }
            if g.d(i, j) < Rat::zero() {
                return CheckReport::fail(format!(
                    "negative distance at ({},{})",
                    g.elements[i], g.elements[j]
                ));
            }
            for k in 0..n {
                if g.d(i, k) > g.d(i, j) + g.d(j, k) {
                    return CheckReport::fail(format!(
                        "triangle inequality fails: d({0},{2}) > d({0},{1}) + d({1},{2})",
                        g.elements[i], g.elements[j], g.elements[k]
                    ));
                }
            }
        }
    }
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                if g.d(g.mul(h, i), g.mul(h, j)) != g.d(i, j)
                    || g.d(g.mul(i, h), g.mul(j, h)) != g.d(i, j)
                {
                    return CheckReport::fail(format!(
                        "bi-invariance fails at h={}, ({},{})",
                        g.elements[h], g.elements[i], g.elements[j]
                    ));
                }
            }
        }
    }
    for g1 in 0..n {
        for g2 in 0..n {
            for f1 in 0..n {
                for f2 in 0..n {
                    if g.d(g.mul(g1, g2), g.mul(f1, f2)) > g.d(g1, f1) + g.d(g2, f2) {
                        return CheckReport::fail(format!(
                            "product inequality fails at ({},{},{},{})",
                            g.elements[g1], g.elements[g2], g.elements[f1], g.elements[f2]
                        ));
                    }
                }
            }
        }
    }
    CheckReport::pass()
}

/// The factor group G/N with the factor metric
/// d0(g1 N, g2 N) = min over h1, h2 in N of d(g1 h1, g2 h2).
///
/// The quotient map is 1-Lipschitz and the result is again tsi; both facts
/// are exhaustively assertable via [`validate_tsi_metric`].
pub fn factor_metric(g: &FiniteMetricGroup, n: &Subgroup) -> Result<FiniteMetricGroup, GroupError> {
    if !n.is_normal(g) {
        let witness = (0..g.order())
            .flat_map(|x| n.members.iter().map(move |&h| (x, h)))
            .find(|&(x, h)| !n.contains(g.mul(g.mul(x, h), g.inv(x))))
            .unwrap();
        return Err(GroupError::NotNormal {
            g: g.elements[witness.0].clone(),
            h: g.elements[witness.1].clone(),
        });
    }
    // Cosets, represented by their minimal element index.
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..g.order() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        for &h in &n.members {
            coset_of[g.mul(x, h)] = id;
        }
    }
    let m = reps.len();
    let elements: Vec<String> = reps.iter().map(|&r| format!("[{}]", g.elements[r])).collect();
    let mut table = vec![vec![0; m]; m];
    let mut dist = vec![vec![Rat::zero(); m]; m];
    for (i, &ri) in reps.iter().enumerate() {
        for (j, &rj) in reps.iter().enumerate() {
            table[i][j] = coset_of[g.mul(ri, rj)];
            dist[i][j] = n
                .members
                .iter()
                .flat_map(|&h1| {
                    n.members.iter().map(move |&h2| g.d(g.mul(ri, h1), g.mul(rj, h2)))
                })
                .min()
                .unwrap();
        }
    }
    FiniteMetricGroup::new(format!("{}/{}", g.name, n.name), elements, table, dist)
}

/// Worked example groups reused across modules and tests.
pub mod examples {
    use super::*;

    /// The Z/4 example metric: d(1,0) = 3/4, d(2,0) = 1, d(3,0) = 3/4.
    pub fn z4_example() -> FiniteMetricGroup {
        FiniteMetricGroup::cyclic(
            4,
            &[Rat::zero(), Rat::new(3, 4), Rat::int(1), Rat::new(3, 4)],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use examples::z4_example;

    #[test]
    fn z2_is_valid() {
        let g = FiniteMetricGroup::cyclic(2, &[Rat::zero(), Rat::int(1)]);
        assert!(validate_group(&g.table).passed);
        assert!(validate_tsi_metric(&g).passed);
    }

    #[test]
    fn z4_metric_is_tsi() {
        let g = z4_example();
        assert!(validate_group(&g.table).passed);
        assert!(validate_tsi_metric(&g).passed);
    }

    #[test]
    fn broken_associativity_is_reported() {
        // 2x2 table that is not associative/has no identity structure.
        let table = vec![vec![0, 1], vec![1, 1]];
        let report = validate_group(&table);
        assert!(!report.passed);
    }

    #[test]
    fn z4_bad_triangle_rejected() {
        let g = FiniteMetricGroup::cyclic(4, &[Rat::zero(), Rat::int(1), Rat::int(5), Rat::int(1)]);
        let report = validate_tsi_metric(&g);
        assert!(!report.passed);
        assert!(report.details[0].contains("triangle"));
    }

    #[test]
    fn factor_metric_examples() {
        let g = z4_example();
        // N = {e}: isometric copy.
        let n_triv = Subgroup::new("E", &g, vec![0]).unwrap();
        let q = factor_metric(&g, &n_triv).unwrap();
        assert_eq!(q.order(), 4);
        assert_eq!(q.dist, g.dist);
        // N = G: one-point group.
        let n_full = Subgroup::new("G", &g, (0..4).collect()).unwrap();
        let q = factor_metric(&g, &n_full).unwrap();
        assert_eq!(q.order(), 1);
        // N = {0,2}: Z/2 with d0 = 3/4.
        let n = Subgroup::new("N", &g, vec![0, 2]).unwrap();
        let q = factor_metric(&g, &n).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(q.d(0, 1), Rat::new(3, 4));
        assert!(validate_tsi_metric(&q).passed);
        // Quotient map is 1-Lipschitz.
        for a in 0..4 {
            for b in 0..4 {
                let qa = if n.contains(a) { 0 } else { 1 };
                let qb = if n.contains(b) { 0 } else { 1 };
                assert!(q.d(qa, qb) <= g.d(a, b));
            }
        }
    }

    #[test]
    fn subgroup_closure_checked() {
        let g = z4_example();
        assert!(Subgroup::new("bad", &g, vec![0, 1]).is_err());
        assert!(Subgroup::new("ok", &g, vec![0, 2]).is_ok());
    }
}
