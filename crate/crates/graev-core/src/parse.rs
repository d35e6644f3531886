//! Line-oriented UTF-8 input format for groups, subgroups, embeddings,
//! pointed spaces, Birkhoff–Kakutani families, norm tables, and HNN data.
//!
//! The normative schema lives in `docs/file-format.md`; this module is its
//! implementation. All sections are line-oriented, `#` starts a comment,
//! blank lines separate nothing in particular. Every parse error carries a
//! 1-based line number.

use std::collections::BTreeMap;

use crate::amalgam::AmalgamSystem;
use crate::free::PointedMetricSpace;
use crate::group::{FiniteMetricGroup, Subgroup};
use crate::hnn::HnnSystem;
use crate::rational::Rat;
use crate::sin::{BKFamily, NormTable};

#[derive(Debug, Clone, thiserror::Error)]
pub enum ParseError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("{0}")]
    Structure(String),
}

fn at(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Line(line + 1, msg.into())
}

/// A subgroup declaration, by element names, attached to a named group.
#[derive(Debug, Clone)]
pub struct SubgroupDef {
    pub group: String,
    pub name: String,
    pub members: Vec<String>,
}

/// An embedding of a declared subgroup into another group, as name pairs
/// `member->image`.
#[derive(Debug, Clone)]
pub struct EmbedDef {
    pub sub: String,
    pub into: String,
    pub pairs: Vec<(String, String)>,
}

/// A Birkhoff–Kakutani family over a named group.
#[derive(Debug, Clone)]
pub struct FamilyDef {
    pub group: String,
    pub levels: Vec<(usize, Vec<String>)>,
}

/// A norm table over a named group, as `element value` lines.
#[derive(Debug, Clone)]
pub struct NormDef {
    pub name: String,
    pub group: String,
    pub values: Vec<(String, Rat)>,
}

/// HNN data: base group, the two subgroups, the isomorphism, and the scale.
#[derive(Debug, Clone)]
pub struct HnnDef {
    pub base: String,
    pub a: String,
    pub b: String,
    pub phi: Vec<(String, String)>,
    pub k: Rat,
}

/// Everything a single input file can declare.
#[derive(Debug, Clone, Default)]
pub struct InputFile {
    pub groups: Vec<FiniteMetricGroup>,
    pub subgroups: Vec<SubgroupDef>,
    pub embeds: Vec<EmbedDef>,
    pub spaces: Vec<PointedMetricSpace>,
    pub families: Vec<FamilyDef>,
    pub norms: Vec<NormDef>,
    pub hnn: Option<HnnDef>,
}

fn parse_pairs(spec: &str) -> Result<Vec<(String, String)>, String> {
    spec.split_whitespace()
        .map(|p| {
            p.split_once("->")
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .ok_or_else(|| format!("expected `x->y`, got `{p}`"))
        })
        .collect()
}

/// Parse a complete input file.
pub fn parse_file(text: &str) -> Result<InputFile, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut out = InputFile::default();
    let mut i = 0usize;
    let significant = |l: &str| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    };
    let next_row = |i: &mut usize| -> Option<(usize, Vec<String>)> {
        while *i < lines.len() && !significant(lines[*i]) {
            *i += 1;
        }
        if *i >= lines.len() {
            return None;
        }
        let row = (*i, lines[*i].split_whitespace().map(str::to_string).collect());
        *i += 1;
        Some(row)
    };
    while let Some((ln, tokens)) = next_row(&mut i) {
        match tokens[0].as_str() {
            "group" => {
                let name =
                    tokens.get(1).ok_or_else(|| at(ln, "group needs a name"))?.clone();
                let (eln, etoks) =
                    next_row(&mut i).ok_or_else(|| at(ln, "missing `elements` line"))?;
                if etoks[0] != "elements" {
                    return Err(at(eln, "expected `elements`"));
                }
                let elements: Vec<String> = etoks[1..].to_vec();
                let n = elements.len();
                if n == 0 {
                    return Err(at(eln, "a group needs at least one element"));
                }
                let idx: BTreeMap<&str, usize> =
                    elements.iter().enumerate().map(|(k, e)| (e.as_str(), k)).collect();
                if idx.len() != n {
                    return Err(at(eln, "duplicate element name"));
                }
                let (tln, ttoks) =
                    next_row(&mut i).ok_or_else(|| at(ln, "missing `table` line"))?;
                if ttoks[0] != "table" {
                    return Err(at(tln, "expected `table`"));
                }
                let mut table = Vec::with_capacity(n);
                for _ in 0..n {
                    let (rln, row) =
                        next_row(&mut i).ok_or_else(|| at(tln, "table row missing"))?;
                    if row.len() != n {
                        return Err(at(rln, format!("table row needs {n} entries")));
                    }
                    let row: Result<Vec<usize>, ParseError> = row
                        .iter()
                        .map(|e| {
                            idx.get(e.as_str())
                                .copied()
                                .ok_or_else(|| at(rln, format!("unknown element `{e}`")))
                        })
                        .collect();
                    table.push(row?);
                }
                let (mln, mtoks) =
                    next_row(&mut i).ok_or_else(|| at(ln, "missing `metric` line"))?;
                if mtoks[0] != "metric" {
                    return Err(at(mln, "expected `metric`"));
                }
                let mut dist = Vec::with_capacity(n);
                for _ in 0..n {
                    let (rln, row) =
                        next_row(&mut i).ok_or_else(|| at(mln, "metric row missing"))?;
                    if row.len() != n {
                        return Err(at(rln, format!("metric row needs {n} entries")));
                    }
                    let row: Result<Vec<Rat>, ParseError> = row
                        .iter()
                        .map(|e| e.parse::<Rat>().map_err(|err| at(rln, err.to_string())))
                        .collect();
                    dist.push(row?);
                }
                let g = FiniteMetricGroup::new(name, elements, table, dist)
                    .map_err(|e| at(ln, e.to_string()))?;
                out.groups.push(g);
            }
            "subgroup" => {
                // subgroup <name> = <elements>
                let rest = lines[ln].trim().strip_prefix("subgroup").unwrap();
                let (name, members) = rest
                    .split_once('=')
                    .ok_or_else(|| at(ln, "expected `subgroup <name> = <elements>`"))?;
                let group = out
                    .groups
                    .last()
                    .ok_or_else(|| at(ln, "subgroup before any group"))?
                    .name
                    .clone();
                out.subgroups.push(SubgroupDef {
                    group,
                    name: name.trim().to_string(),
                    members: members.split_whitespace().map(str::to_string).collect(),
                });
            }
            "embed" => {
                // embed <sub> into <group> : <pairs>
                let rest = lines[ln].trim().strip_prefix("embed").unwrap();
                let (head, pairs) = rest
                    .split_once(':')
                    .ok_or_else(|| at(ln, "expected `embed <sub> into <group> : <pairs>`"))?;
                let head: Vec<&str> = head.split_whitespace().collect();
                if head.len() != 3 || head[1] != "into" {
                    return Err(at(ln, "expected `embed <sub> into <group> : <pairs>`"));
                }
                out.embeds.push(EmbedDef {
                    sub: head[0].to_string(),
                    into: head[2].to_string(),
                    pairs: parse_pairs(pairs).map_err(|e| at(ln, e))?,
                });
            }
            "space" => {
                let name =
                    tokens.get(1).ok_or_else(|| at(ln, "space needs a name"))?.clone();
                let (pln, ptoks) =
                    next_row(&mut i).ok_or_else(|| at(ln, "missing `points` line"))?;
                if ptoks[0] != "points" {
                    return Err(at(pln, "expected `points` (first point is the basepoint)"));
                }
                let points: Vec<String> = ptoks[1..].to_vec();
                let n = points.len();
                let (mln, mtoks) =
                    next_row(&mut i).ok_or_else(|| at(ln, "missing `metric` line"))?;
                if mtoks[0] != "metric" {
                    return Err(at(mln, "expected `metric`"));
                }
                let mut dist = Vec::with_capacity(n);
                for _ in 0..n {
                    let (rln, row) =
                        next_row(&mut i).ok_or_else(|| at(mln, "metric row missing"))?;
                    if row.len() != n {
                        return Err(at(rln, format!("metric row needs {n} entries")));
                    }
                    let row: Result<Vec<Rat>, ParseError> = row
                        .iter()
                        .map(|e| e.parse::<Rat>().map_err(|err| at(rln, err.to_string())))
                        .collect();
                    dist.push(row?);
                }
                out.spaces.push(PointedMetricSpace::new(name, points, 0, dist));
            }
            "family" => {
                let group =
                    tokens.get(1).ok_or_else(|| at(ln, "family needs a group name"))?.clone();
                let mut levels = Vec::new();
                loop {
                    let save = i;
                    match next_row(&mut i) {
                        Some((lln, ltoks)) if ltoks[0] == "level" => {
                            let rest = lines[lln].trim().strip_prefix("level").unwrap();
                            let (k, members) = rest
                                .split_once(':')
                                .ok_or_else(|| at(lln, "expected `level <k>: <elements>`"))?;
                            let k: usize = k
                                .trim()
                                .parse()
                                .map_err(|_| at(lln, "level index must be an integer"))?;
                            levels.push((
                                k,
                                members.split_whitespace().map(str::to_string).collect(),
                            ));
                        }
                        _ => {
                            i = save;
                            break;
                        }
                    }
                }
                out.families.push(FamilyDef { group, levels });
            }
            "normtable" => {
                // normtable <name> for <group>, then `<element> <value>` lines
                if tokens.len() != 4 || tokens[2] != "for" {
                    return Err(at(ln, "expected `normtable <name> for <group>`"));
                }
                let mut values = Vec::new();
                loop {
                    let save = i;
                    match next_row(&mut i) {
                        Some((vln, vtoks))
                            if vtoks.len() == 2 && vtoks[1].parse::<Rat>().is_ok() =>
                        {
                            let v =
                                vtoks[1].parse::<Rat>().map_err(|e| at(vln, e.to_string()))?;
                            values.push((vtoks[0].clone(), v));
                        }
                        _ => {
                            i = save;
                            break;
                        }
                    }
                }
                out.norms.push(NormDef {
                    name: tokens[1].clone(),
                    group: tokens[3].clone(),
                    values,
                });
            }
            "hnn" => {
                // hnn base <group> A <sub> B <sub> phi <pairs> K <rational>
                let rest = lines[ln].trim();
                let words: Vec<&str> = rest.split_whitespace().collect();
                let find = |key: &str| -> Result<usize, ParseError> {
                    words
                        .iter()
                        .position(|&w| w == key)
                        .ok_or_else(|| at(ln, format!("hnn line misses `{key}`")))
                };
                let (b0, a0, bb0, p0, k0) =
                    (find("base")?, find("A")?, find("B")?, find("phi")?, find("K")?);
                let one_after = |p: usize| -> Result<String, ParseError> {
                    words
                        .get(p + 1)
                        .map(|s| s.to_string())
                        .ok_or_else(|| at(ln, "hnn keyword misses its value"))
                };
                let phi_spec = words[p0 + 1..k0].join(" ");
                out.hnn = Some(HnnDef {
                    base: one_after(b0)?,
                    a: one_after(a0)?,
                    b: one_after(bb0)?,
                    phi: parse_pairs(&phi_spec).map_err(|e| at(ln, e))?,
                    k: one_after(k0)?.parse::<Rat>().map_err(|e| at(ln, e.to_string()))?,
                });
            }
            other => return Err(at(ln, format!("unknown section keyword `{other}`"))),
        }
    }
    Ok(out)
}

impl InputFile {
    pub fn group(&self, name: &str) -> Result<&FiniteMetricGroup, ParseError> {
        self.groups
            .iter()
            .find(|g| g.name == name)
            .ok_or_else(|| ParseError::Structure(format!("no group named `{name}`")))
    }

    fn group_index(&self, name: &str) -> Result<usize, ParseError> {
        self.groups
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| ParseError::Structure(format!("no group named `{name}`")))
    }

    /// Resolve a declared subgroup into its home group.
    pub fn subgroup(&self, name: &str) -> Result<(usize, Subgroup), ParseError> {
        let def = self
            .subgroups
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| ParseError::Structure(format!("no subgroup named `{name}`")))?;
        let gi = self.group_index(&def.group)?;
        let g = &self.groups[gi];
        let members: Result<Vec<usize>, ParseError> = def
            .members
            .iter()
            .map(|m| {
                g.elements.iter().position(|e| e == m).ok_or_else(|| {
                    ParseError::Structure(format!("`{m}` is not an element of `{}`", g.name))
                })
            })
            .collect();
        let sub = Subgroup::new(name, g, members?)
            .map_err(|e| ParseError::Structure(e.to_string()))?;
        Ok((gi, sub))
    }

    /// Build the amalgam system declared by the file: the factors are the
    /// groups in file order; with no `embed` lines the common subgroup is
    /// trivial (a free product), otherwise all embeddings must name the same
    /// subgroup, whose home-group members (identity first, then by index)
    /// fix the abstract order of `A`.
    pub fn build_amalgam(&self) -> Result<AmalgamSystem, ParseError> {
        if self.groups.is_empty() {
            return Err(ParseError::Structure("no groups declared".into()));
        }
        if self.embeds.is_empty() {
            return AmalgamSystem::free_product(self.groups.clone())
                .map_err(|e| ParseError::Structure(e.to_string()));
        }
        let sub_name = &self.embeds[0].sub;
        if self.embeds.iter().any(|e| &e.sub != sub_name) {
            return Err(ParseError::Structure(
                "all embeddings must reference one common subgroup".into(),
            ));
        }
        let (home, sub) = self.subgroup(sub_name)?;
        let home_group = &self.groups[home];
        // Abstract order of A: identity first, then ascending member index.
        let mut a_order: Vec<usize> = sub.members.clone();
        a_order.sort_unstable_by_key(|&m| (m != home_group.identity, m));
        let mut embeddings: Vec<Option<Vec<usize>>> = vec![None; self.groups.len()];
        embeddings[home] = Some(a_order.clone());
        for e in &self.embeds {
            let target = self.group_index(&e.into)?;
            let tg = &self.groups[target];
            let map: Result<BTreeMap<usize, usize>, ParseError> = e
                .pairs
                .iter()
                .map(|(from, to)| {
                    let f = home_group.elements.iter().position(|x| x == from).ok_or_else(
                        || ParseError::Structure(format!("`{from}` not in `{}`", home_group.name)),
                    )?;
                    let t = tg.elements.iter().position(|x| x == to).ok_or_else(|| {
                        ParseError::Structure(format!("`{to}` not in `{}`", tg.name))
                    })?;
                    Ok((f, t))
                })
                .collect();
            let map = map?;
            let image: Result<Vec<usize>, ParseError> = a_order
                .iter()
                .map(|m| {
                    map.get(m).copied().ok_or_else(|| {
                        ParseError::Structure(format!(
                            "embedding into `{}` misses member `{}`",
                            tg.name, home_group.elements[*m]
                        ))
                    })
                })
                .collect();
            embeddings[target] = Some(image?);
        }
        let embeddings: Result<Vec<Vec<usize>>, ParseError> = embeddings
            .into_iter()
            .enumerate()
            .map(|(k, e)| {
                e.ok_or_else(|| {
                    ParseError::Structure(format!(
                        "group `{}` has no embedding of `{sub_name}`",
                        self.groups[k].name
                    ))
                })
            })
            .collect();
        AmalgamSystem::new(self.groups.clone(), embeddings?)
            .map_err(|e| ParseError::Structure(e.to_string()))
    }

    /// Build the declared Birkhoff–Kakutani family (by position).
    pub fn build_family(&self, index: usize) -> Result<BKFamily, ParseError> {
        let def = self
            .families
            .get(index)
            .ok_or_else(|| ParseError::Structure(format!("no family #{index}")))?;
        let g = self.group(&def.group)?.clone();
        let mut levels = def.levels.clone();
        levels.sort_by_key(|(k, _)| *k);
        let resolved: Result<Vec<Vec<usize>>, ParseError> = levels
            .iter()
            .map(|(_, names)| {
                names
                    .iter()
                    .map(|m| {
                        g.elements.iter().position(|e| e == m).ok_or_else(|| {
                            ParseError::Structure(format!("`{m}` not in `{}`", g.name))
                        })
                    })
                    .collect()
            })
            .collect();
        BKFamily::new(g, resolved?).map_err(|e| ParseError::Structure(e.to_string()))
    }

    /// Resolve a declared norm table over its group.
    pub fn build_norm_table(&self, name: &str) -> Result<(usize, NormTable), ParseError> {
        let def = self
            .norms
            .iter()
            .find(|n| n.name == name)
            .ok_or_else(|| ParseError::Structure(format!("no norm table named `{name}`")))?;
        let gi = self.group_index(&def.group)?;
        let g = &self.groups[gi];
        let mut values = vec![None; g.order()];
        for (el, v) in &def.values {
            let k = g
                .elements
                .iter()
                .position(|e| e == el)
                .ok_or_else(|| ParseError::Structure(format!("`{el}` not in `{}`", g.name)))?;
            values[k] = Some(*v);
        }
        let values: Result<Vec<Rat>, ParseError> = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| {
                    ParseError::Structure(format!(
                        "norm table `{name}` misses element `{}`",
                        g.elements[k]
                    ))
                })
            })
            .collect();
        Ok((gi, NormTable { values: values? }))
    }

    /// Build the HNN system declared by the file.
    pub fn build_hnn(&self) -> Result<HnnSystem, ParseError> {
        let def = self
            .hnn
            .as_ref()
            .ok_or_else(|| ParseError::Structure("no hnn section declared".into()))?;
        let g = self.group(&def.base)?.clone();
        let (gi_a, a) = self.subgroup(&def.a)?;
        let (gi_b, b) = self.subgroup(&def.b)?;
        let base_index = self.group_index(&def.base)?;
        if gi_a != base_index || gi_b != base_index {
            return Err(ParseError::Structure(
                "hnn subgroups must live in the base group".into(),
            ));
        }
        let phi: Result<Vec<(usize, usize)>, ParseError> = def
            .phi
            .iter()
            .map(|(x, y)| {
                let f = g
                    .elements
                    .iter()
                    .position(|e| e == x)
                    .ok_or_else(|| ParseError::Structure(format!("`{x}` not in `{}`", g.name)))?;
                let t = g
                    .elements
                    .iter()
                    .position(|e| e == y)
                    .ok_or_else(|| ParseError::Structure(format!("`{y}` not in `{}`", g.name)))?;
                Ok((f, t))
            })
            .collect();
        HnnSystem::new(g, a, b, &phi?, def.k).map_err(|e| ParseError::Structure(e.to_string()))
    }
}

/// Parse one word over an amalgam alphabet. Tokens are whitespace-separated
/// element names, optionally suffixed `^-1`; `e` is the identity. A token
/// that is not a single letter name is greedily split into known names
/// (so `ab` reads as `a ⌢ b`). Ambiguous bare names (present in several
/// factors outside `A`) must be qualified as `name@group`.
pub fn parse_amalgam_word(
    sys: &AmalgamSystem,
    text: &str,
) -> Result<crate::words::Word<crate::amalgam::AmLetter>, ParseError> {
    use crate::alphabet::Alphabet;
    let mut letters = Vec::new();
    let resolve_name = |name: &str| -> Result<crate::amalgam::AmLetter, String> {
        if name == "e" {
            return Ok(sys.identity());
        }
        let (name, only_group) = match name.split_once('@') {
            Some((n, g)) => (n, Some(g)),
            None => (name, None),
        };
        let mut hits: Vec<crate::amalgam::AmLetter> = Vec::new();
        for (lam, f) in sys.factors.iter().enumerate() {
            if only_group.is_some_and(|g| g != f.name) {
                continue;
            }
            if let Some(k) = f.elements.iter().position(|el| el == name) {
                let l = sys.letter(lam, k);
                if !hits.contains(&l) {
                    hits.push(l);
                }
            }
        }
        match hits.len() {
            0 => Err(format!("unknown letter `{name}`")),
            1 => Ok(hits[0]),
            _ => Err(format!("ambiguous letter `{name}` (qualify as name@group)")),
        }
    };
    for token in text.split_whitespace() {
        let (body, invert) = match token.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (token, false),
        };
        let resolved = match resolve_name(body) {
            Ok(l) => vec![l],
            Err(first_err) => {
                // Greedy longest-prefix split into known names.
                let mut rest = body;
                let mut parts = Vec::new();
                'outer: while !rest.is_empty() {
                    for cut in (1..=rest.len()).rev() {
                        if !rest.is_char_boundary(cut) {
                            continue;
                        }
                        if let Ok(l) = resolve_name(&rest[..cut]) {
                            parts.push(l);
                            rest = &rest[cut..];
                            continue 'outer;
                        }
                    }
                    return Err(ParseError::Structure(first_err));
                }
                parts
            }
        };
        if invert {
            for l in resolved.iter().rev() {
                letters.push(sys.inverse(l));
            }
        } else {
            letters.extend(resolved);
        }
    }
    Ok(crate::words::Word::new(letters))
}

/// Parse one word over a stable-letter alphabet `G ∪ ⟨t⟩`: tokens are base
/// element names (with optional `^-1`), or `t`, `t^k`, `t^-k`.
pub fn parse_t_word(
    group: &FiniteMetricGroup,
    text: &str,
) -> Result<crate::words::Word<crate::hnn::TLetter>, ParseError> {
    use crate::hnn::TLetter;
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        if token == "t" {
            letters.push(TLetter::T(1));
            continue;
        }
        if let Some(exp) = token.strip_prefix("t^") {
            let k: i64 = exp
                .parse()
                .map_err(|_| ParseError::Structure(format!("bad exponent in `{token}`")))?;
            if k != 0 {
                letters.push(TLetter::T(k));
            }
            continue;
        }
        let (body, invert) = match token.strip_suffix("^-1") {
            Some(b) => (b, true),
            None => (token, false),
        };
        let k = if body == "e" {
            group.identity
        } else {
            group
                .elements
                .iter()
                .position(|e| e == body)
                .ok_or_else(|| ParseError::Structure(format!("unknown letter `{body}`")))?
        };
        letters.push(TLetter::G(if invert { group.inv(k) } else { k }));
    }
    Ok(crate::words::Word::new(letters))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::combinatorics::evaluate;

    pub const Z2_Z3: &str = "\
# free product of Z/2 and Z/3
group Z2
elements e a
table
e a
a e
metric
0 1
1 0

group Z3
elements e b b2
table
e b b2
b b2 e
b2 e b
metric
0 1 1
1 0 1
1 1 0
";

    #[test]
    fn parses_free_product_file() {
        let file = parse_file(Z2_Z3).unwrap();
        assert_eq!(file.groups.len(), 2);
        let sys = file.build_amalgam().unwrap();
        assert!(sys.check().passed);
        let w = parse_amalgam_word(&sys, "a b").unwrap();
        assert_eq!(w.len(), 2);
        // Concatenated tokens split greedily; `b2` wins over `b`.
        assert_eq!(
            parse_amalgam_word(&sys, "ab2").unwrap(),
            parse_amalgam_word(&sys, "a b2").unwrap()
        );
        assert_eq!(parse_amalgam_word(&sys, "ab").unwrap(), w);
        let nf = evaluate(&sys, &parse_amalgam_word(&sys, "b b2").unwrap());
        assert!(nf.0.is_empty());
    }

    #[test]
    fn inverse_suffix_and_identity() {
        let file = parse_file(Z2_Z3).unwrap();
        let sys = file.build_amalgam().unwrap();
        let w = parse_amalgam_word(&sys, "b^-1 e").unwrap();
        assert_eq!(w.len(), 2);
        let nf = evaluate(&sys, &w.concat(&parse_amalgam_word(&sys, "b").unwrap()));
        assert!(nf.0.is_empty());
        assert!(parse_amalgam_word(&sys, "zz").is_err());
    }

    #[test]
    fn parses_subgroup_embed_family_norm_hnn() {
        let text = "\
group Z4
elements e g g2 g3
table
e g g2 g3
g g2 g3 e
g2 g3 e g
g3 e g g2
metric
0 3/4 1 3/4
3/4 0 3/4 1
1 3/4 0 3/4
3/4 1 3/4 0
subgroup A = e g2
subgroup B = e g2

family Z4
level 0: e g g2 g3
level 1: e g2
level 2: e

normtable NG for Z4
e 0
g 3/4
g2 1
g3 3/4

hnn base Z4 A A B B phi e->e g2->g2 K 1
";
        let file = parse_file(text).unwrap();
        let (_, sub) = file.subgroup("A").unwrap();
        assert_eq!(sub.members, vec![0, 2]);
        let fam = file.build_family(0).unwrap();
        assert_eq!(fam.levels.len(), 3);
        let (_, nt) = file.build_norm_table("NG").unwrap();
        assert_eq!(nt.at(2), Rat::one());
        let hnn = file.build_hnn().unwrap();
        assert!(hnn.validate().passed);
        let w = parse_t_word(&file.groups[0], "t g2 t^-1 g^-1").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(*w.at(4), crate::hnn::TLetter::G(3));
        let w = parse_t_word(&file.groups[0], "t^-2").unwrap();
        assert_eq!(*w.at(1), crate::hnn::TLetter::T(-2));
    }

    #[test]
    fn amalgamated_embedding_file() {
        // Z/4 and Z/4 amalgamated over the common Z/2.
        let text = "\
group G1
elements e x x2 x3
table
e x x2 x3
x x2 x3 e
x2 x3 e x
x3 e x x2
metric
0 1/2 1 1/2
1/2 0 1/2 1
1 1/2 0 1/2
1/2 1 1/2 0
subgroup C = e x2

group G2
elements e y y2 y3
table
e y y2 y3
y y2 y3 e
y2 y3 e y
y3 e y y2
metric
0 1/2 1 1/2
1/2 0 1/2 1
1 1/2 0 1/2
1/2 1 1/2 0

embed C into G2 : e->e x2->y2
";
        let file = parse_file(text).unwrap();
        let sys = file.build_amalgam().unwrap();
        assert_eq!(sys.a_size, 2);
        assert!(sys.check().passed);
        // x2 and y2 are the same letter through A.
        let wa = parse_amalgam_word(&sys, "x2").unwrap();
        let wb = parse_amalgam_word(&sys, "y2").unwrap();
        assert_eq!(wa, wb);
        // `e` resolves to the identity.
        let we = parse_amalgam_word(&sys, "e").unwrap();
        assert!(sys.is_identity(we.at(1)));
    }

    #[test]
    fn line_numbers_in_errors() {
        let bad = "group G\nelements e a\ntable\ne a\na b\nmetric\n0 1\n1 0\n";
        let err = parse_file(bad).unwrap_err();
        assert!(err.to_string().contains("line 5"), "{err}");
    }
}
