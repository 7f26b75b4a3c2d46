//! Exact set calculus over finite feature/label alphabets.
//!
//! A [`FiniteUniverse`] fixes the alphabets and the ground-truth labeling
//! (the oracle). Hypotheses are explicit function tables, datasets are
//! feature masks, and the operations below compute feasible hypothesis
//! sets, generalization sets, consistent sets and their inverses by
//! direct enumeration. Everything here is pure and deterministic.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Finite feature alphabet, label alphabet and the ground-truth labeling.
///
/// The oracle is total: feature `x` has the one true label `oracle[x]`.
/// Because the ideal dataset is functional, any subset of it is fully
/// described by the set of features it includes (see [`DatasetMask`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteUniverse {
    y_size: usize,
    oracle: Vec<usize>,
}

impl FiniteUniverse {
    pub fn new(y_size: usize, oracle: Vec<usize>) -> Result<Self> {
        if oracle.is_empty() {
            return Err(Error::input("universe needs at least one feature"));
        }
        if y_size == 0 {
            return Err(Error::input("universe needs at least one label"));
        }
        if let Some(&bad) = oracle.iter().find(|&&y| y >= y_size) {
            return Err(Error::input(format!(
                "oracle label {bad} out of range 0..{y_size}"
            )));
        }
        Ok(FiniteUniverse { y_size, oracle })
    }

    pub fn x_size(&self) -> usize {
        self.oracle.len()
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn oracle_label(&self, x: usize) -> usize {
        self.oracle[x]
    }

    /// The oracle viewed as a hypothesis (it is always a well-formed table).
    pub fn oracle_hypothesis(&self) -> Hypothesis {
        Hypothesis {
            table: self.oracle.clone(),
        }
    }
}

/// One candidate classifier: an explicit feature -> label table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    table: Vec<usize>,
}

impl Hypothesis {
    pub fn new(table: Vec<usize>, universe: &FiniteUniverse) -> Result<Self> {
        if table.len() != universe.x_size() {
            return Err(Error::input(format!(
                "hypothesis table has {} entries, universe has {} features",
                table.len(),
                universe.x_size()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= universe.y_size()) {
            return Err(Error::input(format!(
                "hypothesis label {bad} out of range 0..{}",
                universe.y_size()
            )));
        }
        Ok(Hypothesis { table })
    }

    pub fn label(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    fn check(&self, universe: &FiniteUniverse) -> Result<()> {
        if self.table.len() != universe.x_size()
            || self.table.iter().any(|&y| y >= universe.y_size())
        {
            return Err(Error::input(
                "hypothesis is not well-formed for this universe",
            ));
        }
        Ok(())
    }
}

/// An ordered, duplicate-free collection of hypotheses over one universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisSpace {
    members: Vec<Hypothesis>,
}

impl HypothesisSpace {
    /// Builds a space, rejecting duplicates and malformed tables.
    pub fn new(members: Vec<Hypothesis>, universe: &FiniteUniverse) -> Result<Self> {
        let mut seen = HashSet::with_capacity(members.len());
        for h in &members {
            h.check(universe)?;
            if !seen.insert(h.table.clone()) {
                return Err(Error::input(format!(
                    "duplicate hypothesis table {:?}",
                    h.table
                )));
            }
        }
        Ok(HypothesisSpace { members })
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, h: &Hypothesis) -> bool {
        self.members.iter().any(|m| m == h)
    }

    pub fn contains_oracle(&self, universe: &FiniteUniverse) -> bool {
        self.members.iter().any(|m| m.table == universe.oracle)
    }
}

/// A subset of the ideal dataset, identified by which features it includes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DatasetMask {
    bits: Vec<bool>,
}

impl DatasetMask {
    pub fn empty(x_size: usize) -> Self {
        DatasetMask {
            bits: vec![false; x_size],
        }
    }

    pub fn full(x_size: usize) -> Self {
        DatasetMask {
            bits: vec![true; x_size],
        }
    }

    pub fn from_indices(x_size: usize, indices: &[usize]) -> Result<Self> {
        let mut mask = DatasetMask::empty(x_size);
        for &i in indices {
            if i >= x_size {
                return Err(Error::input(format!(
                    "feature index {i} out of range 0..{x_size}"
                )));
            }
            mask.bits[i] = true;
        }
        Ok(mask)
    }

    /// Low `x_size` bits of `word` as a mask; handy for subset enumeration.
    pub fn from_bits(x_size: usize, word: u64) -> Self {
        DatasetMask {
            bits: (0..x_size).map(|i| word >> i & 1 == 1).collect(),
        }
    }

    pub fn to_bits(&self) -> u64 {
        debug_assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| if b { acc | 1 << i } else { acc })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bits[x]
    }

    pub fn insert(&mut self, x: usize) {
        self.bits[x] = true;
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn is_subset_of(&self, other: &DatasetMask) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &DatasetMask) -> DatasetMask {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &DatasetMask) -> DatasetMask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &DatasetMask) -> DatasetMask {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> DatasetMask {
        DatasetMask {
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }

    fn zip_with(&self, other: &DatasetMask, f: impl Fn(bool, bool) -> bool) -> DatasetMask {
        assert_eq!(self.bits.len(), other.bits.len(), "mask length mismatch");
        DatasetMask {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn check(&self, universe: &FiniteUniverse) -> Result<()> {
        if self.bits.len() != universe.x_size() {
            return Err(Error::input(format!(
                "mask length {} does not match universe x_size {}",
                self.bits.len(),
                universe.x_size()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for DatasetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Exact fraction of features a hypothesis labels correctly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
}

impl Accuracy {
    pub fn as_f64(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }

    pub fn is_one(&self) -> bool {
        self.correct == self.total
    }
}

impl PartialOrd for Accuracy {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Accuracy {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // cross-multiplied exact comparison
        (self.correct as u128 * other.total as u128)
            .cmp(&(other.correct as u128 * self.total as u128))
    }
}

impl fmt::Display for Accuracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.correct, self.total)
    }
}

/// True iff `f` predicts the oracle label at feature `x`.
pub fn satisfies(f: &Hypothesis, x: usize, universe: &FiniteUniverse) -> Result<bool> {
    f.check(universe)?;
    if x >= universe.x_size() {
        return Err(Error::input(format!(
            "feature index {x} out of range 0..{}",
            universe.x_size()
        )));
    }
    Ok(f.label(x) == universe.oracle_label(x))
}

/// Indices (into `space.members()`) of hypotheses correct on every included
/// feature of `mask`. Order follows the input space.
pub fn feasible_indices(
    space: &HypothesisSpace,
    mask: &DatasetMask,
    universe: &FiniteUniverse,
) -> Result<Vec<usize>> {
    mask.check(universe)?;
    let mut out = Vec::new();
    for (i, h) in space.members().iter().enumerate() {
        h.check(universe)?;
        if mask.indices().all(|x| h.label(x) == universe.oracle_label(x)) {
            out.push(i);
        }
    }
    Ok(out)
}

/// The feasible set: hypotheses surviving every sample of `mask`.
pub fn feasible_set(
    space: &HypothesisSpace,
    mask: &DatasetMask,
    universe: &FiniteUniverse,
) -> Result<HypothesisSpace> {
    let idx = feasible_indices(space, mask, universe)?;
    Ok(HypothesisSpace {
        members: idx.iter().map(|&i| space.members()[i].clone()).collect(),
    })
}

/// The generalization set of `mask`: features every feasible hypothesis
/// labels correctly. Requires the oracle to be a member of `space`.
pub fn generalization(
    space: &HypothesisSpace,
    mask: &DatasetMask,
    universe: &FiniteUniverse,
) -> Result<DatasetMask> {
    if !space.contains_oracle(universe) {
        return Err(Error::precondition(
            "generalization requires the oracle mapping to be a member of the hypothesis space",
        ));
    }
    let survivors = feasible_indices(space, mask, universe)?;
    let mut out = DatasetMask::full(universe.x_size());
    for &i in &survivors {
        out = out.intersection(&correct_set(&space.members()[i], universe)?);
    }
    Ok(out)
}

/// Features on which every listed hypothesis agrees with the oracle.
pub fn consistent_set(members: &[Hypothesis], universe: &FiniteUniverse) -> Result<DatasetMask> {
    if members.is_empty() {
        return Err(Error::input(
            "consistent_set over an empty hypothesis list",
        ));
    }
    let mut out = DatasetMask::full(universe.x_size());
    for h in members {
        out = out.intersection(&correct_set(h, universe)?);
    }
    Ok(out)
}

/// Indices of members wrong on at least one included feature of `mask`
/// (the violated set; the complement of the feasible indices).
pub fn violated_set(
    members: &[Hypothesis],
    mask: &DatasetMask,
    universe: &FiniteUniverse,
) -> Result<Vec<usize>> {
    mask.check(universe)?;
    let mut out = Vec::new();
    for (i, h) in members.iter().enumerate() {
        h.check(universe)?;
        if mask.indices().any(|x| h.label(x) != universe.oracle_label(x)) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Features `f` labels correctly; the point inverse of the feasible-set map.
pub fn correct_set(f: &Hypothesis, universe: &FiniteUniverse) -> Result<DatasetMask> {
    f.check(universe)?;
    Ok(DatasetMask {
        bits: (0..universe.x_size())
            .map(|x| f.label(x) == universe.oracle_label(x))
            .collect(),
    })
}

/// Features every hypothesis in `members` labels correctly, i.e. the
/// unanimous-correct reading of the upper inverse of the feasible-set map.
pub fn unanimous_correct_set(
    members: &[Hypothesis],
    universe: &FiniteUniverse,
) -> Result<DatasetMask> {
    consistent_set(members, universe)
}

/// Exact accuracy of `f` over the whole universe.
pub fn accuracy(f: &Hypothesis, universe: &FiniteUniverse) -> Result<Accuracy> {
    let correct = correct_set(f, universe)?.count();
    Ok(Accuracy {
        correct,
        total: universe.x_size(),
    })
}

// ---------------------------------------------------------------------------
// Plain-text fixture format:
//   universe x=<n> y=<m>
//   oracle <n labels>
//   hyp <n labels>      (zero or more)
//   mask <indices>      (zero or more; "mask" alone is the empty mask)
// ---------------------------------------------------------------------------

/// A parsed fixture: universe, hypothesis space and any trailing masks.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedFixture {
    pub universe: FiniteUniverse,
    pub space: HypothesisSpace,
    pub masks: Vec<DatasetMask>,
}

pub fn parse_fixture(text: &str, path: &str) -> Result<ParsedFixture> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty fixture"))?;
    let (x_size, y_size) = parse_header(header)
        .ok_or_else(|| Error::parse(path, line_no, "expected `universe x=<n> y=<m>`"))?;

    let (line_no, oracle_line) = lines
        .next()
        .ok_or_else(|| Error::parse(path, line_no, "missing `oracle` line"))?;
    let oracle = parse_labels(oracle_line, "oracle", x_size)
        .map_err(|msg| Error::parse(path, line_no, msg))?;
    let universe = FiniteUniverse::new(y_size, oracle)
        .map_err(|e| Error::parse(path, line_no, e.to_string()))?;

    let mut members = Vec::new();
    let mut masks = Vec::new();
    for (line_no, line) in lines {
        if let Some(rest) = line.strip_prefix("hyp") {
            if !masks.is_empty() {
                return Err(Error::parse(path, line_no, "hyp line after mask lines"));
            }
            let table = parse_labels(&format!("hyp{rest}"), "hyp", x_size)
                .map_err(|msg| Error::parse(path, line_no, msg))?;
            let h = Hypothesis::new(table, &universe)
                .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
            members.push(h);
        } else if let Some(rest) = line.strip_prefix("mask") {
            let indices: Vec<usize> = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| format!("bad index `{t}` in mask line"))
                })
                .collect::<std::result::Result<_, _>>()
                .map_err(|msg| Error::parse(path, line_no, msg))?;
            let mask = DatasetMask::from_indices(x_size, &indices)
                .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
            masks.push(mask);
        } else {
            return Err(Error::parse(
                path,
                line_no,
                format!("unrecognized line `{line}`"),
            ));
        }
    }
    let space = HypothesisSpace::new(members, &universe)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    Ok(ParsedFixture {
        universe,
        space,
        masks,
    })
}

pub fn serialize_fixture(
    universe: &FiniteUniverse,
    space: &HypothesisSpace,
    masks: &[DatasetMask],
) -> String {
    let mut out = format!("universe x={} y={}\n", universe.x_size(), universe.y_size());
    out.push_str("oracle");
    for x in 0..universe.x_size() {
        out.push_str(&format!(" {}", universe.oracle_label(x)));
    }
    out.push('\n');
    for h in space.members() {
        out.push_str("hyp");
        for &y in h.table() {
            out.push_str(&format!(" {y}"));
        }
        out.push('\n');
    }
    for mask in masks {
        out.push_str("mask");
        for i in mask.indices() {
            out.push_str(&format!(" {i}"));
        }
        out.push('\n');
    }
    out
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.strip_prefix("universe")?.trim();
    let mut x = None;
    let mut y = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("x=") {
            x = v.parse().ok();
        } else if let Some(v) = tok.strip_prefix("y=") {
            y = v.parse().ok();
        } else {
            return None;
        }
    }
    Some((x?, y?))
}

fn parse_labels(
    line: &str,
    keyword: &str,
    expected: usize,
) -> std::result::Result<Vec<usize>, String> {
    let rest = line
        .strip_prefix(keyword)
        .ok_or_else(|| format!("expected `{keyword}` line"))?;
    let labels: Vec<usize> = rest
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| format!("bad label `{t}` in {keyword} line"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if labels.len() != expected {
        return Err(format!(
            "{keyword} line has {} labels, expected {expected}",
            labels.len()
        ));
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// U2: two features, two labels, oracle is the identity. Hypotheses are
    /// named f_ab with f(0)=a, f(1)=b.
    pub(crate) fn u2() -> FiniteUniverse {
        FiniteUniverse::new(2, vec![0, 1]).unwrap()
    }

    fn hyp(universe: &FiniteUniverse, table: &[usize]) -> Hypothesis {
        Hypothesis::new(table.to_vec(), universe).unwrap()
    }

    fn u2_all(universe: &FiniteUniverse) -> HypothesisSpace {
        let members = vec![
            hyp(universe, &[0, 0]),
            hyp(universe, &[0, 1]),
            hyp(universe, &[1, 0]),
            hyp(universe, &[1, 1]),
        ];
        HypothesisSpace::new(members, universe).unwrap()
    }

    #[test]
    fn satisfies_examples() {
        let u = u2();
        assert!(satisfies(&hyp(&u, &[0, 1]), 0, &u).unwrap());
        assert!(!satisfies(&hyp(&u, &[1, 0]), 0, &u).unwrap());
        assert!(!satisfies(&hyp(&u, &[0, 0]), 1, &u).unwrap());
        assert!(matches!(
            satisfies(&hyp(&u, &[0, 0]), 2, &u),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn feasible_set_examples() {
        let u = u2();
        let all = u2_all(&u);
        let empty = DatasetMask::empty(2);
        assert_eq!(feasible_set(&all, &empty, &u).unwrap(), all);

        let m0 = DatasetMask::from_indices(2, &[0]).unwrap();
        let surv = feasible_set(&all, &m0, &u).unwrap();
        assert_eq!(
            surv.members(),
            &[hyp(&u, &[0, 0]), hyp(&u, &[0, 1])]
        );

        let two = HypothesisSpace::new(vec![hyp(&u, &[0, 1]), hyp(&u, &[1, 0])], &u).unwrap();
        let surv = feasible_set(&two, &m0, &u).unwrap();
        assert_eq!(surv.members(), &[hyp(&u, &[0, 1])]);
    }

    #[test]
    fn generalization_examples() {
        let u = u2();
        let all = u2_all(&u);
        let m0 = DatasetMask::from_indices(2, &[0]).unwrap();
        assert_eq!(generalization(&all, &m0, &u).unwrap(), m0);

        let two = HypothesisSpace::new(vec![hyp(&u, &[0, 1]), hyp(&u, &[1, 0])], &u).unwrap();
        assert_eq!(
            generalization(&two, &m0, &u).unwrap(),
            DatasetMask::full(2)
        );

        let solo = HypothesisSpace::new(vec![u.oracle_hypothesis()], &u).unwrap();
        assert_eq!(
            generalization(&solo, &DatasetMask::empty(2), &u).unwrap(),
            DatasetMask::full(2)
        );
    }

    #[test]
    fn generalization_requires_oracle_membership() {
        let u = u2();
        let no_oracle = HypothesisSpace::new(vec![hyp(&u, &[0, 0]), hyp(&u, &[1, 0])], &u).unwrap();
        let err = generalization(&no_oracle, &DatasetMask::empty(2), &u).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn consistent_set_examples() {
        let u = u2();
        let pair = [hyp(&u, &[0, 0]), hyp(&u, &[0, 1])];
        assert_eq!(
            consistent_set(&pair, &u).unwrap(),
            DatasetMask::from_indices(2, &[0]).unwrap()
        );
        assert_eq!(
            consistent_set(&[u.oracle_hypothesis()], &u).unwrap(),
            DatasetMask::full(2)
        );
        assert_eq!(
            consistent_set(&[hyp(&u, &[1, 0])], &u).unwrap(),
            DatasetMask::empty(2)
        );
        assert!(matches!(
            consistent_set(&[], &u),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn violated_set_examples() {
        let u = u2();
        let all = u2_all(&u);
        let empty = DatasetMask::empty(2);
        assert!(violated_set(all.members(), &empty, &u).unwrap().is_empty());

        let m0 = DatasetMask::from_indices(2, &[0]).unwrap();
        // members ordered f_00 f_01 f_10 f_11
        assert_eq!(violated_set(all.members(), &m0, &u).unwrap(), vec![2, 3]);

        let full = DatasetMask::full(2);
        assert_eq!(
            violated_set(all.members(), &full, &u).unwrap(),
            vec![0, 2, 3]
        );
    }

    #[test]
    fn violated_complements_feasible() {
        let u = u2();
        let all = u2_all(&u);
        for bits in 0..4u64 {
            let mask = DatasetMask::from_bits(2, bits);
            let feas = feasible_indices(&all, &mask, &u).unwrap();
            let viol = violated_set(all.members(), &mask, &u).unwrap();
            let mut union: Vec<usize> = feas.iter().chain(&viol).copied().collect();
            union.sort_unstable();
            assert_eq!(union, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn correct_set_and_accuracy() {
        let u = u2();
        assert_eq!(
            correct_set(&u.oracle_hypothesis(), &u).unwrap(),
            DatasetMask::full(2)
        );
        assert_eq!(
            correct_set(&hyp(&u, &[0, 0]), &u).unwrap(),
            DatasetMask::from_indices(2, &[0]).unwrap()
        );
        assert_eq!(
            correct_set(&hyp(&u, &[1, 0]), &u).unwrap(),
            DatasetMask::empty(2)
        );

        assert!(accuracy(&u.oracle_hypothesis(), &u).unwrap().is_one());
        assert_eq!(
            accuracy(&hyp(&u, &[0, 0]), &u).unwrap(),
            Accuracy { correct: 1, total: 2 }
        );
        assert_eq!(
            accuracy(&hyp(&u, &[1, 0]), &u).unwrap(),
            Accuracy { correct: 0, total: 2 }
        );
    }

    #[test]
    fn space_rejects_duplicates_and_malformed() {
        let u = u2();
        let dup = HypothesisSpace::new(vec![hyp(&u, &[0, 0]), hyp(&u, &[0, 0])], &u);
        assert!(dup.is_err());

        let other = FiniteUniverse::new(3, vec![0, 1, 2]).unwrap();
        let foreign = Hypothesis::new(vec![2, 2, 2], &other).unwrap();
        assert!(HypothesisSpace::new(vec![foreign], &u).is_err());
    }

    #[test]
    fn fixture_round_trip() {
        let u = u2();
        let all = u2_all(&u);
        let masks = vec![
            DatasetMask::from_indices(2, &[0]).unwrap(),
            DatasetMask::empty(2),
        ];
        let text = serialize_fixture(&u, &all, &masks);
        let parsed = parse_fixture(&text, "mem").unwrap();
        assert_eq!(parsed.universe, u);
        assert_eq!(parsed.space, all);
        assert_eq!(parsed.masks, masks);
    }

    #[test]
    fn fixture_errors_carry_line_numbers() {
        let bad = "universe x=2 y=2\noracle 0 1\nhyp 0 7\n";
        match parse_fixture(bad, "f.txt").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
        let bad = "universe x=2 y=2\noracle 0\n";
        match parse_fixture(bad, "f.txt").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
        let bad = "universe x=2 y=2\noracle 0 1\nbogus line\n";
        match parse_fixture(bad, "f.txt").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other}"),
        }
    }

    mod mask_algebra {
        use super::*;
        use proptest::prelude::*;

        const X: usize = 9;

        fn mask() -> impl Strategy<Value = DatasetMask> {
            (0u64..(1 << X)).prop_map(|bits| DatasetMask::from_bits(X, bits))
        }

        proptest! {
            #[test]
            fn de_morgan(a in mask(), b in mask()) {
                prop_assert_eq!(
                    a.union(&b).complement(),
                    a.complement().intersection(&b.complement())
                );
                prop_assert_eq!(
                    a.intersection(&b).complement(),
                    a.complement().union(&b.complement())
                );
            }

            #[test]
            fn difference_is_intersection_with_complement(a in mask(), b in mask()) {
                prop_assert_eq!(a.difference(&b), a.intersection(&b.complement()));
            }

            #[test]
            fn subset_iff_union_absorbs(a in mask(), b in mask()) {
                prop_assert_eq!(a.is_subset_of(&b), a.union(&b) == b);
                prop_assert_eq!(a.is_subset_of(&b), a.intersection(&b) == a);
            }

            #[test]
            fn bits_round_trip(a in mask()) {
                prop_assert_eq!(DatasetMask::from_bits(X, a.to_bits()), a.clone());
                let via_indices =
                    DatasetMask::from_indices(X, &a.indices().collect::<Vec<_>>()).unwrap();
                prop_assert_eq!(via_indices, a);
            }
        }
    }
}
