//! Brute-force verification of the set-calculus properties.
//!
//! Random finite universes and hypothesis spaces are generated from a seed,
//! and every property, identity and no-generalization theorem is decided by
//! exhaustive evaluation over subsets. A failed check carries a replayable
//! counterexample in the plain-text fixture format.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::finite_core::{
    self, accuracy, consistent_set, correct_set, serialize_fixture, parse_fixture, DatasetMask,
    FiniteUniverse, Hypothesis, HypothesisSpace,
};

/// Default cap on full hypothesis enumeration (`y_size^x_size` tables).
pub const DEFAULT_ENUM_CAP: usize = 4096;

/// Exhaustive subset quantification up to this feature count; beyond it the
/// checks fall back to seeded sampling.
const EXHAUSTIVE_SUBSET_LIMIT: usize = 12;
const EXHAUSTIVE_PAIR_LIMIT: usize = 8;
const SAMPLED_SUBSETS: usize = 256;
const SAMPLED_PAIRS: usize = 256;

// ---------------------------------------------------------------------------
// Property identifiers
// ---------------------------------------------------------------------------

/// Every checkable statement: the ten numbered properties, the accuracy
/// floor, the surrogate-growth theorem, the two no-generalization theorems
/// and the thirteen set-computation identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropertyId {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P9,
    P10,
    AccFloor,
    Thm1,
    NoGen1,
    NoGen2,
    B1(u8),
}

impl PropertyId {
    pub const ALL: [PropertyId; 27] = [
        PropertyId::P1,
        PropertyId::P2,
        PropertyId::P3,
        PropertyId::P4,
        PropertyId::P5,
        PropertyId::P6,
        PropertyId::P7,
        PropertyId::P8,
        PropertyId::P9,
        PropertyId::P10,
        PropertyId::AccFloor,
        PropertyId::Thm1,
        PropertyId::NoGen1,
        PropertyId::NoGen2,
        PropertyId::B1(1),
        PropertyId::B1(2),
        PropertyId::B1(3),
        PropertyId::B1(4),
        PropertyId::B1(5),
        PropertyId::B1(6),
        PropertyId::B1(7),
        PropertyId::B1(8),
        PropertyId::B1(9),
        PropertyId::B1(10),
        PropertyId::B1(11),
        PropertyId::B1(12),
        PropertyId::B1(13),
    ];
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyId::P1 => write!(f, "P1"),
            PropertyId::P2 => write!(f, "P2"),
            PropertyId::P3 => write!(f, "P3"),
            PropertyId::P4 => write!(f, "P4"),
            PropertyId::P5 => write!(f, "P5"),
            PropertyId::P6 => write!(f, "P6"),
            PropertyId::P7 => write!(f, "P7"),
            PropertyId::P8 => write!(f, "P8"),
            PropertyId::P9 => write!(f, "P9"),
            PropertyId::P10 => write!(f, "P10"),
            PropertyId::AccFloor => write!(f, "ACC_FLOOR"),
            PropertyId::Thm1 => write!(f, "THM1"),
            PropertyId::NoGen1 => write!(f, "NOGEN1"),
            PropertyId::NoGen2 => write!(f, "NOGEN2"),
            PropertyId::B1(k) => write!(f, "B1_{k}"),
        }
    }
}

impl FromStr for PropertyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        for id in PropertyId::ALL {
            if id.to_string() == s {
                return Ok(id);
            }
        }
        Err(Error::input(format!("unknown property id `{s}`")))
    }
}

// ---------------------------------------------------------------------------
// Random structures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceLimit {
    /// Enumerate the whole function space `y_size^x_size` (subject to the cap).
    All,
    /// Sample at most this many distinct random tables.
    AtMost(usize),
}

#[derive(Debug, Clone)]
pub struct StructureLimits {
    pub max_x: usize,
    pub max_y: usize,
    pub max_space: SpaceLimit,
    pub seed: u64,
    pub enum_cap: usize,
}

impl Default for StructureLimits {
    fn default() -> Self {
        StructureLimits {
            max_x: 6,
            max_y: 3,
            max_space: SpaceLimit::All,
            seed: 0,
            enum_cap: DEFAULT_ENUM_CAP,
        }
    }
}

/// One randomly generated instance: a universe, a hypothesis space and a
/// nested pair of dataset masks `v ⊆ w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Structure {
    pub universe: FiniteUniverse,
    pub space: HypothesisSpace,
    pub v: DatasetMask,
    pub w: DatasetMask,
}

impl Structure {
    pub fn serialize(&self) -> String {
        serialize_fixture(
            &self.universe,
            &self.space,
            &[self.v.clone(), self.w.clone()],
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let fx = parse_fixture(text, "<structure>")?;
        if fx.masks.len() != 2 {
            return Err(Error::input(format!(
                "structure text must carry exactly two mask lines (v, w), found {}",
                fx.masks.len()
            )));
        }
        Ok(Structure {
            universe: fx.universe,
            space: fx.space,
            v: fx.masks[0].clone(),
            w: fx.masks[1].clone(),
        })
    }
}

/// All `y_size^x_size` hypotheses in lexicographic table order.
pub fn enumerate_all_hypotheses(
    universe: &FiniteUniverse,
    cap: usize,
) -> Result<HypothesisSpace> {
    let total = space_cardinality(universe);
    match total {
        Some(n) if n <= cap as u128 => {}
        _ => {
            return Err(Error::input(format!(
                "full enumeration needs {} hypotheses, over the cap of {cap}",
                total.map_or_else(|| "2^64+".to_string(), |n| n.to_string())
            )))
        }
    }
    let x = universe.x_size();
    let y = universe.y_size();
    let mut members = Vec::new();
    let mut table = vec![0usize; x];
    loop {
        members.push(Hypothesis::new(table.clone(), universe)?);
        // next table in lexicographic order, index 0 most significant
        let mut i = x;
        loop {
            if i == 0 {
                return HypothesisSpace::new(members, universe);
            }
            i -= 1;
            table[i] += 1;
            if table[i] < y {
                break;
            }
            table[i] = 0;
        }
    }
}

fn space_cardinality(universe: &FiniteUniverse) -> Option<u128> {
    let mut n: u128 = 1;
    for _ in 0..universe.x_size() {
        n = n.checked_mul(universe.y_size() as u128)?;
        if n > u64::MAX as u128 {
            return None;
        }
    }
    Some(n)
}

/// Deterministic random structure; the space always contains the oracle.
pub fn random_structure(limits: &StructureLimits) -> Result<Structure> {
    random_structure_opts(limits, true)
}

/// Generator variant used by the mutation-sensitivity harness: with
/// `force_oracle = false` the sampled space may lack the oracle mapping.
pub fn random_structure_opts(limits: &StructureLimits, force_oracle: bool) -> Result<Structure> {
    if limits.max_x == 0 || limits.max_y == 0 {
        return Err(Error::input("limits need max_x >= 1 and max_y >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let x_size = rng.gen_range(1..=limits.max_x);
    let y_size = rng.gen_range(1..=limits.max_y);
    let oracle: Vec<usize> = (0..x_size).map(|_| rng.gen_range(0..y_size)).collect();
    let universe = FiniteUniverse::new(y_size, oracle)?;

    let space = match limits.max_space {
        SpaceLimit::All => enumerate_all_hypotheses(&universe, limits.enum_cap)?,
        SpaceLimit::AtMost(m) => {
            let mut members: Vec<Hypothesis> = Vec::new();
            let mut seen = std::collections::HashSet::new();
            for _ in 0..m {
                let table: Vec<usize> =
                    (0..x_size).map(|_| rng.gen_range(0..y_size)).collect();
                if seen.insert(table.clone()) {
                    members.push(Hypothesis::new(table, &universe)?);
                }
            }
            let oracle_h = universe.oracle_hypothesis();
            if force_oracle && !members.contains(&oracle_h) {
                members.insert(0, oracle_h);
            }
            if members.is_empty() {
                members.push(universe.oracle_hypothesis());
            }
            HypothesisSpace::new(members, &universe)?
        }
    };

    let w_bits: u64 = rng.gen::<u64>() & low_mask(x_size);
    let v_bits: u64 = rng.gen::<u64>() & w_bits;
    Ok(Structure {
        universe,
        space,
        v: DatasetMask::from_bits(x_size, v_bits),
        w: DatasetMask::from_bits(x_size, w_bits),
    })
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

// ---------------------------------------------------------------------------
// Memorizer constructions
// ---------------------------------------------------------------------------

/// The memorizer `f_Z` for a subset `Z`: correct exactly on `Z`, wrong
/// everywhere else (wrong label is `oracle + 1 mod y_size`).
pub fn memorizer(universe: &FiniteUniverse, z: &DatasetMask) -> Result<Hypothesis> {
    if universe.y_size() < 2 {
        return Err(Error::input(
            "memorizer needs y_size >= 2 so a wrong label exists",
        ));
    }
    let table: Vec<usize> = (0..universe.x_size())
        .map(|x| {
            let o = universe.oracle_label(x);
            if z.contains(x) {
                o
            } else {
                (o + 1) % universe.y_size()
            }
        })
        .collect();
    Hypothesis::new(table, universe)
}

/// The space `{ f_Z : Z ⊆ features }` of all `2^x_size` memorizers, ordered
/// by subset bits ascending. Contains the oracle (at `Z` = all features).
pub fn build_memorizer_space(universe: &FiniteUniverse) -> Result<HypothesisSpace> {
    if universe.y_size() < 2 {
        return Err(Error::input(
            "memorizer space needs y_size >= 2 so a wrong label exists",
        ));
    }
    let x = universe.x_size();
    if x > 16 {
        return Err(Error::input(format!(
            "memorizer space would hold 2^{x} members; limit is x_size <= 16"
        )));
    }
    let mut members = Vec::with_capacity(1 << x);
    for bits in 0..(1u64 << x) {
        members.push(memorizer(universe, &DatasetMask::from_bits(x, bits))?);
    }
    HypothesisSpace::new(members, universe)
}

/// Verifies the split no-generalization theorem for one `(Z, U, V)` triple:
/// `U` and `V` must partition the complement of `Z`; the space holding the
/// oracle plus the two memorizers `f_{Z∪U}` and `f_{Z∪V}` must yield a
/// generalization set equal to `Z` exactly.
pub fn check_no_generalization_split(
    universe: &FiniteUniverse,
    z: &DatasetMask,
    u: &DatasetMask,
    v: &DatasetMask,
) -> Result<Verdict> {
    split_check_with(&RealEngine, universe, z, u, v)
}

fn split_check_with<E: ExactEngine>(
    engine: &E,
    universe: &FiniteUniverse,
    z: &DatasetMask,
    u: &DatasetMask,
    v: &DatasetMask,
) -> Result<Verdict> {
    let complement = z.complement();
    if u.union(v) != complement || !u.intersection(v).is_empty() {
        return Err(Error::input(
            "malformed split: U and V must partition the complement of Z",
        ));
    }
    let f_zu = memorizer(universe, &z.union(u))?;
    let f_zv = memorizer(universe, &z.union(v))?;
    let mut members = vec![universe.oracle_hypothesis()];
    for f in [f_zu, f_zv] {
        if !members.contains(&f) {
            members.push(f);
        }
    }
    let space = HypothesisSpace::new(members, universe)?;
    let gen = engine.generalization(&space, z, universe)?;
    if gen == *z {
        Ok(Verdict::pass(PropertyId::NoGen2))
    } else {
        let structure = Structure {
            universe: universe.clone(),
            space,
            v: z.clone(),
            w: complement,
        };
        Ok(Verdict::fail(
            PropertyId::NoGen2,
            &structure,
            format!("split Z={z}, U={u}, V={v}: generalization {gen} != Z"),
        ))
    }
}

// ---------------------------------------------------------------------------
// Engines (the real operations plus mutation-testing variants)
// ---------------------------------------------------------------------------

/// The two operations the property suite routes through an engine, so that
/// deliberately broken variants can prove the suite is non-vacuous.
pub trait ExactEngine: Sync {
    fn feasible_indices(
        &self,
        space: &HypothesisSpace,
        mask: &DatasetMask,
        universe: &FiniteUniverse,
    ) -> Result<Vec<usize>>;

    fn generalization(
        &self,
        space: &HypothesisSpace,
        mask: &DatasetMask,
        universe: &FiniteUniverse,
    ) -> Result<DatasetMask>;
}

pub struct RealEngine;

impl ExactEngine for RealEngine {
    fn feasible_indices(
        &self,
        space: &HypothesisSpace,
        mask: &DatasetMask,
        universe: &FiniteUniverse,
    ) -> Result<Vec<usize>> {
        finite_core::feasible_indices(space, mask, universe)
    }

    fn generalization(
        &self,
        space: &HypothesisSpace,
        mask: &DatasetMask,
        universe: &FiniteUniverse,
    ) -> Result<DatasetMask> {
        finite_core::generalization(space, mask, universe)
    }
}

/// Deliberate defects for suite-sensitivity runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutant {
    /// feasible_set keeps the hypotheses that violate the dataset instead
    /// of the ones that satisfy it.
    InvertFeasible,
    /// generalization no longer insists the oracle is a member; an empty
    /// feasible set silently yields the empty generalization set.
    SkipOracleCheck,
}

impl FromStr for Mutant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "invert-feasible" => Ok(Mutant::InvertFeasible),
            "skip-oracle-check" => Ok(Mutant::SkipOracleCheck),
            other => Err(Error::input(format!("unknown mutant `{other}`"))),
        }
    }
}

pub struct MutantEngine(pub Mutant);

impl ExactEngine for MutantEngine {
    fn feasible_indices(
        &self,
        space: &HypothesisSpace,
        mask: &DatasetMask,
        universe: &FiniteUniverse,
    ) -> Result<Vec<usize>> {
        let real = finite_core::feasible_indices(space, mask, universe)?;
        match self.0 {
            Mutant::InvertFeasible => {
                let keep: std::collections::HashSet<usize> = real.into_iter().collect();
                Ok((0..space.len()).filter(|i| !keep.contains(i)).collect())
            }
            Mutant::SkipOracleCheck => Ok(real),
        }
    }

    fn generalization(
        &self,
        space: &HypothesisSpace,
        mask: &DatasetMask,
        universe: &FiniteUniverse,
    ) -> Result<DatasetMask> {
        let survivors = self.feasible_indices(space, mask, universe)?;
        if survivors.is_empty() {
            return Ok(match self.0 {
                Mutant::InvertFeasible => DatasetMask::full(universe.x_size()),
                Mutant::SkipOracleCheck => DatasetMask::empty(universe.x_size()),
            });
        }
        let mut out = DatasetMask::full(universe.x_size());
        for &i in &survivors {
            out = out.intersection(&correct_set(&space.members()[i], universe)?);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    /// Full structure in the plain-text fixture format (two mask lines).
    pub fixture: String,
    /// Which quantified instance falsified the statement.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: PropertyId,
    pub holds: bool,
    pub counterexample: Option<Counterexample>,
}

impl Verdict {
    fn pass(id: PropertyId) -> Self {
        Verdict {
            id,
            holds: true,
            counterexample: None,
        }
    }

    fn fail(id: PropertyId, structure: &Structure, detail: String) -> Self {
        Verdict {
            id,
            holds: false,
            counterexample: Some(Counterexample {
                fixture: structure.serialize(),
                detail,
            }),
        }
    }
}

/// Re-runs the check that produced a counterexample; the derived randomness
/// is a pure function of the structure text, so the outcome is bit-for-bit
/// reproducible.
pub fn replay<E: ExactEngine>(engine: &E, id: PropertyId, cx: &Counterexample) -> Result<Verdict> {
    let structure = Structure::parse(&cx.fixture)?;
    check_property_with(engine, id, &structure)
}

// ---------------------------------------------------------------------------
// The checks
// ---------------------------------------------------------------------------

pub fn check_property(id: PropertyId, structure: &Structure) -> Result<Verdict> {
    check_property_with(&RealEngine, id, structure)
}

pub fn check_property_with<E: ExactEngine>(
    engine: &E,
    id: PropertyId,
    structure: &Structure,
) -> Result<Verdict> {
    let mut ctx = Ctx::new(engine, structure)?;
    match id {
        PropertyId::P1 => ctx.check_p1(),
        PropertyId::P2 => ctx.check_p2(),
        PropertyId::P3 => ctx.check_p3(),
        PropertyId::P4 => ctx.check_p4(),
        PropertyId::P5 => ctx.check_p5(),
        PropertyId::P6 => ctx.check_p6(),
        PropertyId::P7 => ctx.check_p7(),
        PropertyId::P8 => ctx.check_p8(),
        PropertyId::P9 => ctx.check_p9(),
        PropertyId::P10 => ctx.check_p10(),
        PropertyId::AccFloor => ctx.check_acc_floor(),
        PropertyId::Thm1 => ctx.check_thm1(),
        PropertyId::NoGen1 => ctx.check_nogen1(),
        PropertyId::NoGen2 => ctx.check_nogen2(),
        PropertyId::B1(k) => ctx.check_b1(k),
    }
}

/// Fixed-width bitset over hypothesis-space member indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    fn none(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    fn all(len: usize) -> Self {
        let mut b = Bits::none(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut b = Bits::none(len);
        for &i in indices {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, o: &Bits) -> Bits {
        self.zip(o, |a, b| a & b)
    }

    fn or(&self, o: &Bits) -> Bits {
        self.zip(o, |a, b| a | b)
    }

    fn diff(&self, o: &Bits) -> Bits {
        self.zip(o, |a, b| a & !b)
    }

    fn is_subset(&self, o: &Bits) -> bool {
        self.words.iter().zip(&o.words).all(|(&a, &b)| a & !b == 0)
    }

    fn zip(&self, o: &Bits, f: impl Fn(u64, u64) -> u64) -> Bits {
        Bits {
            words: self
                .words
                .iter()
                .zip(&o.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            len: self.len,
        }
    }
}

struct Ctx<'a, E: ExactEngine> {
    engine: &'a E,
    s: &'a Structure,
    x: usize,
    n_members: usize,
    /// Subset keys the quantifiers range over.
    subsets: Vec<u64>,
    exhaustive: bool,
    feas: HashMap<u64, (Vec<usize>, Bits)>,
    gen: HashMap<u64, DatasetMask>,
    viol: HashMap<u64, Bits>,
}

impl<'a, E: ExactEngine> Ctx<'a, E> {
    fn new(engine: &'a E, s: &'a Structure) -> Result<Self> {
        let x = s.universe.x_size();
        let exhaustive = x <= EXHAUSTIVE_SUBSET_LIMIT;
        let subsets: Vec<u64> = if exhaustive {
            (0..(1u64 << x)).collect()
        } else {
            let mut rng = Self::derived_rng_of(s, "subsets");
            let mut keys: Vec<u64> = (0..SAMPLED_SUBSETS)
                .map(|_| rng.gen::<u64>() & low_mask(x))
                .collect();
            keys.push(0);
            keys.push(low_mask(x));
            keys.sort_unstable();
            keys.dedup();
            keys
        };
        Ok(Ctx {
            engine,
            s,
            x,
            n_members: s.space.len(),
            subsets,
            exhaustive,
            feas: HashMap::new(),
            gen: HashMap::new(),
            viol: HashMap::new(),
        })
    }

    fn derived_rng(&self, salt: &str) -> ChaCha8Rng {
        Self::derived_rng_of(self.s, salt)
    }

    fn derived_rng_of(s: &Structure, salt: &str) -> ChaCha8Rng {
        let mut h: u64 = 0xcbf29ce484222325;
        for b in s.serialize().bytes().chain(salt.bytes()) {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        ChaCha8Rng::seed_from_u64(h)
    }

    fn mask(&self, bits: u64) -> DatasetMask {
        DatasetMask::from_bits(self.x, bits)
    }

    fn feas_entry(&mut self, bits: u64) -> Result<&(Vec<usize>, Bits)> {
        if !self.feas.contains_key(&bits) {
            let idx = self
                .engine
                .feasible_indices(&self.s.space, &self.mask(bits), &self.s.universe)?;
            let set = Bits::from_indices(self.n_members, &idx);
            self.feas.insert(bits, (idx, set));
        }
        Ok(&self.feas[&bits])
    }

    fn feas_bits(&mut self, bits: u64) -> Result<Bits> {
        Ok(self.feas_entry(bits)?.1.clone())
    }

    fn feas_idx(&mut self, bits: u64) -> Result<Vec<usize>> {
        Ok(self.feas_entry(bits)?.0.clone())
    }

    fn gen_mask(&mut self, bits: u64) -> Result<DatasetMask> {
        if !self.gen.contains_key(&bits) {
            let g = self
                .engine
                .generalization(&self.s.space, &self.mask(bits), &self.s.universe)?;
            self.gen.insert(bits, g);
        }
        Ok(self.gen[&bits].clone())
    }

    fn viol_bits(&mut self, bits: u64) -> Result<Bits> {
        if !self.viol.contains_key(&bits) {
            let idx = finite_core::violated_set(
                self.s.space.members(),
                &self.mask(bits),
                &self.s.universe,
            )?;
            self.viol
                .insert(bits, Bits::from_indices(self.n_members, &idx));
        }
        Ok(self.viol[&bits].clone())
    }

    /// All nested pairs `v ⊆ w`, exhaustive for small x.
    fn nested_pairs(&self) -> Vec<(u64, u64)> {
        if self.x <= EXHAUSTIVE_PAIR_LIMIT {
            let mut out = Vec::new();
            for w in 0..(1u64 << self.x) {
                let mut v = w;
                loop {
                    out.push((v, w));
                    if v == 0 {
                        break;
                    }
                    v = (v - 1) & w;
                }
            }
            out
        } else {
            let mut rng = self.derived_rng("nested-pairs");
            (0..SAMPLED_PAIRS)
                .map(|_| {
                    let a = rng.gen::<u64>() & low_mask(self.x);
                    let b = rng.gen::<u64>() & low_mask(self.x);
                    (a & b, a | b)
                })
                .collect()
        }
    }

    /// Arbitrary pairs, exhaustive for small x.
    fn any_pairs(&self) -> Vec<(u64, u64)> {
        if self.x <= 6 && self.exhaustive {
            let mut out = Vec::new();
            for a in 0..(1u64 << self.x) {
                for b in 0..(1u64 << self.x) {
                    out.push((a, b));
                }
            }
            out
        } else {
            let mut rng = self.derived_rng("any-pairs");
            (0..SAMPLED_PAIRS)
                .map(|_| {
                    (
                        rng.gen::<u64>() & low_mask(self.x),
                        rng.gen::<u64>() & low_mask(self.x),
                    )
                })
                .collect()
        }
    }

    /// Random families of subsets, sizes 1..=4.
    fn families(&self, salt: &str) -> Vec<Vec<u64>> {
        let mut rng = self.derived_rng(salt);
        (0..8)
            .map(|_| {
                let size = rng.gen_range(1..=4);
                (0..size)
                    .map(|_| rng.gen::<u64>() & low_mask(self.x))
                    .collect()
            })
            .collect()
    }

    /// Random nonempty sub-lists of the feasible indices at `v`, always
    /// including the full feasible list itself.
    fn sample_hypothesis_subsets(&mut self, v: u64, salt: &str) -> Result<Vec<Vec<usize>>> {
        let feas = self.feas_idx(v)?;
        if feas.is_empty() {
            return Ok(Vec::new());
        }
        let mut rng = self.derived_rng(salt);
        let mut out = vec![feas.clone()];
        for _ in 0..3 {
            let pick: Vec<usize> = feas.iter().copied().filter(|_| rng.gen::<bool>()).collect();
            if pick.is_empty() {
                out.push(vec![feas[rng.gen_range(0..feas.len())]]);
            } else {
                out.push(pick);
            }
        }
        Ok(out)
    }

    fn members_of(&self, indices: &[usize]) -> Vec<Hypothesis> {
        indices
            .iter()
            .map(|&i| self.s.space.members()[i].clone())
            .collect()
    }

    fn fail(&self, id: PropertyId, detail: String) -> Result<Verdict> {
        Ok(Verdict::fail(id, self.s, detail))
    }

    // --- the individual statements -------------------------------------

    /// Antitone feasible sets: V ⊆ W implies T(W) ⊆ T(V).
    fn check_p1(&mut self) -> Result<Verdict> {
        for (v, w) in self.nested_pairs() {
            let fv = self.feas_bits(v)?;
            let fw = self.feas_bits(w)?;
            if !fw.is_subset(&fv) {
                return self.fail(
                    PropertyId::P1,
                    format!("V={} W={}: T(W) not subset of T(V)", self.mask(v), self.mask(w)),
                );
            }
        }
        Ok(Verdict::pass(PropertyId::P1))
    }

    /// Monotone generalization: V ⊆ W implies gen(V) ⊆ gen(W).
    fn check_p2(&mut self) -> Result<Verdict> {
        for (v, w) in self.nested_pairs() {
            let gv = self.gen_mask(v)?;
            let gw = self.gen_mask(w)?;
            if !gv.is_subset_of(&gw) {
                return self.fail(
                    PropertyId::P2,
                    format!(
                        "V={} W={}: gen(V)={gv} not subset of gen(W)={gw}",
                        self.mask(v),
                        self.mask(w)
                    ),
                );
            }
        }
        Ok(Verdict::pass(PropertyId::P2))
    }

    /// Idempotence: gen(gen(V)) == gen(V).
    fn check_p3(&mut self) -> Result<Verdict> {
        for v in self.subsets.clone() {
            let g = self.gen_mask(v)?;
            let gg = self.gen_mask(g.to_bits())?;
            if gg != g {
                return self.fail(
                    PropertyId::P3,
                    format!("V={}: gen(gen(V))={gg} != gen(V)={g}", self.mask(v)),
                );
            }
        }
        Ok(Verdict::pass(PropertyId::P3))
    }

    /// Squeeze: V ⊆ W ⊆ gen(V) implies gen(W) == gen(V).
    fn check_p4(&mut self) -> Result<Verdict> {
        for v in self.subsets.clone() {
            let g = self.gen_mask(v)?;
            let g_bits = g.to_bits();
            if v & !g_bits != 0 {
                continue; // V not inside gen(V); premise unsatisfiable here
            }
            let free = g_bits & !v;
            for extra in submasks(free, &mut self.derived_rng("p4")) {
                let w = v | extra;
                let gw = self.gen_mask(w)?;
                if gw != g {
                    return self.fail(
                        PropertyId::P4,
                        format!(
                            "V={} W={}: gen(W)={gw} != gen(V)={g}",
                            self.mask(v),
                            self.mask(w)
                        ),
                    );
                }
            }
        }
        Ok(Verdict::pass(PropertyId::P4))
    }

    /// Preservation: W ⊆ gen(V) implies gen(W) ⊆ gen(V).
    fn check_p5(&mut self) -> Result<Verdict> {
        for v in self.subsets.clone() {
            let g = self.gen_mask(v)?;
            let g_bits = g.to_bits();
            for w in self.subsets.clone() {
                if w & !g_bits != 0 {
                    continue;
                }
                let gw = self.gen_mask(w)?;
                if !gw.is_subset_of(&g) {
                    return self.fail(
                        PropertyId::P5,
                        format!(
                            "V={} W={}: gen(W)={gw} not subset of gen(V)={g}",
                            self.mask(v),
                            self.mask(w)
                        ),
                    );
                }
            }
        }
        Ok(Verdict::pass(PropertyId::P5))
    }

    /// Empty-set neutrality: T(∅) is the whole space.
    fn check_p6(&mut self) -> Result<Verdict> {
        let f = self.feas_bits(0)?;
        if f != Bits::all(self.n_members) {
            return self.fail(
                PropertyId::P6,
                "T(empty set) is not the full hypothesis space".to_string(),
            );
        }
        Ok(Verdict::pass(PropertyId::P6))
    }

    /// Reduction: T(V) ⊆ F for all V.
    fn check_p7(&mut self) -> Result<Verdict> {
        let all = Bits::all(self.n_members);
        for v in self.subsets.clone() {
            let f = self.feas_bits(v)?;
            if !f.is_subset(&all) {
                return self.fail(
                    PropertyId::P7,
                    format!("V={}: T(V) escapes the hypothesis space", self.mask(v)),
                );
            }
        }
        Ok(Verdict::pass(PropertyId::P7))
    }

    /// Consistency over fewer hypotheses grows: G ⊆ T(V) implies
    /// consistent(G) ⊇ gen(V).
    fn check_p8(&mut self) -> Result<Verdict> {
        for v in self.subsets.clone() {
            let g = self.gen_mask(v)?;
            for pick in self.sample_hypothesis_subsets(v, "p8")? {
                let cons = consistent_set(&self.members_of(&pick), &self.s.universe)?;
                if !g.is_subset_of(&cons) {
                    return self.fail(
                        PropertyId::P8,
                        format!(
                            "V={} G={pick:?}: consistent(G)={cons} does not contain gen(V)={g}",
                            self.mask(v)
                        ),
                    );
                }
            }
        }
        Ok(Verdict::pass(PropertyId::P8))
    }

    /// Strict growth: w ∈ gen(W) − gen(V) with V ⊆ W implies
    /// gen(V ∪ {w}) strictly contains gen(V).
    fn check_p9(&mut self) -> Result<Verdict> {
        for (v, w) in self.nested_pairs() {
            let gv = self.gen_mask(v)?;
            let gw = self.gen_mask(w)?;
            for point in gw.difference(&gv).indices() {
                let v2 = v | (1u64 << point);
                let gv2 = self.gen_mask(v2)?;
                if !(gv.is_subset_of(&gv2) && gv2 != gv) {
                    return self.fail(
                        PropertyId::P9,
                        format!(
                            "V={} W={} w={point}: gen(V+w)={gv2} does not strictly grow gen(V)={gv}",
                            self.mask(v),
                            self.mask(w)
                        ),
                    );
                }
            }
        }
        Ok(Verdict::pass(PropertyId::P9))
    }

    /// Space inclusion reverses generalization: F_A ⊂ F_B (both holding the
    /// oracle) implies gen_B(V) ⊆ gen_A(V).
    fn check_p10(&mut self) -> Result<Verdict> {
        let bigger = match self.build_superspace()? {
            Some(space) => space,
            None => return Ok(Verdict::pass(PropertyId::P10)), // space already maximal
        };
        for v in self.subsets.clone() {
            let ga = self.gen_mask(v)?;
            let gb = self
                .engine
                .generalization(&bigger, &self.mask(v), &self.s.universe)?;
            if !gb.is_subset_of(&ga) {
                return self.fail(
                    PropertyId::P10,
                    format!(
                        "V={}: gen under the larger space {gb} not subset of {ga}",
                        self.mask(v)
                    ),
                );
            }
        }
        Ok(Verdict::pass(PropertyId::P10))
    }

    fn build_superspace(&self) -> Result<Option<HypothesisSpace>> {
        let u = &self.s.universe;
        if let Some(total) = space_cardinality(u) {
            if (self.s.space.len() as u128) >= total {
                return Ok(None);
            }
        }
        let mut rng = self.derived_rng("p10-extras");
        let mut members = self.s.space.members().to_vec();
        let want = rng.gen_range(1..=3);
        let mut added = 0;
        for _ in 0..200 {
            if added == want {
                break;
            }
            let table: Vec<usize> = (0..u.x_size())
                .map(|_| rng.gen_range(0..u.y_size()))
                .collect();
            let h = Hypothesis::new(table, u)?;
            if !members.contains(&h) {
                members.push(h);
                added += 1;
            }
        }
        if added == 0 {
            return Ok(None);
        }
        Ok(Some(HypothesisSpace::new(members, u)?))
    }

    /// Accuracy floor: every survivor of Z has accuracy >= |Z| / x_size.
    fn check_acc_floor(&mut self) -> Result<Verdict> {
        for v in self.subsets.clone() {
            let included = self.mask(v).count();
            for i in self.feas_idx(v)? {
                let acc = accuracy(&self.s.space.members()[i], &self.s.universe)?;
                if acc.correct < included {
                    return self.fail(
                        PropertyId::AccFloor,
                        format!(
                            "V={} member {i}: accuracy {acc} below floor {included}/{}",
                            self.mask(v),
                            self.x
                        ),
                    );
                }
            }
        }
        Ok(Verdict::pass(PropertyId::AccFloor))
    }

    /// Surrogate growth: for G ⊆ T(V) and W = consistent(G), any w outside W
    /// strictly grows the generalization set when admitted.
    fn check_thm1(&mut self) -> Result<Verdict> {
        for v in self.subsets.clone() {
            let gv = self.gen_mask(v)?;
            for pick in self.sample_hypothesis_subsets(v, "thm1")? {
                let cons = consistent_set(&self.members_of(&pick), &self.s.universe)?;
                for point in cons.complement().indices() {
                    let v2 = v | (1u64 << point);
                    let gv2 = self.gen_mask(v2)?;
                    if !(gv.is_subset_of(&gv2) && gv2 != gv) {
                        return self.fail(
                            PropertyId::Thm1,
                            format!(
                                "V={} G={pick:?} w={point}: gen(V+w)={gv2} does not strictly grow gen(V)={gv}",
                                self.mask(v)
                            ),
                        );
                    }
                }
            }
        }
        Ok(Verdict::pass(PropertyId::Thm1))
    }

    /// Memorizer space kills generalization: gen(Z) == Z for every Z.
    fn check_nogen1(&mut self) -> Result<Verdict> {
        if self.s.universe.y_size() < 2 {
            return Ok(Verdict::pass(PropertyId::NoGen1)); // no wrong label constructible
        }
        let mem_space = build_memorizer_space(&self.s.universe)?;
        for z in self.subsets.clone() {
            let mask = self.mask(z);
            let gen = self
                .engine
                .generalization(&mem_space, &mask, &self.s.universe)?;
            if gen != mask {
                return self.fail(
                    PropertyId::NoGen1,
                    format!("memorizer space, Z={mask}: generalization {gen} != Z"),
                );
            }
        }
        Ok(Verdict::pass(PropertyId::NoGen1))
    }

    /// Two-memorizer split kills generalization for random partitions.
    fn check_nogen2(&mut self) -> Result<Verdict> {
        if self.s.universe.y_size() < 2 {
            return Ok(Verdict::pass(PropertyId::NoGen2));
        }
        let mut rng = self.derived_rng("nogen2");
        for z in self.subsets.clone() {
            let z_mask = self.mask(z);
            let complement = z_mask.complement();
            let mut u_mask = DatasetMask::empty(self.x);
            let mut v_mask = DatasetMask::empty(self.x);
            for i in complement.indices() {
                if rng.gen::<bool>() {
                    u_mask.insert(i);
                } else {
                    v_mask.insert(i);
                }
            }
            let verdict =
                split_check_with(self.engine, &self.s.universe, &z_mask, &u_mask, &v_mask)?;
            if !verdict.holds {
                // re-anchor the counterexample on this structure
                return self.fail(
                    PropertyId::NoGen2,
                    verdict
                        .counterexample
                        .map(|c| c.detail)
                        .unwrap_or_default(),
                );
            }
        }
        Ok(Verdict::pass(PropertyId::NoGen2))
    }

    /// The thirteen set-computation identities.
    fn check_b1(&mut self, k: u8) -> Result<Verdict> {
        let id = PropertyId::B1(k);
        match k {
            // T(V) = ∩_{v∈V} T({v})
            1 => {
                for v in self.subsets.clone() {
                    let tv = self.feas_bits(v)?;
                    let mut meet = Bits::all(self.n_members);
                    for i in self.mask(v).indices() {
                        meet = meet.and(&self.feas_bits(1u64 << i)?);
                    }
                    if tv != meet {
                        return self.fail(id, format!("V={}: T(V) != meet of point sets", self.mask(v)));
                    }
                }
            }
            // T(V∪W) = T(V) ∩ T(W)
            2 => {
                for (a, b) in self.any_pairs() {
                    let lhs = self.feas_bits(a | b)?;
                    let rhs = self.feas_bits(a)?.and(&self.feas_bits(b)?);
                    if lhs != rhs {
                        return self.fail(id, format!("V={} W={}", self.mask(a), self.mask(b)));
                    }
                }
            }
            // T(∪_α V^α) = ∩_α T(V^α)
            3 => {
                for family in self.families("b1-3") {
                    let union = family.iter().fold(0u64, |acc, &v| acc | v);
                    let lhs = self.feas_bits(union)?;
                    let mut rhs = Bits::all(self.n_members);
                    for &v in &family {
                        rhs = rhs.and(&self.feas_bits(v)?);
                    }
                    if lhs != rhs {
                        return self.fail(id, format!("family {family:?}"));
                    }
                }
            }
            // T(V∩W) ⊇ T(V) ∪ T(W)
            4 => {
                for (a, b) in self.any_pairs() {
                    let lhs = self.feas_bits(a & b)?;
                    let rhs = self.feas_bits(a)?.or(&self.feas_bits(b)?);
                    if !rhs.is_subset(&lhs) {
                        return self.fail(id, format!("V={} W={}", self.mask(a), self.mask(b)));
                    }
                }
            }
            // T(∩_α V^α) ⊇ ∪_α T(V^α)
            5 => {
                for family in self.families("b1-5") {
                    let meet = family
                        .iter()
                        .fold(low_mask(self.x), |acc, &v| acc & v);
                    let lhs = self.feas_bits(meet)?;
                    let mut rhs = Bits::none(self.n_members);
                    for &v in &family {
                        rhs = rhs.or(&self.feas_bits(v)?);
                    }
                    if !rhs.is_subset(&lhs) {
                        return self.fail(id, format!("family {family:?}"));
                    }
                }
            }
            // T(V ∪ (Z−V)) = T(V) ∩ T(Z−V)
            6 => {
                for v in self.subsets.clone() {
                    let c = low_mask(self.x) & !v;
                    let lhs = self.feas_bits(v | c)?;
                    let rhs = self.feas_bits(v)?.and(&self.feas_bits(c)?);
                    if lhs != rhs {
                        return self.fail(id, format!("V={}", self.mask(v)));
                    }
                }
            }
            // S(V) = ∪_{v∈V} S({v})
            7 => {
                for v in self.subsets.clone() {
                    let sv = self.viol_bits(v)?;
                    let mut join = Bits::none(self.n_members);
                    for i in self.mask(v).indices() {
                        join = join.or(&self.viol_bits(1u64 << i)?);
                    }
                    if sv != join {
                        return self.fail(id, format!("V={}: S(V) != join of point sets", self.mask(v)));
                    }
                }
            }
            // S(V∩W) ⊆ S(V) ∩ S(W)
            8 => {
                for (a, b) in self.any_pairs() {
                    let lhs = self.viol_bits(a & b)?;
                    let rhs = self.viol_bits(a)?.and(&self.viol_bits(b)?);
                    if !lhs.is_subset(&rhs) {
                        return self.fail(id, format!("V={} W={}", self.mask(a), self.mask(b)));
                    }
                }
            }
            // S(∩_α V^α) ⊆ ∩_α S(V^α)
            9 => {
                for family in self.families("b1-9") {
                    let meet = family
                        .iter()
                        .fold(low_mask(self.x), |acc, &v| acc & v);
                    let lhs = self.viol_bits(meet)?;
                    let mut rhs = Bits::all(self.n_members);
                    for &v in &family {
                        rhs = rhs.and(&self.viol_bits(v)?);
                    }
                    if !lhs.is_subset(&rhs) {
                        return self.fail(id, format!("family {family:?}"));
                    }
                }
            }
            // S(V∪W) = S(V) ∪ S(W)
            10 => {
                for (a, b) in self.any_pairs() {
                    let lhs = self.viol_bits(a | b)?;
                    let rhs = self.viol_bits(a)?.or(&self.viol_bits(b)?);
                    if lhs != rhs {
                        return self.fail(id, format!("V={} W={}", self.mask(a), self.mask(b)));
                    }
                }
            }
            // S(∪_α V^α) = ∪_α S(V^α)
            11 => {
                for family in self.families("b1-11") {
                    let union = family.iter().fold(0u64, |acc, &v| acc | v);
                    let lhs = self.viol_bits(union)?;
                    let mut rhs = Bits::none(self.n_members);
                    for &v in &family {
                        rhs = rhs.or(&self.viol_bits(v)?);
                    }
                    if lhs != rhs {
                        return self.fail(id, format!("family {family:?}"));
                    }
                }
            }
            // S(V ∪ (Z−V)) = S(V) ∪ S(Z−V)
            12 => {
                for v in self.subsets.clone() {
                    let c = low_mask(self.x) & !v;
                    let lhs = self.viol_bits(v | c)?;
                    let rhs = self.viol_bits(v)?.or(&self.viol_bits(c)?);
                    if lhs != rhs {
                        return self.fail(id, format!("V={}", self.mask(v)));
                    }
                }
            }
            // S(Z−V) ⊇ S(Z) − S(V)
            13 => {
                for v in self.subsets.clone() {
                    let c = low_mask(self.x) & !v;
                    let lhs = self.viol_bits(c)?;
                    let rhs = self.viol_bits(low_mask(self.x))?.diff(&self.viol_bits(v)?);
                    if !rhs.is_subset(&lhs) {
                        return self.fail(id, format!("V={}", self.mask(v)));
                    }
                }
            }
            other => return Err(Error::input(format!("unknown identity B1_{other}"))),
        }
        Ok(Verdict::pass(id))
    }

}

/// Submasks of `free`; exhaustive when small, otherwise a seeded sample.
fn submasks(free: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    if free.count_ones() <= 10 {
        let mut out = Vec::new();
        let mut m = free;
        loop {
            out.push(m);
            if m == 0 {
                break;
            }
            m = (m - 1) & free;
        }
        out
    } else {
        (0..64).map(|_| rng.gen::<u64>() & free).collect()
    }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SweepFailure {
    pub seed: u64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub structures: usize,
    /// (property id, structures checked, failures observed)
    pub per_property: Vec<(PropertyId, usize, usize)>,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    pub fn all_hold(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failing_ids(&self) -> Vec<PropertyId> {
        let mut ids: Vec<PropertyId> = self.failures.iter().map(|f| f.verdict.id).collect();
        ids.sort_by_key(|id| id.to_string());
        ids.dedup();
        ids
    }
}

/// Checks every property over `n_seeds` random structures. Seeds are
/// `base.seed, base.seed+1, ..`; each structure is checked against all ids.
pub fn run_sweep<E: ExactEngine>(
    engine: &E,
    base: &StructureLimits,
    n_seeds: u64,
    force_oracle: bool,
) -> Result<SweepReport> {
    let results: Vec<(u64, Vec<Verdict>)> = (0..n_seeds)
        .into_par_iter()
        .map(|i| {
            let mut limits = base.clone();
            limits.seed = base.seed.wrapping_add(i);
            let structure = random_structure_opts(&limits, force_oracle)?;
            let verdicts = PropertyId::ALL
                .iter()
                .map(|&id| check_property_with(engine, id, &structure))
                .collect::<Result<Vec<_>>>()?;
            Ok((limits.seed, verdicts))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut failures = Vec::new();
    let mut counts: HashMap<PropertyId, usize> = HashMap::new();
    for (seed, verdicts) in &results {
        for v in verdicts {
            *counts.entry(v.id).or_default() += 1;
            if !v.holds {
                failures.push(SweepFailure {
                    seed: *seed,
                    verdict: v.clone(),
                });
            }
        }
    }
    let per_property = PropertyId::ALL
        .iter()
        .map(|&id| {
            let checked = counts.get(&id).copied().unwrap_or(0);
            let failed = failures.iter().filter(|f| f.verdict.id == id).count();
            (id, checked, failed)
        })
        .collect();
    Ok(SweepReport {
        structures: results.len(),
        per_property,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u2() -> FiniteUniverse {
        FiniteUniverse::new(2, vec![0, 1]).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        let u = u2();
        assert_eq!(enumerate_all_hypotheses(&u, 4096).unwrap().len(), 4);
        let u32_ = FiniteUniverse::new(2, vec![0, 1, 0]).unwrap();
        assert_eq!(enumerate_all_hypotheses(&u32_, 4096).unwrap().len(), 8);
        let u23 = FiniteUniverse::new(3, vec![0, 1]).unwrap();
        assert_eq!(enumerate_all_hypotheses(&u23, 4096).unwrap().len(), 9);
    }

    #[test]
    fn enumeration_cap_refused_with_required_value() {
        let u = FiniteUniverse::new(3, vec![0; 8]).unwrap(); // 3^8 = 6561
        let err = enumerate_all_hypotheses(&u, 4096).unwrap_err();
        assert!(err.to_string().contains("6561"), "{err}");
    }

    #[test]
    fn enumeration_is_lexicographic_and_distinct() {
        let u = u2();
        let space = enumerate_all_hypotheses(&u, 16).unwrap();
        let tables: Vec<&[usize]> = space.members().iter().map(|h| h.table()).collect();
        assert_eq!(tables, vec![&[0, 0][..], &[0, 1], &[1, 0], &[1, 1]]);
    }

    #[test]
    fn random_structure_is_deterministic_and_bounded() {
        let limits = StructureLimits {
            max_x: 4,
            ..StructureLimits::default()
        };
        let a = random_structure(&limits).unwrap();
        let b = random_structure(&limits).unwrap();
        assert_eq!(a, b);
        assert!(a.universe.x_size() >= 1 && a.universe.x_size() <= 4);
        assert!(a.v.is_subset_of(&a.w));
        assert!(a.space.contains_oracle(&a.universe));
    }

    #[test]
    fn random_structures_pass_their_invariants() {
        for seed in 0..200 {
            let limits = StructureLimits {
                seed,
                ..StructureLimits::default()
            };
            let s = random_structure(&limits).unwrap();
            assert!(s.space.contains_oracle(&s.universe));
            assert!(s.v.is_subset_of(&s.w));
            assert_eq!(s.v.len(), s.universe.x_size());
            // round-trip through the text format
            let replayed = Structure::parse(&s.serialize()).unwrap();
            assert_eq!(replayed, s);
        }
    }

    #[test]
    fn all_properties_hold_on_a_few_structures() {
        for seed in 0..25 {
            let limits = StructureLimits {
                max_x: 5,
                seed,
                ..StructureLimits::default()
            };
            let s = random_structure(&limits).unwrap();
            for id in PropertyId::ALL {
                let v = check_property(id, &s).unwrap();
                assert!(
                    v.holds,
                    "{id} failed at seed {seed}: {:?}",
                    v.counterexample
                );
            }
        }
    }

    #[test]
    fn p1_example_structure_holds() {
        let u = u2();
        let s = Structure {
            space: enumerate_all_hypotheses(&u, 16).unwrap(),
            universe: u,
            v: DatasetMask::from_indices(2, &[0]).unwrap(),
            w: DatasetMask::full(2),
        };
        assert!(check_property(PropertyId::P1, &s).unwrap().holds);
        assert!(check_property(PropertyId::P6, &s).unwrap().holds);
        assert!(check_property(PropertyId::Thm1, &s).unwrap().holds);
    }

    #[test]
    fn memorizer_space_examples() {
        let u = u2();
        let mem = build_memorizer_space(&u).unwrap();
        assert_eq!(mem.len(), 4);
        assert!(mem.contains_oracle(&u));

        let u3 = FiniteUniverse::new(2, vec![0, 1, 0]).unwrap();
        let mem3 = build_memorizer_space(&u3).unwrap();
        assert_eq!(mem3.len(), 8); // all distinct or HypothesisSpace::new errors

        // generalization under the memorizer space equals Z for every Z
        for bits in 0..8u64 {
            let z = DatasetMask::from_bits(3, bits);
            let gen = finite_core::generalization(&mem3, &z, &u3).unwrap();
            assert_eq!(gen, z);
        }

        let y1 = FiniteUniverse::new(1, vec![0, 0]).unwrap();
        assert!(build_memorizer_space(&y1).is_err());
    }

    #[test]
    fn no_generalization_split_examples() {
        let u = u2();
        let z = DatasetMask::empty(2);
        let part_u = DatasetMask::from_indices(2, &[0]).unwrap();
        let part_v = DatasetMask::from_indices(2, &[1]).unwrap();
        assert!(check_no_generalization_split(&u, &z, &part_u, &part_v)
            .unwrap()
            .holds);

        let z = DatasetMask::from_indices(2, &[0]).unwrap();
        let part_u = DatasetMask::from_indices(2, &[1]).unwrap();
        let part_v = DatasetMask::empty(2);
        assert!(check_no_generalization_split(&u, &z, &part_u, &part_v)
            .unwrap()
            .holds);

        let z = DatasetMask::full(2);
        let e = DatasetMask::empty(2);
        assert!(check_no_generalization_split(&u, &z, &e, &e).unwrap().holds);

        // overlapping split is malformed
        let z = DatasetMask::empty(2);
        let both = DatasetMask::full(2);
        assert!(check_no_generalization_split(&u, &z, &both, &both).is_err());
    }

    #[test]
    fn mutants_are_caught_and_replayable() {
        let engine = MutantEngine(Mutant::InvertFeasible);
        let limits = StructureLimits::default();
        let mut caught = None;
        for seed in 0..20 {
            let s = random_structure(&StructureLimits {
                seed,
                ..limits.clone()
            })
            .unwrap();
            for id in PropertyId::ALL {
                let v = check_property_with(&engine, id, &s).unwrap();
                if !v.holds {
                    caught = Some((id, v));
                    break;
                }
            }
            if caught.is_some() {
                break;
            }
        }
        let (id, verdict) = caught.expect("inverted feasible_set must be detected");
        let cx = verdict.counterexample.clone().unwrap();
        let replayed = replay(&engine, id, &cx).unwrap();
        assert_eq!(replayed, verdict);
        // and the real engine passes the same structure
        let real = replay(&RealEngine, id, &cx).unwrap();
        assert!(real.holds);
    }

    #[test]
    fn unknown_property_string_is_an_error() {
        assert!("P99".parse::<PropertyId>().is_err());
        assert_eq!("B1_7".parse::<PropertyId>().unwrap(), PropertyId::B1(7));
        assert_eq!(
            "ACC_FLOOR".parse::<PropertyId>().unwrap(),
            PropertyId::AccFloor
        );
    }

    #[test]
    fn small_sweep_is_clean() {
        let report = run_sweep(&RealEngine, &StructureLimits::default(), 10, true).unwrap();
        assert!(report.all_hold(), "{:?}", report.failing_ids());
        assert_eq!(report.structures, 10);
    }
}
