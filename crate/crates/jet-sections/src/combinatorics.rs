//! Index combinatorics: weakly / strictly increasing sequences, the
//! shift bijections between them, staircase tuples, enumeration by
//! weight and by derivative bound, and the `(N+1)^d` word encoding.
//!
//! A *weak* sequence lists the derivative orders of a monomial in one
//! coordinate's jet variables; a tuple of N weak sequences is the same
//! data as a monomial over an N-coordinate chart. A *staircase tuple*
//! is a tuple of N strictly increasing blocks `α¹..α^N` whose first
//! entries clear the combined length of the later blocks:
//! `s_{j+1} ≤ α^j_1` where `s_j = n_N + ⋯ + n_j`. These tuples index
//! the determinant sections, and the componentwise shift `τ⁺` maps
//! them bijectively onto tuples of weak sequences.

use std::cmp::Ordering;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::space::{JetVar, VarSpace};

/// A weakly increasing sequence of naturals, possibly empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WeakSeq {
    entries: Vec<usize>,
}

impl WeakSeq {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSequence(format!(
                "not weakly increasing: {entries:?}"
            )));
        }
        Ok(WeakSeq { entries })
    }

    pub fn empty() -> Self {
        WeakSeq { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Each entry `a` contributes `a + 1`.
    pub fn weight(&self) -> u64 {
        self.entries.iter().map(|&a| a as u64 + 1).sum()
    }

    /// The inverse shift: entry `i` (1-based) maps to `a_i + i - 1`.
    pub fn to_strict(&self) -> StrictSeq {
        StrictSeq {
            entries: self
                .entries
                .iter()
                .enumerate()
                .map(|(i, &a)| a + i)
                .collect(),
        }
    }
}

/// A strictly increasing sequence of naturals, possibly empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StrictSeq {
    entries: Vec<usize>,
}

impl StrictSeq {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSequence(format!(
                "not strictly increasing: {entries:?}"
            )));
        }
        Ok(StrictSeq { entries })
    }

    pub fn empty() -> Self {
        StrictSeq { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The shift `α_i ↦ α_i - i + 1` (1-based), landing in weak
    /// sequences.
    pub fn to_weak(&self) -> WeakSeq {
        WeakSeq {
            entries: self
                .entries
                .iter()
                .enumerate()
                .map(|(i, &a)| a - i)
                .collect(),
        }
    }

    pub fn weight(&self) -> u64 {
        self.to_weak().weight()
    }
}

/// A tuple of `N` weak sequences; block `j` (stored at index `j - 1`)
/// collects derivative orders in coordinate `j`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct WeakTuple {
    blocks: Vec<WeakSeq>,
}

impl WeakTuple {
    pub fn new(blocks: Vec<WeakSeq>) -> Self {
        WeakTuple { blocks }
    }

    pub fn ambient_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[WeakSeq] {
        &self.blocks
    }

    pub fn weight(&self) -> u64 {
        self.blocks.iter().map(WeakSeq::weight).sum()
    }

    /// The inverse of the shifted bijection: block `j` entry `i`
    /// (1-based) maps to `a^j_i + s_{j+1} + i - 1`, where `s_{j+1}` is
    /// the combined length of blocks `j+1..N`.
    pub fn to_staircase(&self) -> StaircaseTuple {
        let n = self.blocks.len();
        let mut blocks = Vec::with_capacity(n);
        for (jdx, a) in self.blocks.iter().enumerate() {
            let s_next: usize = self.blocks[jdx + 1..].iter().map(WeakSeq::len).sum();
            blocks.push(StrictSeq {
                entries: a
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| v + s_next + i)
                    .collect(),
            });
        }
        StaircaseTuple { blocks }
    }

    /// The monomial `∏_{j,i} x_j^{(a^j_i)}` over an N-coordinate
    /// affine chart.
    pub fn monomial(&self) -> Monomial {
        Monomial::from_factors(self.blocks.iter().enumerate().flat_map(|(jdx, a)| {
            a.entries
                .iter()
                .map(move |&l| (JetVar::new(jdx + 1, l), 1))
        }))
    }

    /// Read a monomial back into per-coordinate order lists. Fails on
    /// coordinates outside the given affine space.
    pub fn from_monomial(m: &Monomial, space: &VarSpace) -> Result<Self> {
        let n = space.ambient_dim();
        let mut blocks = vec![Vec::new(); n];
        for &(v, e) in m.factors() {
            space.check_var(v)?;
            if v.coord == 0 {
                return Err(Error::InvalidCoordinate {
                    coord: 0,
                    space: space.to_string(),
                });
            }
            for _ in 0..e {
                blocks[v.coord - 1].push(v.order);
            }
        }
        for b in &mut blocks {
            b.sort_unstable();
        }
        Ok(WeakTuple {
            blocks: blocks.into_iter().map(|entries| WeakSeq { entries }).collect(),
        })
    }
}

/// A tuple of `N` strictly increasing blocks satisfying the staircase
/// condition `s_{j+1} ≤ α^j_1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StaircaseTuple {
    blocks: Vec<StrictSeq>,
}

impl StaircaseTuple {
    pub fn new(blocks: Vec<StrictSeq>) -> Result<Self> {
        let t = StaircaseTuple { blocks };
        t.validate()?;
        Ok(t)
    }

    pub fn all_empty(n: usize) -> Self {
        StaircaseTuple {
            blocks: vec![StrictSeq::empty(); n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.blocks.len();
        for j in 1..=n {
            let block = &self.blocks[j - 1];
            if block.entries.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSequence(format!(
                    "block {j} not strictly increasing: {:?}",
                    block.entries
                )));
            }
            if let Some(&first) = block.entries.first() {
                let bound = self.s(j + 1);
                if first < bound {
                    return Err(Error::StaircaseViolation {
                        block: j,
                        entry: first,
                        bound,
                    });
                }
            }
        }
        Ok(())
    }

    /// Number of blocks `N`.
    pub fn ambient_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[StrictSeq] {
        &self.blocks
    }

    /// Block `j`, 1-based.
    pub fn block(&self, j: usize) -> &StrictSeq {
        &self.blocks[j - 1]
    }

    /// Length of block `j`.
    pub fn block_len(&self, j: usize) -> usize {
        self.blocks[j - 1].len()
    }

    /// `s_j = n_N + ⋯ + n_j`, with `s_{N+1} = 0`. `s_1` is the total
    /// number of entries.
    pub fn s(&self, j: usize) -> usize {
        self.blocks[j - 1..].iter().map(StrictSeq::len).sum()
    }

    pub fn total_len(&self) -> usize {
        self.s(1)
    }

    /// The maximum entry `M`, with `-1` for the all-empty tuple.
    pub fn max_entry(&self) -> i64 {
        self.blocks
            .iter()
            .flat_map(|b| b.entries.iter())
            .map(|&a| a as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn is_all_empty(&self) -> bool {
        self.blocks.iter().all(StrictSeq::is_empty)
    }

    /// The shifted bijection onto weak tuples: block `j` entry `i`
    /// (1-based) maps to `α^j_i - s_{j+1} - i + 1`.
    pub fn to_weak(&self) -> WeakTuple {
        let n = self.blocks.len();
        let mut blocks = Vec::with_capacity(n);
        for j in 1..=n {
            let s_next = self.s(j + 1);
            blocks.push(WeakSeq {
                entries: self.blocks[j - 1]
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| a - s_next - i)
                    .collect(),
            });
        }
        WeakTuple { blocks }
    }

    pub fn weight(&self) -> u64 {
        self.to_weak().weight()
    }

    /// Canonical comparison used for enumeration output: shorter
    /// tuples first, then lexicographic on the block lists.
    fn canonical_key(&self) -> (usize, &[StrictSeq]) {
        (self.total_len(), &self.blocks)
    }
}

impl PartialOrd for StaircaseTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for StaircaseTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl std::fmt::Display for StaircaseTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let parts: Vec<String> = b.entries.iter().map(|a| a.to_string()).collect();
            write!(f, "{}", parts.join(","))?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct TupleRepr {
    #[serde(rename = "N")]
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for StaircaseTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TupleRepr {
            n: self.blocks.len(),
            blocks: self.blocks.iter().map(|b| b.entries.clone()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StaircaseTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = TupleRepr::deserialize(deserializer)?;
        if repr.blocks.len() != repr.n {
            return Err(serde::de::Error::custom(format!(
                "expected {} blocks, found {}",
                repr.n,
                repr.blocks.len()
            )));
        }
        let blocks: std::result::Result<Vec<StrictSeq>, Error> =
            repr.blocks.into_iter().map(StrictSeq::new).collect();
        StaircaseTuple::new(blocks.map_err(serde::de::Error::custom)?)
            .map_err(serde::de::Error::custom)
    }
}

/// All weakly increasing sequences of total weight exactly `w`
/// (each entry `a` weighing `a + 1`).
fn weak_seqs_of_weight(w: u64) -> Vec<WeakSeq> {
    fn rec(remaining: u64, min_entry: usize, prefix: &mut Vec<usize>, out: &mut Vec<WeakSeq>) {
        if remaining == 0 {
            out.push(WeakSeq {
                entries: prefix.clone(),
            });
            return;
        }
        let mut entry = min_entry;
        while (entry as u64 + 1) <= remaining {
            prefix.push(entry);
            rec(remaining - (entry as u64 + 1), entry, prefix, out);
            prefix.pop();
            entry += 1;
        }
    }
    let mut out = Vec::new();
    rec(w, 0, &mut Vec::new(), &mut out);
    out
}

/// All staircase tuples over `N` blocks of weight exactly `p`, in the
/// canonical (total length, then lexicographic) order.
pub fn enumerate_by_weight(n: usize, p: u64) -> Vec<StaircaseTuple> {
    assert!(n >= 1, "ambient dimension must be at least 1");
    // Enumerate tuples of weak sequences whose weights sum to p, then
    // pull back through the shift bijection.
    fn rec(
        blocks_left: usize,
        remaining: u64,
        prefix: &mut Vec<WeakSeq>,
        out: &mut Vec<WeakTuple>,
    ) {
        if blocks_left == 1 {
            for seq in weak_seqs_of_weight(remaining) {
                prefix.push(seq);
                out.push(WeakTuple::new(prefix.clone()));
                prefix.pop();
            }
            return;
        }
        for w in 0..=remaining {
            for seq in weak_seqs_of_weight(w) {
                prefix.push(seq);
                rec(blocks_left - 1, remaining - w, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut weak = Vec::new();
    rec(n, p, &mut Vec::new(), &mut weak);
    let mut tuples: Vec<StaircaseTuple> = weak.iter().map(WeakTuple::to_staircase).collect();
    for t in &tuples {
        t.validate().expect("shift bijection must yield staircase tuples");
    }
    tuples.sort();
    tuples
}

/// All staircase tuples with maximum entry at most `d - 1`, ordered by
/// the lexicographic order of their decoded words in `[0..N]^d`.
/// Always returns exactly `(N+1)^d` tuples.
pub fn enumerate_by_twist(n: usize, d: usize) -> Vec<StaircaseTuple> {
    assert!(n >= 1, "ambient dimension must be at least 1");
    let mut out = Vec::new();
    let mut word = vec![0usize; d];
    loop {
        let t = encode(&word, n).expect("in-range word must encode");
        t.validate().expect("encoded tuple must satisfy staircase");
        out.push(t);
        // Next word in lexicographic order.
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if word[i] < n {
                word[i] += 1;
                word[i + 1..].fill(0);
                break;
            }
            // carry
        }
    }
}

/// Encode a word `u ∈ [0..N]^d` as a staircase tuple: for
/// `v = N, N-1, …, 1` in turn, the letters equal to `v` are extracted
/// and their (current) positions form block `v`; the remaining word is
/// relabeled starting at the count of letters already removed.
pub fn encode(word: &[usize], n: usize) -> Result<StaircaseTuple> {
    for &u in word {
        if u > n {
            return Err(Error::SymbolOutOfRange { symbol: u, max: n });
        }
    }
    let mut blocks = vec![StrictSeq::empty(); n];
    let mut current: Vec<usize> = word.to_vec();
    let mut removed = 0usize;
    for v in (1..=n).rev() {
        // Positions are labeled removed, removed+1, …, d-1.
        let mut block = Vec::new();
        let mut rest = Vec::new();
        for (pos, &u) in current.iter().enumerate() {
            if u == v {
                block.push(removed + pos);
            } else {
                rest.push(u);
            }
        }
        removed += block.len();
        blocks[v - 1] = StrictSeq { entries: block };
        current = rest;
    }
    StaircaseTuple::new(blocks)
}

/// Inverse of [`encode`]: rebuild the word of length `d`.
pub fn decode(t: &StaircaseTuple, d: usize) -> Result<Vec<usize>> {
    t.validate()?;
    if t.max_entry() >= d as i64 {
        return Err(Error::EntryExceedsLength {
            max_entry: t.max_entry() as usize,
            bound: d.saturating_sub(1),
            length: d,
        });
    }
    let n = t.ambient_dim();
    // Start from the residual all-zero word (labels s_1..d-1) and
    // re-insert the blocks for v = 1, 2, …, N.
    let s1 = t.total_len();
    if s1 > d {
        return Err(Error::InvalidSequence(format!(
            "tuple has {s1} entries but word length is {d}"
        )));
    }
    let mut current: Vec<usize> = vec![0; d - s1];
    for v in 1..=n {
        let offset = t.s(v + 1);
        let block = &t.block(v).entries;
        let new_len = d - offset;
        let mut next = Vec::with_capacity(new_len);
        let mut bi = 0;
        let mut ci = 0;
        for label in offset..d {
            if bi < block.len() && block[bi] == label {
                next.push(v);
                bi += 1;
            } else {
                if ci >= current.len() {
                    return Err(Error::InvalidSequence(format!(
                        "block {v} of {t} does not fit word length {d}"
                    )));
                }
                next.push(current[ci]);
                ci += 1;
            }
        }
        if bi < block.len() {
            return Err(Error::InvalidSequence(format!(
                "block {v} of {t} has labels outside the word range"
            )));
        }
        current = next;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strict(entries: &[usize]) -> StrictSeq {
        StrictSeq::new(entries.to_vec()).unwrap()
    }

    fn tuple(blocks: &[&[usize]]) -> StaircaseTuple {
        StaircaseTuple::new(blocks.iter().map(|b| strict(b)).collect()).unwrap()
    }

    #[test]
    fn shift_examples() {
        assert_eq!(strict(&[1, 2]).to_weak().entries(), &[1, 1]);
        assert_eq!(strict(&[0, 2, 3]).to_weak().entries(), &[0, 1, 1]);
        assert!(StrictSeq::empty().to_weak().is_empty());
        assert_eq!(
            WeakSeq::new(vec![1, 1]).unwrap().to_strict().entries(),
            &[1, 2]
        );
    }

    #[test]
    fn tuple_shift_examples() {
        // N=2: ((1),(0)) -> ((0),(0)) since s_2 = 1.
        let t = tuple(&[&[1], &[0]]);
        let w = t.to_weak();
        assert_eq!(w.blocks()[0].entries(), &[0]);
        assert_eq!(w.blocks()[1].entries(), &[0]);
        assert_eq!(w.to_staircase(), t);
        // N=1 reduces to the single-sequence shift.
        let t1 = tuple(&[&[1, 2]]);
        assert_eq!(t1.to_weak().blocks()[0].entries(), &[1, 1]);
    }

    #[test]
    fn weights() {
        assert_eq!(strict(&[1, 2]).weight(), 4);
        assert_eq!(strict(&[4]).weight(), 5);
        assert_eq!(WeakSeq::empty().weight(), 0);
        let t = tuple(&[&[1], &[0]]);
        assert_eq!(t.weight(), t.to_weak().weight());
    }

    #[test]
    fn staircase_enforced() {
        // N=2 with s_2 = 1 requires the first entry of block 1 to be
        // at least 1.
        assert!(StaircaseTuple::new(vec![strict(&[0]), strict(&[0])]).is_err());
        assert!(StaircaseTuple::new(vec![strict(&[1]), strict(&[0])]).is_ok());
    }

    #[test]
    fn weight_enumeration_small() {
        let e5: Vec<Vec<usize>> = enumerate_by_weight(1, 5)
            .into_iter()
            .map(|t| t.block(1).entries().to_vec())
            .collect();
        assert_eq!(
            e5,
            vec![
                vec![4],
                vec![0, 4],
                vec![1, 3],
                vec![0, 1, 4],
                vec![0, 2, 3],
                vec![0, 1, 2, 4],
                vec![0, 1, 2, 3, 4],
            ]
        );
        let w0 = enumerate_by_weight(1, 0);
        assert_eq!(w0, vec![StaircaseTuple::all_empty(1)]);
    }

    #[test]
    fn weight_enumeration_matches_monomial_count() {
        // Independent count: weight-p monomials over two coordinates'
        // jet variables, generated directly.
        fn count_monomials(n_coords: usize, p: u64) -> usize {
            // A monomial is a multiset of (coord, order) pairs; build
            // recursively over coordinates.
            fn per_coord(p: u64) -> usize {
                weak_seqs_of_weight(p).len()
            }
            fn rec(coords: usize, p: u64) -> usize {
                if coords == 1 {
                    return per_coord(p);
                }
                (0..=p).map(|w| per_coord(w) * rec(coords - 1, p - w)).sum()
            }
            rec(n_coords, p)
        }
        for p in 0..=6 {
            assert_eq!(enumerate_by_weight(2, p).len(), count_monomials(2, p));
        }
    }

    #[test]
    fn twist_enumeration_counts() {
        assert_eq!(enumerate_by_twist(1, 2).len(), 4);
        assert_eq!(enumerate_by_twist(2, 2).len(), 9);
        assert_eq!(enumerate_by_twist(3, 2).len(), 16);
        assert_eq!(enumerate_by_twist(2, 0), vec![StaircaseTuple::all_empty(2)]);
        // N=1, d=2: ∅,(0),(1),(0,1) in decoded-word order (0,0),(0,1),(1,0),(1,1).
        let e: Vec<Vec<usize>> = enumerate_by_twist(1, 2)
            .into_iter()
            .map(|t| t.block(1).entries().to_vec())
            .collect();
        assert_eq!(e, vec![vec![], vec![1], vec![0], vec![0, 1]]);
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&[1, 1], 1).unwrap(), tuple(&[&[0, 1]]));
        assert_eq!(encode(&[0, 0], 1).unwrap(), StaircaseTuple::all_empty(1));
        assert_eq!(encode(&[2, 1], 2).unwrap(), tuple(&[&[1], &[0]]));
        assert!(encode(&[3], 2).is_err());
    }

    #[test]
    fn decode_inverts_encode() {
        for n in 1..=3usize {
            for d in 0..=4usize {
                let mut word = vec![0usize; d];
                loop {
                    let t = encode(&word, n).unwrap();
                    assert_eq!(decode(&t, d).unwrap(), word);
                    let mut i = d;
                    let mut done = true;
                    while i > 0 {
                        i -= 1;
                        if word[i] < n {
                            word[i] += 1;
                            word[i + 1..].fill(0);
                            done = false;
                            break;
                        }
                    }
                    if done {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn decode_rejects_large_entries() {
        let t = tuple(&[&[3]]);
        assert!(decode(&t, 3).is_err());
        assert!(decode(&t, 4).is_ok());
    }

    #[test]
    fn monomial_round_trip() {
        let space = VarSpace::affine(0, 2).unwrap();
        let t = tuple(&[&[1, 3], &[0]]);
        let w = t.to_weak();
        let m = w.monomial();
        assert_eq!(WeakTuple::from_monomial(&m, &space).unwrap(), w);
    }

    #[test]
    fn json_round_trip() {
        let t = tuple(&[&[1, 3], &[0]]);
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("\"N\":2"));
        let back: StaircaseTuple = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        // Staircase violations are rejected on parse.
        assert!(serde_json::from_str::<StaircaseTuple>(r#"{"N":2,"blocks":[[0],[0]]}"#).is_err());
    }
}
