//! Finite uncertain variables described by their joint range.
//!
//! A pair of uncertain variables `(S, X)` carries no probability measure; all
//! that is known is which value pairs can co-occur. [`JointRange`] stores that
//! set together with both alphabets, and hands out conditional ranges
//! `⟦S|x⟧` as bitsets over the `S` alphabet.

use std::collections::{HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Symbol {
    pub fn new(id: impl Into<String>) -> Self {
        Symbol {
            id: id.into(),
            value: None,
        }
    }

    pub fn numeric(id: impl Into<String>, value: f64) -> Self {
        Symbol {
            id: id.into(),
            value: Some(value),
        }
    }
}

/// A set of `S` indices compatible with some observation of the public data.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConditionalRange(FixedBitSet);

impl ConditionalRange {
    pub fn empty(s_len: usize) -> Self {
        ConditionalRange(FixedBitSet::with_capacity(s_len))
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.0.contains(s)
    }

    pub fn insert(&mut self, s: usize) {
        self.0.insert(s);
    }

    pub fn union_with(&mut self, other: &ConditionalRange) {
        self.0.union_with(&other.0);
    }

    pub fn intersects(&self, other: &ConditionalRange) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn as_bitset(&self) -> &FixedBitSet {
        &self.0
    }
}

impl fmt::Debug for ConditionalRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The joint range `⟦S,X⟧` plus both alphabets.
///
/// Immutable once built. Every alphabet symbol occurs in at least one pair,
/// so all conditional ranges `⟦S|x⟧` are non-empty.
#[derive(Clone, Debug, PartialEq)]
pub struct JointRange {
    s_alphabet: Vec<Symbol>,
    x_alphabet: Vec<Symbol>,
    pairs: Vec<(usize, usize)>,
    // ⟦S|x⟧ for every x, indexed by x
    by_x: Vec<ConditionalRange>,
}

impl JointRange {
    pub fn new(
        s_alphabet: Vec<Symbol>,
        x_alphabet: Vec<Symbol>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        check_alphabet("S", &s_alphabet)?;
        check_alphabet("X", &x_alphabet)?;

        let s_len = s_alphabet.len();
        let x_len = x_alphabet.len();
        let mut by_x = vec![ConditionalRange::empty(s_len); x_len];
        let mut s_seen = FixedBitSet::with_capacity(s_len);
        let mut list = Vec::new();
        for (s, x) in pairs {
            if s >= s_len {
                return Err(Error::IndexOutOfRange { index: s, len: s_len });
            }
            if x >= x_len {
                return Err(Error::IndexOutOfRange { index: x, len: x_len });
            }
            if by_x[x].contains(s) {
                return Err(Error::contract(format!(
                    "duplicate pair ({}, {})",
                    s_alphabet[s].id, x_alphabet[x].id
                )));
            }
            by_x[x].insert(s);
            s_seen.insert(s);
            list.push((s, x));
        }
        if list.is_empty() {
            return Err(Error::contract("joint range needs at least one pair"));
        }
        if let Some(s) = (0..s_len).find(|&s| !s_seen.contains(s)) {
            return Err(Error::contract(format!(
                "s-symbol {} appears in no pair",
                s_alphabet[s].id
            )));
        }
        if let Some(x) = (0..x_len).find(|&x| by_x[x].is_empty()) {
            return Err(Error::contract(format!(
                "x-symbol {} appears in no pair",
                x_alphabet[x].id
            )));
        }
        list.sort_unstable_by_key(|&(s, x)| (x, s));

        Ok(JointRange {
            s_alphabet,
            x_alphabet,
            pairs: list,
            by_x,
        })
    }

    /// Builds a joint range from `(s_id, x_id)` pairs. Alphabets follow first
    /// appearance and repeated pairs collapse into one.
    pub fn from_id_pairs<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let mut s_alphabet = Vec::new();
        let mut x_alphabet = Vec::new();
        let mut s_index: HashMap<String, usize> = HashMap::new();
        let mut x_index: HashMap<String, usize> = HashMap::new();
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (s, x) in pairs {
            let s = intern(s.as_ref(), &mut s_index, &mut s_alphabet);
            let x = intern(x.as_ref(), &mut x_index, &mut x_alphabet);
            if seen.insert((s, x)) {
                list.push((s, x));
            }
        }
        JointRange::new(s_alphabet, x_alphabet, list)
    }

    /// Attaches numeric values to the `X` alphabet, in alphabet order.
    pub fn with_x_values(mut self, values: &[f64]) -> Result<Self> {
        if values.len() != self.x_alphabet.len() {
            return Err(Error::contract(format!(
                "expected {} x-values, got {}",
                self.x_alphabet.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::contract(format!("non-finite x-value {v}")));
        }
        for (sym, &v) in self.x_alphabet.iter_mut().zip(values) {
            sym.value = Some(v);
        }
        Ok(self)
    }

    pub fn s_alphabet(&self) -> &[Symbol] {
        &self.s_alphabet
    }

    pub fn x_alphabet(&self) -> &[Symbol] {
        &self.x_alphabet
    }

    pub fn s_len(&self) -> usize {
        self.s_alphabet.len()
    }

    pub fn x_len(&self) -> usize {
        self.x_alphabet.len()
    }

    /// Pairs `(s, x)` sorted by `x` then `s`.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn contains(&self, s: usize, x: usize) -> bool {
        x < self.by_x.len() && self.by_x[x].contains(s)
    }

    /// Numeric values of the `X` alphabet, if every symbol carries one.
    pub fn x_values(&self) -> Option<Vec<f64>> {
        self.x_alphabet.iter().map(|s| s.value).collect()
    }

    pub fn x_index_of(&self, id: &str) -> Option<usize> {
        self.x_alphabet.iter().position(|s| s.id == id)
    }

    pub fn s_index_of(&self, id: &str) -> Option<usize> {
        self.s_alphabet.iter().position(|s| s.id == id)
    }

    /// `⟦S|x⟧`.
    pub fn cond_range_x(&self, x: usize) -> Result<&ConditionalRange> {
        self.by_x.get(x).ok_or(Error::IndexOutOfRange {
            index: x,
            len: self.x_len(),
        })
    }

    /// `⟦S|𝒳⟧`, the union of `⟦S|x⟧` over a cluster of `X` symbols.
    pub fn cond_range_cluster(&self, cluster: &[usize]) -> Result<ConditionalRange> {
        if cluster.is_empty() {
            return Err(Error::contract("conditional range of an empty cluster"));
        }
        let mut out = ConditionalRange::empty(self.s_len());
        for &x in cluster {
            out.union_with(self.cond_range_x(x)?);
        }
        Ok(out)
    }

    pub(crate) fn range_unchecked(&self, x: usize) -> &ConditionalRange {
        &self.by_x[x]
    }
}

fn intern(id: &str, index: &mut HashMap<String, usize>, alphabet: &mut Vec<Symbol>) -> usize {
    if let Some(&i) = index.get(id) {
        return i;
    }
    let i = alphabet.len();
    index.insert(id.to_owned(), i);
    alphabet.push(Symbol::new(id));
    i
}

fn check_alphabet(name: &str, alphabet: &[Symbol]) -> Result<()> {
    let mut ids = HashSet::new();
    for sym in alphabet {
        if sym.id.is_empty() {
            return Err(Error::contract(format!("{name}-alphabet has an empty id")));
        }
        if !ids.insert(sym.id.as_str()) {
            return Err(Error::contract(format!(
                "{name}-alphabet repeats id {}",
                sym.id
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::toy;

    #[test]
    fn cond_range_of_single_symbols() {
        let jr = toy();
        assert_eq!(jr.cond_range_x(0).unwrap().to_vec(), vec![0, 1]);
        assert_eq!(jr.cond_range_x(6).unwrap().to_vec(), vec![5]);
        assert!(matches!(
            jr.cond_range_x(7),
            Err(Error::IndexOutOfRange { index: 7, len: 7 })
        ));

        let one = JointRange::from_id_pairs([("s1", "x1")]).unwrap();
        assert_eq!(one.cond_range_x(0).unwrap().to_vec(), vec![0]);
    }

    #[test]
    fn cond_range_of_clusters() {
        let jr = toy();
        assert_eq!(
            jr.cond_range_cluster(&[0, 1, 6]).unwrap().to_vec(),
            vec![0, 1, 5]
        );
        assert_eq!(jr.cond_range_cluster(&[2, 4]).unwrap().to_vec(), vec![2, 3]);
        let all: Vec<usize> = (0..7).collect();
        assert_eq!(jr.cond_range_cluster(&all).unwrap().len(), 6);
        assert!(matches!(
            jr.cond_range_cluster(&[]),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn rejects_broken_joint_ranges() {
        let s = vec![Symbol::new("a"), Symbol::new("b")];
        let x = vec![Symbol::new("u")];
        // b never occurs
        assert!(JointRange::new(s.clone(), x.clone(), [(0, 0)]).is_err());
        assert!(JointRange::new(s.clone(), x.clone(), [(0, 0), (1, 0), (1, 0)]).is_err());
        assert!(JointRange::new(s.clone(), x.clone(), []).is_err());
        assert!(JointRange::new(s.clone(), x.clone(), [(2, 0)]).is_err());
        let dup = vec![Symbol::new("a"), Symbol::new("a")];
        assert!(JointRange::new(dup, x, [(0, 0), (1, 0)]).is_err());
    }

    #[test]
    fn id_pairs_collapse_repeats() {
        let jr = JointRange::from_id_pairs([("a", "1"), ("a", "1"), ("b", "1")]).unwrap();
        assert_eq!(jr.pairs().len(), 2);
        assert_eq!(jr.s_len(), 2);
        assert_eq!(jr.x_len(), 1);
    }
}
