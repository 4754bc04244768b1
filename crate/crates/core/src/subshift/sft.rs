//! Subshifts of finite type in allowed-window normal form.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::graph::{Edge, Sided, SoficGraph};
use crate::alphabet::{all_words, Alphabet, Letter, Word};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Sft {
    alphabet: Arc<Alphabet>,
    order: usize,
    allowed: BTreeSet<Word>,
    sided: Sided,
}

impl Sft {
    /// From allowed windows of a common length `order`; trims to the
    /// windows occurring in points.
    pub fn from_allowed(
        alphabet: Arc<Alphabet>,
        order: usize,
        allowed: impl IntoIterator<Item = Word>,
        sided: Sided,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::Usage("SFT order must be at least 1".into()));
        }
        let mut set = BTreeSet::new();
        for w in allowed {
            if w.len() != order {
                return Err(Error::MixedLengths);
            }
            if w.iter().any(|&a| a as usize >= alphabet.len()) {
                return Err(Error::AlphabetMismatch("allowed word outside alphabet".into()));
            }
            set.insert(w);
        }
        let mut sft = Self { alphabet, order, allowed: set, sided };
        sft.trim();
        Ok(sft)
    }

    /// Forbidden words of mixed lengths are padded by free extension to the
    /// longest length.
    pub fn from_forbidden(alphabet: Arc<Alphabet>, forbidden: &[Word], sided: Sided) -> Result<Self> {
        let order = forbidden.iter().map(Vec::len).max().unwrap_or(1).max(1);
        if forbidden.iter().any(Vec::is_empty) {
            return Err(Error::Usage("empty forbidden word".into()));
        }
        let q = alphabet.len();
        if (q as f64).powi(order as i32) > (1u64 << 26) as f64 {
            return Err(Error::EnumerationCap { work: (q as u128).pow(order as u32), cap: 1 << 26 });
        }
        let allowed =
            all_words(q, order).into_iter().filter(|w| !forbidden.iter().any(|f| w.windows(f.len()).any(|x| x == &f[..])));
        Self::from_allowed(alphabet, order, allowed, sided)
    }

    pub fn full(alphabet: Arc<Alphabet>) -> Self {
        let allowed = alphabet.letters().map(|a| vec![a]).collect();
        Self { alphabet, order: 1, allowed, sided: Sided::Two }
    }

    fn trim(&mut self) {
        let k = self.order;
        loop {
            let prefixes: BTreeSet<&[Letter]> = self.allowed.iter().map(|w| &w[..k - 1]).collect();
            let suffixes: BTreeSet<&[Letter]> = self.allowed.iter().map(|w| &w[1..]).collect();
            let keep: BTreeSet<Word> = self
                .allowed
                .iter()
                .filter(|w| prefixes.contains(&w[1..]) && (self.sided == Sided::One || suffixes.contains(&w[..k - 1])))
                .cloned()
                .collect();
            if keep.len() == self.allowed.len() {
                break;
            }
            self.allowed = keep;
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn allowed(&self) -> &BTreeSet<Word> {
        &self.allowed
    }

    pub fn sided(&self) -> Sided {
        self.sided
    }

    /// Words of length `order` not allowed (before trimming they may have
    /// been allowed; written to files as the forbidden list).
    pub fn forbidden(&self) -> Vec<Word> {
        all_words(self.alphabet.len(), self.order).into_iter().filter(|w| !self.allowed.contains(w)).collect()
    }

    /// De Bruijn presentation: vertices are `(k-1)`-words, each allowed
    /// window labels the edge `w[..k-1] -> w[1..]` with its last letter.
    pub fn graph(&self) -> SoficGraph {
        let k = self.order;
        let mut ids: HashMap<&[Letter], usize> = HashMap::new();
        let mut edges = Vec::with_capacity(self.allowed.len());
        for w in &self.allowed {
            let len = ids.len();
            let from = *ids.entry(&w[..k - 1]).or_insert(len);
            let len = ids.len();
            let to = *ids.entry(&w[1..]).or_insert(len);
            edges.push(Edge { from, label: w[k - 1], to });
        }
        SoficGraph::new(self.alphabet.clone(), ids.len(), edges, self.sided, None)
    }
}
