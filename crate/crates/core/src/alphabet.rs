//! Finite alphabets, words, and stacked (product-structured) alphabets.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A letter is an index into its alphabet; letters are ordered by index.
pub type Letter = u16;

/// A finite word over some alphabet.
pub type Word = Vec<Letter>;

/// Decoding information for an alphabet whose letters are words of a fixed
/// height over a base alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Product {
    base: Arc<Alphabet>,
    height: usize,
    decode: Vec<Word>,
}

/// An ordered finite set of named letters, optionally stacked over a base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    product: Option<Product>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::Usage("alphabet must be nonempty".into()));
        }
        if names.len() > Letter::MAX as usize {
            return Err(Error::Usage("alphabet too large".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(char::is_whitespace) || n.contains(',') {
                return Err(Error::Usage(format!("invalid letter name {n:?}")));
            }
            if names[..i].contains(n) {
                return Err(Error::Usage(format!("duplicate letter {n:?}")));
            }
        }
        Ok(Self { names, product: None })
    }

    /// `{0, 1, …, n-1}` with decimal names.
    pub fn numeric(n: usize) -> Arc<Self> {
        Arc::new(Self::new((0..n).map(|i| i.to_string())).expect("valid numeric alphabet"))
    }

    pub fn binary() -> Arc<Self> {
        Self::numeric(2)
    }

    /// Stacked alphabet whose letters are the given words over `base`, in the
    /// given order. Names join the base names with `.`.
    pub fn stacked(base: &Arc<Alphabet>, words: Vec<Word>) -> Result<Self> {
        let base = Arc::new(base.base().clone());
        let height = words.first().map(Vec::len).ok_or(Error::EmptyLanguage)?;
        if height == 0 || words.iter().any(|w| w.len() != height) {
            return Err(Error::MixedLengths);
        }
        for w in &words {
            if w.iter().any(|&a| a as usize >= base.len()) {
                return Err(Error::AlphabetMismatch("stacked word outside base".into()));
            }
        }
        let names = words.iter().map(|w| w.iter().map(|&a| base.name(a)).collect::<Vec<_>>().join(".")).collect::<Vec<_>>();
        let mut alphabet = Self::new(names)?;
        alphabet.product = Some(Product { base, height, decode: words });
        Ok(alphabet)
    }

    /// All words of length `k` over `base`, in lexicographic order.
    pub fn full_power(base: &Arc<Alphabet>, k: usize) -> Result<Self> {
        let base_ab = base.base();
        let words = all_words(base_ab.len(), k);
        Self::stacked(&Arc::new(base_ab.clone()), words)
    }

    /// Product alphabet `A × B`, letter `(a, b)` at index `a * |B| + b`.
    /// Both factors must stack over the same base; the product stacks the
    /// concatenation of their decodings.
    pub fn product(a: &Alphabet, b: &Alphabet) -> Result<Self> {
        if a.base().names != b.base().names {
            return Err(Error::AlphabetMismatch("product factors stack over different base alphabets".into()));
        }
        let base = Arc::new(a.base().clone());
        let mut words = Vec::with_capacity(a.len() * b.len());
        for x in 0..a.len() as Letter {
            for y in 0..b.len() as Letter {
                let mut w = a.decode(x);
                w.extend(b.decode(y));
                words.push(w);
            }
        }
        Self::stacked(&base, words)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        0..self.names.len() as Letter
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.names[a as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| i as Letter)
    }

    pub fn product_info(&self) -> Option<&Product> {
        self.product.as_ref()
    }

    pub fn is_product(&self) -> bool {
        self.product.is_some()
    }

    /// The base alphabet (`self` when not stacked).
    pub fn base(&self) -> &Alphabet {
        match &self.product {
            Some(p) => &p.base,
            None => self,
        }
    }

    /// Height of the stacking (1 when not stacked).
    pub fn height(&self) -> usize {
        self.product.as_ref().map_or(1, |p| p.height)
    }

    /// The base word a letter stands for.
    pub fn decode(&self, a: Letter) -> Word {
        match &self.product {
            Some(p) => p.decode[a as usize].clone(),
            None => vec![a],
        }
    }

    /// The `q`-th coordinate of a letter.
    pub fn track(&self, a: Letter, q: usize) -> Letter {
        match &self.product {
            Some(p) => p.decode[a as usize][q],
            None => a,
        }
    }

    /// Letter whose decoding is `w`, if any.
    pub fn encode(&self, w: &[Letter]) -> Option<Letter> {
        match &self.product {
            Some(p) => p.decode.iter().position(|d| d == w).map(|i| i as Letter),
            None if w.len() == 1 && (w[0] as usize) < self.len() => Some(w[0]),
            None => None,
        }
    }

    /// Whether every letter name is a single character, so words can be
    /// written without separators.
    pub fn single_char(&self) -> bool {
        self.names.iter().all(|n| n.chars().count() == 1)
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        let parts = w.iter().map(|&a| self.name(a));
        if self.single_char() {
            parts.collect()
        } else {
            parts.collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        if s == "-" {
            return Ok(Vec::new());
        }
        let tokens: Vec<String> = if s.contains(',') || !self.single_char() {
            s.split(',').map(str::to_string).collect()
        } else {
            s.chars().map(|c| c.to_string()).collect()
        };
        tokens
            .iter()
            .map(|t| self.index_of(t).ok_or_else(|| Error::AlphabetMismatch(format!("unknown letter {t:?} in {s:?}"))))
            .collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(","))
    }
}

/// All words of length `k` over `{0..q}`, lexicographically.
pub fn all_words(q: usize, k: usize) -> Vec<Word> {
    let total = q.pow(k as u32);
    (0..total).map(|i| word_from_index(i as u64, q, k)).collect()
}

/// Mixed-radix decoding, most significant letter first.
pub fn word_from_index(mut i: u64, q: usize, k: usize) -> Word {
    let mut w = vec![0; k];
    for slot in w.iter_mut().rev() {
        *slot = (i % q as u64) as Letter;
        i /= q as u64;
    }
    w
}

/// Mixed-radix encoding, most significant letter first.
pub fn word_index(w: &[Letter], q: usize) -> usize {
    w.iter().fold(0usize, |acc, &a| acc * q + a as usize)
}

pub fn reverse(w: &[Letter]) -> Word {
    w.iter().rev().copied().collect()
}

/// The `i`-th rotation `w[i..] w[..i]`.
pub fn rotate(w: &[Letter], i: usize) -> Word {
    let i = i % w.len().max(1);
    w[i..].iter().chain(&w[..i]).copied().collect()
}

/// Whether `w` is not a proper power of a shorter word.
pub fn is_primitive(w: &[Letter]) -> bool {
    let n = w.len();
    n > 0 && (1..n).all(|p| !n.is_multiple_of(p) || (0..n).any(|i| w[i] != w[i % p]))
}

/// Shortest `r` with `w = r^(|w|/|r|)`.
pub fn primitive_root(w: &[Letter]) -> &[Letter] {
    let n = w.len();
    for p in 1..=n {
        if n.is_multiple_of(p) && (0..n).all(|i| w[i] == w[i % p]) {
            return &w[..p];
        }
    }
    w
}

pub fn is_uniform(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] == p[1])
}

/// Lyndon words over `{0..q}` of length at most `n`, in lexicographic order
/// (Duval's generation).
pub fn lyndon_words(q: usize, n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if q == 0 || n == 0 {
        return out;
    }
    let mut w: Vec<isize> = vec![-1];
    while let Some(last) = w.last_mut() {
        *last += 1;
        out.push(w.iter().map(|&a| a as Letter).collect());
        let m = w.len();
        while w.len() < n {
            let a = w[w.len() - m];
            w.push(a);
        }
        while w.last().is_some_and(|&a| a as usize == q - 1) {
            w.pop();
        }
    }
    out
}
