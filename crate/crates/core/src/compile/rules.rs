//! Structured local rules of compiled automata. Their diameters grow with
//! the macrocell length, so they are evaluated from block lookups rather
//! than dense tables.

use std::collections::HashMap;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::ca::StructuredRule;
use crate::error::{Error, Result};

fn block_index(blocks: &[Word]) -> Result<(usize, HashMap<Word, u32>)> {
    let h = blocks.first().map(Vec::len).ok_or(Error::EmptyLanguage)?;
    if h == 0 || blocks.iter().any(|b| b.len() != h) {
        return Err(Error::MixedLengths);
    }
    let index: HashMap<Word, u32> = blocks.iter().enumerate().map(|(i, b)| (b.clone(), i as u32)).collect();
    if index.len() != blocks.len() {
        return Err(Error::Usage("duplicate block".into()));
    }
    Ok((h, index))
}

fn write_blocks(alphabet: &Alphabet, blocks: &[Word], out: &mut String) {
    for b in blocks {
        out.push_str("block: ");
        out.push_str(&alphabet.format_word(b));
        out.push('\n');
    }
}

fn write_indices(key: &str, v: &[u32], out: &mut String) {
    out.push_str(key);
    out.push(':');
    for x in v {
        out.push(' ');
        out.push_str(&x.to_string());
    }
    out.push('\n');
}

/// The `h`-ungrouped rule of a radius-1 CA on blocks: diameter `4h - 1`,
/// anchor `2h - 1`.
#[derive(Debug)]
pub struct UngroupedRule {
    h: usize,
    blocks: Vec<Word>,
    index: HashMap<Word, u32>,
    /// `g(u⁻¹, u⁰, u¹)` as block indices, indexed `(a·n + b)·n + c`.
    inner: Vec<u32>,
}

impl UngroupedRule {
    pub fn new(blocks: Vec<Word>, inner: Vec<u32>) -> Result<Self> {
        let (h, index) = block_index(&blocks)?;
        let n = blocks.len();
        if inner.len() != n * n * n || inner.iter().any(|&x| x as usize >= n) {
            return Err(Error::Usage("block rule table does not match the blocks".into()));
        }
        Ok(Self { h, blocks, index, inner })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn blocks(&self) -> &[Word] {
        &self.blocks
    }

    pub fn inner(&self) -> &[u32] {
        &self.inner
    }
}

impl StructuredRule for UngroupedRule {
    fn kind(&self) -> &'static str {
        "ungrouped"
    }

    fn eval(&self, w: &[Letter]) -> Letter {
        let h = self.h;
        let n = self.blocks.len();
        for i in 0..h {
            let s = 2 * h - 1 - i;
            let Some(&b0) = self.index.get(&w[s..s + h]) else { continue };
            let (Some(&a), Some(&c)) = (self.index.get(&w[s - h..s]), self.index.get(&w[s + h..s + 2 * h])) else {
                continue;
            };
            let out = self.inner[(a as usize * n + b0 as usize) * n + c as usize];
            return self.blocks[out as usize][i];
        }
        0
    }

    fn write_body(&self, alphabet: &Alphabet, out: &mut String) {
        out.push_str(&format!("h: {}\n", self.h));
        write_blocks(alphabet, &self.blocks, out);
        write_indices("inner", &self.inner, out);
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

/// Radius `h - 1` rule applying a block map `c ↦ δ(c)` to every covering
/// block of `C` and writing `0` elsewhere.
#[derive(Debug)]
pub struct MacrocellRule {
    h: usize,
    blocks: Vec<Word>,
    images: Vec<Word>,
    index: HashMap<Word, u32>,
}

impl MacrocellRule {
    pub fn new(blocks: Vec<Word>, images: Vec<Word>) -> Result<Self> {
        let (h, index) = block_index(&blocks)?;
        if images.len() != blocks.len() || images.iter().any(|w| w.len() != h) {
            return Err(Error::MixedLengths);
        }
        Ok(Self { h, blocks, images, index })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn blocks(&self) -> &[Word] {
        &self.blocks
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }
}

impl StructuredRule for MacrocellRule {
    fn kind(&self) -> &'static str {
        "macrocell"
    }

    fn eval(&self, w: &[Letter]) -> Letter {
        let h = self.h;
        for i in 0..h {
            if let Some(&c) = self.index.get(&w[i..i + h]) {
                return self.images[c as usize][h - 1 - i];
            }
        }
        0
    }

    fn write_body(&self, alphabet: &Alphabet, out: &mut String) {
        out.push_str(&format!("h: {}\n", self.h));
        for (b, d) in self.blocks.iter().zip(&self.images) {
            out.push_str(&format!("map: {} {}\n", alphabet.format_word(b), alphabet.format_word(d)));
        }
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}

/// Three-mode rule on `A`: diameter `10p - 1`, anchor `2p - 1`.
#[derive(Debug)]
pub struct ModalRule {
    p: usize,
    blocks: Vec<Word>,
    index: HashMap<Word, u32>,
    /// `g̃(b, c)` at `b·(n+1) + c`; `c = n` is the empty right neighbour.
    pair: Vec<u32>,
    xi: Vec<Letter>,
}

/// Which branch of the modal rule fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Execution,
    Frontier,
    Default,
}

impl ModalRule {
    pub fn new(blocks: Vec<Word>, pair: Vec<u32>, xi: Vec<Letter>) -> Result<Self> {
        let (len, index) = block_index(&blocks)?;
        if len % 2 != 0 {
            return Err(Error::Geometry("modal blocks must have even length".into()));
        }
        let n = blocks.len();
        if pair.len() != n * (n + 1) || pair.iter().any(|&x| x as usize >= n) {
            return Err(Error::Usage("pair table does not match the blocks".into()));
        }
        Ok(Self { p: len / 2, blocks, index, pair, xi })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> &[Word] {
        &self.blocks
    }

    pub fn pair(&self) -> &[u32] {
        &self.pair
    }

    pub fn xi(&self) -> &[Letter] {
        &self.xi
    }

    /// Output and mode for a window of length `10p - 1`.
    pub fn eval_mode(&self, w: &[Letter]) -> (Letter, Mode) {
        let p2 = 2 * self.p;
        let m = p2 - 1;
        let n = self.blocks.len();
        let starts = w.len() + 1 - p2;
        let at: Vec<Option<u32>> = (0..starts).map(|j| self.index.get(&w[j..j + p2]).copied()).collect();
        let theta = |j: usize| at[j].is_some() && (1..p2).all(|t| at[j + t].is_none());
        for i in 0..=m {
            let s = m - i;
            let Some(b0) = at[s] else { continue };
            if let Some(b1) = at[s + p2] {
                if theta(s + 2 * p2) {
                    let out = self.pair[b0 as usize * (n + 1) + b1 as usize];
                    return (self.blocks[out as usize][i], Mode::Execution);
                }
                if theta(s + p2) {
                    let out = self.pair[b0 as usize * (n + 1) + n];
                    return (self.blocks[out as usize][i], Mode::Frontier);
                }
            }
        }
        (self.xi[w[m] as usize], Mode::Default)
    }
}

impl StructuredRule for ModalRule {
    fn kind(&self) -> &'static str {
        "modal"
    }

    fn eval(&self, w: &[Letter]) -> Letter {
        self.eval_mode(w).0
    }

    fn write_body(&self, alphabet: &Alphabet, out: &mut String) {
        out.push_str(&format!("p: {}\n", self.p));
        write_blocks(alphabet, &self.blocks, out);
        write_indices("pair", &self.pair, out);
        out.push_str(&format!("default: {}\n", alphabet.format_word(&self.xi)));
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
}
