//! Exact finite-depth trace languages: column blocks `(F^j(x)_c)` for
//! `j < k`, `c < w`, over all configurations of the domain.

pub mod diagram;
pub mod onesided;
pub mod search;
pub mod transducer;

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::ca::{CellularAutomaton, PartialCA};
use crate::error::{Error, Result};
use crate::par;
use crate::subshift::{Edge, Sided, SoficGraph, SubshiftHandle};

pub use diagram::{diagram, SpaceTimeDiagram};
pub use onesided::trace_onesided;
pub use search::{find_column, trace_contains};
pub use transducer::{trace_transducer, trace_transducer_with_guard, DEFAULT_STATE_GUARD};

/// Default cap on rule evaluations of the naive engine.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 26;

/// Something with a trace: a CA on the full shift or on a domain.
pub trait Traceable: Sync {
    fn automaton(&self) -> &CellularAutomaton;
    fn domain(&self) -> Option<&SubshiftHandle>;

    /// Presentation of the domain (full shift when absent).
    fn domain_graph(&self) -> SoficGraph {
        match self.domain() {
            Some(d) => d.graph().with_sided(Sided::Two).trim(),
            None => {
                let a = self.automaton().alphabet().clone();
                let edges = a.letters().map(|l| Edge { from: 0, label: l, to: 0 }).collect();
                SoficGraph::new(a, 1, edges, Sided::Two, None)
            }
        }
    }
}

impl Traceable for CellularAutomaton {
    fn automaton(&self) -> &CellularAutomaton {
        self
    }
    fn domain(&self) -> Option<&SubshiftHandle> {
        None
    }
}

impl Traceable for PartialCA {
    fn automaton(&self) -> &CellularAutomaton {
        &self.ca
    }
    fn domain(&self) -> Option<&SubshiftHandle> {
        Some(&self.domain)
    }
}

/// Exact set of `k × w` column blocks, stored row-major
/// (`block[j * w + c] = F^j(x)_c`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnLanguage {
    alphabet: Arc<Alphabet>,
    height: usize,
    width: usize,
    blocks: BTreeSet<Word>,
}

impl ColumnLanguage {
    pub fn new(alphabet: Arc<Alphabet>, height: usize, width: usize, blocks: BTreeSet<Word>) -> Self {
        debug_assert!(blocks.iter().all(|b| b.len() == height * width));
        Self { alphabet, height, width, blocks }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn blocks(&self) -> &BTreeSet<Word> {
        &self.blocks
    }

    pub fn into_blocks(self) -> BTreeSet<Word> {
        self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, block: &[Letter]) -> bool {
        self.blocks.contains(block)
    }

    /// Rows `[from, from + rows)` of every block.
    pub fn rows(&self, from: usize, rows: usize) -> Result<Self> {
        if from + rows > self.height {
            return Err(Error::Usage(format!("rows {from}..{} beyond height {}", from + rows, self.height)));
        }
        let w = self.width;
        let blocks = self.blocks.iter().map(|b| b[from * w..(from + rows) * w].to_vec()).collect();
        Ok(Self::new(self.alphabet.clone(), rows, w, blocks))
    }

    /// Height-`k` truncation.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        self.rows(0, k)
    }

    /// Union of the letterwise track projections (width 1 only).
    pub fn project_tracks(&self) -> Result<Self> {
        if !self.alphabet.is_product() {
            return Err(Error::NotProduct);
        }
        let base = Arc::new(self.alphabet.base().clone());
        let mut blocks = BTreeSet::new();
        for b in &self.blocks {
            for q in 0..self.alphabet.height() {
                blocks.insert(b.iter().map(|&a| self.alphabet.track(a, q)).collect());
            }
        }
        Ok(Self::new(base, self.height, self.width, blocks))
    }

    /// Formatted blocks: row words joined by `/` when `width > 1`.
    pub fn format_lines(&self) -> Vec<String> {
        if self.width == 1 {
            return self.blocks.iter().map(|b| self.alphabet.format_word(b)).collect();
        }
        self.blocks
            .iter()
            .map(|b| b.chunks(self.width).map(|row| self.alphabet.format_word(row)).collect::<Vec<_>>().join("/"))
            .collect()
    }
}

/// Window geometry for a depth-`k` width-`w` block: the observed cells'
/// dependence cone is `x[lo .. lo + len)`.
pub fn cone(ca: &CellularAutomaton, k: usize, w: usize) -> (i64, usize) {
    let m = ca.anchor() as i64;
    let s = ca.diameter() as i64 - 1 - m;
    let span = (k as i64 - 1).max(0);
    let lo = (-span * m).min(0);
    let hi = w as i64 + (span * s).max(0);
    (lo, (hi - lo) as usize)
}

/// Block of a window `x[lo .. lo + |window|)` covering the cone.
pub fn column_from_window(ca: &CellularAutomaton, window: &[Letter], lo: i64, k: usize, w: usize) -> Word {
    let d = ca.diameter();
    let m = ca.anchor() as i64;
    let mut block = Vec::with_capacity(k * w);
    let mut cur = window.to_vec();
    let mut pos = lo;
    for j in 0..k {
        for c in 0..w as i64 {
            block.push(cur[(c - pos) as usize]);
        }
        if j + 1 < k {
            cur = cur.windows(d).map(|x| ca.eval(x)).collect();
            pos += m;
        }
    }
    block
}

/// Exact trace by enumerating the domain language on the dependence cone.
pub fn trace_naive<T: Traceable + ?Sized>(f: &T, k: usize, w: usize) -> Result<ColumnLanguage> {
    trace_naive_with_cap(f, k, w, DEFAULT_ENUMERATION_CAP)
}

pub fn trace_naive_with_cap<T: Traceable + ?Sized>(f: &T, k: usize, w: usize, cap: u128) -> Result<ColumnLanguage> {
    if k == 0 || w == 0 {
        return Err(Error::Usage("depth and width must be positive".into()));
    }
    let ca = f.automaton();
    let (lo, n) = cone(ca, k, w);
    let g = f.domain_graph();
    let words = count_paths(&g, n);
    let per_word = (n * k) as u128;
    let work = words.saturating_mul(per_word);
    if work > cap {
        return Err(Error::EnumerationCap { work, cap });
    }
    let out_adj = g.out_adjacency();
    let q = g.alphabet().len();
    // fan out over short prefixes, each continuing the subset walk
    let split = n.min(4);
    let mut prefixes: Vec<(Word, Vec<usize>)> = vec![(Vec::new(), (0..g.vertex_count()).collect())];
    for _ in 0..split {
        let mut next = Vec::new();
        for (word, set) in prefixes {
            for a in 0..q as Letter {
                let s = SoficGraph::successor(&out_adj, &set, a);
                if !s.is_empty() {
                    let mut w2 = word.clone();
                    w2.push(a);
                    next.push((w2, s));
                }
            }
        }
        prefixes = next;
    }
    let parts = par::map(prefixes, |(mut word, set)| {
        let mut blocks = BTreeSet::new();
        walk(&out_adj, q, &set, n, &mut word, &mut |win| {
            blocks.insert(column_from_window(ca, win, lo, k, w));
        });
        blocks
    });
    let mut blocks = BTreeSet::new();
    for p in parts {
        blocks.extend(p);
    }
    Ok(ColumnLanguage::new(ca.alphabet().clone(), k, w, blocks))
}

fn walk(out_adj: &[Vec<(Letter, usize)>], q: usize, set: &[usize], n: usize, word: &mut Word, emit: &mut dyn FnMut(&[Letter])) {
    if word.len() == n {
        emit(word);
        return;
    }
    for a in 0..q as Letter {
        let next = SoficGraph::successor(out_adj, set, a);
        if next.is_empty() {
            continue;
        }
        word.push(a);
        walk(out_adj, q, &next, n, word, emit);
        word.pop();
    }
}

/// Upper bound on the number of length-`n` words (paths in the subset
/// presentation).
fn count_paths(g: &SoficGraph, n: usize) -> u128 {
    let det = g.deterministic();
    let mut count = vec![1u128; det.len()];
    for _ in 0..n {
        let next: Vec<u128> =
            (0..det.len()).map(|s| det.trans[s].iter().fold(0u128, |acc, &(_, t)| acc.saturating_add(count[t]))).collect();
        count = next;
    }
    count.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Naive,
    Transducer,
    /// Both engines; disagreement is an error.
    Both,
}

impl std::str::FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "transducer" => Ok(Self::Transducer),
            "both" => Ok(Self::Both),
            _ => Err(Error::Usage(format!("unknown engine {s:?}"))),
        }
    }
}

pub fn trace<T: Traceable + ?Sized>(f: &T, k: usize, w: usize, engine: Engine) -> Result<ColumnLanguage> {
    match engine {
        Engine::Naive => trace_naive(f, k, w),
        Engine::Transducer => trace_transducer(f, k, w),
        Engine::Both => {
            let a = trace_naive(f, k, w)?;
            let b = trace_transducer(f, k, w)?;
            if a != b {
                return Err(Error::Precondition(format!("engines disagree: {} vs {} blocks", a.len(), b.len())));
            }
            Ok(a)
        }
    }
}

/// The onesided engine when it applies, otherwise naive when cheap and
/// the transducer beyond that.
pub fn trace_auto<T: Traceable + ?Sized>(f: &T, k: usize, w: usize) -> Result<ColumnLanguage> {
    if f.domain().is_none() && f.automaton().is_onesided() {
        match trace_onesided(f.automaton(), k, w) {
            Err(Error::MemoryGuard(_)) => {}
            r => return r,
        }
    }
    match trace_naive_with_cap(f, k, w, 1 << 20) {
        Err(Error::EnumerationCap { .. }) => trace_transducer(f, k, w),
        r => r,
    }
}

/// Polytrace: the depth-`k` trace projected through every track. A plain
/// alphabet counts as height 1.
pub fn polytrace<T: Traceable + ?Sized>(g: &T, k: usize) -> Result<ColumnLanguage> {
    let a = g.automaton().alphabet();
    if !a.is_product() || (g.domain().is_none() && g.automaton().is_onesided()) {
        let t = trace_auto(g, k, 1)?;
        return if a.is_product() { t.project_tracks() } else { Ok(t) };
    }
    match trace_naive_with_cap(g, k, 1, 1 << 20) {
        Err(Error::EnumerationCap { .. }) => {
            let maps: Vec<Vec<Letter>> = (0..a.height()).map(|t| a.letters().map(|c| a.track(c, t)).collect()).collect();
            let blocks = transducer::trace_transducer_mapped(g, k, &maps)?;
            Ok(ColumnLanguage::new(Arc::new(a.base().clone()), k, 1, blocks))
        }
        r => r?.project_tracks(),
    }
}

/// `{z[J .. J+k) : z ∈ τ_F at depth k+J}`.
pub fn limit_trace_approx<T: Traceable + ?Sized>(f: &T, k: usize, j: usize) -> Result<ColumnLanguage> {
    trace_auto(f, k + j, 1)?.rows(j, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(v: &[&str]) -> BTreeSet<Word> {
        v.iter().map(|s| s.bytes().map(|b| (b - b'0') as Letter).collect()).collect()
    }

    #[test]
    fn naive_examples() {
        let b = Alphabet::binary();
        let id = CellularAutomaton::identity(b.clone());
        assert_eq!(trace_naive(&id, 3, 1).unwrap().into_blocks(), words(&["000", "111"]));
        assert_eq!(trace_naive(&CellularAutomaton::shift(b.clone()), 3, 1).unwrap().len(), 8);
        let and = CellularAutomaton::min_rule(b);
        assert_eq!(trace_naive(&and, 2, 1).unwrap().into_blocks(), words(&["00", "10", "11"]));
    }

    #[test]
    fn naive_refuses_beyond_cap() {
        let s = CellularAutomaton::shift(Alphabet::binary());
        assert!(matches!(trace_naive_with_cap(&s, 30, 1, 1 << 10), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn limit_examples() {
        let b = Alphabet::binary();
        let and = CellularAutomaton::min_rule(b.clone());
        assert_eq!(limit_trace_approx(&and, 2, 0).unwrap().into_blocks(), words(&["00", "10", "11"]));
        assert_eq!(limit_trace_approx(&and, 2, 3).unwrap().into_blocks(), words(&["00", "10", "11"]));
        let zero = CellularAutomaton::constant(b.clone(), 0, 2).unwrap();
        assert_eq!(limit_trace_approx(&zero, 2, 1).unwrap().into_blocks(), words(&["00"]));
        let id = CellularAutomaton::identity(b);
        assert_eq!(limit_trace_approx(&id, 2, 4).unwrap().into_blocks(), words(&["00", "11"]));
    }

    #[test]
    fn polytrace_examples() {
        let b = Alphabet::binary();
        let pair = Arc::new(Alphabet::stacked(&b, vec![vec![0, 1]]).unwrap());
        let id = CellularAutomaton::identity(pair);
        assert_eq!(polytrace(&id, 2).unwrap().into_blocks(), words(&["00", "11"]));
        let one = Arc::new(Alphabet::full_power(&b, 1).unwrap());
        let s = CellularAutomaton::shift(one);
        assert_eq!(polytrace(&s, 3).unwrap().len(), 8);
    }

    #[test]
    fn width_two_blocks() {
        let s = CellularAutomaton::shift(Alphabet::binary());
        let t = trace_naive(&s, 2, 2).unwrap();
        // rows (x0 x1), (x1 x2)
        assert_eq!(t.len(), 8);
        assert!(t.blocks().iter().all(|b| b[1] == b[2]));
    }
}
