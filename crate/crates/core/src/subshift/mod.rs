//! Subshift handles (SFT, sofic graph, deterministic orbit), exact languages
//! and the decidable predicates on them.

pub mod graph;
pub mod sft;

use std::collections::BTreeSet;
use std::sync::Arc;

pub use graph::{DetGraph, Edge, Sided, SoficGraph};
pub use sft::Sft;

use crate::alphabet::{is_uniform, lyndon_words, Alphabet, Letter, Word};
use crate::error::{Error, Result};

/// `O_ξ` for a letter map `ξ` defined on a subalphabet (the letters mapped
/// to `Some`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicOrbit {
    alphabet: Arc<Alphabet>,
    xi: Vec<Option<Letter>>,
}

impl DeterministicOrbit {
    pub fn new(alphabet: Arc<Alphabet>, xi: Vec<Option<Letter>>) -> Result<Self> {
        if xi.len() != alphabet.len() {
            return Err(Error::Usage("letter map length differs from alphabet".into()));
        }
        if xi.iter().all(Option::is_none) {
            return Err(Error::Usage("letter map with empty domain".into()));
        }
        for b in xi.iter().flatten() {
            if xi.get(*b as usize).is_none_or(Option::is_none) {
                return Err(Error::Usage("letter map image leaves its domain".into()));
            }
        }
        Ok(Self { alphabet, xi })
    }

    pub fn total(alphabet: Arc<Alphabet>, xi: &[Letter]) -> Result<Self> {
        Self::new(alphabet, xi.iter().map(|&b| Some(b)).collect())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn map(&self) -> &[Option<Letter>] {
        &self.xi
    }

    pub fn domain(&self) -> Vec<Letter> {
        self.alphabet.letters().filter(|&a| self.xi[a as usize].is_some()).collect()
    }

    pub fn is_total(&self) -> bool {
        self.xi.iter().all(Option::is_some)
    }

    pub fn total_map(&self) -> Option<Vec<Letter>> {
        self.xi.iter().copied().collect()
    }

    pub fn apply(&self, a: Letter) -> Option<Letter> {
        self.xi[a as usize]
    }

    pub fn image(&self) -> BTreeSet<Letter> {
        self.xi.iter().flatten().copied().collect()
    }

    /// The orbit column `(ξ^j(a))_j` as `prefix · cycle^∞`.
    pub fn orbit(&self, a: Letter) -> (Word, Word) {
        let mut seq = vec![a];
        loop {
            let next = self.xi[*seq.last().unwrap() as usize].expect("orbit stays in the domain");
            if let Some(pos) = seq.iter().position(|&b| b == next) {
                let cycle = seq.split_off(pos);
                return (seq, cycle);
            }
            seq.push(next);
        }
    }

    /// Whether every orbit eventually reaches one uniform fixed point.
    pub fn is_nilpotent(&self) -> bool {
        let fixed: BTreeSet<Word> = self.domain().into_iter().map(|a| self.orbit(a).1).collect();
        fixed.len() == 1 && fixed.iter().all(|c| c.len() == 1)
    }

    pub fn graph(&self) -> SoficGraph {
        let edges = self
            .domain()
            .into_iter()
            .map(|a| Edge { from: a as usize, label: a, to: self.xi[a as usize].unwrap() as usize })
            .collect();
        SoficGraph::new(
            self.alphabet.clone(),
            self.alphabet.len(),
            edges,
            Sided::One,
            Some(self.domain().iter().map(|&a| a as usize).collect()),
        )
    }

    /// Text form `ξ(0),ξ(1),…` with `_` outside the domain.
    pub fn format(&self) -> String {
        self.xi.iter().map(|b| b.map_or("_".to_string(), |b| self.alphabet.name(b).to_string())).collect::<Vec<_>>().join(",")
    }

    pub fn parse(alphabet: Arc<Alphabet>, s: &str) -> Result<Self> {
        let xi = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                if t == "_" {
                    Ok(None)
                } else {
                    alphabet.index_of(t).map(Some).ok_or_else(|| Error::AlphabetMismatch(format!("unknown letter {t:?} in map")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, xi)
    }
}

#[derive(Clone, Debug)]
pub enum SubshiftHandle {
    Sft(Sft),
    Sofic(SoficGraph),
    Orbit(DeterministicOrbit),
}

/// Outcome of the nilpotency analysis of a sofic shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Nilpotency {
    pub letter: Letter,
    pub index: Option<usize>,
}

impl SubshiftHandle {
    pub fn golden_mean() -> Self {
        Self::Sft(Sft::from_forbidden(Alphabet::binary(), &[vec![1, 1]], Sided::Two).expect("golden mean"))
    }

    pub fn full(alphabet: Arc<Alphabet>) -> Self {
        Self::Sft(Sft::full(alphabet))
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        match self {
            Self::Sft(s) => s.alphabet(),
            Self::Sofic(g) => g.alphabet(),
            Self::Orbit(o) => o.alphabet(),
        }
    }

    pub fn sided(&self) -> Sided {
        match self {
            Self::Sft(s) => s.sided(),
            Self::Sofic(g) => g.sided(),
            Self::Orbit(_) => Sided::One,
        }
    }

    pub fn graph(&self) -> SoficGraph {
        match self {
            Self::Sft(s) => s.graph(),
            Self::Sofic(g) => g.clone(),
            Self::Orbit(o) => o.graph(),
        }
    }

    /// Trimmed graph seen as a one-sided shift of right-infinite words.
    fn onesided_graph(&self) -> SoficGraph {
        let g = self.graph().trim();
        match g.sided() {
            Sided::One => g,
            Sided::Two => g.with_sided(Sided::One).trim(),
        }
    }

    pub fn language(&self, n: usize) -> BTreeSet<Word> {
        self.graph().language(n)
    }

    pub fn is_empty(&self) -> bool {
        self.graph().is_empty()
    }

    /// Lyndon representatives `w`, `|w| <= p`, of periodic points `w^∞`.
    pub fn periodic_points(&self, p: usize) -> Vec<Word> {
        let g = self.graph().trim();
        let letters: BTreeSet<Letter> = g.edges().iter().map(|e| e.label).collect();
        lyndon_words(self.alphabet().len(), p)
            .into_iter()
            .filter(|w| w.iter().all(|a| letters.contains(a)))
            .filter(|w| g.periodic_word_cycle(w))
            .collect()
    }

    /// The letter `0` when every cycle of the trimmed graph is labelled
    /// `0` only (the unique periodic point is uniform).
    pub fn weak_nilpotent_letter(&self) -> Option<Letter> {
        let g = self.graph().trim();
        let labels: BTreeSet<Letter> = g.cycle_edges().iter().map(|e| e.label).collect();
        (labels.len() == 1).then(|| *labels.iter().next().unwrap())
    }

    pub fn is_weakly_nilpotent(&self) -> bool {
        self.weak_nilpotent_letter().is_some()
    }

    /// Least `J` with `σ^J(Σ) = {0^∞}`.
    pub fn nilpotency_index(&self) -> Option<usize> {
        self.nilpotency().and_then(|n| n.index)
    }

    pub fn nilpotency(&self) -> Option<Nilpotency> {
        let zero = self.weak_nilpotent_letter()?;
        let g = self.graph().trim();
        if g.sided() == Sided::Two {
            let all_zero = g.edges().iter().all(|e| e.label == zero);
            return Some(Nilpotency { letter: zero, index: all_zero.then_some(0) });
        }
        let n = g.vertex_count();
        let (comp, cyclic) = g.components();
        let cycle_vertices: Vec<usize> = (0..n).filter(|&v| cyclic[comp[v]]).collect();
        let hot = graph::reachable(n, g.edges(), &cycle_vertices);
        if g.edges().iter().any(|e| e.label != zero && hot[e.from]) {
            return Some(Nilpotency { letter: zero, index: None });
        }
        // longest distance from a start within the acyclic cold part
        let mut dist: Vec<Option<usize>> = vec![None; n];
        for v in g.starts() {
            if !hot[v] {
                dist[v] = Some(0);
            }
        }
        for _ in 0..=n {
            for e in g.edges() {
                if hot[e.to] {
                    continue;
                }
                if let Some(d) = dist[e.from] {
                    if dist[e.to].is_none_or(|t| t < d + 1) {
                        dist[e.to] = Some(d + 1);
                    }
                }
            }
        }
        let j = g.edges().iter().filter(|e| e.label != zero).filter_map(|e| dist[e.from].map(|d| d + 1)).max().unwrap_or(0);
        Some(Nilpotency { letter: zero, index: Some(j) })
    }

    /// Whether every orbit column of `ξ` is a point.
    pub fn contains_orbit(&self, xi: &DeterministicOrbit) -> bool {
        let g = self.onesided_graph();
        let adj = g.out_adjacency();
        xi.domain().into_iter().all(|a| {
            let (pre, cyc) = xi.orbit(a);
            g.accepts_ultimately_periodic_trimmed(&adj, &pre, &cyc)
        })
    }

    /// Canonical `ξ` with `O_ξ ⊆ Σ`: total maps first, larger images
    /// first, then lexicographic on `(ξ(0), ξ(1), …)`. With `subalphabet`,
    /// falls back to maps on proper subalphabets (larger domains first).
    pub fn contains_deterministic(&self, subalphabet: bool) -> Option<DeterministicOrbit> {
        self.deterministic_maps(subalphabet, true).into_iter().next()
    }

    /// All maps (or only the first one) in the order of
    /// [`Self::contains_deterministic`].
    pub fn deterministic_maps(&self, subalphabet: bool, first_only: bool) -> Vec<DeterministicOrbit> {
        let q = self.alphabet().len();
        let g = self.onesided_graph();
        let adj = g.out_adjacency();
        let mut found = Vec::new();
        let mut domains: Vec<Vec<Letter>> = vec![(0..q as Letter).collect()];
        if subalphabet {
            let mut subs: Vec<Vec<Letter>> =
                (1u32..(1 << q) - 1).map(|mask| (0..q as Letter).filter(|&a| mask & (1 << a) != 0).collect()).collect();
            subs.sort_by(|a: &Vec<Letter>, b| b.len().cmp(&a.len()).then(a.cmp(b)));
            domains.extend(subs);
        }
        for dom in domains {
            let n = dom.len();
            let total = n.pow(n as u32);
            let mut level = Vec::new();
            for idx in 0..total {
                let mut xi = vec![None; q];
                let mut rest = idx;
                for &a in dom.iter().rev() {
                    xi[a as usize] = Some(dom[rest % n]);
                    rest /= n;
                }
                let orbit = DeterministicOrbit { alphabet: self.alphabet().clone(), xi };
                let ok = dom.iter().all(|&a| {
                    let (pre, cyc) = orbit.orbit(a);
                    g.accepts_ultimately_periodic_trimmed(&adj, &pre, &cyc)
                });
                if ok {
                    level.push(orbit);
                }
            }
            level.sort_by(|a, b| b.image().len().cmp(&a.image().len()).then(a.xi.cmp(&b.xi)));
            found.extend(level);
            if first_only && !found.is_empty() {
                found.truncate(1);
                return found;
            }
        }
        found
    }

    /// Contains some `O_ξ` and a periodic point using a letter outside `ξ(A)`.
    pub fn is_cdd(&self) -> bool {
        let g = self.graph().trim();
        let cycle_labels: BTreeSet<Letter> = g.cycle_edges().iter().map(|e| e.label).collect();
        self.deterministic_maps(false, false).iter().any(|xi| cycle_labels.iter().any(|a| !xi.image().contains(a)))
    }

    /// `σ^J(Σ)`: one-sided starts move `J` steps; two-sided shifts are
    /// invariant.
    pub fn shift_image(&self, j: usize) -> SoficGraph {
        let g = self.graph().trim();
        if g.sided() == Sided::Two || j == 0 {
            return g;
        }
        let adj = g.out_adjacency();
        let mut set = g.starts();
        for _ in 0..j {
            let mut next: Vec<usize> = set.iter().flat_map(|&v| adj[v].iter().map(|e| e.1)).collect();
            next.sort_unstable();
            next.dedup();
            set = next;
        }
        g.with_start(Some(set)).trim()
    }

    pub fn equal_up_to(&self, other: &SubshiftHandle, n: usize) -> bool {
        (0..=n).all(|i| self.language(i) == other.language(i))
    }

    /// Least `J <= jmax` with `σ^J Σ1` and `σ^J Σ2` agreeing up to length `n`.
    pub fn ultimately_coincide(&self, other: &SubshiftHandle, jmax: usize, n: usize) -> Option<usize> {
        (0..=jmax).find(|&j| {
            let a = SubshiftHandle::Sofic(self.shift_image(j));
            let b = SubshiftHandle::Sofic(other.shift_image(j));
            a.equal_up_to(&b, n)
        })
    }

    /// `π_q(Σ)`, or with `q = None` the union over all tracks.
    pub fn project(&self, q: Option<usize>) -> Result<SubshiftHandle> {
        let alphabet = self.alphabet();
        if !alphabet.is_product() {
            return Err(Error::NotProduct);
        }
        let base = Arc::new(alphabet.base().clone());
        let g = self.graph();
        let tracks: Vec<usize> = match q {
            Some(q) if q < alphabet.height() => vec![q],
            Some(q) => return Err(Error::Usage(format!("track {q} beyond height {}", alphabet.height()))),
            None => (0..alphabet.height()).collect(),
        };
        let parts: Vec<SoficGraph> = tracks.iter().map(|&t| g.relabel(base.clone(), |a| alphabet.track(a, t))).collect();
        Ok(SubshiftHandle::Sofic(SoficGraph::union(&parts)))
    }

    /// Whether every letter of `word` lies in the alphabet and the word is
    /// in the language.
    pub fn contains_word(&self, word: &[Letter]) -> bool {
        let g = self.graph().trim();
        let adj = g.out_adjacency();
        let mut set: Vec<usize> = (0..g.vertex_count()).collect();
        for &a in word {
            set = SoficGraph::successor(&adj, &set, a);
            if set.is_empty() {
                return false;
            }
        }
        true
    }
}

/// The sofic shift `O_σ(⊞_h(W^Z))` of aligned concatenations of blocks,
/// presented by the block-cycle graph (vertex `(block, offset)`).
pub fn block_shift(alphabet: Arc<Alphabet>, blocks: &[Word]) -> Result<SoficGraph> {
    let h = blocks.first().map(Vec::len).ok_or(Error::EmptyLanguage)?;
    if h == 0 || blocks.iter().any(|b| b.len() != h) {
        return Err(Error::MixedLengths);
    }
    let n = blocks.len();
    let mut edges = Vec::new();
    for (b, w) in blocks.iter().enumerate() {
        for i in 0..h {
            let from = b * h + i;
            if i + 1 < h {
                edges.push(Edge { from, label: w[i], to: from + 1 });
            } else {
                for c in 0..n {
                    edges.push(Edge { from, label: w[i], to: c * h });
                }
            }
        }
    }
    Ok(SoficGraph::new(alphabet, n * h, edges, Sided::Two, None))
}

/// `Λ = ∪_i σ^i(⊞_h(W^Z))` as a `2h`-window SFT, for `⌊h/2⌋`-freezing `W`.
pub fn macrocell_sft(alphabet: Arc<Alphabet>, blocks: &[Word]) -> Result<Sft> {
    let h = blocks.first().map(Vec::len).ok_or(Error::EmptyLanguage)?;
    if blocks.iter().any(|b| b.len() != h) {
        return Err(Error::MixedLengths);
    }
    crate::freeze::require_freezing(blocks, h / 2)?;
    let mut windows = BTreeSet::new();
    for a in blocks {
        for b in blocks {
            for c in blocks {
                let w: Word = a.iter().chain(b).chain(c).copied().collect();
                for i in 0..=h {
                    windows.insert(w[i..i + 2 * h].to_vec());
                }
            }
        }
    }
    Sft::from_allowed(alphabet, 2 * h, windows, Sided::Two)
}

/// Whether `w` is a nonuniform word.
pub fn is_nonuniform(w: &[Letter]) -> bool {
    !is_uniform(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn words(v: &[&str]) -> Vec<Word> {
        v.iter().map(|s| s.bytes().map(|b| (b - b'0') as Letter).collect()).collect()
    }

    #[test]
    fn language_examples() {
        let g = SubshiftHandle::golden_mean();
        assert_eq!(g.language(2).into_iter().collect::<Vec<_>>(), words(&["00", "01", "10"]));
        let nilp = fixtures::nilp();
        assert_eq!(nilp.language(3).into_iter().collect::<Vec<_>>(), words(&["000", "001", "010", "100", "210"]));
        assert_eq!(SubshiftHandle::full(Alphabet::binary()).language(3).len(), 8);
    }

    #[test]
    fn periodic_point_examples() {
        assert_eq!(SubshiftHandle::golden_mean().periodic_points(2), words(&["0", "01"]));
        assert_eq!(fixtures::x110().periodic_points(3), words(&["001"]));
        assert_eq!(fixtures::nilp().periodic_points(3), words(&["0"]));
    }

    #[test]
    fn nilpotency_examples() {
        let nilp = fixtures::nilp();
        assert!(nilp.is_weakly_nilpotent());
        assert_eq!(nilp.nilpotency_index(), Some(3));
        let g = SubshiftHandle::golden_mean();
        assert!(!g.is_weakly_nilpotent());
        assert_eq!(g.nilpotency_index(), None);
        let zero = SubshiftHandle::Sft(Sft::from_allowed(Alphabet::binary(), 1, vec![vec![0]], Sided::One).unwrap());
        assert_eq!(zero.nilpotency_index(), Some(0));
    }

    #[test]
    fn deterministic_examples() {
        assert!(fixtures::x110().contains_deterministic(true).is_none());
        let full = SubshiftHandle::full(Alphabet::binary());
        assert_eq!(full.contains_deterministic(false).unwrap().total_map(), Some(vec![0, 1]));
        assert_eq!(fixtures::ctrex().contains_deterministic(false).unwrap().total_map(), Some(vec![1, 0]));
    }

    #[test]
    fn cdd_examples() {
        assert!(SubshiftHandle::full(Alphabet::binary()).is_cdd());
        let zero = SubshiftHandle::Sft(Sft::from_allowed(Alphabet::binary(), 1, vec![vec![0]], Sided::Two).unwrap());
        assert!(!zero.is_cdd());
        assert!(!fixtures::ctrex().is_cdd());
    }

    #[test]
    fn coincidence_examples() {
        let g = SubshiftHandle::golden_mean();
        assert!(g.equal_up_to(&g, 6));
        assert_eq!(g.ultimately_coincide(&g, 3, 6), Some(0));
        let zero = SubshiftHandle::Sft(Sft::from_allowed(Alphabet::binary(), 1, vec![vec![0]], Sided::One).unwrap());
        assert_eq!(fixtures::tails().ultimately_coincide(&zero, 5, 6), None);
        let zero3 = SubshiftHandle::Sft(Sft::from_allowed(Alphabet::numeric(3), 1, vec![vec![0]], Sided::One).unwrap());
        assert_eq!(fixtures::nilp().ultimately_coincide(&zero3, 5, 6), Some(3));
    }

    #[test]
    fn projection_examples() {
        let b = Alphabet::binary();
        let p = Arc::new(Alphabet::product(&b, &b).unwrap());
        let c = p.encode(&[0, 1]).unwrap();
        let s = SubshiftHandle::Sft(Sft::from_allowed(p, 1, vec![vec![c]], Sided::Two).unwrap());
        assert_eq!(s.project(Some(0)).unwrap().language(3), [vec![0, 0, 0]].into_iter().collect());
        assert_eq!(s.project(Some(1)).unwrap().language(3), [vec![1, 1, 1]].into_iter().collect());
        assert_eq!(s.project(None).unwrap().language(2).len(), 2);
        assert!(SubshiftHandle::golden_mean().project(Some(0)).is_err());
    }

    #[test]
    fn macrocell_examples() {
        let b = Alphabet::binary();
        let s = macrocell_sft(b.clone(), &words(&["10"])).unwrap();
        assert_eq!(s.allowed().iter().cloned().collect::<Vec<_>>(), words(&["0101", "1010"]));
        let s3 = macrocell_sft(b.clone(), &words(&["100"])).unwrap();
        assert_eq!(s3.allowed().len(), 3);
        assert!(macrocell_sft(b, &words(&["00", "01", "10"])).is_err());
    }
}
