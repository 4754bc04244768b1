//! Compilers from (poly)traceable subshifts to automata tracing them.
//!
//! Every construction returns a [`CompiledArtifact`]: the automaton, a
//! provenance record and, when available, a witness recipe mapping a target
//! word to a finite window of an initial configuration whose cell 0 column
//! starts with that word.

mod build;
pub mod rules;

use std::fmt;
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::ca::{CellularAutomaton, PartialCA, PeriodicConfiguration};
use crate::error::{Error, Result};
use crate::subshift::SubshiftHandle;
use crate::trace::{column_from_window, cone, Traceable};

pub use build::{
    border_compose, full_trace_compile, nilpotent_partial_ca, partial_trace_compile, polytrace_to_trace, sft_polytracer,
    sft_polytracer_recipe, totalize, ultimate_trace_compile, ungroup_ca, UltimateOutcome, UngroupSpec, VALIDATION_DEPTH,
};

/// The automaton produced by a compiler.
#[derive(Clone, Debug)]
pub enum Compiled {
    Total(CellularAutomaton),
    Partial(PartialCA),
}

impl Compiled {
    pub fn automaton(&self) -> &CellularAutomaton {
        match self {
            Self::Total(ca) => ca,
            Self::Partial(p) => &p.ca,
        }
    }

    pub fn domain(&self) -> Option<&SubshiftHandle> {
        match self {
            Self::Total(_) => None,
            Self::Partial(p) => Some(&p.domain),
        }
    }
}

impl Traceable for Compiled {
    fn automaton(&self) -> &CellularAutomaton {
        Compiled::automaton(self)
    }

    fn domain(&self) -> Option<&SubshiftHandle> {
        Compiled::domain(self)
    }
}

/// A window `x[lo .. lo + |window|)` of an initial configuration; the
/// observed cell is 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub window: Word,
    pub lo: i64,
}

impl Witness {
    /// Column of cell 0 over `depth` rows, if the window covers the cone.
    pub fn column(&self, ca: &CellularAutomaton, depth: usize) -> Result<Word> {
        let (clo, len) = cone(ca, depth, 1);
        let start = clo - self.lo;
        if start < 0 || start as usize + len > self.window.len() {
            return Err(Error::Usage(format!("witness window does not cover the depth-{depth} cone")));
        }
        let start = start as usize;
        Ok(column_from_window(ca, &self.window[start..start + len], clo, depth, 1))
    }
}

/// A window of block letters whose cell 0, track `track`, is observed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockWitness {
    pub cells: Word,
    pub lo: i64,
    pub track: usize,
}

impl BlockWitness {
    /// Pads with copies of the end cells to cover `[-reach, reach]`.
    pub fn padded(mut self, reach: usize) -> Self {
        let reach = reach as i64;
        if self.lo > -reach {
            let first = self.cells[0];
            let extra = (self.lo + reach) as usize;
            self.cells.splice(0..0, std::iter::repeat_n(first, extra));
            self.lo = -reach;
        }
        let hi = self.lo + self.cells.len() as i64;
        if hi <= reach {
            let last = *self.cells.last().expect("nonempty witness");
            self.cells.extend(std::iter::repeat_n(last, (reach + 1 - hi) as usize));
        }
        self
    }

    /// Letter-level witness: blocks decoded through `alphabet`, observed
    /// letter at offset `offset + track` of block 0.
    pub fn ungroup(&self, alphabet: &Alphabet, offset: usize) -> Witness {
        let h = alphabet.height() as i64;
        let window: Word = self.cells.iter().flat_map(|&c| alphabet.decode(c)).collect();
        Witness { window, lo: self.lo * h - (offset + self.track) as i64 }
    }
}

/// Block-level recipe: target word and reach (in cells) to a witness.
pub type BlockRecipe = Arc<dyn Fn(&[Letter], usize) -> Result<BlockWitness> + Send + Sync>;

/// Letter-level recipe.
#[derive(Clone)]
pub struct WitnessRecipe {
    pub description: String,
    build: Arc<dyn Fn(&[Letter]) -> Result<Witness> + Send + Sync>,
}

impl fmt::Debug for WitnessRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WitnessRecipe").field("description", &self.description).finish()
    }
}

impl WitnessRecipe {
    pub fn new(description: impl Into<String>, f: impl Fn(&[Letter]) -> Result<Witness> + Send + Sync + 'static) -> Self {
        Self { description: description.into(), build: Arc::new(f) }
    }

    pub fn witness(&self, word: &[Letter]) -> Result<Witness> {
        if word.is_empty() {
            return Err(Error::Usage("witness for the empty word".into()));
        }
        (self.build)(word)
    }
}

/// Which construction produced an artifact, as `key: value` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub construction: String,
    pub branch: Option<String>,
    pub notes: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(construction: &str) -> Self {
        Self { construction: construction.into(), ..Self::default() }
    }

    pub fn branch(mut self, b: &str) -> Self {
        self.branch = Some(b.into());
        self
    }

    pub fn note(mut self, k: &str, v: impl ToString) -> Self {
        self.notes.push((k.into(), v.to_string()));
        self
    }
}

#[derive(Clone, Debug)]
pub struct CompiledArtifact {
    pub result: Compiled,
    pub provenance: Provenance,
    pub witness: Option<WitnessRecipe>,
    /// Rows to drop before the trace matches its target (0 when exact).
    pub offset: usize,
}

impl CompiledArtifact {
    pub fn automaton(&self) -> &CellularAutomaton {
        self.result.automaton()
    }

    /// Runs the recipe for `word` and returns the column it produces.
    pub fn witness_column(&self, word: &[Letter]) -> Result<Word> {
        let recipe = self.witness.as_ref().ok_or_else(|| Error::Precondition("artifact has no witness recipe".into()))?;
        let w = recipe.witness(word)?;
        if let Some(dom) = self.result.domain() {
            if !dom.contains_word(&w.window) {
                return Err(Error::Precondition("witness window lies outside the domain".into()));
            }
        }
        w.column(self.automaton(), word.len())
    }
}

/// `⊞`: concatenation of the decodings of a block word.
pub fn group_word(alphabet: &Alphabet, x: &[Letter]) -> Word {
    x.iter().flat_map(|&c| alphabet.decode(c)).collect()
}

/// `⊞` on periodic configurations: `y[hi .. h(i+1)) = x_i`.
pub fn group(alphabet: &Alphabet, x: &PeriodicConfiguration) -> Result<PeriodicConfiguration> {
    let period: Word = x.slice(0, x.period().len() as i64);
    PeriodicConfiguration::new(group_word(alphabet, &period), 0)
}

/// Inverse of [`group_word`] on aligned words.
pub fn ungroup_word(alphabet: &Alphabet, y: &[Letter]) -> Option<Word> {
    let h = alphabet.height();
    if !y.len().is_multiple_of(h) {
        return None;
    }
    y.chunks(h).map(|c| alphabet.encode(c)).collect()
}

/// Witnesses from uniform configurations: `a^∞` yields the orbit of `a`
/// under the automaton's uniform map.
pub fn uniform_recipe(ca: &CellularAutomaton) -> WitnessRecipe {
    let ca = ca.clone();
    WitnessRecipe::new("uniform configuration of the first letter", move |z| {
        let (lo, len) = cone(&ca, z.len(), 1);
        Ok(Witness { window: vec![z[0]; len], lo })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_examples() {
        let b = Alphabet::binary();
        let blocks = Alphabet::stacked(&b, vec![vec![1, 0]]).unwrap();
        let y = group(&blocks, &PeriodicConfiguration::uniform(0)).unwrap();
        assert_eq!(y.slice(0, 4), vec![1, 0, 1, 0]);
        let id = Alphabet::stacked(&b, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(group_word(&id, &[1, 0, 1]), vec![1, 0, 1]);
        let pairs = Alphabet::stacked(&b, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let x = PeriodicConfiguration::new(vec![0, 1], 0).unwrap();
        assert_eq!(group(&pairs, &x).unwrap().slice(0, 4), vec![0, 1, 1, 0]);
        assert_eq!(ungroup_word(&pairs, &[0, 1, 1, 0]), Some(vec![0, 1]));
        assert_eq!(ungroup_word(&pairs, &[0, 0]), None);
    }

    #[test]
    fn padding_covers_reach() {
        let w = BlockWitness { cells: vec![3, 4], lo: 0, track: 1 }.padded(2);
        assert_eq!(w.cells, vec![3, 3, 3, 4, 4]);
        assert_eq!(w.lo, -2);
    }
}
