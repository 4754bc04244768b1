//! Local rules, global maps on periodic configurations, and CA combinators
//! (product, power, padding, radius-0 maps).

use std::fmt;
use std::sync::Arc;

use crate::alphabet::{word_from_index, word_index, Alphabet, Letter, Word};
use crate::error::{Error, Result};
use crate::par;

/// Default cap on dense rule tables (`|A|^d` entries).
pub const DEFAULT_TABLE_CAP: u128 = 1 << 24;

/// A rule evaluated structurally instead of through a dense table: used for
/// compiled automata whose diameter makes `|A|^d` infeasible.
pub trait StructuredRule: Send + Sync + fmt::Debug {
    /// Name written on the `rule-kind:` line.
    fn kind(&self) -> &'static str;
    /// Output letter for a window of length `diameter`.
    fn eval(&self, window: &[Letter]) -> Letter;
    /// Serialized body lines (after the header lines of the CA file).
    fn write_body(&self, alphabet: &Alphabet, out: &mut String);
    fn as_any(&self) -> &dyn std::any::Any;
}

#[derive(Clone, Debug)]
pub enum RuleKind {
    /// Dense table indexed by the mixed-radix (lexicographic) window index.
    Table(Arc<[Letter]>),
    Structured(Arc<dyn StructuredRule>),
}

/// `(A, m, d, f)`: the cell `i` is updated from `x[i-m .. i-m+d)`.
#[derive(Clone, Debug)]
pub struct LocalRule {
    alphabet: Arc<Alphabet>,
    anchor: i32,
    diameter: usize,
    kind: RuleKind,
}

impl LocalRule {
    pub fn from_table(alphabet: Arc<Alphabet>, anchor: i32, diameter: usize, table: Vec<Letter>) -> Result<Self> {
        if diameter == 0 {
            return Err(Error::Geometry("diameter must be at least 1".into()));
        }
        let entries = (alphabet.len() as u128).checked_pow(diameter as u32).unwrap_or(u128::MAX);
        if entries != table.len() as u128 {
            return Err(Error::Usage(format!("rule table has {} entries, expected {entries}", table.len())));
        }
        if table.iter().any(|&a| a as usize >= alphabet.len()) {
            return Err(Error::AlphabetMismatch("rule output outside alphabet".into()));
        }
        Ok(Self { alphabet, anchor, diameter, kind: RuleKind::Table(table.into()) })
    }

    /// Builds a dense table by evaluating `f` on every window.
    pub fn from_fn<F>(alphabet: Arc<Alphabet>, anchor: i32, diameter: usize, cap: u128, f: F) -> Result<Self>
    where
        F: Fn(&[Letter]) -> Letter + Sync + Send,
    {
        if diameter == 0 {
            return Err(Error::Geometry("diameter must be at least 1".into()));
        }
        let q = alphabet.len();
        let entries = (q as u128).checked_pow(diameter as u32).unwrap_or(u128::MAX);
        if entries > cap {
            return Err(Error::TableCap { entries, cap });
        }
        let table = par::map_range(entries as usize, |i| f(&word_from_index(i as u64, q, diameter)));
        Self::from_table(alphabet, anchor, diameter, table)
    }

    pub fn structured(alphabet: Arc<Alphabet>, anchor: i32, diameter: usize, rule: Arc<dyn StructuredRule>) -> Self {
        Self { alphabet, anchor, diameter, kind: RuleKind::Structured(rule) }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn anchor(&self) -> i32 {
        self.anchor
    }

    pub fn diameter(&self) -> usize {
        self.diameter
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn table(&self) -> Option<&[Letter]> {
        match &self.kind {
            RuleKind::Table(t) => Some(t),
            RuleKind::Structured(_) => None,
        }
    }

    /// Evaluates the rule; the window length is not checked.
    #[inline]
    pub fn eval(&self, window: &[Letter]) -> Letter {
        match &self.kind {
            RuleKind::Table(t) => t[word_index(window, self.alphabet.len())],
            RuleKind::Structured(r) => r.eval(window),
        }
    }

    pub fn apply(&self, window: &[Letter]) -> Result<Letter> {
        if window.len() != self.diameter {
            return Err(Error::Usage(format!("window of length {} for a rule of diameter {}", window.len(), self.diameter)));
        }
        if window.iter().any(|&a| a as usize >= self.alphabet.len()) {
            return Err(Error::AlphabetMismatch("window letter outside alphabet".into()));
        }
        Ok(self.eval(window))
    }
}

/// The global map of a local rule.
#[derive(Clone, Debug)]
pub struct CellularAutomaton {
    rule: LocalRule,
}

impl From<LocalRule> for CellularAutomaton {
    fn from(rule: LocalRule) -> Self {
        Self { rule }
    }
}

impl CellularAutomaton {
    pub fn new(rule: LocalRule) -> Self {
        Self { rule }
    }

    pub fn from_table(alphabet: Arc<Alphabet>, anchor: i32, diameter: usize, table: Vec<Letter>) -> Result<Self> {
        LocalRule::from_table(alphabet, anchor, diameter, table).map(Self::new)
    }

    pub fn from_fn<F>(alphabet: Arc<Alphabet>, anchor: i32, diameter: usize, f: F) -> Result<Self>
    where
        F: Fn(&[Letter]) -> Letter + Sync + Send,
    {
        LocalRule::from_fn(alphabet, anchor, diameter, DEFAULT_TABLE_CAP, f).map(Self::new)
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.rule.alphabet
    }

    pub fn anchor(&self) -> i32 {
        self.rule.anchor
    }

    pub fn diameter(&self) -> usize {
        self.rule.diameter
    }

    #[inline]
    pub fn eval(&self, window: &[Letter]) -> Letter {
        self.rule.eval(window)
    }

    /// `σ`: `F(x)_i = x_{i+1}` (anchor 0, diameter 2, `f(ab) = b`).
    pub fn shift(alphabet: Arc<Alphabet>) -> Self {
        Self::from_fn(alphabet, 0, 2, |w| w[1]).expect("shift table")
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        Self::radius0_from_map(alphabet.clone(), &alphabet.letters().collect::<Vec<_>>()).expect("identity")
    }

    /// Binary AND / minimum rule: anchor 0, diameter 2.
    pub fn min_rule(alphabet: Arc<Alphabet>) -> Self {
        Self::from_fn(alphabet, 0, 2, |w| w[0].min(w[1])).expect("min table")
    }

    /// Constant rule of the given diameter (anchor 0).
    pub fn constant(alphabet: Arc<Alphabet>, letter: Letter, diameter: usize) -> Result<Self> {
        Self::from_fn(alphabet, 0, diameter, |_| letter)
    }

    /// Diameter-1 anchor-0 CA applying `xi` cellwise.
    pub fn radius0_from_map(alphabet: Arc<Alphabet>, xi: &[Letter]) -> Result<Self> {
        if xi.len() != alphabet.len() || xi.iter().any(|&a| a as usize >= alphabet.len()) {
            return Err(Error::Usage("letter map must be total on the alphabet".into()));
        }
        Self::from_table(alphabet, 0, 1, xi.to_vec())
    }

    /// No cell reads a left neighbour (`m <= 0`).
    pub fn is_onesided(&self) -> bool {
        self.anchor() <= 0
    }

    /// `s` is spreading: `d > 1` and every window containing `s` maps to `s`.
    pub fn is_spreading_state(&self, s: Letter) -> bool {
        let d = self.diameter();
        if d <= 1 {
            return false;
        }
        let q = self.alphabet().len();
        let total = q.pow(d as u32);
        !par::any_range(total, |i| {
            let w = word_from_index(i as u64, q, d);
            w.contains(&s) && self.eval(&w) != s
        })
    }

    /// Letter map `a ↦ f(a^d)` describing the evolution of uniform
    /// configurations.
    pub fn uniform_map(&self) -> Vec<Letter> {
        self.alphabet().letters().map(|a| self.eval(&vec![a; self.diameter()])).collect()
    }

    /// One step on a periodic configuration.
    pub fn step(&self, x: &PeriodicConfiguration) -> Result<PeriodicConfiguration> {
        if x.period().iter().any(|&a| a as usize >= self.alphabet().len()) {
            return Err(Error::AlphabetMismatch("configuration letter outside alphabet".into()));
        }
        Ok(self.step_unchecked(x))
    }

    pub(crate) fn step_unchecked(&self, x: &PeriodicConfiguration) -> PeriodicConfiguration {
        let p = x.period().len() as i64;
        let d = self.diameter();
        let m = self.anchor() as i64;
        let mut window = vec![0; d];
        let next: Word = (0..p)
            .map(|i| {
                for (t, slot) in window.iter_mut().enumerate() {
                    *slot = x.at(i - m + t as i64);
                }
                self.eval(&window)
            })
            .collect();
        PeriodicConfiguration::new(next, 0).expect("nonempty period")
    }

    /// Re-expresses the rule with a wider neighbourhood `[i-anchor, i-anchor+diameter)`
    /// containing the current one.
    pub fn extend_to(&self, anchor: i32, diameter: usize) -> Result<Self> {
        let m = self.anchor();
        let d = self.diameter() as i32;
        if anchor < m || diameter as i32 - anchor < d - m {
            return Err(Error::Geometry(format!("cannot shrink neighbourhood (m={m}, d={d}) to (m={anchor}, d={diameter})")));
        }
        if anchor == m && diameter as i32 == d {
            return Ok(self.clone());
        }
        let off = (anchor - m) as usize;
        let dd = self.diameter();
        let me = self.clone();
        Self::from_fn(self.alphabet().clone(), anchor, diameter, move |w| me.eval(&w[off..off + dd]))
    }

    /// Pads both automata to the smallest common neighbourhood.
    pub fn common_geometry(a: &Self, b: &Self) -> Result<(Self, Self)> {
        let anchor = a.anchor().max(b.anchor());
        let right = (a.diameter() as i32 - a.anchor()).max(b.diameter() as i32 - b.anchor());
        let diameter = (anchor + right) as usize;
        Ok((a.extend_to(anchor, diameter)?, b.extend_to(anchor, diameter)?))
    }

    /// Componentwise product on `A × B`.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        let (a, b) = Self::common_geometry(a, b)?;
        if a.anchor() != b.anchor() || a.diameter() != b.diameter() {
            return Err(Error::Geometry("product factors disagree after padding".into()));
        }
        let alphabet = Arc::new(Alphabet::product(a.alphabet(), b.alphabet())?);
        let qb = b.alphabet().len() as Letter;
        let d = a.diameter();
        Self::from_fn(alphabet, a.anchor(), d, move |w| {
            let left: Word = w.iter().map(|&c| c / qb).collect();
            let right: Word = w.iter().map(|&c| c % qb).collect();
            a.eval(&left) * qb + b.eval(&right)
        })
    }

    /// `F^n` as a single local rule.
    pub fn power(&self, n: usize) -> Result<Self> {
        self.power_with_cap(n, DEFAULT_TABLE_CAP)
    }

    pub fn power_with_cap(&self, n: usize, cap: u128) -> Result<Self> {
        if n == 0 {
            return Err(Error::Usage("power must be at least 1".into()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let d = self.diameter();
        let diameter = n * (d - 1) + 1;
        let me = self.clone();
        let rule = LocalRule::from_fn(self.alphabet().clone(), self.anchor() * n as i32, diameter, cap, move |w| {
            me.letters_after(w, n)[0]
        })?;
        Ok(Self::new(rule))
    }

    /// Image of a finite window after `steps` applications (the result is
    /// `steps * (d - 1)` letters shorter; empty if the window is too short).
    pub fn letters_after(&self, window: &[Letter], steps: usize) -> Word {
        let d = self.diameter();
        let mut cur = window.to_vec();
        for _ in 0..steps {
            if cur.len() < d {
                return Vec::new();
            }
            cur = cur.windows(d).map(|x| self.eval(x)).collect();
        }
        cur
    }
}

/// A CA restricted to a two-sided domain subshift it is meant to preserve.
#[derive(Clone, Debug)]
pub struct PartialCA {
    pub ca: CellularAutomaton,
    pub domain: crate::subshift::SubshiftHandle,
}

impl PartialCA {
    pub fn new(ca: CellularAutomaton, domain: crate::subshift::SubshiftHandle) -> Result<Self> {
        if domain.alphabet().names() != ca.alphabet().names() {
            return Err(Error::AlphabetMismatch("domain and automaton alphabets differ".into()));
        }
        Ok(Self { ca, domain })
    }
}

/// A spatially periodic configuration `x_i = period[(i + phase) mod |period|]`,
/// kept in canonical form: primitive period, least rotation, phase reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicConfiguration {
    period: Word,
    phase: usize,
}

impl PeriodicConfiguration {
    pub fn new(period: Word, phase: usize) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Usage("period must be nonempty".into()));
        }
        let root = crate::alphabet::primitive_root(&period).to_vec();
        let p = root.len();
        // choose least rotation r = root[s..] root[..s]; then x_i = r[(i + phase - s) mod p]
        let s = (0..p).min_by(|&a, &b| crate::alphabet::rotate(&root, a).cmp(&crate::alphabet::rotate(&root, b))).unwrap_or(0);
        let rotated = crate::alphabet::rotate(&root, s);
        let phase = ((phase % p) + p - s) % p;
        Ok(Self { period: rotated, phase })
    }

    pub fn uniform(a: Letter) -> Self {
        Self { period: vec![a], phase: 0 }
    }

    pub fn period(&self) -> &[Letter] {
        &self.period
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    #[inline]
    pub fn at(&self, i: i64) -> Letter {
        let p = self.period.len() as i64;
        self.period[((i + self.phase as i64).rem_euclid(p)) as usize]
    }

    /// `x[lo .. hi)`.
    pub fn slice(&self, lo: i64, hi: i64) -> Word {
        (lo..hi).map(|i| self.at(i)).collect()
    }

    /// `σ(x)`.
    pub fn shifted(&self) -> Self {
        Self::new(self.period.clone(), self.phase + 1).expect("nonempty")
    }
}
