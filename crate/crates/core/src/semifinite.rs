//! Semifinite automata: CA acting on finite words framed by end markers
//! `L … R`, and the extension of one-sided CA to them.

use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::ca::CellularAutomaton;
use crate::error::{Error, Result};

/// A one-sided automaton extended to finite words: near the right marker
/// the window is padded with its last non-marker letter.
#[derive(Clone, Debug)]
pub struct SemifiniteAutomaton {
    base: CellularAutomaton,
}

impl SemifiniteAutomaton {
    /// Extension of a one-sided CA (anchor `<= 0`, renormalized to 0).
    pub fn extend_onesided(g: &CellularAutomaton) -> Result<Self> {
        let m = g.anchor();
        if m > 0 {
            return Err(Error::NotOnesided(m));
        }
        let base = if m < 0 { g.extend_to(0, g.diameter() + (-m) as usize)? } else { g.clone() };
        Ok(Self { base })
    }

    pub fn base(&self) -> &CellularAutomaton {
        &self.base
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        self.base.alphabet()
    }

    pub fn diameter(&self) -> usize {
        self.base.diameter()
    }

    /// Rule on a window whose cell is `window[0]`; `None` stands for the
    /// right marker `R` (everything after the first marker is ignored).
    pub fn eval(&self, window: &[Option<Letter>]) -> Letter {
        let d = self.diameter();
        let mut w = Vec::with_capacity(d);
        for &c in window.iter().take(d) {
            match c {
                Some(a) => w.push(a),
                None => break,
            }
        }
        let last = *w.last().expect("cell itself is not a marker");
        w.resize(d, last);
        self.base.eval(&w)
    }

    /// `g̃(u, v)` for diameter 2, `g̃(u, λ) = g(u u)`.
    pub fn pair(&self, u: Letter, v: Option<Letter>) -> Letter {
        self.eval(&[Some(u), v])
    }

    pub fn sf_step(&self, word: &[Letter]) -> Word {
        let n = word.len();
        (0..n)
            .map(|i| {
                let window: Vec<Option<Letter>> = (0..self.diameter()).map(|t| word.get(i + t).copied()).collect();
                self.eval(&window)
            })
            .collect()
    }

    /// Columns of every cell for `depth` rows.
    pub fn sf_trace(&self, word: &[Letter], depth: usize) -> Result<Vec<Word>> {
        if word.is_empty() {
            return Err(Error::Usage("semifinite trace of the empty word".into()));
        }
        let mut cols = vec![Vec::with_capacity(depth); word.len()];
        let mut cur = word.to_vec();
        for j in 0..depth {
            for (c, &a) in cols.iter_mut().zip(&cur) {
                c.push(a);
            }
            if j + 1 < depth {
                cur = self.sf_step(&cur);
            }
        }
        Ok(cols)
    }

    /// The automaton as a CA on `A ⊔ {L, R}` (markers are fixed points;
    /// letters never read a left marker since the anchor is 0).
    pub fn to_marker_ca(&self) -> Result<CellularAutomaton> {
        let a = self.alphabet();
        if a.index_of("L").is_some() || a.index_of("R").is_some() {
            return Err(Error::AlphabetMismatch("alphabet already uses L or R".into()));
        }
        let mut names: Vec<String> = a.names().to_vec();
        names.push("L".into());
        names.push("R".into());
        let ext = Arc::new(Alphabet::new(names)?);
        let q = a.len() as Letter;
        let (l, r) = (q, q + 1);
        let me = self.clone();
        CellularAutomaton::from_fn(ext, 0, self.diameter(), move |w| {
            if w[0] == l || w[0] == r {
                return w[0];
            }
            let window: Vec<Option<Letter>> = w.iter().map(|&c| if c == r || c == l { None } else { Some(c) }).collect();
            me.eval(&window)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_examples() {
        let b = Alphabet::binary();
        let and = SemifiniteAutomaton::extend_onesided(&CellularAutomaton::min_rule(b.clone())).unwrap();
        assert_eq!(and.sf_trace(&[1], 4).unwrap()[0], vec![1, 1, 1, 1]);
        assert_eq!(and.sf_trace(&[1, 0], 4).unwrap()[0], vec![1, 0, 0, 0]);
        assert_eq!(and.sf_step(&[1, 1, 1]), vec![1, 1, 1]);
        assert_eq!(and.sf_step(&[1, 0, 1]), vec![0, 0, 1]);
        let s = SemifiniteAutomaton::extend_onesided(&CellularAutomaton::shift(b.clone())).unwrap();
        assert_eq!(s.sf_trace(&[0, 1], 4).unwrap()[0], vec![0, 1, 1, 1]);
        assert_eq!(s.sf_trace(&[0, 1, 1], 1).unwrap(), vec![vec![0], vec![1], vec![1]]);
        let left = CellularAutomaton::from_fn(b, 1, 2, |w| w[0]).unwrap();
        assert!(matches!(SemifiniteAutomaton::extend_onesided(&left), Err(Error::NotOnesided(1))));
    }

    #[test]
    fn marker_ca_agrees_away_from_markers() {
        let b = Alphabet::binary();
        let g = CellularAutomaton::min_rule(b);
        let sf = SemifiniteAutomaton::extend_onesided(&g).unwrap();
        let ca = sf.to_marker_ca().unwrap();
        for w in crate::alphabet::all_words(2, 2) {
            assert_eq!(ca.eval(&w), g.eval(&w));
        }
        // cell 1 next to R pads with itself
        assert_eq!(ca.eval(&[1, 3]), 1);
        assert_eq!(ca.eval(&[2, 0]), 2);
    }
}
