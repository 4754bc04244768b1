//! Membership of a single column in the trace, by depth-first search for
//! an initial window. Useful at depths where the whole language is out of
//! reach but the column is easy to realize.

use crate::alphabet::{Letter, Word};
use crate::error::{Error, Result};
use crate::subshift::SoficGraph;

use super::{cone, Traceable};

/// Default cap on search nodes.
pub const DEFAULT_NODE_CAP: u64 = 1 << 26;

struct Search<'a> {
    ca: &'a crate::ca::CellularAutomaton,
    out_adj: Vec<Vec<(Letter, usize)>>,
    column: &'a [Letter],
    /// Index of cell 0 in row `j` of the window coordinates.
    target: Vec<usize>,
    rows: Vec<Word>,
    n: usize,
    nodes: u64,
    cap: u64,
}

impl Search<'_> {
    /// Appends `a` to row 0 and every cell it completes below. Returns the
    /// previous row lengths and whether an observed cell disagrees.
    fn push(&mut self, a: Letter) -> (Vec<usize>, bool) {
        let d = self.ca.diameter();
        let before: Vec<usize> = self.rows.iter().map(Vec::len).collect();
        self.rows[0].push(a);
        let mut bad = self.check(0);
        for j in 1..self.rows.len() {
            let len = self.rows[j].len();
            if self.rows[j - 1].len() < len + d {
                break;
            }
            let c = self.ca.eval(&self.rows[j - 1][len..len + d]);
            self.rows[j].push(c);
            bad |= self.check(j);
        }
        (before, bad)
    }

    fn check(&self, j: usize) -> bool {
        self.rows[j].len() == self.target[j] + 1 && self.rows[j][self.target[j]] != self.column[j]
    }

    fn pop(&mut self, before: &[usize]) {
        for (r, &l) in self.rows.iter_mut().zip(before) {
            r.truncate(l);
        }
    }

    fn dfs(&mut self, set: &[usize]) -> Result<bool> {
        if self.rows[0].len() == self.n {
            return Ok(true);
        }
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::EnumerationCap { work: self.nodes as u128, cap: self.cap as u128 });
        }
        for a in 0..self.ca.alphabet().len() as Letter {
            let next = SoficGraph::successor(&self.out_adj, set, a);
            if next.is_empty() {
                continue;
            }
            let (before, bad) = self.push(a);
            let found = !bad && self.dfs(&next)?;
            if found {
                return Ok(true);
            }
            self.pop(&before);
        }
        Ok(false)
    }
}

/// A window `x[lo .. lo + |window|)` of the domain whose cell-0 column
/// starts with `column`, or `None` when no configuration realizes it.
pub fn find_column<T: Traceable + ?Sized>(f: &T, column: &[Letter], cap: u64) -> Result<Option<(i64, Word)>> {
    let k = column.len();
    if k == 0 {
        return Err(Error::Usage("empty column".into()));
    }
    let ca = f.automaton();
    let (lo, n) = cone(ca, k, 1);
    let m = ca.anchor() as i64;
    let target = (0..k as i64).map(|j| (-(lo + j * m)) as usize).collect();
    let g = f.domain_graph();
    let mut s = Search { ca, out_adj: g.out_adjacency(), column, target, rows: vec![Vec::new(); k], n, nodes: 0, cap };
    let start: Vec<usize> = (0..g.vertex_count()).collect();
    Ok(s.dfs(&start)?.then(|| (lo, s.rows.swap_remove(0))))
}

pub fn trace_contains<T: Traceable + ?Sized>(f: &T, column: &[Letter]) -> Result<bool> {
    find_column(f, column, DEFAULT_NODE_CAP).map(|w| w.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{all_words, Alphabet};
    use crate::ca::{CellularAutomaton, PartialCA};
    use crate::subshift::SubshiftHandle;
    use crate::trace::{column_from_window, trace_naive};

    #[test]
    fn agrees_with_naive() {
        let b = Alphabet::binary();
        let q3 = Alphabet::numeric(3);
        let cas = vec![
            CellularAutomaton::min_rule(b.clone()),
            CellularAutomaton::shift(b.clone()),
            CellularAutomaton::from_fn(b.clone(), 1, 3, |w| w[0] ^ w[2]).unwrap(),
            CellularAutomaton::from_fn(b.clone(), 1, 3, |w| u16::from(w[0] + w[1] + w[2] >= 2)).unwrap(),
            CellularAutomaton::from_fn(q3, 1, 2, |w| (w[0] * w[1] + 1) % 3).unwrap(),
        ];
        for ca in cas {
            let q = ca.alphabet().len();
            for k in 1..=5 {
                let tau = trace_naive(&ca, k, 1).unwrap();
                for z in all_words(q, k) {
                    let found = find_column(&ca, &z, DEFAULT_NODE_CAP).unwrap();
                    assert_eq!(found.is_some(), tau.contains(&z), "{z:?}");
                    if let Some((lo, w)) = found {
                        assert_eq!(column_from_window(&ca, &w, lo, k, 1), z);
                    }
                }
            }
        }
    }

    #[test]
    fn respects_the_domain() {
        let b = Alphabet::binary();
        let p = PartialCA::new(CellularAutomaton::shift(b), SubshiftHandle::golden_mean()).unwrap();
        assert!(trace_contains(&p, &[1, 0, 1, 0]).unwrap());
        assert!(!trace_contains(&p, &[0, 1, 1]).unwrap());
        let tiny = find_column(&CellularAutomaton::min_rule(Alphabet::binary()), &[1; 40], 3);
        assert!(matches!(tiny, Err(Error::EnumerationCap { .. })));
    }
}
