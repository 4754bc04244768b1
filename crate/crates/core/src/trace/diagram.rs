//! Space-time diagrams on periodic configurations.

use crate::alphabet::Word;
use crate::ca::{CellularAutomaton, PeriodicConfiguration};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceTimeDiagram {
    pub initial: PeriodicConfiguration,
    /// First cell of the viewport.
    pub left: i64,
    /// Row `j` is `F^j(x)` on the viewport.
    pub rows: Vec<Word>,
}

/// `steps + 1` rows of `F^j(x)[lo .. hi)`.
pub fn diagram(ca: &CellularAutomaton, x: &PeriodicConfiguration, steps: usize, lo: i64, hi: i64) -> Result<SpaceTimeDiagram> {
    if hi <= lo {
        return Err(Error::Usage("empty viewport".into()));
    }
    let mut cur = x.clone();
    let mut rows = vec![cur.slice(lo, hi)];
    for _ in 0..steps {
        cur = ca.step(&cur)?;
        rows.push(cur.slice(lo, hi));
    }
    Ok(SpaceTimeDiagram { initial: x.clone(), left: lo, rows })
}

impl SpaceTimeDiagram {
    pub fn to_text(&self, ca: &CellularAutomaton) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&ca.alphabet().format_word(r));
            out.push('\n');
        }
        out
    }

    /// Plain (ASCII) PGM; letter `a` of `q` maps to gray `255 - 255 a / (q-1)`.
    pub fn to_pgm(&self, q: usize) -> String {
        let width = self.rows.first().map_or(0, Vec::len);
        let mut out = format!("P2\n{} {}\n255\n", width, self.rows.len());
        let scale = (q.max(2) - 1) as u32;
        for r in &self.rows {
            let line: Vec<String> = r.iter().map(|&a| (255 - 255 * a as u32 / scale).to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    #[test]
    fn diagram_examples() {
        let b = Alphabet::binary();
        let x = PeriodicConfiguration::new(vec![0, 1], 0).unwrap();
        let s = CellularAutomaton::shift(b.clone());
        let d = diagram(&s, &x, 3, 0, 4).unwrap();
        assert_eq!(d.rows, vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 1, 0]]);
        let and = CellularAutomaton::min_rule(b.clone());
        assert_eq!(diagram(&and, &x, 2, 0, 4).unwrap().rows[1], vec![0; 4]);
        let z = CellularAutomaton::constant(b, 0, 2).unwrap();
        assert_eq!(diagram(&z, &x, 1, -2, 3).unwrap().rows[1], vec![0; 5]);
        assert!(d.to_pgm(2).starts_with("P2\n4 4\n255\n"));
        assert_eq!(d.to_text(&s).lines().next(), Some("0101"));
    }
}
