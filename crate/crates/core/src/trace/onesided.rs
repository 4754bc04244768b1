//! Exact engine for onesided automata on the full shift. A block of
//! columns over cells `i .. i+w` is its top row together with the block of
//! the `d - 1` cells to its right one row shorter, and the right part of a
//! configuration is independent of the top row.

use std::collections::BTreeSet;

use super::ColumnLanguage;
use crate::alphabet::{word_from_index, Letter, Word};
use crate::ca::CellularAutomaton;
use crate::error::{Error, Result};

/// Default bound on the number of blocks kept per depth.
pub const DEFAULT_BLOCK_GUARD: usize = 1 << 22;

pub fn trace_onesided(ca: &CellularAutomaton, k: usize, w: usize) -> Result<ColumnLanguage> {
    trace_onesided_with_guard(ca, k, w, DEFAULT_BLOCK_GUARD)
}

pub fn trace_onesided_with_guard(ca: &CellularAutomaton, k: usize, w: usize, guard: usize) -> Result<ColumnLanguage> {
    if k == 0 || w == 0 {
        return Err(Error::Usage("depth and width must be positive".into()));
    }
    if !ca.is_onesided() {
        return Err(Error::NotOnesided(ca.anchor()));
    }
    let f = ca;
    let r = reach(f);
    let q = f.alphabet().len();
    let tops = |width: usize| -> Result<Vec<Word>> {
        let n = (q as u128).checked_pow(width as u32).filter(|&n| n <= guard as u128);
        let n = n.ok_or_else(|| Error::MemoryGuard(format!("{q}^{width} top rows")))?;
        Ok((0..n as u64).map(|i| word_from_index(i, q, width)).collect())
    };
    // right neighbours: blocks of width r, depth t
    let mut right: BTreeSet<Word> = BTreeSet::new();
    if r > 0 && k > 1 {
        let top_r = tops(r)?;
        right = top_r.iter().cloned().collect();
        for t in 1..k - 1 {
            right = grow(f, &top_r, &right, t, r, guard)?;
        }
    }
    let blocks = if k == 1 {
        tops(w)?.into_iter().collect()
    } else if r == 0 {
        tops(w)?.into_iter().map(|u| stack(f, &u, &[], k, w, 0)).collect()
    } else {
        grow(f, &tops(w)?, &right, k - 1, w, guard)?
    };
    Ok(ColumnLanguage::new(ca.alphabet().clone(), k, w, blocks))
}

/// Cells to the right of a cell that its image reads.
fn reach(f: &CellularAutomaton) -> usize {
    (f.diameter() as i32 - 1 - f.anchor()) as usize
}

/// Depth `t + 1` blocks of width `w` from depth `t` right neighbours.
fn grow(
    f: &CellularAutomaton,
    tops: &[Word],
    right: &BTreeSet<Word>,
    t: usize,
    w: usize,
    guard: usize,
) -> Result<BTreeSet<Word>> {
    let r = reach(f);
    let mut out = BTreeSet::new();
    for u in tops {
        for n in right {
            out.insert(stack(f, u, n, t + 1, w, r));
            if out.len() > guard {
                return Err(Error::MemoryGuard(format!("onesided engine exceeded {guard} blocks")));
            }
        }
    }
    Ok(out)
}

/// The `k`-row block over top row `u`, reading the right neighbour `n`
/// (width `r`, at least `k - 1` rows).
fn stack(f: &CellularAutomaton, u: &[Letter], n: &[Letter], k: usize, w: usize, r: usize) -> Word {
    let d = f.diameter();
    let off = (-f.anchor()) as usize;
    let mut block = Vec::with_capacity(k * w);
    block.extend_from_slice(u);
    let mut row: Word = Vec::with_capacity(w + r);
    for j in 0..k - 1 {
        row.clear();
        row.extend_from_slice(&block[j * w..(j + 1) * w]);
        row.extend_from_slice(&n[j * r..(j + 1) * r]);
        for c in 0..w {
            let x = f.eval(&row[c + off..c + off + d]);
            block.push(x);
        }
    }
    block
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::trace::trace_naive;

    #[test]
    fn agrees_with_naive() {
        let b = Alphabet::binary();
        let q3 = Alphabet::numeric(3);
        let cas = [
            CellularAutomaton::shift(b.clone()),
            CellularAutomaton::min_rule(b.clone()),
            CellularAutomaton::identity(b.clone()),
            CellularAutomaton::from_fn(b.clone(), -1, 2, |w| w[0] ^ w[1]).unwrap(),
            CellularAutomaton::from_fn(q3.clone(), 0, 3, |w| (w[0] + w[2]) % 3).unwrap(),
        ];
        for ca in &cas {
            for k in 1..=5 {
                for w in 1..=2 {
                    assert_eq!(trace_onesided(ca, k, w).unwrap(), trace_naive(ca, k, w).unwrap(), "k={k} w={w}");
                }
            }
        }
        let two = CellularAutomaton::from_fn(b, 1, 3, |w| w[0]).unwrap();
        assert!(trace_onesided(&two, 2, 1).is_err());
    }
}
