//! Trace engine built on a deterministic presentation of the joint shift
//! `{(x, F x, …, F^{k-1} x)}`.
//!
//! Track `j` is skewed: the joint letter read at time `t` carries
//! `F^j(x)_{t - j s}` with `s = d - 1 - m`, so each new track is a
//! function of the previous track's last `d` letters. Every level is built
//! on the fly from the trimmed, minimized previous level.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{ColumnLanguage, Traceable};
use crate::alphabet::{Letter, Word};
use crate::error::{Error, Result};
use crate::subshift::DetGraph;

/// Default bound on the number of product states per level.
pub const DEFAULT_STATE_GUARD: usize = 6_000_000;

pub fn trace_transducer<T: Traceable + ?Sized>(f: &T, k: usize, w: usize) -> Result<ColumnLanguage> {
    trace_transducer_with_guard(f, k, w, DEFAULT_STATE_GUARD)
}

pub fn trace_transducer_with_guard<T: Traceable + ?Sized>(f: &T, k: usize, w: usize, guard: usize) -> Result<ColumnLanguage> {
    let level = levels(f, k, w, guard)?;
    let ca = f.automaton();
    let id: Vec<Letter> = ca.alphabet().letters().collect();
    let blocks = extract(&level, ca, k, w, &id, guard)?;
    Ok(ColumnLanguage::new(ca.alphabet().clone(), k, w, blocks))
}

/// Union of the depth-`k` width-1 traces read through each letter map of
/// `maps`; the joint levels are built once.
pub fn trace_transducer_mapped<T: Traceable + ?Sized>(f: &T, k: usize, maps: &[Vec<Letter>]) -> Result<BTreeSet<Word>> {
    let level = levels(f, k, 1, DEFAULT_STATE_GUARD)?;
    let mut out = BTreeSet::new();
    for map in maps {
        out.extend(extract(&level, f.automaton(), k, 1, map, DEFAULT_STATE_GUARD)?);
    }
    Ok(out)
}

fn levels<T: Traceable + ?Sized>(f: &T, k: usize, w: usize, guard: usize) -> Result<DetGraph> {
    if k == 0 || w == 0 {
        return Err(Error::Usage("depth and width must be positive".into()));
    }
    let ca = f.automaton();
    let q = ca.alphabet().len() as u64;
    if (q as f64).powi(k as i32) >= u64::MAX as f64 {
        return Err(Error::MemoryGuard(format!("joint letters of {k} tracks over {q} letters overflow")));
    }
    let mut level = f.domain_graph().deterministic();
    for j in 0..k.saturating_sub(1) {
        level = next_level(&level, ca, q, j, guard)?;
    }
    Ok(level)
}

/// Blocks read off the joint graph, each letter sent through `map`.
fn extract(
    level: &DetGraph,
    ca: &crate::ca::CellularAutomaton,
    k: usize,
    w: usize,
    map: &[Letter],
    guard: usize,
) -> Result<BTreeSet<Word>> {
    let q = ca.alphabet().len() as u64;
    let m = ca.anchor() as i64;
    let s = ca.diameter() as i64 - 1 - m;
    let span = k as i64 - 1;
    let t0 = (span * s).min(0);
    let t1 = (span * s).max(0) + w as i64 - 1;
    let len = (t1 - t0 + 1) as usize;
    // which block entries are read at each time step
    let mut reads: Vec<Vec<(usize, usize)>> = vec![Vec::new(); len];
    for j in 0..k {
        for c in 0..w {
            let t = j as i64 * s + c as i64 - t0;
            reads[t as usize].push((j * w + c, j));
        }
    }
    let powers: Vec<u64> = (0..k).map(|j| q.pow(j as u32)).collect();
    let unset = Letter::MAX;
    let mut frontier: HashSet<(usize, Word)> = (0..level.len()).map(|st| (st, vec![unset; k * w])).collect();
    for step in reads.iter() {
        let mut next = HashSet::with_capacity(frontier.len());
        for (st, block) in &frontier {
            for &(code, t) in &level.trans[*st] {
                let mut b = block.clone();
                for &(slot, track) in step {
                    b[slot] = map[((code / powers[track]) % q) as usize];
                }
                next.insert((t, b));
            }
        }
        if next.len() > guard {
            return Err(Error::MemoryGuard(format!("column extraction exceeded {guard} states")));
        }
        frontier = next;
    }
    Ok(frontier.into_iter().map(|(_, b)| b).collect())
}

/// Adds track `j + 1` computed from track `j`.
fn next_level(prev: &DetGraph, ca: &crate::ca::CellularAutomaton, q: u64, j: usize, guard: usize) -> Result<DetGraph> {
    let d = ca.diameter();
    let pj = q.pow(j as u32);
    let pn = q.pow(j as u32 + 1);
    let track = |code: u64| ((code / pj) % q) as Letter;
    if d == 1 {
        let trans = prev
            .trans
            .iter()
            .map(|edges| edges.iter().map(|&(c, t)| (c + pn * ca.eval(&[track(c)]) as u64, t)).collect())
            .collect();
        return Ok(DetGraph { trans });
    }
    // states reachable after d-1 steps, with the track-j letters read
    let mut layer: HashSet<(usize, Word)> = (0..prev.len()).map(|s| (s, Vec::new())).collect();
    for _ in 0..d - 1 {
        let mut next = HashSet::with_capacity(layer.len());
        for (s, buf) in &layer {
            for &(c, t) in &prev.trans[*s] {
                let mut b = buf.clone();
                b.push(track(c));
                next.insert((t, b));
            }
        }
        if next.len() > guard {
            return Err(Error::MemoryGuard(format!("level {} exceeded {guard} states", j + 1)));
        }
        layer = next;
    }
    let mut ids: HashMap<(usize, Word), usize> = HashMap::with_capacity(layer.len() * 2);
    let mut keys: Vec<(usize, Word)> = Vec::with_capacity(layer.len());
    let mut initial: Vec<(usize, Word)> = layer.into_iter().collect();
    initial.sort();
    for key in initial {
        ids.insert(key.clone(), keys.len());
        keys.push(key);
    }
    let mut trans: Vec<Vec<(u64, usize)>> = Vec::with_capacity(keys.len());
    let mut window: Word = Vec::with_capacity(d);
    let mut i = 0;
    while i < keys.len() {
        let (s, buf) = keys[i].clone();
        let mut out = Vec::with_capacity(prev.trans[s].len());
        for &(c, t) in &prev.trans[s] {
            window.clear();
            window.extend_from_slice(&buf);
            window.push(track(c));
            let letter = ca.eval(&window);
            let key = (t, window[1..].to_vec());
            let id = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    let id = keys.len();
                    ids.insert(key.clone(), id);
                    keys.push(key);
                    id
                }
            };
            out.push((c + pn * letter as u64, id));
        }
        trans.push(out);
        if keys.len() > guard {
            return Err(Error::MemoryGuard(format!("level {} exceeded {guard} states", j + 1)));
        }
        i += 1;
    }
    drop(ids);
    let graph = DetGraph { trans };
    Ok(graph.trim_two_sided().minimize().trim_two_sided())
}
