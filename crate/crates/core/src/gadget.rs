//! Spreading-controlled products and the bounded mortality and nilpotency
//! procedures built around them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::alphabet::{lyndon_words, word_from_index, Alphabet, Letter, Word};
use crate::ca::{CellularAutomaton, PeriodicConfiguration};
use crate::error::{Error, Result};
use crate::par;
use crate::trace::trace_auto;

/// Ingredients of the controlled product `H` on `A × B`, all expressed on
/// the full alphabets `A = A1 ⊔ A2` and `B`.
#[derive(Clone, Debug)]
pub struct ControlledProductSpec {
    pub a: Arc<Alphabet>,
    pub in_a1: Vec<bool>,
    /// `F1`, applied after `φ`.
    pub f1: CellularAutomaton,
    /// `F2`, applied to windows inside `A2`.
    pub f2: CellularAutomaton,
    /// `φ: A → A1`, the identity on `A1`.
    pub phi: Vec<Letter>,
    pub n: CellularAutomaton,
    /// `N2`, applied to windows inside `B2 ∖ {0}`.
    pub n2: CellularAutomaton,
    pub in_b2: Vec<bool>,
    pub zero: Letter,
}

fn disjoint_union(a1: &Alphabet, a2: &Alphabet) -> Result<Arc<Alphabet>> {
    if a1.names().iter().any(|n| a2.names().contains(n)) {
        return Err(Error::AlphabetMismatch("the two alphabets of the product overlap".into()));
    }
    Ok(Arc::new(Alphabet::new(a1.names().iter().chain(a2.names()).cloned())?))
}

impl ControlledProductSpec {
    /// Builds the product description from `F1` on `A1`, `F2` on `A2`, `N` on `B` and `N2`
    /// on `B2 ⊆ B` (by letter names) whose letter 0 must be spreading. `φ`
    /// defaults to the least letter of `A1` on `A2`.
    pub fn from_parts(
        f1: &CellularAutomaton,
        f2: &CellularAutomaton,
        n: &CellularAutomaton,
        n2: &CellularAutomaton,
        phi: Option<Vec<Letter>>,
    ) -> Result<Self> {
        let (a1, a2) = (f1.alphabet().clone(), f2.alphabet().clone());
        let a = disjoint_union(&a1, &a2)?;
        let q1 = a1.len() as Letter;
        let in_a1: Vec<bool> = a.letters().map(|c| c < q1).collect();
        let phi = match phi {
            Some(p) => {
                if p.len() != a2.len() || p.iter().any(|&c| c >= q1) {
                    return Err(Error::Usage("projection must send every A2 letter into A1".into()));
                }
                (0..q1).chain(p).collect()
            }
            None => (0..q1).chain(std::iter::repeat_n(0, a2.len())).collect(),
        };
        let b = n.alphabet().clone();
        let b2 = n2.alphabet().clone();
        let embed: Vec<Letter> = b2
            .names()
            .iter()
            .map(|nm| b.index_of(nm).ok_or_else(|| Error::AlphabetMismatch(format!("letter {nm} of B2 is not in B"))))
            .collect::<Result<_>>()?;
        if !n2.is_spreading_state(0) {
            return Err(Error::Precondition("the first letter is not spreading for N2".into()));
        }
        let mut back = vec![0 as Letter; b.len()];
        let mut in_b2 = vec![false; b.len()];
        for (i, &e) in embed.iter().enumerate() {
            back[e as usize] = i as Letter;
            in_b2[e as usize] = true;
        }
        let f1 = {
            let f1 = f1.clone();
            CellularAutomaton::from_fn(a.clone(), f1.anchor(), f1.diameter(), move |w| {
                let w: Word = w.iter().map(|&c| c.min(q1 - 1)).collect();
                f1.eval(&w)
            })?
        };
        let f2 = {
            let f2 = f2.clone();
            CellularAutomaton::from_fn(a.clone(), f2.anchor(), f2.diameter(), move |w| {
                let w: Word = w.iter().map(|&c| c.saturating_sub(q1)).collect();
                f2.eval(&w) + q1
            })?
        };
        let n2b = {
            let n2 = n2.clone();
            CellularAutomaton::from_fn(b.clone(), n2.anchor(), n2.diameter(), move |w| {
                let w: Word = w.iter().map(|&c| back[c as usize]).collect();
                embed[n2.eval(&w) as usize]
            })?
        };
        let zero = b.index_of(&b2.names()[0]).expect("embedded");
        Ok(Self { a, in_a1, f1, f2, phi, n: n.clone(), n2: n2b, in_b2, zero })
    }

    /// 1 for `(F2, N2)`, 2 for `(F1 ∘ φ, N)`, on windows of `(a, b)` pairs.
    pub fn branch(&self, a: &[Letter], b: &[Letter]) -> u8 {
        let controlled =
            a.iter().all(|&c| !self.in_a1[c as usize]) && b.iter().all(|&c| self.in_b2[c as usize] && c != self.zero);
        if controlled {
            1
        } else {
            2
        }
    }
}

/// Letters `(a, b)` of `A × B`: stacked when both share a base, otherwise
/// plain names `a.b`.
pub fn pair_alphabet(a: &Alphabet, b: &Alphabet) -> Result<Arc<Alphabet>> {
    if a.base().names() == b.base().names() {
        return Ok(Arc::new(Alphabet::product(a, b)?));
    }
    let names = a.names().iter().flat_map(|x| b.names().iter().map(move |y| format!("{x}.{y}")));
    Ok(Arc::new(Alphabet::new(names)?))
}

/// `H`: `(f2(a), n2(b))` on windows in `A2 × (B2 ∖ {0})`, `(f1(φ a), n(b))`
/// elsewhere.
pub fn controlled_product(spec: &ControlledProductSpec) -> Result<CellularAutomaton> {
    let parts = [&spec.f1, &spec.f2, &spec.n, &spec.n2];
    let anchor = parts.iter().map(|c| c.anchor()).max().expect("four parts");
    let right = parts.iter().map(|c| c.diameter() as i32 - c.anchor()).max().expect("four parts");
    let d = (anchor + right) as usize;
    let f1 = spec.f1.extend_to(anchor, d)?;
    let f2 = spec.f2.extend_to(anchor, d)?;
    let n = spec.n.extend_to(anchor, d)?;
    let n2 = spec.n2.extend_to(anchor, d)?;
    let alphabet = pair_alphabet(&spec.a, spec.n.alphabet())?;
    let qb = spec.n.alphabet().len() as Letter;
    let spec = spec.clone();
    CellularAutomaton::from_fn(alphabet, anchor, d, move |w| {
        let a: Word = w.iter().map(|&c| c / qb).collect();
        let b: Word = w.iter().map(|&c| c % qb).collect();
        if spec.branch(&a, &b) == 1 {
            f2.eval(&a) * qb + n2.eval(&b)
        } else {
            let pa: Word = a.iter().map(|&c| spec.phi[c as usize]).collect();
            f1.eval(&pa) * qb + n.eval(&b)
        }
    })
}

/// The four-layer gadget over `{0,1}^3 × {0,1}`: `A1 = {(a, a, g)}`,
/// `F1 = N × N × G`, `F2 = σ × σ × G`, `φ(a, a', g) = (a, a, g)`. `N` is
/// the radius-0 map `ξ` (const-0 when absent).
pub fn four_layer_gadget(
    g: &CellularAutomaton,
    xi: Option<&[Letter]>,
    n2: &CellularAutomaton,
) -> Result<(CellularAutomaton, ControlledProductSpec)> {
    let bin = Alphabet::binary();
    for (name, ca) in [("G", g), ("N2", n2)] {
        if ca.alphabet().names() != bin.names() {
            return Err(Error::AlphabetMismatch(format!("{name} must act on {{0,1}}")));
        }
    }
    if !g.is_onesided() {
        return Err(Error::NotOnesided(g.anchor()));
    }
    if !n2.is_spreading_state(0) {
        return Err(Error::Precondition("0 is not spreading for N2".into()));
    }
    let xi: Vec<Letter> = xi.map_or(vec![0, 0], <[Letter]>::to_vec);
    let n = CellularAutomaton::radius0_from_map(bin.clone(), &xi)?;
    if xi != [0, 0] {
        let t = trace_auto(g, crate::compile::VALIDATION_DEPTH, 1)?;
        for a in 0..2 {
            let orbit: Word =
                std::iter::successors(Some(a), |&c| Some(xi[c as usize])).take(crate::compile::VALIDATION_DEPTH).collect();
            if !t.contains(&orbit) {
                return Err(Error::Precondition("the letter map's orbits are not columns of G".into()));
            }
        }
    }
    let sigma = CellularAutomaton::shift(bin.clone());
    let f1 = CellularAutomaton::product(&CellularAutomaton::product(&n, &n)?, g)?;
    let f2 = CellularAutomaton::product(&CellularAutomaton::product(&sigma, &sigma)?, g)?;
    let a = f1.alphabet().clone();
    let in_a1: Vec<bool> = a.letters().map(|c| a.track(c, 0) == a.track(c, 1)).collect();
    let phi: Vec<Letter> = a
        .letters()
        .map(|c| {
            let t = a.decode(c);
            a.encode(&[t[0], t[0], t[2]]).expect("full cube")
        })
        .collect();
    let spec = ControlledProductSpec {
        a: a.clone(),
        in_a1,
        f1,
        f2,
        phi,
        n: n.clone(),
        n2: n2.clone(),
        in_b2: vec![true, true],
        zero: 0,
    };
    Ok((controlled_product(&spec)?, spec))
}

/// Whether `F([U]_1) ⊆ [U]_0 ∩ [U]_1` or `F([U]_0) ⊆ [U]_0 ∩ [U]_1` for
/// `U ⊆ A^k`, checked on every window the images depend on.
pub fn is_spreading_set(f: &CellularAutomaton, u: &[Word]) -> Result<bool> {
    let k = u.first().map(Vec::len).ok_or(Error::EmptyLanguage)?;
    if u.iter().any(|w| w.len() != k) {
        return Err(Error::MixedLengths);
    }
    let set: std::collections::HashSet<&[Letter]> = u.iter().map(|w| w.as_slice()).collect();
    let m = f.anchor() as i64;
    let d = f.diameter() as i64;
    // images of cells 0 .. k+1 need x[-m .. k+1-m+d-1)
    let lo = -m;
    let len = (k as i64 + 1 + d - 1) as usize;
    let q = f.alphabet().len();
    let total = (q as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if total > 1 << 26 {
        return Err(Error::EnumerationCap { work: total, cap: 1 << 26 });
    }
    let violates = |at: i64| {
        let at = (at - lo) as usize;
        par::any_range(total as usize, |i| {
            let x = word_from_index(i as u64, q, len);
            if !set.contains(&x[at..at + k]) {
                return false;
            }
            let img = f.letters_after(&x, 1);
            !(set.contains(&img[0..k]) && set.contains(&img[1..k + 1]))
        })
    };
    Ok(!violates(1) || !violates(0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MortalityVerdict {
    /// Every tested configuration hits `A′` within `J` steps at every cell.
    MortalWitnessedOnTested,
    /// A periodic orbit avoiding `A′` forever at cell `cell`.
    NotMortal {
        period: Word,
        cell: usize,
    },
    Inconclusive,
}

impl fmt::Display for MortalityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MortalWitnessedOnTested => f.write_str("MORTAL-WITNESSED-ON-TESTED"),
            Self::NotMortal { period, cell } => {
                let p: String = period.iter().map(|a| a.to_string()).collect();
                write!(f, "NOT-MORTAL ({p})^inf cell {cell}")
            }
            Self::Inconclusive => f.write_str("INCONCLUSIVE"),
        }
    }
}

/// Step bound when looking for the cycle of a periodic orbit.
const ORBIT_CAP: usize = 1 << 16;

/// Orbit of a periodic configuration of fixed period length, up to the
/// first repeated configuration: `(rows, start of the cycle)`.
fn periodic_orbit(f: &CellularAutomaton, period: &[Letter]) -> Result<Option<(Vec<Word>, usize)>> {
    let p = period.len() as i64;
    let mut seen: HashMap<Word, usize> = HashMap::new();
    let mut rows = Vec::new();
    let mut cur = PeriodicConfiguration::new(period.to_vec(), 0)?;
    for t in 0..ORBIT_CAP {
        let row = cur.slice(0, p);
        if let Some(&s) = seen.get(&row) {
            return Ok(Some((rows, s)));
        }
        seen.insert(row.clone(), t);
        rows.push(row);
        cur = f.step(&cur)?;
    }
    Ok(None)
}

/// Bounded `A′`-mortality over all periodic configurations of period `<= p`.
pub fn mortality_bounded(f: &CellularAutomaton, targets: &[Letter], j: usize, p: usize) -> Result<MortalityVerdict> {
    let q = f.alphabet().len();
    let hit = |a: Letter| targets.contains(&a);
    let mut inconclusive = false;
    for period in lyndon_words(q, p) {
        let Some((rows, start)) = periodic_orbit(f, &period)? else {
            inconclusive = true;
            continue;
        };
        for cell in 0..period.len() {
            match rows.iter().position(|r| hit(r[cell])) {
                Some(t) if t <= j => {}
                Some(_) => inconclusive = true,
                None => {
                    let _ = start;
                    return Ok(MortalityVerdict::NotMortal { period, cell });
                }
            }
        }
    }
    Ok(if inconclusive { MortalityVerdict::Inconclusive } else { MortalityVerdict::MortalWitnessedOnTested })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum NilpotencyVerdict {
    Yes {
        j: usize,
    },
    /// A column with a nonzero letter at row `J`, and the first periodic
    /// configuration whose orbit never reaches `0^∞` when one is found.
    No {
        column: Word,
        periodic: Option<Word>,
    },
    ExceedsCap {
        reason: String,
    },
}

impl fmt::Display for NilpotencyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |w: &Word| w.iter().map(|a| a.to_string()).collect::<String>();
        match self {
            Self::Yes { j } => write!(f, "YES J={j}"),
            Self::No { column, periodic } => {
                write!(f, "NO column={}", s(column))?;
                if let Some(p) = periodic {
                    write!(f, " orbit=({})^inf", s(p))?;
                }
                Ok(())
            }
            Self::ExceedsCap { reason } => write!(f, "EXCEEDS-CAP {reason}"),
        }
    }
}

/// Whether `F^J(A^Z) = {0^∞}`, decided on the depth-`(J+1)` trace.
pub fn nilpotency_bounded(f: &CellularAutomaton, j: usize) -> Result<NilpotencyVerdict> {
    if j == 0 {
        return Err(Error::Usage("J must be at least 1".into()));
    }
    let t = match trace_auto(f, j + 1, 1) {
        Ok(t) => t,
        Err(e @ (Error::EnumerationCap { .. } | Error::MemoryGuard(_))) => {
            return Ok(NilpotencyVerdict::ExceedsCap { reason: e.to_string() })
        }
        Err(e) => return Err(e),
    };
    let Some(column) = t.blocks().iter().find(|b| b[j] != 0).cloned() else {
        return Ok(NilpotencyVerdict::Yes { j });
    };
    let q = f.alphabet().len();
    let mut periodic = None;
    for period in lyndon_words(q, 4) {
        if let Some((rows, start)) = periodic_orbit(f, &period)? {
            if rows[start..].iter().any(|r| r.iter().any(|&a| a != 0)) {
                periodic = Some(period);
                break;
            }
        }
    }
    Ok(NilpotencyVerdict::No { column, periodic })
}
