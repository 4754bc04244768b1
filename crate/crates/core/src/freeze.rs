//! Freezing word sets and borders `(Υ, δ_Υ)`.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use crate::alphabet::{is_primitive, is_uniform, reverse, rotate, Alphabet, Letter, Word};
use crate::ca::CellularAutomaton;
use crate::error::{Error, Result};
use crate::par;

/// Digits for small alphabets, comma-separated indices otherwise.
pub fn plain_word(w: &[Letter]) -> String {
    if w.iter().all(|&a| a < 10) {
        w.iter().map(|a| a.to_string()).collect()
    } else {
        w.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Least word of length `h + i`, for the least overlap `i ∈ [1, p]`, that
/// both starts and ends with a word of `W`; `None` when `W` is
/// `p`-freezing.
pub fn freezing_counterexample(words: &[Word], p: usize) -> Result<Option<Word>> {
    let Some(h) = words.first().map(Vec::len) else {
        return Ok(None);
    };
    if words.iter().any(|w| w.len() != h) {
        return Err(Error::MixedLengths);
    }
    if p >= h && h > 0 {
        return Err(Error::Usage(format!("freezing parameter {p} must be below the word length {h}")));
    }
    let found = par::map_range(p, |j| {
        let i = j + 1;
        // least tail w2[h-i..] among words w2 with a given prefix w2[..h-i]
        let mut tails: BTreeMap<&[Letter], &[Letter]> = BTreeMap::new();
        for w in words {
            let e = tails.entry(&w[..h - i]).or_insert(&w[h - i..]);
            if w[h - i..] < **e {
                *e = &w[h - i..];
            }
        }
        words.iter().filter_map(|w1| tails.get(&w1[i..]).map(|t| w1.iter().chain(t.iter()).copied().collect::<Word>())).min()
    });
    Ok(found.into_iter().flatten().next())
}

pub fn is_freezing(words: &[Word], p: usize) -> Result<bool> {
    freezing_counterexample(words, p).map(|c| c.is_none())
}

pub fn require_freezing(words: &[Word], p: usize) -> Result<()> {
    match freezing_counterexample(words, p)? {
        None => Ok(()),
        Some(c) => Err(Error::NotFreezing { p, counterexample: plain_word(&c) }),
    }
}

/// A border: words `Υ ⊆ A^l` with an endomap `δ` (given on indices), meant
/// to be juxtaposed to blocks of length `block_length`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Border {
    alphabet: Arc<Alphabet>,
    words: Vec<Word>,
    delta: Vec<usize>,
    block_length: usize,
}

impl Border {
    pub fn new(alphabet: Arc<Alphabet>, words: Vec<Word>, delta: Vec<usize>, block_length: usize) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyBorder("no border words".into()));
        }
        let l = words[0].len();
        if l == 0 || words.iter().any(|w| w.len() != l) {
            return Err(Error::MixedLengths);
        }
        if delta.len() != words.len() || delta.iter().any(|&d| d >= words.len()) {
            return Err(Error::Usage("border map must be total on the border words".into()));
        }
        let distinct: HashSet<&Word> = words.iter().collect();
        if distinct.len() != words.len() {
            return Err(Error::Usage("duplicate border word".into()));
        }
        let border = Self { alphabet, words, delta, block_length };
        require_freezing(&border.words, border.required_freezing())?;
        Ok(border)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn delta(&self) -> &[usize] {
        &self.delta
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    /// `l`.
    pub fn word_length(&self) -> usize {
        self.words[0].len()
    }

    /// `⌊(k + l) / 2⌋`.
    pub fn required_freezing(&self) -> usize {
        (self.block_length + self.word_length()) / 2
    }

    /// `Υ` as a stacked alphabet of height `l`, in the border's order.
    pub fn word_alphabet(&self) -> Result<Arc<Alphabet>> {
        Ok(Arc::new(Alphabet::stacked(&self.alphabet, self.words.clone())?))
    }

    /// `Δ_Υ`: the radius-0 CA applying `δ` on `Υ`.
    pub fn delta_ca(&self) -> Result<CellularAutomaton> {
        let map: Vec<Letter> = self.delta.iter().map(|&d| d as Letter).collect();
        CellularAutomaton::radius0_from_map(self.word_alphabet()?, &map)
    }
}

/// `Υ = {one · zero^k}` with `δ = id`.
pub fn static_border(alphabet: Arc<Alphabet>, zero: Letter, one: Letter, k: usize) -> Result<Border> {
    if zero == one {
        return Err(Error::Usage("static border letters must differ".into()));
    }
    let mut w = vec![one];
    w.extend(std::iter::repeat_n(zero, k));
    Border::new(alphabet, vec![w], vec![0], k)
}

/// `Υ^k_u = { u_i^{k+3|u|} rev(γ^i u) γ^i u u_i^{|u|} }`, `δ` rotating the
/// index.
pub fn dynamic_border(alphabet: Arc<Alphabet>, u: &[Letter], k: usize) -> Result<Border> {
    let n = u.len();
    if n < 2 || !is_primitive(u) || is_uniform(u) {
        return Err(Error::Usage("dynamic border needs a primitive non-uniform word of length >= 2".into()));
    }
    let words = (0..n)
        .map(|i| {
            let g = rotate(u, i);
            let mut w = vec![u[i]; k + 3 * n];
            w.extend(reverse(&g));
            w.extend(&g);
            w.extend(std::iter::repeat_n(u[i], n));
            w
        })
        .collect();
    let delta = (0..n).map(|i| (i + 1) % n).collect();
    Border::new(alphabet, words, delta, k)
}

/// `∀j, ξ^j(a) ≠ ξ^j(b)`, decided within `|A|²` steps.
pub fn separated_forever(xi: &[Letter], a: Letter, b: Letter) -> bool {
    let (mut x, mut y) = (a, b);
    for _ in 0..=xi.len() * xi.len() {
        if x == y {
            return false;
        }
        x = xi[x as usize];
        y = xi[y as usize];
    }
    true
}

/// `Υ = { a b^{k+pad} : a, b separated forever }` (sorted), `δ = ξ`
/// letterwise.
pub fn xi_border(alphabet: Arc<Alphabet>, xi: &[Letter], k: usize, pad: usize) -> Result<Border> {
    if xi.len() != alphabet.len() {
        return Err(Error::Usage("letter map must be total on the alphabet".into()));
    }
    let mut words = Vec::new();
    for a in alphabet.letters() {
        for b in alphabet.letters() {
            if a != b && separated_forever(xi, a, b) {
                let mut w = vec![a];
                w.extend(std::iter::repeat_n(b, k + pad));
                words.push(w);
            }
        }
    }
    if words.is_empty() {
        return Err(Error::EmptyBorder("the letter map is nilpotent: no pair separates forever".into()));
    }
    words.sort();
    let delta = words
        .iter()
        .map(|w| {
            let image: Word = w.iter().map(|&c| xi[c as usize]).collect();
            words.binary_search(&image).map_err(|_| Error::Precondition("border not closed under the map".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Border::new(alphabet, words, delta, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.bytes().map(|b| (b - b'0') as Letter).collect()
    }

    fn ws(v: &[&str]) -> Vec<Word> {
        v.iter().map(|s| w(s)).collect()
    }

    fn starts_and_ends_in(word: &[Letter], set: &[Word]) -> bool {
        let h = set[0].len();
        set.iter().any(|x| word[..h] == x[..]) && set.iter().any(|x| word[word.len() - h..] == x[..])
    }

    #[test]
    fn freezing_examples() {
        assert!(is_freezing(&ws(&["10"]), 1).unwrap());
        let set = ws(&["00", "01", "10"]);
        let c = freezing_counterexample(&set, 1).unwrap().unwrap();
        assert_eq!(c.len(), 3);
        assert!(starts_and_ends_in(&c, &set));
        assert!(starts_and_ends_in(&w("001"), &set));
        assert!(is_freezing(&ws(&["100"]), 2).unwrap());
        assert!(is_freezing(&ws(&["100"]), 3).is_err());
        assert_eq!(is_freezing(&ws(&["10", "1"]), 1), Err(Error::MixedLengths));
    }

    #[test]
    fn static_examples() {
        let b = Alphabet::binary();
        assert_eq!(static_border(b.clone(), 0, 1, 2).unwrap().words(), &ws(&["100"])[..]);
        assert_eq!(static_border(b.clone(), 0, 1, 1).unwrap().words(), &ws(&["10"])[..]);
        assert!(static_border(b, 0, 0, 1).is_err());
    }

    #[test]
    fn dynamic_examples() {
        let b = Alphabet::binary();
        let d = dynamic_border(b.clone(), &[0, 1], 0).unwrap();
        assert_eq!(d.words(), &ws(&["000000100100", "111111011011"])[..]);
        assert_eq!(d.delta()[0], 1);
        assert!(dynamic_border(b, &[0, 0], 0).is_err());
    }

    #[test]
    fn xi_examples() {
        let b = Alphabet::binary();
        let id = xi_border(b.clone(), &[0, 1], 1, 3).unwrap();
        assert_eq!(id.words(), &ws(&["01111", "10000"])[..]);
        assert!(matches!(xi_border(b.clone(), &[0, 0], 1, 3), Err(Error::EmptyBorder(_))));
        let swap = xi_border(b, &[1, 0], 1, 3).unwrap();
        assert_eq!(swap.words(), id.words());
        assert_eq!(swap.delta(), &[1, 0]);
    }

    #[test]
    fn delta_cas() {
        let b = Alphabet::binary();
        let s = static_border(b.clone(), 0, 1, 2).unwrap().delta_ca().unwrap();
        assert_eq!(s.alphabet().len(), 1);
        assert_eq!(s.eval(&[0]), 0);
        let d = dynamic_border(b, &[0, 1], 0).unwrap().delta_ca().unwrap();
        assert_eq!(d.uniform_map(), vec![1, 0]);
    }
}
