use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::rules::{MacrocellRule, ModalRule, UngroupedRule};
use super::{BlockRecipe, BlockWitness, Compiled, CompiledArtifact, Provenance, Witness, WitnessRecipe};
use crate::alphabet::{is_uniform, reverse, word_from_index, word_index, Alphabet, Letter, Word};
use crate::ca::{CellularAutomaton, LocalRule, PartialCA};
use crate::error::{Error, Result};
use crate::freeze::{dynamic_border, require_freezing, static_border, xi_border, Border};
use crate::semifinite::SemifiniteAutomaton;
use crate::subshift::{block_shift, macrocell_sft, DeterministicOrbit, Sft, SoficGraph, SubshiftHandle};
use crate::trace::polytrace;

/// Depth up to which compilers check their hypotheses on languages.
pub const VALIDATION_DEPTH: usize = 4;

/// Padding of `ξ`-border words past the block length.
const XI_PAD: usize = 3;

/// A CA on a stacked block alphabet `B ⊆ A^h`, normalized to radius 1.
#[derive(Clone, Debug)]
pub struct UngroupSpec {
    g: CellularAutomaton,
}

impl UngroupSpec {
    pub fn new(g: &CellularAutomaton) -> Result<Self> {
        let a = g.alphabet();
        if !a.is_product() {
            return Err(Error::NotProduct);
        }
        let m = g.anchor();
        if m > 1 || g.diameter() as i32 - m > 2 {
            return Err(Error::Geometry("block automaton must have radius at most 1".into()));
        }
        let g = g.extend_to(1, 3)?;
        let blocks: Vec<Word> = a.letters().map(|c| a.decode(c)).collect();
        require_freezing(&blocks, a.height() / 2)?;
        Ok(Self { g })
    }

    pub fn h(&self) -> usize {
        self.g.alphabet().height()
    }

    pub fn blocks(&self) -> Vec<Word> {
        let a = self.g.alphabet();
        a.letters().map(|c| a.decode(c)).collect()
    }

    pub fn base_alphabet(&self) -> Arc<Alphabet> {
        Arc::new(self.g.alphabet().base().clone())
    }
}

/// `⊟_h G`: partial CA on the aligned-block SFT.
pub fn ungroup_ca(spec: &UngroupSpec) -> Result<PartialCA> {
    let n = spec.g.alphabet().len();
    let mut inner = Vec::with_capacity(n * n * n);
    for a in 0..n as Letter {
        for b in 0..n as Letter {
            for c in 0..n as Letter {
                inner.push(spec.g.eval(&[a, b, c]) as u32);
            }
        }
    }
    let blocks = spec.blocks();
    let h = spec.h();
    let base = spec.base_alphabet();
    let rule = UngroupedRule::new(blocks.clone(), inner)?;
    let ca = CellularAutomaton::new(LocalRule::structured(base.clone(), 2 * h as i32 - 1, 4 * h - 1, Arc::new(rule)));
    let domain = macrocell_sft(base, &blocks)?;
    PartialCA::new(ca, SubshiftHandle::Sft(domain))
}

/// `⊟_{k+l}(Δ_Υ × G)`.
pub fn border_compose(g: &CellularAutomaton, border: &Border) -> Result<PartialCA> {
    let a = g.alphabet();
    if a.height() != border.block_length() || !a.is_product() {
        return Err(Error::Usage(format!(
            "border made for blocks of length {}, automaton has height {}",
            border.block_length(),
            a.height()
        )));
    }
    let prod = CellularAutomaton::product(&border.delta_ca()?, g)?;
    ungroup_ca(&UngroupSpec::new(&prod)?)
}

/// Lifts a recipe for `G` to `⊟(Δ_Υ × G)`, with the first border word on
/// every macrocell.
fn border_recipe(
    inner: BlockRecipe,
    product: Arc<Alphabet>,
    l: usize,
    reach: impl Fn(usize) -> usize + Send + Sync + 'static,
) -> WitnessRecipe {
    WitnessRecipe::new("G-layer witness under the first border word", move |z| {
        let bw = inner(z, reach(z.len()))?;
        Ok(bw.ungroup(&product, l))
    })
}

/// Sliding-window polytracer on `B = L_k(Σ)`.
pub fn sft_polytracer(sigma: &Sft) -> Result<CellularAutomaton> {
    let k = sigma.order();
    let blocks: Vec<Word> = sigma.allowed().iter().cloned().collect();
    if blocks.is_empty() {
        return Err(Error::EmptyLanguage);
    }
    let alphabet = Arc::new(Alphabet::stacked(sigma.alphabet(), blocks.clone())?);
    let index: HashMap<Word, Letter> = blocks.iter().enumerate().map(|(i, b)| (b.clone(), i as Letter)).collect();
    let q = sigma.alphabet().len() as Letter;
    CellularAutomaton::from_fn(alphabet, 0, 2, move |w| {
        let (u, v) = (&blocks[w[0] as usize], &blocks[w[1] as usize]);
        if k == 1 {
            return w[1];
        }
        if u[1..] == v[..k - 1] {
            return w[1];
        }
        let mut s = u[1..].to_vec();
        s.push(0);
        for a in 0..q {
            s[k - 1] = a;
            if let Some(&c) = index.get(&s) {
                return c;
            }
        }
        w[0]
    })
}

/// Extends `z ∈ L(Σ)` to the right to length `len` by least letters.
fn extend_right(sigma: &SubshiftHandle, z: &[Letter], len: usize) -> Result<Word> {
    let g = sigma.graph().trim();
    let adj = g.out_adjacency();
    let mut set: Vec<usize> = (0..g.vertex_count()).collect();
    for &a in z {
        set = SoficGraph::successor(&adj, &set, a);
        if set.is_empty() {
            return Err(Error::Precondition(format!("word {} is not in the language", sigma.alphabet().format_word(z))));
        }
    }
    let mut out = z.to_vec();
    while out.len() < len {
        let next = sigma.alphabet().letters().find_map(|a| {
            let s = SoficGraph::successor(&adj, &set, a);
            (!s.is_empty()).then_some((a, s))
        });
        let (a, s) = next.ok_or(Error::EmptyLanguage)?;
        out.push(a);
        set = s;
    }
    Ok(out)
}

/// Witnesses for [`sft_polytracer`]: cell `i` holds `z'_{[i, i+k)}`.
pub fn sft_polytracer_recipe(sigma: &Sft) -> BlockRecipe {
    let k = sigma.order();
    let handle = SubshiftHandle::Sft(sigma.clone());
    let index: HashMap<Word, Letter> = sigma.allowed().iter().enumerate().map(|(i, b)| (b.clone(), i as Letter)).collect();
    Arc::new(move |z, reach| {
        let ext = extend_right(&handle, z, reach + k)?;
        let cells =
            (0..=reach).map(|i| index.get(&ext[i..i + k]).copied().ok_or(Error::EmptyLanguage)).collect::<Result<Word>>()?;
        Ok(BlockWitness { cells, lo: 0, track: 0 }.padded(reach))
    })
}

/// Re-indexes the cells of a block recipe.
fn map_recipe(inner: BlockRecipe, f: impl Fn(Letter) -> Letter + Send + Sync + 'static) -> BlockRecipe {
    Arc::new(move |z, reach| {
        let mut w = inner(z, reach)?;
        for c in w.cells.iter_mut() {
            *c = f(*c);
        }
        Ok(w)
    })
}

/// `G̃ = G ∘ Ψ` on the full power `A^k`, `Ψ` sending words outside `B` to
/// the least letter of `B`.
pub fn totalize(g: &CellularAutomaton) -> Result<CellularAutomaton> {
    let a = g.alphabet().clone();
    if !a.is_product() {
        return Err(Error::NotProduct);
    }
    let base = Arc::new(a.base().clone());
    let full = Arc::new(Alphabet::full_power(&base, a.height())?);
    if full.names() == a.names() {
        return Ok(g.clone());
    }
    let q = base.len();
    let k = a.height();
    let psi: Vec<Letter> = (0..full.len()).map(|c| a.encode(&word_from_index(c as u64, q, k)).unwrap_or(0)).collect();
    let out: Vec<Letter> = a.letters().map(|c| word_index(&a.decode(c), q) as Letter).collect();
    let g = g.clone();
    CellularAutomaton::from_fn(full, g.anchor(), g.diameter(), move |w| {
        let inner: Word = w.iter().map(|&c| psi[c as usize]).collect();
        out[g.eval(&inner) as usize]
    })
}

/// `{0^{3J} rev(u) u 0^J}`.
fn nilpotent_block(u: &[Letter], j: usize) -> Word {
    let mut w = vec![0; 3 * j];
    w.extend(reverse(u));
    w.extend_from_slice(u);
    w.extend(std::iter::repeat_n(0, j));
    w
}

/// Partial CA tracing a nilpotent subshift through macrocells
/// `0^{3J} rev(u) u 0^J` whose `u` loses its first letter at each step.
pub fn nilpotent_partial_ca(sigma: &SubshiftHandle) -> Result<CompiledArtifact> {
    let nil = sigma.nilpotency().ok_or_else(|| Error::NotNilpotent("the subshift has no weakly nilpotent letter".into()))?;
    let index = nil.index.ok_or_else(|| Error::NotNilpotent("weakly nilpotent but not nilpotent".into()))?;
    if nil.letter != 0 {
        return Err(Error::Precondition("the nilpotent letter must be the first letter".into()));
    }
    let j = index.max(1);
    let alphabet = sigma.alphabet().clone();
    let words: Vec<Word> = sigma.language(j).into_iter().collect();
    let blocks: Vec<Word> = words.iter().map(|u| nilpotent_block(u, j)).collect();
    let h = 6 * j;
    let (c, images): (Vec<Word>, Vec<Word>) = words
        .iter()
        .filter(|u| u.iter().any(|&a| a != 0))
        .map(|u| {
            let mut v = u[1..].to_vec();
            v.push(0);
            (nilpotent_block(u, j), nilpotent_block(&v, j))
        })
        .unzip();
    if c.is_empty() {
        return Err(Error::Precondition("the nilpotent subshift has no nonzero word".into()));
    }
    require_freezing(&c, 3 * j)?;
    let rule = Arc::new(MacrocellRule::new(c, images)?);
    let ca = CellularAutomaton::new(LocalRule::structured(alphabet.clone(), h as i32 - 1, 2 * h - 1, rule));
    let domain = SubshiftHandle::Sofic(block_shift(alphabet.clone(), &blocks)?);
    let partial = PartialCA::new(ca, domain)?;
    let sig = sigma.clone();
    let recipe = WitnessRecipe::new("single macrocell 0^{3J} rev(u) u 0^J among zero blocks, observed at 4J", move |z| {
        let u: Word = if z.len() >= j {
            if z[j..].iter().any(|&a| a != 0) {
                return Err(Error::Precondition("word does not end in zeros after the nilpotency index".into()));
            }
            z[..j].to_vec()
        } else {
            extend_right(&sig, z, j)?
        };
        let reach = z.len() + 1;
        let mut window = vec![0; reach * h];
        window.extend(nilpotent_block(&u, j));
        window.extend(std::iter::repeat_n(0, reach * h));
        Ok(Witness { window, lo: -((reach * h + 4 * j) as i64) })
    });
    Ok(CompiledArtifact {
        result: Compiled::Partial(partial),
        provenance: Provenance::new("nilpotent").note("J", j).note("h", h).note("blocks", blocks.len()),
        witness: Some(recipe),
        offset: 0,
    })
}

/// Least non-uniform periodic word of smallest period, searched up to
/// twice the number of graph vertices.
fn nonuniform_period(sigma: &SubshiftHandle) -> Option<Word> {
    let bound = 2 * sigma.graph().trim().vertex_count().max(1);
    let g = sigma.graph().trim();
    let q = sigma.alphabet().len();
    (2..=bound).find_map(|p| {
        crate::alphabet::lyndon_words(q, p)
            .into_iter()
            .filter(|w| w.len() == p && !is_uniform(w))
            .find(|w| g.periodic_word_cycle(w))
    })
}

/// Checks `∘τ_G = Σ` up to [`VALIDATION_DEPTH`].
fn validate_polytracer(sigma: &SubshiftHandle, g: &CellularAutomaton) -> Result<()> {
    for n in 1..=VALIDATION_DEPTH {
        let poly = polytrace(g, n)?;
        let target = sigma.language(n);
        if poly.blocks() != &target {
            let diff = poly.blocks().symmetric_difference(&target).next().cloned().unwrap_or_default();
            return Err(Error::Precondition(format!(
                "polytrace differs from the subshift at depth {n} on {}",
                sigma.alphabet().format_word(&diff)
            )));
        }
    }
    Ok(())
}

/// The partial-trace dispatcher: nilpotent construction, dynamical border
/// on a non-uniform periodic word, or static border on two uniform ones.
pub fn partial_trace_compile(
    sigma: &SubshiftHandle,
    polytracer: Option<(&CellularAutomaton, BlockRecipe)>,
) -> Result<CompiledArtifact> {
    if let Some((g, _)) = &polytracer {
        validate_polytracer(sigma, g)?;
    }
    if sigma.is_weakly_nilpotent() {
        if sigma.nilpotency_index().is_none() {
            return Err(Error::Precondition("weakly nilpotent but not nilpotent: cannot be a polytrace".into()));
        }
        let mut art = nilpotent_partial_ca(sigma)?;
        art.provenance = art.provenance.branch("a");
        return Ok(art);
    }
    let (g, recipe) =
        polytracer.ok_or_else(|| Error::Precondition("a polytracer is required outside the nilpotent case".into()))?;
    let k = g.alphabet().height();
    let alphabet = sigma.alphabet().clone();
    let (border, branch, note) = match nonuniform_period(sigma) {
        Some(u) => {
            let note = alphabet.format_word(&u);
            (dynamic_border(alphabet.clone(), &u, k)?, "b", note)
        }
        None => {
            let uniform: Vec<Letter> = sigma.periodic_points(1).into_iter().map(|w| w[0]).collect();
            if uniform.len() < 2 {
                return Err(Error::Precondition("no periodic words to build a border from".into()));
            }
            let note = format!("{},{}", alphabet.name(uniform[0]), alphabet.name(uniform[1]));
            (static_border(alphabet.clone(), uniform[0], uniform[1], k)?, "c", note)
        }
    };
    let partial = border_compose(g, &border)?;
    let h = k + border.word_length();
    let product = Arc::new(Alphabet::product(&*border.word_alphabet()?, g.alphabet())?);
    let witness = border_recipe(recipe, product, border.word_length(), |n| 2 * n + 2);
    Ok(CompiledArtifact {
        result: Compiled::Partial(partial),
        provenance: Provenance::new("partial").branch(branch).note("border", note).note("h", h),
        witness: Some(witness),
        offset: 0,
    })
}

/// First word of `(ξ^{⊗n})^{-1}(B)` outside `B`.
fn preimage_counterexample(blocks: &[Word], xi: &[Letter]) -> Option<Word> {
    let set: HashSet<&[Letter]> = blocks.iter().map(|b| b.as_slice()).collect();
    let prefixes: HashSet<&[Letter]> = blocks.iter().flat_map(|b| (0..=b.len()).map(move |i| &b[..i])).collect();
    let q = xi.len() as Letter;
    for b in blocks {
        let pre: Vec<Vec<Letter>> = b.iter().map(|&c| (0..q).filter(|&a| xi[a as usize] == c).collect()).collect();
        if pre.iter().any(Vec::is_empty) {
            continue;
        }
        // lexicographic depth-first walk over the product of preimage sets
        let mut stack: Vec<Word> = vec![Vec::new()];
        while let Some(w) = stack.pop() {
            if w.len() == b.len() && set.contains(w.as_slice()) {
                continue;
            }
            if !prefixes.contains(w.as_slice()) {
                let mut v = w;
                v.extend(pre[v.len()..].iter().map(|p| p[0]));
                return Some(v);
            }
            for &a in pre[w.len()].iter().rev() {
                let mut v = w.clone();
                v.push(a);
                stack.push(v);
            }
        }
    }
    None
}

/// Execution/frontier/default CA from a semifinite automaton on
/// `B ⊆ A^{2p}` and a letter map `ξ`.
pub fn full_trace_compile(gt: &SemifiniteAutomaton, xi: &[Letter]) -> Result<CompiledArtifact> {
    let a = gt.alphabet().clone();
    if !a.is_product() || !a.height().is_multiple_of(2) {
        return Err(Error::Precondition("blocks must be words of even length 2p".into()));
    }
    if gt.diameter() != 2 {
        return Err(Error::Geometry("the semifinite automaton must read one right neighbour".into()));
    }
    let base = Arc::new(a.base().clone());
    if xi.len() != base.len() || xi.iter().any(|&c| c as usize >= base.len()) {
        return Err(Error::Usage("letter map must be total on the base alphabet".into()));
    }
    let p = a.height() / 2;
    let blocks: Vec<Word> = a.letters().map(|c| a.decode(c)).collect();
    if let Some(c) = crate::freeze::freezing_counterexample(&blocks, p)? {
        return Err(Error::NotFreezing { p, counterexample: base.format_word(&c) });
    }
    if let Some(c) = preimage_counterexample(&blocks, xi) {
        return Err(Error::Precondition(format!(
            "blocks not closed under preimages of the letter map: {}",
            base.format_word(&c)
        )));
    }
    let n = blocks.len();
    let mut pair = Vec::with_capacity(n * (n + 1));
    for b0 in a.letters() {
        let head: Word = blocks[b0 as usize][..p].iter().map(|&c| xi[c as usize]).collect();
        for b1 in a.letters().map(Some).chain(std::iter::once(None)) {
            let out = gt.pair(b0, b1);
            if blocks[out as usize][..p] != head[..] {
                return Err(Error::Precondition(format!(
                    "first {p} tracks do not follow the letter map on block {}",
                    base.format_word(&blocks[b0 as usize])
                )));
            }
            pair.push(out as u32);
        }
    }
    let rule = ModalRule::new(blocks, pair, xi.to_vec())?;
    let ca = CellularAutomaton::new(LocalRule::structured(base, 2 * p as i32 - 1, 10 * p - 1, Arc::new(rule)));
    let witness = super::uniform_recipe(&ca);
    Ok(CompiledArtifact {
        result: Compiled::Total(ca),
        provenance: Provenance::new("full").note("p", p).note("blocks", n),
        witness: Some(witness),
        offset: 0,
    })
}

/// Prefix of length `n` of the `ξ`-orbit of `a`.
fn orbit_word(xi: &[Letter], a: Letter, n: usize) -> Word {
    std::iter::successors(Some(a), |&c| Some(xi[c as usize])).take(n).collect()
}

/// Full-trace CA for a polytracer `G` on `A^k` and a non-nilpotent `ξ`.
pub fn polytrace_to_trace(g: &CellularAutomaton, xi: &[Letter], recipe: Option<BlockRecipe>) -> Result<CompiledArtifact> {
    polytrace_to_trace_with(g, xi, recipe, true)
}

fn polytrace_to_trace_with(
    g: &CellularAutomaton,
    xi: &[Letter],
    recipe: Option<BlockRecipe>,
    check_orbits: bool,
) -> Result<CompiledArtifact> {
    let a = g.alphabet().clone();
    if !a.is_product() {
        return Err(Error::NotProduct);
    }
    let base = Arc::new(a.base().clone());
    let k = a.height();
    if a.len() as u128 != (base.len() as u128).pow(k as u32) {
        return Err(Error::Precondition("polytracer must be total on A^k (totalize first)".into()));
    }
    if g.anchor() > 0 || g.diameter() as i32 - g.anchor() > 2 {
        return Err(Error::NotOnesided(g.anchor()));
    }
    let g = g.extend_to(0, 2)?;
    if DeterministicOrbit::total(base.clone(), xi)?.is_nilpotent() {
        return Err(Error::Precondition("the letter map is nilpotent".into()));
    }
    if check_orbits {
        let poly = polytrace(&g, VALIDATION_DEPTH)?;
        for c in base.letters() {
            let w = orbit_word(xi, c, VALIDATION_DEPTH);
            if !poly.contains(&w) {
                return Err(Error::Precondition(format!("orbit {} is not a polytrace column", base.format_word(&w))));
            }
        }
    }
    let border = xi_border(base.clone(), xi, k, XI_PAD)?;
    let prod = CellularAutomaton::product(&border.delta_ca()?, &g)?;
    let sfa = SemifiniteAutomaton::extend_onesided(&prod)?;
    let mut art = full_trace_compile(&sfa, xi)?;
    let l = border.word_length();
    if let Some(inner) = recipe {
        let uniform = art.witness.take().expect("uniform recipe");
        let product = prod.alphabet().clone();
        let xi = xi.to_vec();
        art.witness =
            Some(WitnessRecipe::new("orbit words from uniform configurations, others from macrocell runs of G", move |z| {
                if orbit_word(&xi, z[0], z.len()) == z {
                    return uniform.witness(z);
                }
                let bw = inner(z, 4 * z.len() + 2)?;
                Ok(bw.ungroup(&product, l))
            }));
    }
    art.provenance = Provenance::new("polytrace-to-trace").note("k", k).note("l", l).note("p", (k + l) / 2);
    Ok(art)
}

/// Outcome of the ultimate-trace dispatcher.
#[derive(Debug)]
pub enum UltimateOutcome {
    Compiled(CompiledArtifact),
    /// The case needing an external construction (`O_ξ` nilpotent, `Σ` not).
    Unsupported {
        branch: u8,
        reason: String,
    },
}

/// The ultimate-trace dispatcher.
pub fn ultimate_trace_compile(
    sigma: &SubshiftHandle,
    polytracer: Option<(&CellularAutomaton, BlockRecipe)>,
    xi: &DeterministicOrbit,
) -> Result<UltimateOutcome> {
    if xi.alphabet().names() != sigma.alphabet().names() {
        return Err(Error::AlphabetMismatch("letter map and subshift alphabets differ".into()));
    }
    if !sigma.contains_orbit(xi) {
        return Err(Error::Precondition("the deterministic subshift is not contained in the target".into()));
    }
    if sigma.is_weakly_nilpotent() {
        let nil = sigma.nilpotency().expect("weakly nilpotent");
        let j =
            nil.index.ok_or_else(|| Error::Precondition("weakly nilpotent but not nilpotent: cannot be a polytrace".into()))?;
        let ca = CellularAutomaton::constant(sigma.alphabet().clone(), nil.letter, 2)?;
        let witness = super::uniform_recipe(&ca);
        return Ok(UltimateOutcome::Compiled(CompiledArtifact {
            result: Compiled::Total(ca),
            provenance: Provenance::new("ultimate").branch("1").note("J", j),
            witness: Some(witness),
            offset: j,
        }));
    }
    if xi.is_nilpotent() {
        return Ok(UltimateOutcome::Unsupported {
            branch: 3,
            reason: "the letter map is nilpotent while the subshift is not; this case needs the external \
                     construction tracing the union of a polytrace and a nilpotent deterministic subshift"
                .into(),
        });
    }
    let (g, recipe) = polytracer.ok_or_else(|| Error::Precondition("a polytracer is required".into()))?;
    validate_polytracer(sigma, g)?;
    let gt = totalize(g)?;
    let q = sigma.alphabet().len();
    let src = g.alphabet().clone();
    let recipe = map_recipe(recipe, move |c| word_index(&src.decode(c), q) as Letter);
    let dom = xi.domain();
    let fallback = xi.apply(dom[0]).expect("nonempty domain");
    let total: Vec<Letter> = sigma.alphabet().letters().map(|a| xi.apply(a).unwrap_or(fallback)).collect();
    let mut art = polytrace_to_trace_with(&gt, &total, Some(recipe), false)?;
    art.provenance = art.provenance.branch("2").note("J", 1);
    art.offset = 1;
    Ok(UltimateOutcome::Compiled(art))
}

#[cfg(test)]
pub(super) fn preimage_counterexample_for_tests(blocks: &[Word], xi: &[Letter]) -> Option<Word> {
    preimage_counterexample(blocks, xi)
}
