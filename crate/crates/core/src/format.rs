//! Line-oriented text formats for automata, subshifts, borders, word lists
//! and provenance records. Every file is a sequence of `key: value` lines;
//! `#` starts a comment.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::alphabet::{word_from_index, Alphabet, Letter, Word};
use crate::ca::{CellularAutomaton, LocalRule, RuleKind};
use crate::compile::rules::{MacrocellRule, ModalRule, UngroupedRule};
use crate::compile::Provenance;
use crate::error::{parse_err, Error, Result};
use crate::freeze::Border;
use crate::subshift::{DeterministicOrbit, Edge, Sft, Sided, SoficGraph, SubshiftHandle};

/// One `key: value` line with its 1-based line number.
#[derive(Clone, Debug)]
struct Line<'a> {
    no: usize,
    key: &'a str,
    value: &'a str,
}

fn lines(s: &str) -> Result<Vec<Line<'_>>> {
    let mut out = Vec::new();
    for (i, raw) in s.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let Some((key, value)) = text.split_once(':') else {
            return parse_err(i + 1, format!("expected `key: value`, got {text:?}"));
        };
        out.push(Line { no: i + 1, key: key.trim(), value: value.trim() });
    }
    Ok(out)
}

/// Rejects keys outside `known`.
fn check_keys(ls: &[Line], known: &[&str]) -> Result<()> {
    match ls.iter().find(|l| !known.contains(&l.key)) {
        Some(l) => parse_err(l.no, format!("unknown key {:?}", l.key)),
        None => Ok(()),
    }
}

fn single<'a>(ls: &'a [Line], key: &str) -> Result<Option<&'a Line<'a>>> {
    let mut found = ls.iter().filter(|l| l.key == key);
    let first = found.next();
    if let Some(dup) = found.next() {
        return parse_err(dup.no, format!("duplicate key {key:?}"));
    }
    Ok(first)
}

fn required<'a>(ls: &'a [Line], key: &str) -> Result<&'a Line<'a>> {
    single(ls, key)?.ok_or_else(|| Error::Parse { line: ls.last().map_or(0, |l| l.no), msg: format!("missing key {key:?}") })
}

fn number<T: std::str::FromStr>(l: &Line) -> Result<T> {
    l.value.parse().or_else(|_| parse_err(l.no, format!("expected a number for {:?}, got {:?}", l.key, l.value)))
}

fn at<T>(l: &Line, r: Result<T>) -> Result<T> {
    r.or_else(|e| match e {
        Error::Parse { .. } => Err(e),
        e => parse_err(l.no, e.to_string()),
    })
}

fn word(alphabet: &Alphabet, l: &Line, s: &str) -> Result<Word> {
    at(l, alphabet.parse_word(s))
}

/// `alphabet:` (and `base:` for stacked alphabets, whose letter names are
/// base names joined with `.`).
fn parse_alphabet(ls: &[Line]) -> Result<Arc<Alphabet>> {
    let l = required(ls, "alphabet")?;
    let names: Vec<&str> = l.value.split_whitespace().collect();
    let Some(b) = single(ls, "base")? else {
        return at(l, Alphabet::new(names).map(Arc::new));
    };
    let base = Arc::new(at(b, Alphabet::new(b.value.split_whitespace()))?);
    let words = names
        .iter()
        .map(|n| {
            n.split('.')
                .map(|t| {
                    base.index_of(t)
                        .ok_or_else(|| Error::Parse { line: l.no, msg: format!("track {t:?} of {n:?} is not in the base") })
                })
                .collect::<Result<Word>>()
        })
        .collect::<Result<Vec<_>>>()?;
    at(l, Alphabet::stacked(&base, words).map(Arc::new))
}

fn emit_alphabet(a: &Alphabet, out: &mut String) {
    let _ = writeln!(out, "alphabet: {}", a.names().join(" "));
    if a.is_product() {
        let _ = writeln!(out, "base: {}", a.base().names().join(" "));
    }
}

const CA_KEYS: &[&str] =
    &["alphabet", "base", "anchor", "diameter", "rule", "rule-kind", "h", "p", "block", "inner", "map", "pair", "default"];

pub fn parse_ca(s: &str) -> Result<CellularAutomaton> {
    let ls = lines(s)?;
    check_keys(&ls, CA_KEYS)?;
    let alphabet = parse_alphabet(&ls)?;
    let anchor: i32 = number(required(&ls, "anchor")?)?;
    let dl = required(&ls, "diameter")?;
    let diameter: usize = number(dl)?;
    if diameter == 0 {
        return parse_err(dl.no, "diameter must be at least 1");
    }
    let kind = single(&ls, "rule-kind")?;
    match kind.map(|l| l.value) {
        None | Some("table") => parse_table(&ls, alphabet, anchor, diameter),
        Some(_) => {
            let kl = kind.expect("present");
            let rule = parse_structured(&ls, &alphabet, kl)?;
            let (m, d) = match rule.as_any() {
                r if r.is::<UngroupedRule>() => {
                    let h = r.downcast_ref::<UngroupedRule>().expect("checked").h();
                    (2 * h as i32 - 1, 4 * h - 1)
                }
                r if r.is::<MacrocellRule>() => {
                    let h = r.downcast_ref::<MacrocellRule>().expect("checked").h();
                    (h as i32 - 1, 2 * h - 1)
                }
                r => {
                    let p = r.downcast_ref::<ModalRule>().expect("three kinds").p();
                    (2 * p as i32 - 1, 10 * p - 1)
                }
            };
            if (m, d) != (anchor, diameter) {
                return parse_err(dl.no, format!("{} rule needs anchor {m} and diameter {d}", kl.value));
            }
            Ok(CellularAutomaton::new(LocalRule::structured(alphabet, anchor, diameter, rule)))
        }
    }
}

fn parse_table(ls: &[Line], alphabet: Arc<Alphabet>, anchor: i32, diameter: usize) -> Result<CellularAutomaton> {
    let q = alphabet.len();
    let entries = (q as u128).checked_pow(diameter as u32).filter(|&n| n <= crate::ca::DEFAULT_TABLE_CAP);
    let Some(entries) = entries else {
        return parse_err(required(ls, "diameter")?.no, "rule table too large");
    };
    let mut table: Vec<Option<Letter>> = vec![None; entries as usize];
    for l in ls.iter().filter(|l| l.key == "rule") {
        let Some((w, a)) = l.value.split_once("->") else {
            return parse_err(l.no, "expected `rule: window -> letter`");
        };
        let w = word(&alphabet, l, w.trim())?;
        if w.len() != diameter {
            return parse_err(l.no, format!("window of length {} (diameter {diameter})", w.len()));
        }
        let a = alphabet
            .index_of(a.trim())
            .ok_or_else(|| Error::Parse { line: l.no, msg: format!("unknown letter {:?}", a.trim()) })?;
        let i = crate::alphabet::word_index(&w, q);
        if table[i].replace(a).is_some() {
            return parse_err(l.no, "window given twice");
        }
    }
    if let Some(i) = table.iter().position(Option::is_none) {
        let w = word_from_index(i as u64, q, diameter);
        let last = ls.last().map_or(0, |l| l.no);
        return parse_err(last, format!("no rule for window {}", alphabet.format_word(&w)));
    }
    CellularAutomaton::from_table(alphabet, anchor, diameter, table.into_iter().flatten().collect())
}

fn indices(l: &Line) -> Result<Vec<u32>> {
    l.value.split_whitespace().map(|t| t.parse().or_else(|_| parse_err(l.no, format!("bad index {t:?}")))).collect()
}

fn parse_structured(ls: &[Line], alphabet: &Alphabet, kind: &Line) -> Result<Arc<dyn crate::ca::StructuredRule>> {
    let blocks = || -> Result<Vec<Word>> { ls.iter().filter(|l| l.key == "block").map(|l| word(alphabet, l, l.value)).collect() };
    let rule: Arc<dyn crate::ca::StructuredRule> = match kind.value {
        "ungrouped" => {
            let h: usize = number(required(ls, "h")?)?;
            let il = required(ls, "inner")?;
            let r = at(il, UngroupedRule::new(blocks()?, indices(il)?))?;
            if r.h() != h {
                return parse_err(il.no, format!("blocks have length {}, not {h}", r.h()));
            }
            Arc::new(r)
        }
        "macrocell" => {
            let h: usize = number(required(ls, "h")?)?;
            let mut from = Vec::new();
            let mut to = Vec::new();
            for l in ls.iter().filter(|l| l.key == "map") {
                let mut parts = l.value.split_whitespace();
                let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                    return parse_err(l.no, "expected `map: block image`");
                };
                from.push(word(alphabet, l, a)?);
                to.push(word(alphabet, l, b)?);
            }
            let r = at(kind, MacrocellRule::new(from, to))?;
            if r.h() != h {
                return parse_err(kind.no, format!("blocks have length {}, not {h}", r.h()));
            }
            Arc::new(r)
        }
        "modal" => {
            let p: usize = number(required(ls, "p")?)?;
            let pl = required(ls, "pair")?;
            let dl = required(ls, "default")?;
            let xi = word(alphabet, dl, dl.value)?;
            if xi.len() != alphabet.len() {
                return parse_err(dl.no, "default map must list one letter per letter");
            }
            let r = at(pl, ModalRule::new(blocks()?, indices(pl)?, xi))?;
            if r.p() != p {
                return parse_err(pl.no, format!("blocks have length {}, not {}", 2 * r.p(), 2 * p));
            }
            Arc::new(r)
        }
        other => return parse_err(kind.no, format!("unknown rule kind {other:?}")),
    };
    Ok(rule)
}

pub fn emit_ca(ca: &CellularAutomaton) -> String {
    let mut out = String::new();
    let a = ca.alphabet();
    emit_alphabet(a, &mut out);
    let _ = writeln!(out, "anchor: {}", ca.anchor());
    let _ = writeln!(out, "diameter: {}", ca.diameter());
    match ca.rule().kind() {
        RuleKind::Table(t) => {
            let q = a.len();
            for (i, &b) in t.iter().enumerate() {
                let w = word_from_index(i as u64, q, ca.diameter());
                let _ = writeln!(out, "rule: {} -> {}", a.format_word(&w), a.name(b));
            }
        }
        RuleKind::Structured(r) => {
            let _ = writeln!(out, "rule-kind: {}", r.kind());
            r.write_body(a, &mut out);
        }
    }
    out
}

const SUBSHIFT_KEYS: &[&str] =
    &["type", "alphabet", "base", "sided", "forbidden", "order", "allowed", "states", "start", "edges", "map"];

/// Beyond this many windows an SFT is written by its allowed words.
const FORBIDDEN_LIST_CAP: u128 = 1 << 12;

fn parse_sided(ls: &[Line]) -> Result<Sided> {
    match single(ls, "sided")? {
        None => Ok(Sided::Two),
        Some(l) => match l.value {
            "one" => Ok(Sided::One),
            "two" => Ok(Sided::Two),
            v => parse_err(l.no, format!("sided must be one or two, got {v:?}")),
        },
    }
}

pub fn parse_subshift(s: &str) -> Result<SubshiftHandle> {
    let ls = lines(s)?;
    check_keys(&ls, SUBSHIFT_KEYS)?;
    let alphabet = parse_alphabet(&ls)?;
    let sided = parse_sided(&ls)?;
    let tl = required(&ls, "type")?;
    match tl.value {
        "sft" if single(&ls, "order")?.is_some() => {
            let k: usize = number(single(&ls, "order")?.expect("present"))?;
            if let Some(l) = ls.iter().find(|l| l.key == "forbidden") {
                return parse_err(l.no, "give either allowed or forbidden words");
            }
            let mut allowed = Vec::new();
            for l in ls.iter().filter(|l| l.key == "allowed") {
                for t in l.value.split_whitespace() {
                    allowed.push(word(&alphabet, l, t)?);
                }
            }
            at(tl, Sft::from_allowed(alphabet, k, allowed, sided).map(SubshiftHandle::Sft))
        }
        "sft" => {
            if let Some(l) = ls.iter().find(|l| l.key == "allowed") {
                return parse_err(l.no, "allowed words need an order line");
            }
            let mut forbidden = Vec::new();
            for l in ls.iter().filter(|l| l.key == "forbidden") {
                for t in l.value.split_whitespace() {
                    forbidden.push(word(&alphabet, l, t)?);
                }
            }
            at(tl, Sft::from_forbidden(alphabet, &forbidden, sided).map(SubshiftHandle::Sft))
        }
        "sofic" => {
            let sl = required(&ls, "states")?;
            let n: usize = number(sl)?;
            let mut edges = Vec::new();
            for l in ls.iter().filter(|l| l.key == "edges") {
                let parts: Vec<&str> = l.value.split_whitespace().collect();
                let [p, a, q] = parts[..] else {
                    return parse_err(l.no, "expected `edges: from letter to`");
                };
                let (Ok(from), Ok(to)) = (p.parse::<usize>(), q.parse::<usize>()) else {
                    return parse_err(l.no, "edge endpoints must be state numbers");
                };
                if from >= n || to >= n {
                    return parse_err(l.no, format!("state out of range (states: {n})"));
                }
                let label =
                    alphabet.index_of(a).ok_or_else(|| Error::Parse { line: l.no, msg: format!("unknown letter {a:?}") })?;
                edges.push(Edge { from, label, to });
            }
            let start = match single(&ls, "start")? {
                None => None,
                Some(l) => Some(indices(l)?.into_iter().map(|x| x as usize).collect::<Vec<_>>()),
            };
            if start.as_ref().is_some_and(|s| s.iter().any(|&x| x >= n)) {
                return parse_err(single(&ls, "start")?.expect("present").no, "start state out of range");
            }
            Ok(SubshiftHandle::Sofic(SoficGraph::new(alphabet, n, edges, sided, start)))
        }
        "orbit" => {
            let l = required(&ls, "map")?;
            at(l, DeterministicOrbit::parse(alphabet, l.value).map(SubshiftHandle::Orbit))
        }
        v => parse_err(tl.no, format!("unknown subshift type {v:?} (sft, sofic, orbit)")),
    }
}

pub fn emit_subshift(x: &SubshiftHandle) -> String {
    let mut out = String::new();
    let a = x.alphabet();
    let kind = match x {
        SubshiftHandle::Sft(_) => "sft",
        SubshiftHandle::Sofic(_) => "sofic",
        SubshiftHandle::Orbit(_) => "orbit",
    };
    let _ = writeln!(out, "type: {kind}");
    emit_alphabet(a, &mut out);
    match x {
        SubshiftHandle::Sft(sft) => {
            if sft.sided() == Sided::One {
                out.push_str("sided: one\n");
            }
            let windows = (a.len() as u128).checked_pow(sft.order() as u32).unwrap_or(u128::MAX);
            if windows <= FORBIDDEN_LIST_CAP {
                let words: Vec<String> = sft.forbidden().iter().map(|w| a.format_word(w)).collect();
                let _ = writeln!(out, "forbidden: {}", words.join(" "));
            } else {
                let _ = writeln!(out, "order: {}", sft.order());
                for w in sft.allowed() {
                    let _ = writeln!(out, "allowed: {}", a.format_word(w));
                }
            }
        }
        SubshiftHandle::Sofic(g) => {
            if g.sided() == Sided::One {
                out.push_str("sided: one\n");
            }
            let _ = writeln!(out, "states: {}", g.vertex_count());
            if let Some(s) = g.start() {
                let s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "start: {}", s.join(" "));
            }
            for e in g.edges() {
                let _ = writeln!(out, "edges: {} {} {}", e.from, a.name(e.label), e.to);
            }
        }
        SubshiftHandle::Orbit(o) => {
            let _ = writeln!(out, "map: {}", o.format());
        }
    }
    out
}

/// A word list: one word per line, with an optional `alphabet:` line
/// (binary by default).
pub fn parse_words(s: &str) -> Result<(Arc<Alphabet>, Vec<Word>)> {
    let (alphabet, words, rest) = words_and_rest(s, &["alphabet", "base"])?;
    if let Some(l) = rest.first() {
        return parse_err(l.no, format!("unknown key {:?}", l.key));
    }
    Ok((alphabet, words))
}

/// Word lines, the alphabet, and the remaining `key: value` lines.
fn words_and_rest<'a>(s: &'a str, keys: &[&str]) -> Result<(Arc<Alphabet>, Vec<Word>, Vec<Line<'a>>)> {
    let mut keyed = Vec::new();
    let mut plain = Vec::new();
    for (i, raw) in s.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        match text.split_once(':') {
            Some((k, v)) => keyed.push(Line { no: i + 1, key: k.trim(), value: v.trim() }),
            None => plain.push((i + 1, text)),
        }
    }
    let (header, rest): (Vec<Line>, Vec<Line>) = keyed.into_iter().partition(|l| keys.contains(&l.key));
    let alphabet = if header.iter().any(|l| l.key == "alphabet") { parse_alphabet(&header)? } else { Alphabet::binary() };
    let words = plain
        .into_iter()
        .map(|(no, t)| alphabet.parse_word(t).or_else(|e| parse_err(no, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    Ok((alphabet, words, rest))
}

pub fn emit_words(alphabet: &Alphabet, words: &[Word]) -> String {
    let mut out = String::new();
    emit_alphabet(alphabet, &mut out);
    for w in words {
        out.push_str(&alphabet.format_word(w));
        out.push('\n');
    }
    out
}

/// Border file: the word list followed by `block-length:` and `delta:`
/// (images as indices into the list).
pub fn parse_border(s: &str) -> Result<Border> {
    let (alphabet, words, rest) = words_and_rest(s, &["alphabet", "base"])?;
    check_keys(&rest, &["block-length", "delta"])?;
    let k: usize = number(required(&rest, "block-length")?)?;
    let dl = required(&rest, "delta")?;
    let delta = indices(dl)?.into_iter().map(|x| x as usize).collect();
    at(dl, Border::new(alphabet, words, delta, k))
}

pub fn emit_border(b: &Border) -> String {
    let mut out = emit_words(b.alphabet(), b.words());
    let _ = writeln!(out, "block-length: {}", b.block_length());
    let d: Vec<String> = b.delta().iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "delta: {}", d.join(" "));
    out
}

/// Provenance sidecar: `construction:`, `branch:`, `offset:`, `witness:`
/// and free `key: value` notes.
pub fn emit_provenance(p: &Provenance, offset: usize, witness: Option<&str>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "construction: {}", p.construction);
    if let Some(b) = &p.branch {
        let _ = writeln!(out, "branch: {b}");
    }
    let _ = writeln!(out, "offset: {offset}");
    if let Some(w) = witness {
        let _ = writeln!(out, "witness: {w}");
    }
    for (k, v) in &p.notes {
        let _ = writeln!(out, "{k}: {v}");
    }
    out
}

/// Inverse of [`emit_provenance`].
pub fn parse_provenance(s: &str) -> Result<(Provenance, usize, Option<String>)> {
    let ls = lines(s)?;
    let mut p = Provenance::new(required(&ls, "construction")?.value);
    p.branch = single(&ls, "branch")?.map(|l| l.value.to_string());
    let offset = number(required(&ls, "offset")?)?;
    let witness = single(&ls, "witness")?.map(|l| l.value.to_string());
    for l in ls.iter().filter(|l| !["construction", "branch", "offset", "witness"].contains(&l.key)) {
        p.notes.push((l.key.to_string(), l.value.to_string()));
    }
    Ok((p, offset, witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::freeze::static_border;

    #[test]
    fn ca_round_trip() {
        let s = CellularAutomaton::shift(Alphabet::binary());
        let text = emit_ca(&s);
        assert_eq!(text, "alphabet: 0 1\nanchor: 0\ndiameter: 2\nrule: 00 -> 0\nrule: 01 -> 1\nrule: 10 -> 0\nrule: 11 -> 1\n");
        let back = parse_ca(&text).unwrap();
        assert_eq!(back.rule().table(), s.rule().table());
        assert_eq!(emit_ca(&back), text);
        let b = Alphabet::binary();
        let pair = CellularAutomaton::product(&s, &CellularAutomaton::min_rule(b)).unwrap();
        let text = emit_ca(&pair);
        assert!(text.contains("base: 0 1"));
        let back = parse_ca(&text).unwrap();
        assert_eq!(back.alphabet(), pair.alphabet());
        assert_eq!(emit_ca(&back), text);
    }

    #[test]
    fn structured_round_trip() {
        let SubshiftHandle::Sft(golden) = fixtures::golden() else { unreachable!() };
        let g = crate::compile::sft_polytracer(&golden).unwrap();
        let art = crate::compile::partial_trace_compile(
            &fixtures::golden(),
            Some((&g, crate::compile::sft_polytracer_recipe(&golden))),
        )
        .unwrap();
        let text = emit_ca(art.automaton());
        assert!(text.contains("rule-kind: "));
        let back = parse_ca(&text).unwrap();
        assert_eq!(emit_ca(&back), text);
        let d = back.diameter();
        for i in 0..200u64 {
            let w = word_from_index(i.wrapping_mul(0x9e37_79b9_7f4a_7c15) % (1 << 20), 2, d);
            assert_eq!(back.eval(&w), art.automaton().eval(&w));
        }
    }

    #[test]
    fn parse_errors_report_lines() {
        let bad = "alphabet: 0 1\nanchor: 0\ndiameter: 2\nrule: 00 -> 0\nrule: 01 1\n";
        match parse_ca(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            r => panic!("{r:?}"),
        }
        let unknown = "alphabet: 0 1\nanchor: 0\ndiameter: 1\ncolour: red\nrule: 0 -> 0\nrule: 1 -> 1\n";
        assert!(matches!(parse_ca(unknown), Err(Error::Parse { line: 4, .. })));
        let missing = "alphabet: 0 1\nanchor: 0\ndiameter: 1\nrule: 0 -> 0\n";
        assert!(parse_ca(missing).unwrap_err().to_string().contains("no rule for window 1"));
        assert!(matches!(parse_subshift("type: sft\nalphabet: 0 1\nforbidden: 12\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn subshift_files() {
        let g = parse_subshift("# golden mean\ntype: sft\nalphabet: 0 1\nforbidden: 11\n").unwrap();
        let SubshiftHandle::Sft(sft) = &g else { panic!() };
        assert_eq!(sft.order(), 2);
        let allowed: Vec<Word> = sft.allowed().iter().cloned().collect();
        assert_eq!(allowed, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        for x in fixtures::fixtures().into_iter().map(|f| f.subshift) {
            let text = emit_subshift(&x);
            let back = parse_subshift(&text).unwrap();
            assert_eq!(emit_subshift(&back), text);
            assert_eq!(back.language(5), x.language(5));
        }
    }

    #[test]
    fn border_and_provenance_files() {
        let b = static_border(Alphabet::binary(), 0, 1, 3).unwrap();
        let text = emit_border(&b);
        assert_eq!(parse_border(&text).unwrap(), b);
        let (a, w) = parse_words("0011\n# c\n0101\n").unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(w, vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1]]);
        assert!(parse_words("0011\nfoo: 1\n").is_err());
        let p = Provenance::new("ultimate").branch("2").note("J", 1);
        let text = emit_provenance(&p, 1, Some("uniform"));
        assert_eq!(parse_provenance(&text).unwrap(), (p, 1, Some("uniform".to_string())));
    }
}
