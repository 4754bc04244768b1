//! Checks of compiled automata against target subshifts: exact, ultimate
//! and inclusion comparisons through the trace engines, witness replay,
//! engine cross-checks and seeded sampling.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alphabet::{Alphabet, Letter, Word};
use crate::ca::{CellularAutomaton, PeriodicConfiguration};
use crate::compile::CompiledArtifact;
use crate::error::{Error, Result};
use crate::par;
use crate::subshift::SubshiftHandle;
use crate::trace::{polytrace, trace_naive, trace_transducer, Traceable};

/// Seed used by sampling checks unless another one is given.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Partial,
}

impl Outcome {
    /// Process exit code: 0 pass, 1 fail, 2 partial.
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::Partial => 2,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Partial => "PARTIAL",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    /// Equality after dropping the first `J` rows.
    Ultimate(usize),
    Inclusion,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "inclusion" => Ok(Self::Inclusion),
            _ => match s.strip_prefix("ultimate:") {
                Some(j) => j.parse().map(Self::Ultimate).map_err(|_| Error::Usage(format!("bad offset in {s:?}"))),
                None => Err(Error::Usage(format!("unknown mode {s:?} (exact, ultimate:J, inclusion)"))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: String,
    pub outcome: Outcome,
    /// Deepest level fully compared.
    pub depth: usize,
    pub certificate: Option<String>,
    pub details: Vec<(String, String)>,
    pub seed: Option<u64>,
}

impl Report {
    fn new(check: &str) -> Self {
        Self { check: check.into(), outcome: Outcome::Pass, depth: 0, certificate: None, details: Vec::new(), seed: None }
    }

    fn fail(mut self, certificate: String) -> Self {
        self.outcome = Outcome::Fail;
        self.certificate = Some(certificate);
        self
    }

    fn detail(mut self, k: &str, v: impl ToString) -> Self {
        self.details.push((k.into(), v.to_string()));
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} depth={}", self.outcome, self.check, self.depth)?;
        for (k, v) in &self.details {
            write!(f, " {k}={v}")?;
        }
        if let Some(c) = &self.certificate {
            write!(f, " certificate={c}")?;
        }
        if let Some(s) = self.seed {
            write!(f, " seed={s}")?;
        }
        Ok(())
    }
}

fn format_word(a: &Alphabet, w: &[Letter]) -> String {
    if w.is_empty() {
        "-".into()
    } else {
        a.format_word(w)
    }
}

/// Compares the (poly)trace languages of `f` with those of `target` for
/// every depth up to `depth`.
pub fn check_trace<T: Traceable + ?Sized>(f: &T, target: &SubshiftHandle, depth: usize, mode: Mode) -> Report {
    let name = match mode {
        Mode::Exact => "trace-exact".to_string(),
        Mode::Ultimate(j) => format!("trace-ultimate:{j}"),
        Mode::Inclusion => "trace-inclusion".to_string(),
    };
    let mut report = Report::new(&name);
    let base = target.alphabet().clone();
    if f.automaton().alphabet().base().names() != base.names() {
        return report.fail("alphabets differ".into());
    }
    let j = match mode {
        Mode::Ultimate(j) => j,
        _ => 0,
    };
    let shifted = SubshiftHandle::Sofic(target.shift_image(j));
    for n in 1..=depth {
        let poly = match polytrace(f, n + j) {
            Ok(p) => p,
            Err(e) => {
                report.outcome = Outcome::Partial;
                return report.detail("stopped", e);
            }
        };
        let got: BTreeSet<Word> = poly.blocks().iter().map(|b| b[j..].to_vec()).collect();
        let want = shifted.language(n);
        let bad = match mode {
            Mode::Inclusion => got.difference(&want).next().map(|w| format!("{} in trace only", format_word(&base, w))),
            _ => {
                let extra = got.difference(&want).next();
                let missing = want.difference(&got).next();
                match (extra, missing) {
                    (Some(a), Some(b)) if b < a => Some(format!("{} in target only", format_word(&base, b))),
                    (Some(a), _) => Some(format!("{} in trace only", format_word(&base, a))),
                    (None, Some(b)) => Some(format!("{} in target only", format_word(&base, b))),
                    (None, None) => None,
                }
            }
        };
        if let Some(c) = bad {
            return report.fail(c).detail("failed_at", n);
        }
        report.depth = n;
        report = report.detail(&format!("n{n}"), got.len());
    }
    report
}

/// Replays the artifact's witness recipe on every word.
pub fn run_witnesses(artifact: &CompiledArtifact, words: &[Word]) -> Report {
    let mut report = Report::new("witnesses");
    let base = artifact.automaton().alphabet().clone();
    let results = par::map(words.to_vec(), |z| {
        let col = artifact.witness_column(&z);
        (z, col)
    });
    for (z, col) in results {
        match col {
            Ok(c) if c == z => report.depth = report.depth.max(z.len()),
            Ok(c) => {
                return report.fail(format!("{} gave {}", format_word(&base, &z), format_word(&base, &c)));
            }
            Err(e) => return report.fail(format!("{}: {e}", format_word(&base, &z))),
        }
    }
    report.detail("words", words.len())
}

/// Compares the naive and transducer engines at depth `k`, width 1.
pub fn cross_check<T: Traceable + ?Sized>(f: &T, k: usize) -> Report {
    let mut report = Report::new("cross-check");
    let (a, b) = match (trace_naive(f, k, 1), trace_transducer(f, k, 1)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            report.outcome = Outcome::Partial;
            return report.detail("stopped", e);
        }
    };
    report.depth = k;
    let base = f.automaton().alphabet().clone();
    report = report.detail("naive", a.len()).detail("transducer", b.len());
    match a.blocks().symmetric_difference(b.blocks()).next() {
        Some(w) => report.fail(format_word(&base, w)),
        None => report,
    }
}

/// A random periodic configuration of period in `1..=max_period`.
pub fn random_configuration(rng: &mut ChaCha8Rng, q: usize, max_period: usize) -> PeriodicConfiguration {
    let p = rng.gen_range(1..=max_period);
    let period: Word = (0..p).map(|_| rng.gen_range(0..q) as Letter).collect();
    PeriodicConfiguration::new(period, 0).expect("nonempty period")
}

/// Column of cell 0 over `depth` rows.
pub fn column(ca: &CellularAutomaton, x: &PeriodicConfiguration, depth: usize) -> Result<Word> {
    let mut cur = x.clone();
    let mut col = Vec::with_capacity(depth);
    for j in 0..depth {
        col.push(cur.at(0));
        if j + 1 < depth {
            cur = ca.step(&cur)?;
        }
    }
    Ok(col)
}

/// Samples `count` random periodic configurations and checks every
/// depth-`depth` column with `accept` (which sees the whole column).
pub fn sample_columns(
    ca: &CellularAutomaton,
    count: usize,
    max_period: usize,
    depth: usize,
    seed: u64,
    accept: impl Fn(&[Letter]) -> bool + Sync + Send,
) -> Report {
    let mut report = Report::new("sampling");
    report.seed = Some(seed);
    let q = ca.alphabet().len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs: Vec<PeriodicConfiguration> = (0..count).map(|_| random_configuration(&mut rng, q, max_period)).collect();
    let bad = par::map(configs, |x| match column(ca, &x, depth) {
        Ok(c) if accept(&c) => None,
        Ok(c) => Some((x, c)),
        Err(_) => Some((x, Vec::new())),
    });
    report.depth = depth;
    let base = ca.alphabet().clone();
    match bad.into_iter().flatten().next() {
        Some((x, c)) => report.fail(format!(
            "column {} from period {}",
            format_word(&base, &c),
            format_word(&base, &x.slice(0, x.period().len() as i64))
        )),
        None => report.detail("samples", count),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{partial_trace_compile, sft_polytracer, sft_polytracer_recipe};
    use crate::fixtures;
    use crate::subshift::Sft;

    #[test]
    fn check_trace_examples() {
        let SubshiftHandle::Sft(golden) = fixtures::golden() else { unreachable!() };
        let g = sft_polytracer(&golden).unwrap();
        let r = check_trace(&g, &fixtures::golden(), 8, Mode::Exact);
        assert!(r.passed(), "{r}");
        assert_eq!(r.depth, 8);
        let b = Alphabet::binary();
        let id = CellularAutomaton::identity(b.clone());
        let r = check_trace(&id, &SubshiftHandle::full(b.clone()), 3, Mode::Exact);
        assert_eq!(r.outcome, Outcome::Fail);
        assert_eq!(r.certificate.as_deref(), Some("01 in target only"));
        assert!(check_trace(&id, &SubshiftHandle::full(b.clone()), 3, Mode::Inclusion).passed());
        let zero = CellularAutomaton::constant(b.clone(), 0, 2).unwrap();
        let nilpotent_target = SubshiftHandle::Sft(Sft::from_forbidden(b, &[vec![1]], crate::subshift::Sided::Two).unwrap());
        assert!(!check_trace(&zero, &nilpotent_target, 3, Mode::Exact).passed());
        assert!(check_trace(&zero, &nilpotent_target, 3, Mode::Ultimate(1)).passed());
    }

    #[test]
    fn witnesses_and_cross_check() {
        let SubshiftHandle::Sft(golden) = fixtures::golden() else { unreachable!() };
        let g = sft_polytracer(&golden).unwrap();
        let art = partial_trace_compile(&fixtures::golden(), Some((&g, sft_polytracer_recipe(&golden)))).unwrap();
        let words: Vec<Word> = fixtures::golden().language(4).into_iter().collect();
        assert!(run_witnesses(&art, &words).passed());
        let s = CellularAutomaton::shift(Alphabet::binary());
        let r = cross_check(&s, 6);
        assert!(r.passed());
        assert!(r.to_string().contains("naive=64 transducer=64"));
        assert_eq!("ultimate:3".parse::<Mode>().unwrap(), Mode::Ultimate(3));
        assert!("sideways".parse::<Mode>().is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let and = CellularAutomaton::min_rule(Alphabet::binary());
        let a = sample_columns(&and, 200, 10, 6, 7, |c| c.windows(2).all(|w| w[0] >= w[1]));
        assert!(a.passed());
        let b = sample_columns(&and, 200, 10, 6, 7, |c| c[0] == 0);
        let c = sample_columns(&and, 200, 10, 6, 7, |c| c[0] == 0);
        assert_eq!(b, c);
        assert_eq!(b.outcome, Outcome::Fail);
    }
}
