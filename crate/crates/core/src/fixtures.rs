//! Named example subshifts with their documented predicate outcomes.

use crate::alphabet::Alphabet;
use crate::subshift::{Edge, Sft, Sided, SoficGraph, SubshiftHandle};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub subshift: SubshiftHandle,
    /// Documented facts, `(property, expected value)`.
    pub facts: Vec<(&'static str, &'static str)>,
}

fn edge(from: usize, label: u16, to: usize) -> Edge {
    Edge { from, label, to }
}

/// `O_σ((001)^∞)`: an SFT with no deterministic subshift.
pub fn x110() -> SubshiftHandle {
    let edges = vec![edge(0, 0, 1), edge(1, 0, 2), edge(2, 1, 0)];
    SubshiftHandle::Sofic(SoficGraph::new(Alphabet::binary(), 3, edges, Sided::One, None))
}

/// `O_σ((λ+1+01+001+21)0^∞)` over `{0,1,2}`: nilpotent with index 3.
pub fn nilp() -> SubshiftHandle {
    // 0: sink 0^∞, 1: reads 1, 2: reads 01, 3: reads 001, 4: reads 21
    let edges = vec![edge(0, 0, 0), edge(1, 1, 0), edge(2, 0, 1), edge(3, 0, 2), edge(4, 2, 1)];
    SubshiftHandle::Sofic(SoficGraph::new(Alphabet::numeric(3), 5, edges, Sided::One, None))
}

/// `{0^∞, (01)^∞, (10)^∞}`: contains `O_ξ` for the swap only.
pub fn ctrex() -> SubshiftHandle {
    let forbidden = vec![vec![1, 1], vec![0, 0, 1], vec![1, 0, 0]];
    SubshiftHandle::Sft(Sft::from_forbidden(Alphabet::binary(), &forbidden, Sided::One).expect("ctrex"))
}

/// `(0*1 + 1*)0^∞`: sofic, countable, of infinite type.
pub fn tails() -> SubshiftHandle {
    // 0: 0-loop before the single 1, 1: 1-loop, 2: 0-sink
    let edges = vec![edge(0, 0, 0), edge(0, 1, 2), edge(1, 1, 1), edge(1, 0, 2), edge(2, 0, 2)];
    SubshiftHandle::Sofic(SoficGraph::new(Alphabet::binary(), 3, edges, Sided::One, Some(vec![0, 1])))
}

pub fn golden() -> SubshiftHandle {
    SubshiftHandle::golden_mean()
}

pub fn full_binary() -> SubshiftHandle {
    SubshiftHandle::full(Alphabet::binary())
}

/// The SFT forbidding `110`.
pub fn no110() -> SubshiftHandle {
    SubshiftHandle::Sft(Sft::from_forbidden(Alphabet::binary(), &[vec![1, 1, 0]], Sided::Two).expect("no110"))
}

pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "x110",
            description: "orbit of (001)^inf; polytraceable, not ultimately traceable",
            subshift: x110(),
            facts: vec![("contains_deterministic", "absent"), ("periodic_points<=3", "001")],
        },
        Fixture {
            name: "nilp",
            description: "orbit closure of (lambda+1+01+001+21)0^inf; no CA traces it",
            subshift: nilp(),
            facts: vec![("nilpotency_index", "3"), ("partial_branch", "a")],
        },
        Fixture {
            name: "ctrex",
            description: "{0^inf,(01)^inf,(10)^inf}; SFT with a deterministic subshift, not traceable",
            subshift: ctrex(),
            facts: vec![("contains_deterministic", "1,0"), ("is_cdd", "false")],
        },
        Fixture {
            name: "tails",
            description: "(0*1+1*)0^inf; sofic, countable, of infinite type, traceable",
            subshift: tails(),
            facts: vec![("ultimately_coincides_with_0", "never")],
        },
        Fixture {
            name: "golden",
            description: "golden mean shift (forbid 11)",
            subshift: golden(),
            facts: vec![("partial_branch", "b"), ("ultimate_branch", "unsupported")],
        },
        Fixture {
            name: "full",
            description: "full shift on {0,1}",
            subshift: full_binary(),
            facts: vec![("contains_deterministic", "0,1"), ("is_cdd", "true")],
        },
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}
