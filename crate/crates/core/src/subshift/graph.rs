//! Labelled graphs presenting sofic shifts, plus the deterministic
//! (right-resolving) presentations used by the trace transducer.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::alphabet::{Alphabet, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sided {
    One,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub label: Letter,
    pub to: usize,
}

/// Points are labels of bi-infinite paths (two-sided) or of right-infinite
/// paths leaving a start vertex (one-sided; all vertices when `start` is
/// `None`).
#[derive(Clone, Debug)]
pub struct SoficGraph {
    alphabet: Arc<Alphabet>,
    vertices: usize,
    edges: Vec<Edge>,
    sided: Sided,
    start: Option<Vec<usize>>,
}

impl SoficGraph {
    pub fn new(alphabet: Arc<Alphabet>, vertices: usize, edges: Vec<Edge>, sided: Sided, start: Option<Vec<usize>>) -> Self {
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        let start = start.map(|mut s| {
            s.sort_unstable();
            s.dedup();
            s
        });
        Self { alphabet, vertices, edges, sided, start }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn sided(&self) -> Sided {
        self.sided
    }

    pub fn start(&self) -> Option<&[usize]> {
        self.start.as_deref()
    }

    pub fn with_alphabet(&self, alphabet: Arc<Alphabet>) -> Self {
        Self { alphabet, ..self.clone() }
    }

    pub fn with_sided(&self, sided: Sided) -> Self {
        Self { sided, ..self.clone() }
    }

    pub fn with_start(&self, start: Option<Vec<usize>>) -> Self {
        Self::new(self.alphabet.clone(), self.vertices, self.edges.clone(), self.sided, start)
    }

    pub fn starts(&self) -> Vec<usize> {
        match &self.start {
            Some(s) => s.clone(),
            None => (0..self.vertices).collect(),
        }
    }

    pub fn out_adjacency(&self) -> Vec<Vec<(Letter, usize)>> {
        let mut out = vec![Vec::new(); self.vertices];
        for e in &self.edges {
            out[e.from].push((e.label, e.to));
        }
        out
    }

    /// Removes every vertex not lying on an infinite path of the right kind
    /// (and, one-sided, not reachable from a start vertex); renumbers.
    pub fn trim(&self) -> Self {
        let n = self.vertices;
        let mut alive = match self.sided {
            Sided::One => reachable(n, &self.edges, &self.starts()),
            Sided::Two => vec![true; n],
        };
        loop {
            let mut outdeg = vec![0usize; n];
            let mut indeg = vec![0usize; n];
            for e in &self.edges {
                if alive[e.from] && alive[e.to] {
                    outdeg[e.from] += 1;
                    indeg[e.to] += 1;
                }
            }
            let mut changed = false;
            for v in 0..n {
                let dead = outdeg[v] == 0 || (self.sided == Sided::Two && indeg[v] == 0);
                if alive[v] && dead {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.restrict(&alive)
    }

    fn restrict(&self, alive: &[bool]) -> Self {
        let mut index = vec![usize::MAX; self.vertices];
        let mut count = 0;
        for v in 0..self.vertices {
            if alive[v] {
                index[v] = count;
                count += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| alive[e.from] && alive[e.to])
            .map(|e| Edge { from: index[e.from], label: e.label, to: index[e.to] })
            .collect();
        let start = self.start.as_ref().map(|s| s.iter().filter(|&&v| alive[v]).map(|&v| index[v]).collect());
        Self::new(self.alphabet.clone(), count, edges, self.sided, start)
    }

    pub fn is_empty(&self) -> bool {
        self.trim().vertices == 0
    }

    /// Length-`n` factors of points, via subset walks on the trimmed graph.
    pub fn language(&self, n: usize) -> BTreeSet<Word> {
        let g = self.trim();
        let mut out = BTreeSet::new();
        if g.vertices == 0 {
            return out;
        }
        let out_adj = g.out_adjacency();
        let all: Vec<usize> = (0..g.vertices).collect();
        let mut word = Vec::with_capacity(n);
        let q = g.alphabet.len();
        subset_dfs(&out_adj, q, &all, n, &mut word, &mut |w| {
            out.insert(w.to_vec());
        });
        out
    }

    /// Subset successor of `set` under `a`.
    pub fn successor(out_adj: &[Vec<(Letter, usize)>], set: &[usize], a: Letter) -> Vec<usize> {
        let mut next: Vec<usize> = set.iter().flat_map(|&v| out_adj[v].iter().filter(|e| e.0 == a).map(|e| e.1)).collect();
        next.sort_unstable();
        next.dedup();
        next
    }

    /// Whether the ultimately periodic word `prefix · cycle^∞` labels a
    /// right-infinite path from a start vertex of the trimmed graph.
    pub fn accepts_ultimately_periodic(&self, prefix: &[Letter], cycle: &[Letter]) -> bool {
        let g = self.trim();
        g.accepts_ultimately_periodic_trimmed(&g.out_adjacency(), prefix, cycle)
    }

    pub(crate) fn accepts_ultimately_periodic_trimmed(
        &self,
        out_adj: &[Vec<(Letter, usize)>],
        prefix: &[Letter],
        cycle: &[Letter],
    ) -> bool {
        let mut set = self.starts();
        if set.is_empty() {
            return false;
        }
        for &a in prefix {
            set = Self::successor(out_adj, &set, a);
            if set.is_empty() {
                return false;
            }
        }
        if cycle.is_empty() {
            return true;
        }
        let mut seen = std::collections::HashSet::new();
        let mut phase = 0;
        loop {
            if !seen.insert((set.clone(), phase)) {
                return true;
            }
            set = Self::successor(out_adj, &set, cycle[phase]);
            if set.is_empty() {
                return false;
            }
            phase = (phase + 1) % cycle.len();
        }
    }

    /// Strongly connected component id per vertex, and whether each
    /// component carries a cycle.
    pub fn components(&self) -> (Vec<usize>, Vec<bool>) {
        let (comp, count) = scc(self.vertices, &self.edges);
        let mut cyclic = vec![false; count];
        let mut size = vec![0usize; count];
        for &c in &comp {
            size[c] += 1;
        }
        for c in 0..count {
            cyclic[c] = size[c] > 1;
        }
        for e in &self.edges {
            if e.from == e.to {
                cyclic[comp[e.from]] = true;
            }
        }
        (comp, cyclic)
    }

    /// Edges lying on some cycle.
    pub fn cycle_edges(&self) -> Vec<Edge> {
        let (comp, _) = scc(self.vertices, &self.edges);
        self.edges.iter().filter(|e| comp[e.from] == comp[e.to]).copied().collect()
    }

    /// Relabels edges through `map`.
    pub fn relabel(&self, alphabet: Arc<Alphabet>, map: impl Fn(Letter) -> Letter) -> Self {
        let edges = self.edges.iter().map(|e| Edge { label: map(e.label), ..*e }).collect();
        Self::new(alphabet, self.vertices, edges, self.sided, self.start.clone())
    }

    /// Disjoint union (alphabets must agree).
    pub fn union(graphs: &[SoficGraph]) -> Self {
        let alphabet = graphs[0].alphabet.clone();
        let sided = graphs[0].sided;
        let mut edges = Vec::new();
        let mut start = Vec::new();
        let mut any_start = false;
        let mut offset = 0;
        for g in graphs {
            edges.extend(g.edges.iter().map(|e| Edge { from: e.from + offset, label: e.label, to: e.to + offset }));
            any_start |= g.start.is_some();
            start.extend(g.starts().into_iter().map(|v| v + offset));
            offset += g.vertices;
        }
        Self::new(alphabet, offset, edges, sided, any_start.then_some(start))
    }

    /// The trimmed subset presentation, minimized: a right-resolving
    /// presentation of the same shift.
    pub fn deterministic(&self) -> DetGraph {
        let g = self.trim();
        let out_adj = g.out_adjacency();
        let q = g.alphabet.len();
        let init = match g.sided {
            Sided::Two => (0..g.vertices).collect::<Vec<_>>(),
            Sided::One => g.starts(),
        };
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut sets = Vec::new();
        let mut trans: Vec<Vec<(u64, usize)>> = Vec::new();
        let mut queue = VecDeque::new();
        if !init.is_empty() {
            ids.insert(init.clone(), 0);
            sets.push(init);
            trans.push(Vec::new());
            queue.push_back(0);
        }
        while let Some(s) = queue.pop_front() {
            for a in 0..q as Letter {
                let next = Self::successor(&out_adj, &sets[s], a);
                if next.is_empty() {
                    continue;
                }
                let t = *ids.entry(next.clone()).or_insert_with(|| {
                    sets.push(next);
                    trans.push(Vec::new());
                    queue.push_back(sets.len() - 1);
                    sets.len() - 1
                });
                trans[s].push((a as u64, t));
            }
        }
        let det = DetGraph { trans };
        match g.sided {
            Sided::Two => det.trim_two_sided().minimize().trim_two_sided(),
            Sided::One => det.minimize(),
        }
    }

    /// Whether `w^∞` (some rotation, one-sided) is a point: the relation
    /// "joined by a path labelled `w`" has a cycle.
    pub fn periodic_word_cycle(&self, w: &[Letter]) -> bool {
        let g = self.trim();
        let out_adj = g.out_adjacency();
        let n = g.vertices;
        let mut rel = vec![Vec::new(); n];
        for v in 0..n {
            let mut set = vec![v];
            for &a in w {
                set = Self::successor(&out_adj, &set, a);
                if set.is_empty() {
                    break;
                }
            }
            rel[v] = set;
        }
        let edges: Vec<Edge> = (0..n).flat_map(|v| rel[v].iter().map(move |&t| Edge { from: v, label: 0, to: t })).collect();
        let (comp, _) = scc(n, &edges);
        edges.iter().any(|e| comp[e.from] == comp[e.to])
    }
}

fn subset_dfs(
    out_adj: &[Vec<(Letter, usize)>],
    q: usize,
    set: &[usize],
    n: usize,
    word: &mut Word,
    emit: &mut dyn FnMut(&[Letter]),
) {
    if word.len() == n {
        emit(word);
        return;
    }
    for a in 0..q as Letter {
        let next = SoficGraph::successor(out_adj, set, a);
        if next.is_empty() {
            continue;
        }
        word.push(a);
        subset_dfs(out_adj, q, &next, n, word, emit);
        word.pop();
    }
}

pub(crate) fn reachable(n: usize, edges: &[Edge], from: &[usize]) -> Vec<bool> {
    let mut out = vec![Vec::new(); n];
    for e in edges {
        out[e.from].push(e.to);
    }
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = from.to_vec();
    for &v in from {
        seen[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &t in &out[v] {
            if !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Iterative Tarjan; returns the component of each vertex and the count.
pub(crate) fn scc(n: usize, edges: &[Edge]) -> (Vec<usize>, usize) {
    let mut out = vec![Vec::new(); n];
    for e in edges {
        out[e.from].push(e.to);
    }
    scc_adj(&out)
}

pub(crate) fn scc_adj(out: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = out.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < out[v].len() {
                let w = out[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = count;
                        if w == v {
                            break;
                        }
                    }
                    count += 1;
                }
            }
        }
    }
    (comp, count)
}

/// A deterministic labelled graph over integer label codes: `trans[s]` lists
/// `(label, target)` sorted by label, at most one per label.
#[derive(Clone, Debug, Default)]
pub struct DetGraph {
    pub trans: Vec<Vec<(u64, usize)>>,
}

impl DetGraph {
    pub fn len(&self) -> usize {
        self.trans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trans.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    /// Keeps states on bi-infinite paths.
    pub fn trim_two_sided(&self) -> Self {
        let n = self.len();
        let mut alive = vec![true; n];
        loop {
            let mut indeg = vec![0usize; n];
            let mut outdeg = vec![0usize; n];
            for s in 0..n {
                if !alive[s] {
                    continue;
                }
                for &(_, t) in &self.trans[s] {
                    if alive[t] {
                        outdeg[s] += 1;
                        indeg[t] += 1;
                    }
                }
            }
            let mut changed = false;
            for s in 0..n {
                if alive[s] && (indeg[s] == 0 || outdeg[s] == 0) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.restrict(&alive)
    }

    fn restrict(&self, alive: &[bool]) -> Self {
        let mut index = vec![usize::MAX; self.len()];
        let mut count = 0;
        for s in 0..self.len() {
            if alive[s] {
                index[s] = count;
                count += 1;
            }
        }
        let trans = (0..self.len())
            .filter(|&s| alive[s])
            .map(|s| self.trans[s].iter().filter(|e| alive[e.1]).map(|&(a, t)| (a, index[t])).collect())
            .collect();
        Self { trans }
    }

    /// Merges states with equal follower sets (Moore refinement).
    pub fn minimize(&self) -> Self {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let mut class = vec![0usize; n];
        let mut classes = 1;
        loop {
            let mut ids: HashMap<(usize, Vec<(u64, usize)>), usize> = HashMap::with_capacity(n);
            let mut next = vec![0usize; n];
            for s in 0..n {
                let sig: Vec<(u64, usize)> = self.trans[s].iter().map(|&(a, t)| (a, class[t])).collect();
                let len = ids.len();
                next[s] = *ids.entry((class[s], sig)).or_insert(len);
            }
            let count = ids.len();
            class = next;
            if count == classes {
                break;
            }
            classes = count;
        }
        let mut trans = vec![Vec::new(); classes];
        let mut done = vec![false; classes];
        for s in 0..n {
            let c = class[s];
            if !done[c] {
                done[c] = true;
                trans[c] = self.trans[s].iter().map(|&(a, t)| (a, class[t])).collect();
            }
        }
        Self { trans }
    }
}
