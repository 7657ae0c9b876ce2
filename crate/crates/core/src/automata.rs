//! Finite automata over the cellular automaton alphabet.
//!
//! [`Nfa`] and [`Dfa`] are small explicit automata with dense transition
//! tables. The de Bruijn graph of a local rule is the basic source of
//! automata here: read as an NFA with every state initial and final, it
//! accepts the factor language of the image subshift.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rule::{format_word, index_word, LocalRule, Symbol, Word};

pub type StateId = usize;

/// The de Bruijn graph of a local rule: nodes are windows of length
/// `width - 1`, the edge `au → ub` carries the output on `aub`.
///
/// Rules of width 1 are padded with one ignored cell on the left, so the
/// graph always has at least one symbol per node.
#[derive(Clone, Debug)]
pub struct DeBruijnGraph {
    rule: LocalRule,
    node_count: usize,
    node_len: usize,
}

impl DeBruijnGraph {
    pub fn new(rule: &LocalRule) -> Self {
        let rule = if rule.width() < 2 {
            let (lo, hi) = rule.neighborhood();
            rule.pad(lo - 1, hi).expect("padding a superset")
        } else {
            rule.clone()
        };
        let node_len = rule.width() - 1;
        let node_count = rule.alphabet().pow(node_len as u32);
        DeBruijnGraph { rule, node_count, node_len }
    }

    /// The (possibly padded) rule the graph was built from.
    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    pub fn alphabet(&self) -> usize {
        self.rule.alphabet()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn node_len(&self) -> usize {
        self.node_len
    }

    pub fn node_word(&self, node: usize) -> Word {
        index_word(self.alphabet(), self.node_len, node)
    }

    /// Target and output label of the edge leaving `node` on input `symbol`.
    pub fn step(&self, node: usize, symbol: Symbol) -> (usize, Symbol) {
        let window = node * self.alphabet() + symbol as usize;
        (window % self.node_count, self.rule.output_at(window))
    }

    /// Successors of `node` whose edge is labelled `label`.
    pub fn successors_with_label(&self, node: usize, label: Symbol) -> impl Iterator<Item = usize> + '_ {
        (0..self.alphabet() as Symbol).filter_map(move |b| {
            let (t, out) = self.step(node, b);
            (out == label).then_some(t)
        })
    }

    /// First symbol of the node word; the cell a path contributes per step.
    pub fn first_symbol(&self, node: usize) -> Symbol {
        (node / (self.node_count / self.alphabet())) as Symbol
    }

    pub fn to_nfa(&self) -> Nfa {
        let n = self.alphabet();
        let mut nfa = Nfa::new(n);
        for v in 0..self.node_count {
            nfa.add_state(true, Some(format_word(&self.node_word(v))));
            nfa.set_initial(v);
        }
        for v in 0..self.node_count {
            for b in 0..n as Symbol {
                let (t, out) = self.step(v, b);
                nfa.add_transition(v, out, t);
            }
        }
        nfa
    }

    /// DOT rendering with edges labelled `input/output`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        let _ = writeln!(out, "  rankdir=LR;");
        for v in 0..self.node_count {
            let _ = writeln!(out, "  n{v} [shape=circle, label=\"{}\"];", format_word(&self.node_word(v)));
        }
        for v in 0..self.node_count {
            for b in 0..self.alphabet() as Symbol {
                let (t, o) = self.step(v, b);
                let _ = writeln!(out, "  n{v} -> n{t} [label=\"{b}/{o}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// The de Bruijn automaton of `rule`: all states initial and final.
pub fn de_bruijn_automaton(rule: &LocalRule) -> Nfa {
    if rule.width() == 1 {
        // One state, the rule relabels symbols.
        let n = rule.alphabet();
        let mut nfa = Nfa::new(n);
        nfa.add_state(true, Some("ε".into()));
        nfa.set_initial(0);
        for a in 0..n as Symbol {
            nfa.add_transition(0, rule.output(&[a]), 0);
        }
        return nfa;
    }
    DeBruijnGraph::new(rule).to_nfa()
}

#[derive(Clone, Debug)]
pub struct Nfa {
    alphabet: usize,
    trans: Vec<Vec<Vec<StateId>>>,
    initial: Vec<StateId>,
    accepting: Vec<bool>,
    names: Vec<Option<String>>,
}

impl Nfa {
    pub fn new(alphabet: usize) -> Self {
        Nfa { alphabet, trans: Vec::new(), initial: Vec::new(), accepting: Vec::new(), names: Vec::new() }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.trans.len()
    }

    pub fn add_state(&mut self, accepting: bool, name: Option<String>) -> StateId {
        self.trans.push(vec![Vec::new(); self.alphabet]);
        self.accepting.push(accepting);
        self.names.push(name);
        self.trans.len() - 1
    }

    pub fn set_initial(&mut self, state: StateId) {
        if let Err(pos) = self.initial.binary_search(&state) {
            self.initial.insert(pos, state);
        }
    }

    pub fn add_transition(&mut self, from: StateId, symbol: Symbol, to: StateId) {
        let targets = &mut self.trans[from][symbol as usize];
        if let Err(pos) = targets.binary_search(&to) {
            targets.insert(pos, to);
        }
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state]
    }

    pub fn targets(&self, state: StateId, symbol: Symbol) -> &[StateId] {
        &self.trans[state][symbol as usize]
    }

    fn step_set(&self, set: &[StateId], symbol: Symbol) -> Vec<StateId> {
        let mut next: Vec<StateId> = set.iter().flat_map(|&s| self.targets(s, symbol).iter().copied()).collect();
        next.sort_unstable();
        next.dedup();
        next
    }

    /// States reachable by reading `w` from the initial set.
    pub fn run(&self, w: &[Symbol]) -> Vec<StateId> {
        w.iter().fold(self.initial.clone(), |set, &a| self.step_set(&set, a))
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        self.run(w).iter().any(|&s| self.accepting[s])
    }

    fn accepts_empty(&self) -> bool {
        self.initial.iter().any(|&s| self.accepting[s])
    }

    /// Subset construction over the reachable subsets. The empty subset, if
    /// reachable, is the sink.
    pub fn determinize(&self) -> Dfa {
        let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
        let mut subsets: Vec<Vec<StateId>> = Vec::new();
        let mut delta: Vec<Vec<StateId>> = Vec::new();
        index.insert(self.initial.clone(), 0);
        subsets.push(self.initial.clone());
        let mut i = 0;
        while i < subsets.len() {
            let mut row = Vec::with_capacity(self.alphabet);
            for a in 0..self.alphabet as Symbol {
                let next = self.step_set(&subsets[i], a);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len();
                        index.insert(next.clone(), id);
                        subsets.push(next);
                        id
                    }
                };
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let accepting = subsets.iter().map(|set| set.iter().any(|&s| self.accepting[s])).collect();
        let names = subsets
            .iter()
            .map(|set| {
                let parts: Vec<String> = set
                    .iter()
                    .map(|&s| self.names[s].clone().unwrap_or_else(|| s.to_string()))
                    .collect();
                format!("{{{}}}", parts.join(","))
            })
            .collect();
        Dfa { alphabet: self.alphabet, delta, start: 0, accepting, names }
    }

    /// Concatenation `L(self)·L(other)` without ε-moves.
    pub fn concat(&self, other: &Nfa) -> Result<Nfa> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(self.alphabet, other.alphabet));
        }
        let off = self.state_count();
        let other_empty = other.accepts_empty();
        let mut out = Nfa::new(self.alphabet);
        for s in 0..self.state_count() {
            out.add_state(self.accepting[s] && other_empty, self.names[s].clone());
        }
        for s in 0..other.state_count() {
            out.add_state(other.accepting[s], other.names[s].clone());
        }
        for s in 0..self.state_count() {
            for a in 0..self.alphabet as Symbol {
                for &t in self.targets(s, a) {
                    out.add_transition(s, a, t);
                }
            }
        }
        for s in 0..other.state_count() {
            for a in 0..self.alphabet as Symbol {
                for &t in other.targets(s, a) {
                    out.add_transition(off + s, a, off + t);
                }
            }
        }
        // An accepting state of `self` may continue as any initial state of `other`.
        for s in 0..self.state_count() {
            if !self.accepting[s] {
                continue;
            }
            for &i in &other.initial {
                for a in 0..self.alphabet as Symbol {
                    for &t in other.targets(i, a) {
                        out.add_transition(s, a, off + t);
                    }
                }
            }
        }
        for &i in &self.initial {
            out.set_initial(i);
        }
        if self.accepts_empty() {
            for &i in &other.initial {
                out.set_initial(off + i);
            }
        }
        Ok(out)
    }

    /// Product with a DFA, restricted to reachable pairs; accepting where
    /// both components accept.
    pub fn intersect_dfa(&self, d: &Dfa) -> Result<Nfa> {
        if self.alphabet != d.alphabet {
            return Err(Error::AlphabetMismatch(self.alphabet, d.alphabet));
        }
        let mut out = Nfa::new(self.alphabet);
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |out: &mut Nfa, queue: &mut VecDeque<(StateId, StateId)>, pair: (StateId, StateId)| {
            *index.entry(pair).or_insert_with(|| {
                queue.push_back(pair);
                out.add_state(self.accepting[pair.0] && d.accepting[pair.1], None)
            })
        };
        for &i in &self.initial {
            let id = intern(&mut out, &mut queue, (i, d.start));
            out.set_initial(id);
        }
        while let Some((p, q)) = queue.pop_front() {
            let from = intern(&mut out, &mut queue, (p, q));
            for a in 0..self.alphabet as Symbol {
                let q2 = d.delta[q][a as usize];
                for &p2 in self.targets(p, a) {
                    let to = intern(&mut out, &mut queue, (p2, q2));
                    out.add_transition(from, a, to);
                }
            }
        }
        Ok(out)
    }

    /// Emptiness by plain reachability.
    pub fn is_empty(&self) -> bool {
        let mut seen = vec![false; self.state_count()];
        let mut stack: Vec<StateId> = self.initial.clone();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            if self.accepting[s] {
                return false;
            }
            for a in 0..self.alphabet {
                for &t in &self.trans[s][a] {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        true
    }

    /// Length-lexicographically least accepted word, by breadth-first search
    /// over subsets.
    pub fn least_word(&self) -> Option<Word> {
        if self.is_empty() {
            return None;
        }
        let mut index: HashMap<Vec<StateId>, usize> = HashMap::new();
        let mut parent: Vec<Option<(usize, Symbol)>> = vec![None];
        let mut sets = vec![self.initial.clone()];
        index.insert(self.initial.clone(), 0);
        let accepting = |set: &[StateId]| set.iter().any(|&s| self.accepting[s]);
        if accepting(&sets[0]) {
            return Some(Vec::new());
        }
        let mut i = 0;
        while i < sets.len() {
            for a in 0..self.alphabet as Symbol {
                let next = self.step_set(&sets[i], a);
                if next.is_empty() || index.contains_key(&next) {
                    continue;
                }
                let id = sets.len();
                index.insert(next.clone(), id);
                parent.push(Some((i, a)));
                if accepting(&next) {
                    return Some(trace_back(&parent, id));
                }
                sets.push(next);
            }
            i += 1;
        }
        None
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        let _ = writeln!(out, "  rankdir=LR;");
        for s in 0..self.state_count() {
            let shape = if self.accepting[s] { "doublecircle" } else { "circle" };
            let label = self.names[s].clone().unwrap_or_else(|| s.to_string());
            let _ = writeln!(out, "  q{s} [shape={shape}, label=\"{}\"];", escape(&label));
        }
        for &i in &self.initial {
            let _ = writeln!(out, "  init{i} [shape=point];\n  init{i} -> q{i};");
        }
        write_edges(&mut out, self.state_count(), self.alphabet, |s, a| self.trans[s][a].clone());
        out.push_str("}\n");
        out
    }
}

/// A complete deterministic automaton.
#[derive(Clone, Debug)]
pub struct Dfa {
    alphabet: usize,
    delta: Vec<Vec<StateId>>,
    start: StateId,
    accepting: Vec<bool>,
    names: Vec<String>,
}

/// Outcome of a language comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LanguageComparison {
    Equal,
    /// Length-lexicographically least word accepted by exactly one side.
    Counterexample(Word),
}

impl Dfa {
    pub fn new(alphabet: usize, delta: Vec<Vec<StateId>>, start: StateId, accepting: Vec<bool>) -> Result<Self> {
        let n = delta.len();
        if start >= n || accepting.len() != n {
            return Err(Error::InvalidRule("malformed DFA".into()));
        }
        if delta.iter().any(|row| row.len() != alphabet || row.iter().any(|&t| t >= n)) {
            return Err(Error::InvalidRule("DFA transition table is not total".into()));
        }
        let names = (0..n).map(|s| s.to_string()).collect();
        Ok(Dfa { alphabet, delta, start, accepting, names })
    }

    /// Accepts every word.
    pub fn universal(alphabet: usize) -> Self {
        Dfa { alphabet, delta: vec![vec![0; alphabet]], start: 0, accepting: vec![true], names: vec!["Σ*".into()] }
    }

    /// Accepts every non-empty word.
    pub fn non_empty_words(alphabet: usize) -> Self {
        Dfa {
            alphabet,
            delta: vec![vec![1; alphabet], vec![1; alphabet]],
            start: 0,
            accepting: vec![false, true],
            names: vec!["ε".into(), "Σ+".into()],
        }
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn next(&self, state: StateId, symbol: Symbol) -> StateId {
        self.delta[state][symbol as usize]
    }

    pub fn is_accepting(&self, state: StateId) -> bool {
        self.accepting[state]
    }

    pub fn name(&self, state: StateId) -> &str {
        &self.names[state]
    }

    pub fn run_from(&self, state: StateId, w: &[Symbol]) -> StateId {
        w.iter().fold(state, |s, &a| self.next(s, a))
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        self.accepting[self.run_from(self.start, w)]
    }

    pub fn complement(&self) -> Dfa {
        Dfa { accepting: self.accepting.iter().map(|&b| !b).collect(), ..self.clone() }
    }

    fn product(&self, other: &Dfa, keep: impl Fn(bool, bool) -> bool) -> Result<Dfa> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(self.alphabet, other.alphabet));
        }
        let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
        let mut pairs = vec![(self.start, other.start)];
        index.insert(pairs[0], 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let mut row = Vec::with_capacity(self.alphabet);
            for a in 0..self.alphabet {
                let pair = (self.delta[p][a], other.delta[q][a]);
                let id = *index.entry(pair).or_insert_with(|| {
                    pairs.push(pair);
                    pairs.len() - 1
                });
                row.push(id);
            }
            delta.push(row);
            i += 1;
        }
        let accepting = pairs.iter().map(|&(p, q)| keep(self.accepting[p], other.accepting[q])).collect();
        let names = pairs.iter().map(|&(p, q)| format!("({},{})", self.names[p], other.names[q])).collect();
        Ok(Dfa { alphabet: self.alphabet, delta, start: 0, accepting, names })
    }

    pub fn intersect(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &Dfa) -> Result<Dfa> {
        self.product(other, |a, b| a && !b)
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        seen[self.start] = true;
        let mut stack = vec![self.start];
        while let Some(s) = stack.pop() {
            for &t in &self.delta[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// States from which an accepting state is reachable.
    fn coreachable(&self) -> Vec<bool> {
        let n = self.state_count();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for s in 0..n {
            for &t in &self.delta[s] {
                rev[t].push(s);
            }
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<StateId> = (0..n).filter(|&s| seen[s]).collect();
        while let Some(t) = stack.pop() {
            for &s in &rev[t] {
                if !seen[s] {
                    seen[s] = true;
                    stack.push(s);
                }
            }
        }
        seen
    }

    pub fn is_empty(&self) -> bool {
        let reach = self.reachable();
        !(0..self.state_count()).any(|s| reach[s] && self.accepting[s])
    }

    /// Finite iff the trim part (reachable and co-reachable) is acyclic.
    pub fn is_finite(&self) -> bool {
        self.useful_cycle_state().is_none()
    }

    /// Some trim state lying on a cycle of the trim part.
    pub(crate) fn useful_cycle_state(&self) -> Option<StateId> {
        let n = self.state_count();
        let reach = self.reachable();
        let co = self.coreachable();
        let useful: Vec<bool> = (0..n).map(|s| reach[s] && co[s]).collect();
        // Kahn's algorithm on the useful subgraph; leftovers lie on or after cycles.
        let mut indeg = vec![0usize; n];
        for s in (0..n).filter(|&s| useful[s]) {
            for &t in &self.delta[s] {
                if useful[t] {
                    indeg[t] += 1;
                }
            }
        }
        let mut queue: VecDeque<StateId> = (0..n).filter(|&s| useful[s] && indeg[s] == 0).collect();
        let mut removed = vec![false; n];
        while let Some(s) = queue.pop_front() {
            removed[s] = true;
            for &t in &self.delta[s] {
                if useful[t] {
                    indeg[t] -= 1;
                    if indeg[t] == 0 {
                        queue.push_back(t);
                    }
                }
            }
        }
        (0..n).find(|&s| useful[s] && !removed[s] && self.on_cycle(s, &useful))
    }

    fn on_cycle(&self, s: StateId, allowed: &[bool]) -> bool {
        self.shortest_path(s, |t| t == s, allowed, true).is_some()
    }

    /// Shortest (then lexicographically least) word leading from `from` to a
    /// state satisfying `goal`, through `allowed` states only; with
    /// `nonempty` the empty word does not count.
    pub(crate) fn shortest_path(
        &self,
        from: StateId,
        goal: impl Fn(StateId) -> bool,
        allowed: &[bool],
        nonempty: bool,
    ) -> Option<Word> {
        if !nonempty && goal(from) {
            return Some(Vec::new());
        }
        let n = self.state_count();
        let mut parent: Vec<Option<(StateId, Symbol)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(s) = queue.pop_front() {
            for a in 0..self.alphabet as Symbol {
                let t = self.delta[s][a as usize];
                if !allowed[t] {
                    continue;
                }
                if goal(t) {
                    let mut w = vec![a];
                    let mut cur = s;
                    while cur != from {
                        let (p, b) = parent[cur].expect("visited state has a parent");
                        w.push(b);
                        cur = p;
                    }
                    w.reverse();
                    return Some(w);
                }
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((s, a));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Length-lexicographically least accepted word.
    pub fn least_word(&self) -> Option<Word> {
        let all = vec![true; self.state_count()];
        self.shortest_path(self.start, |s| self.accepting[s], &all, false)
    }

    /// `Equal`, or the length-lex least word in the symmetric difference.
    pub fn language_equal(&self, other: &Dfa) -> Result<LanguageComparison> {
        let xor = self.product(other, |a, b| a != b)?;
        Ok(match xor.least_word() {
            None => LanguageComparison::Equal,
            Some(w) => LanguageComparison::Counterexample(w),
        })
    }

    /// Every accepted word of length at most `max_len`, ordered by length
    /// and then lexicographically.
    pub fn enumerate(&self, max_len: usize) -> Vec<Word> {
        let n = self.state_count();
        // live[k][s]: some word of length exactly k leads from s to acceptance.
        let mut live = vec![self.accepting.clone()];
        for k in 1..=max_len {
            let prev = &live[k - 1];
            let row = (0..n).map(|s| self.delta[s].iter().any(|&t| prev[t])).collect();
            live.push(row);
        }
        let mut out = Vec::new();
        for len in 0..=max_len {
            let mut prefix = Vec::with_capacity(len);
            self.enumerate_rec(self.start, len, &live, &mut prefix, &mut out);
        }
        out
    }

    fn enumerate_rec(&self, s: StateId, remaining: usize, live: &[Vec<bool>], prefix: &mut Word, out: &mut Vec<Word>) {
        if !live[remaining][s] {
            return;
        }
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for a in 0..self.alphabet as Symbol {
            prefix.push(a);
            self.enumerate_rec(self.delta[s][a as usize], remaining - 1, live, prefix, out);
            prefix.pop();
        }
    }

    pub fn to_nfa(&self) -> Nfa {
        let mut nfa = Nfa::new(self.alphabet);
        for s in 0..self.state_count() {
            nfa.add_state(self.accepting[s], Some(self.names[s].clone()));
        }
        for s in 0..self.state_count() {
            for a in 0..self.alphabet {
                nfa.add_transition(s, a as Symbol, self.delta[s][a]);
            }
        }
        nfa.set_initial(self.start);
        nfa
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        let _ = writeln!(out, "  rankdir=LR;");
        for s in 0..self.state_count() {
            let shape = if self.accepting[s] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{s} [shape={shape}, label=\"{}\"];", escape(&self.names[s]));
        }
        let _ = writeln!(out, "  init [shape=point];\n  init -> q{};", self.start);
        write_edges(&mut out, self.state_count(), self.alphabet, |s, a| vec![self.delta[s][a]]);
        out.push_str("}\n");
        out
    }
}

fn trace_back(parent: &[Option<(usize, Symbol)>], mut id: usize) -> Word {
    let mut w = Vec::new();
    while let Some((p, a)) = parent[id] {
        w.push(a);
        id = p;
    }
    w.reverse();
    w
}

/// Writes one edge per (source, target) pair, merging symbol labels.
fn write_edges(out: &mut String, states: usize, alphabet: usize, targets: impl Fn(usize, usize) -> Vec<StateId>) {
    for s in 0..states {
        let mut labels: Vec<(StateId, Vec<String>)> = Vec::new();
        for a in 0..alphabet {
            for t in targets(s, a) {
                match labels.iter_mut().find(|(x, _)| *x == t) {
                    Some((_, l)) => l.push(a.to_string()),
                    None => labels.push((t, vec![a.to_string()])),
                }
            }
        }
        for (t, l) in labels {
            let _ = writeln!(out, "  q{s} -> q{t} [label=\"{}\"];", l.join(","));
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
