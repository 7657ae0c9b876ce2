//! Periodic points: cyclic words, their images and aligned preimages, and
//! the weak periodic point condition.
//!
//! A [`CyclicWord`] `u` stands for the point `u^Z` whose cells `[0, |u|)`
//! spell `u`. Operations here keep that phase: position `i` of a result is
//! cell `i` of the corresponding point.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::automata::{DeBruijnGraph, Nfa};
use crate::error::{Error, Result};
use crate::rule::{format_word, parse_word, LocalRule, Symbol, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    rep: Word,
}

impl CyclicWord {
    pub fn new(rep: Word) -> Result<Self> {
        if rep.is_empty() {
            return Err(Error::InvalidWord("a periodic point needs a non-empty word".into()));
        }
        Ok(CyclicWord { rep })
    }

    /// Parses `010`, `(010)` or `(010)^Z`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_suffix("^Z").unwrap_or(t);
        let t = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
        Self::new(parse_word(t)?)
    }

    pub fn rep(&self) -> &[Symbol] {
        &self.rep
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell `i` of the point, for any integer `i`.
    pub fn at(&self, i: i64) -> Symbol {
        self.rep[i.rem_euclid(self.rep.len() as i64) as usize]
    }

    /// `σ^k` applied to the point: the representative starting at cell `k`.
    pub fn rotate(&self, k: usize) -> CyclicWord {
        let q = self.len();
        CyclicWord { rep: (0..q).map(|i| self.rep[(i + k) % q]).collect() }
    }

    /// Lexicographically least rotation.
    pub fn canonical(&self) -> CyclicWord {
        (0..self.len()).map(|k| self.rotate(k)).min().expect("non-empty")
    }

    /// Both words represent points of the same shift orbit.
    pub fn same_orbit(&self, other: &CyclicWord) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Least period of the point.
    pub fn least_period(&self) -> usize {
        let q = self.len();
        (1..=q)
            .find(|&d| q.is_multiple_of(d) && (0..q).all(|i| self.rep[i] == self.rep[i % d]))
            .expect("q always works")
    }

    pub fn is_primitive(&self) -> bool {
        self.least_period() == self.len()
    }

    /// The same point written with a representative of length `q`.
    pub fn repeat_to(&self, q: usize) -> CyclicWord {
        debug_assert_eq!(q % self.len(), 0);
        CyclicWord { rep: (0..q).map(|i| self.rep[i % self.len()]).collect() }
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})^Z", format_word(&self.rep))
    }
}

impl serde::Serialize for CyclicWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Lyndon words of length `1..=max_len` over `0..alphabet`, grouped by
/// length and lexicographic within each length. These are the canonical
/// representatives of primitive periodic orbits.
pub fn lyndon_words(alphabet: usize, max_len: usize) -> Vec<CyclicWord> {
    let mut out: Vec<Word> = Vec::new();
    if max_len == 0 {
        return Vec::new();
    }
    // Duval's generation in lexicographic order.
    let top = (alphabet - 1) as Symbol;
    let mut w: Vec<i32> = vec![-1];
    while !w.is_empty() {
        *w.last_mut().expect("non-empty") += 1;
        out.push(w.iter().map(|&s| s as Symbol).collect());
        let m = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - m]);
        }
        while w.last().is_some_and(|&s| s == top as i32) {
            w.pop();
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out.into_iter().map(|rep| CyclicWord { rep }).collect()
}

/// `f(x^Z)`, written in the same phase and length as `x`.
pub fn apply_periodic(rule: &LocalRule, x: &CyclicWord) -> CyclicWord {
    let (lo, hi) = rule.neighborhood();
    let q = x.len() as i64;
    let mut window = Vec::with_capacity(rule.width());
    let rep = (0..q)
        .map(|i| {
            window.clear();
            window.extend((lo..=hi).map(|k| x.at(i + k as i64)));
            rule.output(&window)
        })
        .collect();
    CyclicWord { rep }
}

/// Closed walks of length `q` in the de Bruijn graph labelled `y^{q/|y|}`,
/// i.e. the `q`-periodic points mapped onto `y^Z`.
struct CycleSearch<'a> {
    graph: &'a DeBruijnGraph,
    labels: Vec<Symbol>,
}

impl<'a> CycleSearch<'a> {
    fn new(graph: &'a DeBruijnGraph, y: &CyclicWord, q: usize) -> Self {
        CycleSearch { graph, labels: (0..q).map(|i| y.at(i as i64)).collect() }
    }

    /// back[i]: nodes from which `start` is reachable reading labels[i..].
    fn backward(&self, start: usize) -> Vec<Vec<bool>> {
        let n = self.graph.node_count();
        let q = self.labels.len();
        let mut back = vec![vec![false; n]; q + 1];
        back[q][start] = true;
        for i in (0..q).rev() {
            for u in 0..n {
                back[i][u] = self.graph.successors_with_label(u, self.labels[i]).any(|t| back[i + 1][t]);
            }
        }
        back
    }

    fn exists(&self) -> bool {
        (0..self.graph.node_count()).any(|s| self.backward(s)[0][s])
    }

    /// All preimages, as the cells `[0, q)` of the periodic point.
    fn all(&self) -> Vec<Word> {
        let q = self.labels.len();
        let lo = self.graph.rule().neighborhood().0 as i64;
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(q + 1);
        for s in 0..self.graph.node_count() {
            let back = self.backward(s);
            if !back[0][s] {
                continue;
            }
            path.clear();
            path.push(s);
            self.walk(&back, &mut path, &mut |nodes| {
                // Node i starts at cell i + lo.
                let mut x = vec![0; q];
                for (i, &v) in nodes[..q].iter().enumerate() {
                    x[(i as i64 + lo).rem_euclid(q as i64) as usize] = self.graph.first_symbol(v);
                }
                out.push(x);
            });
        }
        out.sort();
        out.dedup();
        out
    }

    fn walk(&self, back: &[Vec<bool>], path: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
        let i = path.len() - 1;
        if i == self.labels.len() {
            emit(path);
            return;
        }
        let u = path[i];
        let succ: Vec<usize> = self.graph.successors_with_label(u, self.labels[i]).collect();
        for t in succ {
            if back[i + 1][t] {
                path.push(t);
                self.walk(back, path, emit);
                path.pop();
            }
        }
    }
}

fn check_period(y: &CyclicWord, q: usize) -> Result<()> {
    if q == 0 || !q.is_multiple_of(y.len()) {
        return Err(Error::InvalidWord(format!("period {q} is not a multiple of |{y}| = {}", y.len())));
    }
    Ok(())
}

/// Every word `u` of length `q` with `f(u^Z) = y^Z` cell for cell,
/// sorted lexicographically.
pub fn periodic_preimages(rule: &LocalRule, y: &CyclicWord, q: usize) -> Result<Vec<Word>> {
    check_period(y, q)?;
    let graph = DeBruijnGraph::new(rule);
    Ok(CycleSearch::new(&graph, y, q).all())
}

pub fn has_periodic_preimage(rule: &LocalRule, y: &CyclicWord, q: usize) -> Result<bool> {
    check_period(y, q)?;
    let graph = DeBruijnGraph::new(rule);
    Ok(CycleSearch::new(&graph, y, q).exists())
}

/// `y^Z` lies in the image: some preimage has period `k|y|` with `k` at
/// most the number of de Bruijn nodes.
pub fn in_periodic_image(rule: &LocalRule, y: &CyclicWord) -> bool {
    let graph = DeBruijnGraph::new(rule);
    (1..=graph.node_count()).any(|k| CycleSearch::new(&graph, y, k * y.len()).exists())
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum WppResult {
    Holds,
    /// A periodic point of the image with no preimage of the same period,
    /// as its canonical representative.
    Fails { witness: CyclicWord },
}

impl WppResult {
    pub fn holds(&self) -> bool {
        matches!(self, WppResult::Holds)
    }
}

/// NFA for `{v ≠ ε : some u with |u| = |v| has f(u^Z) = v^Z}`: a closed
/// walk of length `|v|` in the de Bruijn graph labelled `v`. States are
/// pairs (start node, current node) plus one fresh initial state per node.
pub fn same_period_nfa(rule: &LocalRule) -> Nfa {
    let graph = DeBruijnGraph::new(rule);
    let n = graph.node_count();
    let a = graph.alphabet();
    let mut nfa = Nfa::new(a);
    let pair = |s: usize, c: usize| n + s * n + c;
    for s in 0..n {
        let id = nfa.add_state(false, Some(format!("start {}", format_word(&graph.node_word(s)))));
        nfa.set_initial(id);
    }
    for s in 0..n {
        for c in 0..n {
            let name = format!("{}→{}", format_word(&graph.node_word(s)), format_word(&graph.node_word(c)));
            nfa.add_state(s == c, Some(name));
        }
    }
    for s in 0..n {
        for b in 0..a as Symbol {
            let (t, out) = graph.step(s, b);
            nfa.add_transition(s, out, pair(s, t));
        }
        for c in 0..n {
            for b in 0..a as Symbol {
                let (t, out) = graph.step(c, b);
                nfa.add_transition(pair(s, c), out, pair(s, t));
            }
        }
    }
    nfa
}

/// Simple cycles `s_0 → … → s_{k-1} → s_0` on `n` nodes with `s_0` least.
fn canonical_cycles(n: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        for v in cur[0] + 1..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                extend(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut used = vec![false; n];
        used[s] = true;
        extend(n, &mut vec![s], &mut used, &mut out);
    }
    out
}

/// NFA for `{v ≠ ε : v^Z is in the image}`: `v^k` labels a closed walk for
/// some `k` up to the node count. For each simple cycle of nodes
/// `s_0, …, s_{k-1}` it reads `v` along `k` parallel walks and accepts when
/// walk `i` has moved from `s_i` to `s_{i+1 mod k}`. Only reachable tuple
/// states are built.
pub fn image_periodic_nfa(rule: &LocalRule) -> Nfa {
    let graph = DeBruijnGraph::new(rule);
    let a = graph.alphabet();
    let cycles = canonical_cycles(graph.node_count());
    let mut nfa = Nfa::new(a);
    let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    let mut queue: VecDeque<(usize, Vec<usize>)> = VecDeque::new();
    let names = |tuple: &[usize]| -> String {
        tuple.iter().map(|&v| format_word(&graph.node_word(v))).collect::<Vec<_>>().join(" ")
    };
    let mut intern = |nfa: &mut Nfa, queue: &mut VecDeque<(usize, Vec<usize>)>, c: usize, tuple: Vec<usize>| -> usize {
        let key = (c, tuple);
        if let Some(&id) = index.get(&key) {
            return id;
        }
        let cyc = &cycles[c];
        let k = cyc.len();
        let accepting = (0..k).all(|i| key.1[i] == cyc[(i + 1) % k]);
        let id = nfa.add_state(accepting, Some(format!("[{}] {}", names(cyc), names(&key.1))));
        queue.push_back(key.clone());
        index.insert(key, id);
        id
    };
    let mut initial = Vec::new();
    for (c, cyc) in cycles.iter().enumerate() {
        let id = nfa.add_state(false, Some(format!("start [{}]", names(cyc))));
        nfa.set_initial(id);
        initial.push((id, c, cyc.clone()));
    }
    let step_tuple = |tuple: &[usize], label: Symbol| -> Vec<Vec<usize>> {
        let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
        for &v in tuple {
            let succ: Vec<usize> = graph.successors_with_label(v, label).collect();
            acc = acc
                .into_iter()
                .flat_map(|prefix| {
                    succ.iter().map(move |&t| {
                        let mut p = prefix.clone();
                        p.push(t);
                        p
                    })
                })
                .collect();
        }
        acc
    };
    for (id, c, cyc) in initial {
        for label in 0..a as Symbol {
            for next in step_tuple(&cyc, label) {
                let to = intern(&mut nfa, &mut queue, c, next);
                nfa.add_transition(id, label, to);
            }
        }
    }
    while let Some((c, tuple)) = queue.pop_front() {
        let from = intern(&mut nfa, &mut queue, c, tuple.clone());
        for label in 0..a as Symbol {
            for next in step_tuple(&tuple, label) {
                let to = intern(&mut nfa, &mut queue, c, next);
                nfa.add_transition(from, label, to);
            }
        }
    }
    nfa
}

/// Decides the weak periodic point condition: every periodic point of the
/// image has a preimage of the same period. On failure the witness is
/// the length-lex least word of `K \ L`, with `K` from
/// [`image_periodic_nfa`] and `L` from [`same_period_nfa`].
pub fn wpp_check(rule: &LocalRule) -> WppResult {
    let not_same_period = same_period_nfa(rule).determinize().complement();
    let k_minus_l = image_periodic_nfa(rule)
        .intersect_dfa(&not_same_period)
        .expect("same alphabet");
    if k_minus_l.is_empty() {
        return WppResult::Holds;
    }
    let w = k_minus_l.least_word().expect("non-empty language has a least word");
    WppResult::Fails { witness: CyclicWord { rep: w }.canonical() }
}

/// Brute-force WPP check over all primitive periodic points of period at
/// most `p_max`, by direct cycle search per point.
pub fn wpp_check_bounded(rule: &LocalRule, p_max: usize) -> WppResult {
    for v in lyndon_words(rule.alphabet(), p_max) {
        if in_periodic_image(rule, &v) && !has_periodic_preimage(rule, &v, v.len()).expect("q = |v|") {
            return WppResult::Fails { witness: v };
        }
    }
    WppResult::Holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::all_words;

    fn cw(s: &str) -> CyclicWord {
        CyclicWord::parse(s).unwrap()
    }

    fn eca(n: u32) -> LocalRule {
        LocalRule::eca(n).unwrap()
    }

    #[test]
    fn cyclic_word_basics() {
        let x = cw("(0110)^Z");
        assert_eq!(x.to_string(), "(0110)^Z");
        assert_eq!(x.canonical(), cw("0011"));
        assert_eq!(x.rotate(1), cw("1100"));
        assert_eq!(x.at(-1), 0);
        assert_eq!(cw("0101").least_period(), 2);
        assert!(CyclicWord::new(vec![]).is_err());
    }

    #[test]
    fn lyndon_words_match_brute_force() {
        for max in 1..=8 {
            let fast: Vec<CyclicWord> = lyndon_words(2, max);
            let mut brute = Vec::new();
            for q in 1..=max {
                for w in all_words(2, q) {
                    let c = CyclicWord::new(w).unwrap();
                    if c.is_primitive() && c.is_canonical() {
                        brute.push(c);
                    }
                }
            }
            assert_eq!(fast, brute);
        }
        assert_eq!(lyndon_words(3, 2).len(), 3 + 3);
    }

    #[test]
    fn apply_periodic_examples() {
        assert_eq!(apply_periodic(&eca(41), &cw("000101")), cw("010010"));
        assert_eq!(apply_periodic(&eca(41), &cw("000101")).canonical().least_period(), 3);
        assert_eq!(apply_periodic(&eca(9), &cw("0")), cw("1"));
        assert_eq!(apply_periodic(&eca(9), &cw("1")), cw("0"));
        // 0^Z is fixed by ECA 4.
        assert_eq!(apply_periodic(&eca(4), &cw("0")), cw("0"));
    }

    #[test]
    fn periodic_preimage_examples() {
        let w = |s: &str| parse_word(s).unwrap();
        assert_eq!(periodic_preimages(&eca(28), &cw("0"), 1).unwrap(), vec![w("0"), w("1")]);
        assert!(periodic_preimages(&eca(41), &cw("010"), 3).unwrap().is_empty());
        assert_eq!(periodic_preimages(&eca(102), &cw("1"), 2).unwrap(), vec![w("01"), w("10")]);
        assert!(periodic_preimages(&eca(102), &cw("01"), 3).is_err());
    }

    #[test]
    fn preimages_agree_with_brute_force() {
        for n in [6, 7, 9, 23, 27, 41, 57, 110] {
            let f = eca(n);
            for q in 1..=7 {
                for u in all_words(2, q) {
                    let y = CyclicWord::new(u).unwrap();
                    let brute: Vec<Word> = all_words(2, q)
                        .filter(|x| apply_periodic(&f, &CyclicWord::new(x.clone()).unwrap()) == y)
                        .collect();
                    assert_eq!(periodic_preimages(&f, &y, q).unwrap(), brute, "ECA {n} {y}");
                }
            }
        }
    }

    #[test]
    fn wpp_examples() {
        match wpp_check(&eca(41)) {
            WppResult::Fails { witness } => {
                assert!(witness.same_orbit(&cw("010")));
                assert_eq!(witness, cw("001"));
            }
            WppResult::Holds => panic!("ECA 41 fails WPP"),
        }
        for n in [9, 27, 28, 58] {
            assert_eq!(wpp_check(&eca(n)), WppResult::Holds, "ECA {n}");
        }
        assert_eq!(wpp_check_bounded(&eca(9), 6), WppResult::Holds);
        assert_eq!(wpp_check_bounded(&LocalRule::identity(2), 5), WppResult::Holds);
        assert_eq!(wpp_check_bounded(&eca(102), 1), WppResult::Fails { witness: cw("1") });
        assert_eq!(wpp_check(&eca(102)), WppResult::Fails { witness: cw("1") });
    }

    #[test]
    fn nfa_languages_match_direct_search() {
        for n in [9, 41, 102, 110] {
            let f = eca(n);
            let k = image_periodic_nfa(&f);
            let l = same_period_nfa(&f);
            for q in 1..=7 {
                for u in all_words(2, q) {
                    let y = CyclicWord::new(u.clone()).unwrap();
                    assert_eq!(k.accepts(&u), in_periodic_image(&f, &y));
                    assert_eq!(l.accepts(&u), has_periodic_preimage(&f, &y, q).unwrap());
                }
            }
        }
    }
}
