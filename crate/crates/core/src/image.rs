//! The image subshift `f(X)` of a CA on a full shift.

use serde::Serialize;

use crate::automata::{de_bruijn_automaton, DeBruijnGraph, Dfa};
use crate::periodic::{apply_periodic, CyclicWord};
use crate::rule::{format_word, LocalRule, Symbol, Word};

/// DFA for the factor language of the image subshift.
pub fn image_language(rule: &LocalRule) -> Dfa {
    de_bruijn_automaton(rule).determinize()
}

pub fn is_surjective(rule: &LocalRule) -> bool {
    image_language(rule).complement().is_empty()
}

/// Evidence that a CA is not injective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NonInjectivity {
    /// Two distinct periodic points of the same period with the same image.
    PeriodicCollision { left: CyclicWord, right: CyclicWord },
    /// Two distinct words agreeing on their first and last `width - 1`
    /// cells with the same image.
    #[serde(serialize_with = "ser_diamond")]
    Diamond { left: Word, right: Word },
}

fn ser_diamond<S: serde::Serializer>(left: &Word, right: &Word, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Diamond", 2)?;
    st.serialize_field("left", &format_word(left))?;
    st.serialize_field("right", &format_word(right))?;
    st.end()
}

impl NonInjectivity {
    pub fn verify(&self, rule: &LocalRule) -> bool {
        match self {
            NonInjectivity::PeriodicCollision { left, right } => {
                left.len() == right.len() && left != right && apply_periodic(rule, left) == apply_periodic(rule, right)
            }
            NonInjectivity::Diamond { left, right } => {
                let b = rule.width() - 1;
                left.len() == right.len()
                    && left.len() >= rule.width()
                    && left != right
                    && left[..b] == right[..b]
                    && left[left.len() - b..] == right[right.len() - b..]
                    && rule.apply(left).ok() == rule.apply(right).ok()
            }
        }
    }
}

/// The pair graph: vertices are pairs of de Bruijn nodes, edges pairs of
/// edges with equal output.
struct PairGraph<'a> {
    graph: &'a DeBruijnGraph,
    /// succ[v] = (target, input pair) for vertex v = p * n + q.
    succ: Vec<Vec<(usize, (Symbol, Symbol))>>,
}

impl<'a> PairGraph<'a> {
    fn new(graph: &'a DeBruijnGraph) -> Self {
        let n = graph.node_count();
        let a = graph.alphabet() as Symbol;
        let mut succ = vec![Vec::new(); n * n];
        for p in 0..n {
            for q in 0..n {
                for b in 0..a {
                    let (p2, o1) = graph.step(p, b);
                    for c in 0..a {
                        let (q2, o2) = graph.step(q, c);
                        if o1 == o2 {
                            succ[p * n + q].push((p2 * n + q2, (b, c)));
                        }
                    }
                }
            }
        }
        PairGraph { graph, succ }
    }

    fn len(&self) -> usize {
        self.succ.len()
    }

    fn diagonal(&self, v: usize) -> bool {
        let n = self.graph.node_count();
        v / n == v % n
    }

    /// Shortest path from `from` to a vertex in `goal`, at least one edge.
    fn path(&self, from: usize, goal: impl Fn(usize) -> bool) -> Option<Vec<(usize, (Symbol, Symbol))>> {
        let mut parent: Vec<Option<(usize, (Symbol, Symbol))>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &(t, inputs) in &self.succ[v] {
                if goal(t) {
                    let mut path = vec![(t, inputs)];
                    let mut cur = v;
                    while cur != from {
                        let (p, i) = parent[cur].expect("visited");
                        path.push((cur, i));
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((v, inputs));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    fn on_cycle(&self) -> Vec<bool> {
        (0..self.len()).map(|v| self.path(v, |t| t == v).is_some()).collect()
    }

    fn reach_from(&self, sources: &[bool]) -> Vec<bool> {
        let mut seen = sources.to_vec();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&v| seen[v]).collect();
        while let Some(v) = stack.pop() {
            for &(t, _) in &self.succ[v] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    fn reach_to(&self, sinks: &[bool]) -> Vec<bool> {
        let mut rev = vec![Vec::new(); self.len()];
        for v in 0..self.len() {
            for &(t, _) in &self.succ[v] {
                rev[t].push(v);
            }
        }
        let mut seen = sinks.to_vec();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&v| seen[v]).collect();
        while let Some(t) = stack.pop() {
            for &v in &rev[t] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// `None` when the CA is injective, otherwise a checkable witness.
///
/// Two distinct points with equal images are a bi-infinite path in the pair
/// graph through an off-diagonal vertex. Either that path meets a cycle with
/// an off-diagonal vertex, which yields distinct periodic points with equal
/// images, or both of its tails are diagonal, which yields a diamond.
pub fn non_injectivity_witness(rule: &LocalRule) -> Option<NonInjectivity> {
    let graph = DeBruijnGraph::new(rule);
    let pg = PairGraph::new(&graph);
    let cyc = pg.on_cycle();
    let n = graph.node_count();
    let lo = graph.rule().neighborhood().0 as i64;
    // A cycle through an off-diagonal vertex.
    if let Some(v) = (0..pg.len()).find(|&v| cyc[v] && !pg.diagonal(v)) {
        let path = pg.path(v, |t| t == v).expect("on a cycle");
        let q = path.len();
        // Vertex i of the cycle is the window starting at cell i + lo.
        let mut verts = vec![v];
        verts.extend(path.iter().take(q - 1).map(|&(t, _)| t));
        let mut left = vec![0; q];
        let mut right = vec![0; q];
        for (i, &u) in verts.iter().enumerate() {
            let cell = (i as i64 + lo).rem_euclid(q as i64) as usize;
            left[cell] = graph.first_symbol(u / n);
            right[cell] = graph.first_symbol(u % n);
        }
        return Some(NonInjectivity::PeriodicCollision {
            left: CyclicWord::new(left).expect("non-empty"),
            right: CyclicWord::new(right).expect("non-empty"),
        });
    }
    let diag_cycle: Vec<bool> = (0..pg.len()).map(|v| cyc[v] && pg.diagonal(v)).collect();
    for start in (0..pg.len()).filter(|&v| diag_cycle[v]) {
        // Off-diagonal vertex reachable from `start` that reaches a diagonal cycle.
        let back = pg.reach_to(&diag_cycle);
        let Some(first) = pg.path(start, |t| !pg.diagonal(t) && back[t]) else {
            continue;
        };
        let mid = first.last().expect("non-empty").0;
        let second = pg.path(mid, |t| diag_cycle[t]).expect("reaches a diagonal cycle");
        let mut left = graph.node_word(start / n);
        let mut right = graph.node_word(start % n);
        for &(_, (b, c)) in first.iter().chain(second.iter()) {
            left.push(b);
            right.push(c);
        }
        return Some(NonInjectivity::Diamond { left, right });
    }
    None
}

pub fn is_injective(rule: &LocalRule) -> bool {
    let graph = DeBruijnGraph::new(rule);
    let pg = PairGraph::new(&graph);
    let cyc = pg.on_cycle();
    let from = pg.reach_from(&cyc);
    let to = pg.reach_to(&cyc);
    !(0..pg.len()).any(|v| !pg.diagonal(v) && from[v] && to[v])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ImageKind {
    FullShift,
    #[serde(rename = "SFT")]
    Sft,
    ProperSofic,
}

/// Words `u, v, w` with `u v^n` and `v^n w` in the language for every `n`
/// but `u v^n w` in it for no `n`: a certificate that the image is not of
/// finite type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub u: Word,
    pub v: Word,
    pub w: Word,
}

impl Serialize for Lasso {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Lasso", 3)?;
        st.serialize_field("u", &format_word(&self.u))?;
        st.serialize_field("v", &format_word(&self.v))?;
        st.serialize_field("w", &format_word(&self.w))?;
        st.end()
    }
}

impl Lasso {
    /// Exact check against a DFA for the language. The state sequences
    /// `δ(q, v^n)` are eventually periodic within `|states|` steps, so
    /// `n ≤ |states|` covers every `n`.
    pub fn verify(&self, language: &Dfa) -> bool {
        if self.v.is_empty() {
            return false;
        }
        let mut left = language.run_from(language.start(), &self.u);
        let mut bare = language.start();
        for _ in 0..=language.state_count() {
            let with_w = language.run_from(left, &self.w);
            let tail = language.run_from(bare, &self.w);
            if !language.is_accepting(left) || !language.is_accepting(tail) || language.is_accepting(with_w) {
                return false;
            }
            left = language.run_from(left, &self.v);
            bare = language.run_from(bare, &self.v);
        }
        true
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageClassification {
    pub kind: ImageKind,
    /// The first offenders (minimal forbidden words) when `kind` is `Sft`;
    /// empty otherwise.
    #[serde(serialize_with = "ser_words")]
    pub offenders: Vec<Word>,
    /// Present when `kind` is `ProperSofic`.
    pub lasso: Option<Lasso>,
    pub evidence: String,
}

fn ser_words<S: serde::Serializer>(words: &[Word], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(words.iter().map(|w| format_word(w)))
}

/// DFA for the first offenders `B \ (Σ⁺B ∪ BΣ⁺)`, where `B` is the set of
/// words outside the image language.
pub fn offender_dfa(rule: &LocalRule) -> Dfa {
    let image = image_language(rule);
    let bad = image.complement();
    let bad_nfa = bad.to_nfa();
    let plus = Dfa::non_empty_words(rule.alphabet()).to_nfa();
    let extended_left = plus.concat(&bad_nfa).expect("same alphabet").determinize();
    let extended_right = bad_nfa.concat(&plus).expect("same alphabet").determinize();
    let extended = extended_left.union(&extended_right).expect("same alphabet");
    bad.difference(&extended).expect("same alphabet")
}

pub fn classify_image(rule: &LocalRule) -> ImageClassification {
    let image = image_language(rule);
    if image.complement().is_empty() {
        return ImageClassification {
            kind: ImageKind::FullShift,
            offenders: Vec::new(),
            lasso: None,
            evidence: "every word has a preimage".into(),
        };
    }
    let offenders = offender_dfa(rule);
    if offenders.is_finite() {
        // Any offender is shorter than the number of states.
        let words = offenders.enumerate(offenders.state_count());
        let evidence = format!("{} first offenders", words.len());
        return ImageClassification { kind: ImageKind::Sft, offenders: words, lasso: None, evidence };
    }
    let lasso = offender_lasso(&offenders).expect("infinite offender language has a pumpable cycle");
    debug_assert!(lasso.verify(&image));
    let evidence = format!(
        "u v^n and v^n w are allowed for all n, u v^n w never is (u={}, v={}, w={})",
        format_word(&lasso.u),
        format_word(&lasso.v),
        format_word(&lasso.w)
    );
    ImageClassification { kind: ImageKind::ProperSofic, offenders: Vec::new(), lasso: Some(lasso), evidence }
}

/// Pumps the offender DFA: offenders `x y^k z` for all `k` give the lasso
/// `(xy, y, yz)`.
fn offender_lasso(offenders: &Dfa) -> Option<Lasso> {
    let s = offenders.useful_cycle_state()?;
    let all = vec![true; offenders.state_count()];
    let x = offenders.shortest_path(offenders.start(), |t| t == s, &all, false)?;
    let y = offenders.shortest_path(s, |t| t == s, &all, true)?;
    let z = offenders.shortest_path(s, |t| offenders.is_accepting(t), &all, false)?;
    let mut u = x;
    u.extend_from_slice(&y);
    let mut w = y.clone();
    w.extend_from_slice(&z);
    Some(Lasso { u, v: y, w })
}

/// Image words of length `1..=max_len` that pin the de Bruijn state at some
/// position: every path carrying the word passes through one and the same
/// node there.
pub fn find_synchronizing_words(rule: &LocalRule, max_len: usize) -> Vec<Word> {
    let graph = DeBruijnGraph::new(rule);
    image_language(rule)
        .enumerate(max_len)
        .into_iter()
        .filter(|w| !w.is_empty() && pins_state(&graph, w))
        .collect()
}

fn pins_state(graph: &DeBruijnGraph, word: &[Symbol]) -> bool {
    let n = graph.node_count();
    let a = graph.alphabet() as Symbol;
    let mut forward = vec![vec![true; n]];
    for &y in word {
        let prev = forward.last().expect("non-empty");
        let mut next = vec![false; n];
        for s in (0..n).filter(|&s| prev[s]) {
            for t in graph.successors_with_label(s, y) {
                next[t] = true;
            }
        }
        forward.push(next);
    }
    let mut alive = vec![true; n];
    for i in (0..=word.len()).rev() {
        let on_path: Vec<bool> = (0..n).map(|s| forward[i][s] && alive[s]).collect();
        if on_path.iter().filter(|&&b| b).count() == 1 {
            return true;
        }
        if i > 0 {
            alive = (0..n)
                .map(|s| (0..a).any(|b| {
                    let (t, out) = graph.step(s, b);
                    out == word[i - 1] && on_path[t]
                }))
                .collect();
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::{all_words, parse_word};

    fn eca(n: u32) -> LocalRule {
        LocalRule::eca(n).unwrap()
    }

    fn words(list: &[&str]) -> Vec<Word> {
        list.iter().map(|s| parse_word(s).unwrap()).collect()
    }

    #[test]
    fn image_language_examples() {
        assert!(image_language(&eca(102)).complement().is_empty());
        let zero = image_language(&eca(0));
        assert_eq!(zero.enumerate(2), words(&["", "0", "00"]));
        let d28 = image_language(&eca(28));
        assert!(!d28.accepts(&parse_word("111").unwrap()));
    }

    #[test]
    fn surjectivity() {
        assert!(is_surjective(&eca(102)));
        assert!(is_surjective(&LocalRule::identity(2)));
        assert!(!is_surjective(&eca(9)));
        // 1011 has no preimage of length 6.
        let f = eca(9);
        let target = parse_word("1011").unwrap();
        assert!(all_words(2, 6).all(|u| f.apply(&u).unwrap() != target));
    }

    #[test]
    fn injectivity() {
        assert!(is_injective(&eca(170)));
        assert!(is_injective(&LocalRule::identity(2)));
        assert!(!is_injective(&eca(102)));
        assert!(!is_injective(&eca(28)));
        assert!(non_injectivity_witness(&eca(170)).is_none());
        let xor = non_injectivity_witness(&eca(102)).unwrap();
        assert!(matches!(xor, NonInjectivity::PeriodicCollision { .. }));
        assert!(xor.verify(&eca(102)));
    }

    #[test]
    fn eca28_has_brute_force_diamond() {
        // Two length-6 words with equal two-cell borders and equal images.
        let f = eca(28);
        let found = all_words(2, 6).any(|u| {
            all_words(2, 6).any(|v| {
                u != v && u[..2] == v[..2] && u[4..] == v[4..] && f.apply(&u).unwrap() == f.apply(&v).unwrap()
            })
        });
        assert!(found);
        assert!(non_injectivity_witness(&f).unwrap().verify(&f));
    }

    #[test]
    fn classification_examples() {
        let c9 = classify_image(&eca(9));
        assert_eq!(c9.kind, ImageKind::Sft);
        assert_eq!(c9.offenders, words(&["1011", "10101", "11001", "11000011", "110000101"]));
        let c28 = classify_image(&eca(28));
        assert_eq!(c28.kind, ImageKind::Sft);
        assert_eq!(c28.offenders, words(&["111"]));
        for n in [27, 41, 58] {
            let c = classify_image(&eca(n));
            assert_eq!(c.kind, ImageKind::ProperSofic, "ECA {n}");
            assert!(c.lasso.unwrap().verify(&image_language(&eca(n))));
        }
        assert_eq!(classify_image(&eca(102)).kind, ImageKind::FullShift);
        assert_eq!(offender_dfa(&eca(28)).enumerate(5), words(&["111"]));
        let f9_offenders = offender_dfa(&eca(9));
        assert!(f9_offenders.is_finite());
        assert_eq!(f9_offenders.enumerate(f9_offenders.state_count()).len(), 5);
    }

    #[test]
    fn synchronizing_words() {
        let sync27 = find_synchronizing_words(&eca(27), 4);
        assert!(sync27.contains(&parse_word("0100").unwrap()));
        let sync41 = find_synchronizing_words(&eca(41), 3);
        assert!(sync41.contains(&parse_word("111").unwrap()));
        let id = find_synchronizing_words(&LocalRule::identity(2), 4);
        assert_eq!(id.len(), 2 + 4 + 8 + 16);
    }

    #[test]
    fn lasso_verification_rejects_bad_triples() {
        let d = image_language(&eca(27));
        let bogus = Lasso { u: vec![0], v: vec![0], w: vec![0] };
        assert!(!bogus.verify(&d));
    }
    #[test]
    fn orphans_agree_with_brute_force() {
        for n in 0..256 {
            let f = eca(n);
            let d = image_language(&f);
            for len in 1..=7 {
                let image: std::collections::BTreeSet<Word> =
                    all_words(2, len + 2).map(|u| f.apply(&u).unwrap()).collect();
                for w in all_words(2, len) {
                    assert_eq!(d.accepts(&w), image.contains(&w), "ECA {n} word {}", format_word(&w));
                }
            }
        }
    }

    #[test]
    fn injective_ecas_are_shifts_and_flips() {
        let injective: Vec<u32> = (0..256).filter(|&n| is_injective(&eca(n))).collect();
        assert_eq!(injective, vec![15, 51, 85, 170, 204, 240]);
        for n in 0..256 {
            let f = eca(n);
            match non_injectivity_witness(&f) {
                None => assert!(is_injective(&f)),
                Some(w) => assert!(w.verify(&f), "ECA {n}"),
            }
        }
    }

    #[test]
    fn offenders_are_minimal_orphans() {
        for n in 0..256 {
            let f = eca(n);
            let c = classify_image(&f);
            assert_eq!(is_surjective(&f), c.kind == ImageKind::FullShift);
            let d = image_language(&f);
            for o in &c.offenders {
                assert!(!d.accepts(o));
                assert!(d.accepts(&o[1..]) && d.accepts(&o[..o.len() - 1]));
            }
            if let Some(l) = &c.lasso {
                assert!(l.verify(&d), "ECA {n}");
            }
        }
    }
}
