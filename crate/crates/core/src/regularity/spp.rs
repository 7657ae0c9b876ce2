//! Eventually periodic points, preimages with prescribed tails, and the
//! bounded falsifier of the strong periodic point condition.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::automata::DeBruijnGraph;
use crate::error::{Error, Result};
use crate::periodic::{apply_periodic, in_periodic_image, lyndon_words, periodic_preimages, CyclicWord};
use crate::rule::{all_words, format_word, parse_word, LocalRule, Symbol, Word};

/// The point `∞u.wv∞`: `u`-periodic on negative cells (`u` ending at cell
/// -1), `w` on `[0, |w|)`, and `v`-periodic from cell `|w|` on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AsymptoticPoint {
    pub left: CyclicWord,
    pub mid: Word,
    pub right: CyclicWord,
}

impl AsymptoticPoint {
    pub fn new(left: CyclicWord, mid: Word, right: CyclicWord) -> Self {
        AsymptoticPoint { left, mid, right }
    }

    /// Parses `u.w.v`, e.g. `0.11.0` for `∞0.110∞`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('.').collect();
        let [u, w, v] = parts[..] else {
            return Err(Error::InvalidWord(format!("expected u.w.v, got {s:?}")));
        };
        Ok(AsymptoticPoint { left: CyclicWord::parse(u)?, mid: parse_word(w)?, right: CyclicWord::parse(v)? })
    }

    pub fn at(&self, i: i64) -> Symbol {
        let m = self.mid.len() as i64;
        if i < 0 {
            self.left.at(i)
        } else if i < m {
            self.mid[i as usize]
        } else {
            self.right.at(i - m)
        }
    }
}

impl fmt::Display for AsymptoticPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "inf({}).{}({})inf",
            format_word(self.left.rep()),
            format_word(&self.mid),
            format_word(self.right.rep())
        )
    }
}

impl Serialize for AsymptoticPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Region of a cell of an asymptotic point: phase in the left tail, offset
/// in the middle word, or phase in the right tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pos {
    L(usize),
    M(usize),
    R(usize),
}

/// Product of the de Bruijn graph with the cell positions of a point.
struct Product<'a> {
    graph: DeBruijnGraph,
    point: &'a AsymptoticPoint,
}

impl<'a> Product<'a> {
    fn new(rule: &LocalRule, point: &'a AsymptoticPoint) -> Self {
        Product { graph: DeBruijnGraph::new(rule), point }
    }

    fn positions(&self) -> usize {
        self.point.left.len() + self.point.mid.len() + self.point.right.len()
    }

    fn pos_index(&self, pos: Pos) -> usize {
        let (a, m) = (self.point.left.len(), self.point.mid.len());
        match pos {
            Pos::L(i) => i,
            Pos::M(j) => a + j,
            Pos::R(b) => a + m + b,
        }
    }

    fn state(&self, node: usize, pos: Pos) -> usize {
        node * self.positions() + self.pos_index(pos)
    }

    fn label(&self, pos: Pos) -> Symbol {
        match pos {
            Pos::L(a) => self.point.left.rep()[a],
            Pos::M(j) => self.point.mid[j],
            Pos::R(b) => self.point.right.rep()[b],
        }
    }

    fn next_positions(&self, pos: Pos) -> Vec<Pos> {
        let (a, m, b) = (self.point.left.len(), self.point.mid.len(), self.point.right.len());
        let enter_mid = if m > 0 { Pos::M(0) } else { Pos::R(0) };
        match pos {
            Pos::L(i) if i + 1 < a => vec![Pos::L(i + 1)],
            Pos::L(_) => vec![Pos::L(0), enter_mid],
            Pos::M(j) if j + 1 < m => vec![Pos::M(j + 1)],
            Pos::M(_) => vec![Pos::R(0)],
            Pos::R(i) => vec![Pos::R((i + 1) % b)],
        }
    }

    fn all_positions(&self) -> Vec<Pos> {
        let (a, m, b) = (self.point.left.len(), self.point.mid.len(), self.point.right.len());
        (0..a).map(Pos::L).chain((0..m).map(Pos::M)).chain((0..b).map(Pos::R)).collect()
    }

    /// Edges (from, to) of the product, with the node edge labelled by the
    /// point's symbol at the source position.
    fn edges(&self) -> Vec<Vec<usize>> {
        let n = self.graph.node_count();
        let mut succ = vec![Vec::new(); n * self.positions()];
        for pos in self.all_positions() {
            let label = self.label(pos);
            let nexts = self.next_positions(pos);
            for node in 0..n {
                let from = self.state(node, pos);
                for t in self.graph.successors_with_label(node, label) {
                    for &np in &nexts {
                        succ[from].push(self.state(t, np));
                    }
                }
            }
        }
        succ
    }

    /// de Bruijn node of the periodic point `x^Z` at the cell with phase `a`.
    fn track_node(&self, x: &CyclicWord, a: usize) -> usize {
        let lo = self.graph.rule().neighborhood().0 as i64;
        let n = self.graph.alphabet();
        (0..self.graph.node_len() as i64).fold(0, |acc, k| acc * n + x.at(a as i64 + lo + k) as usize)
    }
}

fn reach(succ: &[Vec<usize>], sources: impl IntoIterator<Item = usize>, allowed: &dyn Fn(usize) -> bool) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack: Vec<usize> = sources.into_iter().collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(v) = stack.pop() {
        for &t in &succ[v] {
            if !seen[t] && allowed(t) {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

fn reverse(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut rev = vec![Vec::new(); succ.len()];
    for (v, ts) in succ.iter().enumerate() {
        for &t in ts {
            rev[t].push(v);
        }
    }
    rev
}

/// States inside `region` lying on a cycle within `region`, closed under
/// `succ` restricted to the region: the states from which an infinite path
/// in the region starts (for `succ`) or ends (for the reversed graph).
fn infinite_within(succ: &[Vec<usize>], region: &dyn Fn(usize) -> bool) -> Vec<bool> {
    // Iteratively drop region states without a successor in the region.
    let mut alive: Vec<bool> = (0..succ.len()).map(region).collect();
    loop {
        let mut changed = false;
        for v in 0..succ.len() {
            if alive[v] && !succ[v].iter().any(|&t| alive[t]) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

/// Whether `point` lies in the image subshift.
pub fn in_image(f: &LocalRule, point: &AsymptoticPoint) -> bool {
    let prod = Product::new(f, point);
    let succ = prod.edges();
    let rev = reverse(&succ);
    let positions = prod.positions();
    let a = point.left.len();
    let right_start = a + point.mid.len();
    let is_left = |s: usize| s % positions < a;
    let is_right = |s: usize| s % positions >= right_start;
    // Left states with an infinite past inside the left region.
    let past = infinite_within(&rev, &is_left);
    let future = infinite_within(&succ, &is_right);
    let from = reach(&succ, (0..succ.len()).filter(|&s| past[s]), &|_| true);
    (0..succ.len()).any(|s| future[s] && from[s])
}

/// Whether `point` has a preimage left asymptotic to `left^Z` and right
/// asymptotic to `right^Z`, each tail in the phase of the point's own tail.
pub fn preimage_with_tails_exists(
    f: &LocalRule,
    left: &CyclicWord,
    right: &CyclicWord,
    point: &AsymptoticPoint,
) -> Result<bool> {
    check_tail(f, left, &point.left, "left")?;
    check_tail(f, right, &point.right, "right")?;
    let prod = Product::new(f, point);
    let succ = prod.edges();
    let starts = (0..point.left.len()).map(|a| prod.state(prod.track_node(left, a), Pos::L(a)));
    let seen = reach(&succ, starts, &|_| true);
    Ok((0..point.right.len()).any(|b| seen[prod.state(prod.track_node(right, b), Pos::R(b))]))
}

fn check_tail(f: &LocalRule, pre: &CyclicWord, tail: &CyclicWord, side: &str) -> Result<()> {
    if pre.len() != tail.len() || apply_periodic(f, pre) != *tail {
        return Err(Error::InvalidTails(format!("{side} tail {pre} does not map onto {tail}")));
    }
    Ok(())
}

/// A point `∞u.wv∞` in the image without a preimage having the chosen tails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Kill {
    pub point: AsymptoticPoint,
    pub left_tail: CyclicWord,
    pub right_tail: CyclicWord,
}

impl Kill {
    pub fn verify(&self, f: &LocalRule) -> bool {
        in_image(f, &self.point)
            && preimage_with_tails_exists(f, &self.left_tail, &self.right_tail, &self.point) == Ok(false)
    }
}

/// A partial choice function and the point that rules out every extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    pub assignment: Vec<(CyclicWord, CyclicWord)>,
    pub kill: Kill,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SppCertificate {
    /// A periodic point of the image with no preimage of its own period.
    NoTailChoice { point: CyclicWord },
    /// Every choice function extends one of the entries.
    Exhaustive { p: usize, entries: Vec<CertificateEntry> },
}

impl SppCertificate {
    /// Independent re-check by enumerating every choice function.
    pub fn verify(&self, f: &LocalRule) -> bool {
        match self {
            SppCertificate::NoTailChoice { point } => {
                in_periodic_image(f, point) && periodic_preimages(f, point, point.len()).map(|c| c.is_empty()) == Ok(true)
            }
            SppCertificate::Exhaustive { p, entries } => {
                if !entries.iter().all(|e| e.kill.verify(f) && killed_by(&e.assignment, &e.kill)) {
                    return false;
                }
                let points = spp_points(f, *p);
                if points.iter().any(|(_, c)| c.is_empty()) {
                    return false;
                }
                let mut choice = vec![0usize; points.len()];
                loop {
                    let covered = entries.iter().any(|e| {
                        e.assignment.iter().all(|(y, x)| {
                            points.iter().zip(&choice).any(|((py, c), &i)| py == y && &c[i] == x)
                        })
                    });
                    if !covered {
                        return false;
                    }
                    // Next choice function in mixed radix.
                    let mut k = 0;
                    loop {
                        if k == choice.len() {
                            return true;
                        }
                        choice[k] += 1;
                        if choice[k] < points[k].1.len() {
                            break;
                        }
                        choice[k] = 0;
                        k += 1;
                    }
                }
            }
        }
    }
}

/// The kill uses tails consistent with the assignment.
fn killed_by(assignment: &[(CyclicWord, CyclicWord)], kill: &Kill) -> bool {
    let lookup = |y: &CyclicWord| assignment.iter().find(|(k, _)| k == y).map(|(_, x)| x);
    lookup(&kill.point.left) == Some(&kill.left_tail) && lookup(&kill.point.right) == Some(&kill.right_tail)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SppResult {
    Falsified { certificate: SppCertificate },
    Inconclusive,
}

/// Phase-fixed periodic points of length at most `p` in the image, with
/// their equal-length preimages as tail candidates.
fn spp_points(f: &LocalRule, p: usize) -> Vec<(CyclicWord, Vec<CyclicWord>)> {
    lyndon_words(f.alphabet(), p)
        .into_iter()
        .filter(|y| in_periodic_image(f, y))
        .map(|y| {
            let c = periodic_preimages(f, &y, y.len())
                .expect("period equals length")
                .into_iter()
                .map(|x| CyclicWord::new(x).expect("non-empty"))
                .collect();
            (y, c)
        })
        .collect()
}

/// Tries to show that no choice of tails for the periodic points of length
/// at most `p` works for all points `∞u.wv∞` with `|w| ≤ mid_len_max`.
pub fn spp_falsify(f: &LocalRule, p: usize, mid_len_max: usize) -> SppResult {
    let points = spp_points(f, p.max(1));
    if let Some((y, _)) = points.iter().find(|(_, c)| c.is_empty()) {
        return SppResult::Falsified { certificate: SppCertificate::NoTailChoice { point: y.clone() } };
    }
    let mids: Vec<Word> = (0..=mid_len_max).flat_map(|len| all_words(f.alphabet(), len)).collect();
    // kills[(i, ci, j, cj)]: first killing middle word for those tails.
    let mut kills: BTreeMap<(usize, usize, usize, usize), Kill> = BTreeMap::new();
    for (i, (u, cu)) in points.iter().enumerate() {
        for (j, (v, cv)) in points.iter().enumerate() {
            let targets: Vec<AsymptoticPoint> = mids
                .iter()
                .map(|w| AsymptoticPoint::new(u.clone(), w.clone(), v.clone()))
                .filter(|t| in_image(f, t))
                .collect();
            for (ci, big_u) in cu.iter().enumerate() {
                for (cj, big_v) in cv.iter().enumerate() {
                    let killer = targets
                        .iter()
                        .find(|t| preimage_with_tails_exists(f, big_u, big_v, t) == Ok(false));
                    if let Some(t) = killer {
                        let kill = Kill { point: t.clone(), left_tail: big_u.clone(), right_tail: big_v.clone() };
                        kills.insert((i, ci, j, cj), kill);
                    }
                }
            }
        }
    }
    let mut entries = Vec::new();
    let mut choice = Vec::with_capacity(points.len());
    if cover(&points, &kills, &mut choice, &mut entries) {
        SppResult::Falsified { certificate: SppCertificate::Exhaustive { p: p.max(1), entries } }
    } else {
        SppResult::Inconclusive
    }
}

/// Backtracking over choice functions; false as soon as one survives.
fn cover(
    points: &[(CyclicWord, Vec<CyclicWord>)],
    kills: &BTreeMap<(usize, usize, usize, usize), Kill>,
    choice: &mut Vec<usize>,
    entries: &mut Vec<CertificateEntry>,
) -> bool {
    let k = choice.len();
    if k == points.len() {
        return false;
    }
    for c in 0..points[k].1.len() {
        choice.push(c);
        let kill = (0..=k).find_map(|i| {
            kills.get(&(i, choice[i], k, c)).or_else(|| kills.get(&(k, c, i, choice[i])))
        });
        let ok = match kill {
            Some(kill) => {
                let assignment =
                    choice.iter().enumerate().map(|(i, &ci)| (points[i].0.clone(), points[i].1[ci].clone())).collect();
                entries.push(CertificateEntry { assignment, kill: kill.clone() });
                true
            }
            None => cover(points, kills, choice, entries),
        };
        choice.pop();
        if !ok {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eca(n: u32) -> LocalRule {
        LocalRule::eca(n).unwrap()
    }

    fn cw(s: &str) -> CyclicWord {
        CyclicWord::parse(s).unwrap()
    }

    fn pt(s: &str) -> AsymptoticPoint {
        AsymptoticPoint::parse(s).unwrap()
    }

    #[test]
    fn point_cells() {
        let x = pt("01.110.0");
        let cells: Vec<Symbol> = (-4..6).map(|i| x.at(i)).collect();
        assert_eq!(cells, vec![0, 1, 0, 1, 1, 1, 0, 0, 0, 0]);
        assert_eq!(x.to_string(), "inf(01).110(0)inf");
    }

    #[test]
    fn tails_examples() {
        // The left tail 1^Z forced by G(0) = 1 cannot produce ...0011.000...
        assert_eq!(preimage_with_tails_exists(&eca(9), &cw("1"), &cw("1"), &pt("0.11.0")), Ok(false));
        assert!(in_image(&eca(9), &pt("0.11.0")));
        assert_eq!(preimage_with_tails_exists(&eca(28), &cw("0"), &cw("0"), &pt("0.1.0")), Ok(false));
        assert!(in_image(&eca(28), &pt("0.1.0")));
        let id = LocalRule::identity(2);
        for s in ["0.1.0", "01.0110.1", "1..001"] {
            let x = pt(s);
            assert_eq!(preimage_with_tails_exists(&id, &x.left, &x.right, &x), Ok(true));
        }
        assert!(preimage_with_tails_exists(&eca(9), &cw("0"), &cw("1"), &pt("0.11.0")).is_err());
    }

    #[test]
    fn image_membership_matches_finite_windows() {
        // ECA 28 forbids 111 and nothing shorter.
        assert!(!in_image(&eca(28), &pt("0.111.0")));
        assert!(in_image(&eca(28), &pt("0.11011.0")));
        assert!(!in_image(&eca(0), &pt("0.1.0")));
        assert!(in_image(&eca(0), &pt("0..0")));
    }

    #[test]
    fn spp_examples() {
        for (n, p, mid) in [(9, 1, 4), (58, 1, 6)] {
            match spp_falsify(&eca(n), p, mid) {
                SppResult::Falsified { certificate } => assert!(certificate.verify(&eca(n)), "ECA {n}"),
                SppResult::Inconclusive => panic!("ECA {n} should be falsified"),
            }
        }
        if let SppResult::Falsified { certificate: SppCertificate::Exhaustive { entries, .. } } =
            spp_falsify(&eca(58), 1, 6)
        {
            let zero = cw("0");
            let g0: Vec<&CyclicWord> =
                entries.iter().filter_map(|e| e.assignment.iter().find(|(y, _)| *y == zero).map(|(_, x)| x)).collect();
            assert!(g0.contains(&&cw("0")) && g0.contains(&&cw("1")));
        }
        assert_eq!(spp_falsify(&LocalRule::identity(2), 2, 4), SppResult::Inconclusive);
    }

    #[test]
    fn tampered_certificate_fails() {
        let SppResult::Falsified { certificate: SppCertificate::Exhaustive { p, mut entries } } =
            spp_falsify(&eca(9), 1, 4)
        else {
            panic!("expected an exhaustive certificate");
        };
        entries[0].kill.point = pt("0.0.0");
        assert!(!SppCertificate::Exhaustive { p, entries }.verify(&eca(9)));
    }
}
