//! Enumeration of weak inverses of a fixed radius by constraint propagation
//! over periodic points.

use std::collections::BTreeSet;

use crate::image::image_language;
use crate::periodic::{in_periodic_image, lyndon_words, periodic_preimages, CyclicWord};
use crate::rule::{all_words, word_count, word_index, LocalRule, Symbol, Word};

use super::verify_weak_inverse;

const UNKNOWN: Symbol = Symbol::MAX;

/// Search options for [`find_weak_inverses_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// Also write a bit when every remaining preimage of a point agrees on it.
    pub unanimous_bits: bool,
    /// Skip propagation of the local constraints of `f g f = f`.
    pub no_composition_constraints: bool,
}

/// A radius-`r` rule being built: one entry per image word of length
/// `2r + 1`, each a symbol or unknown.
#[derive(Clone, Debug)]
pub struct PartialLocalRule {
    radius: u32,
    words: Vec<Word>,
    entries: Vec<Symbol>,
}

impl PartialLocalRule {
    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// Domain words in lexicographic order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn entry(&self, i: usize) -> Option<Symbol> {
        (self.entries[i] != UNKNOWN).then_some(self.entries[i])
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|&e| e != UNKNOWN)
    }
}

/// One periodic point of the image and its surviving preimages.
#[derive(Clone, Debug)]
struct Point {
    /// windows[i]: domain index of the radius-r window centred at cell i.
    windows: Vec<usize>,
    candidates: Vec<Word>,
}

struct Problem {
    alphabet: usize,
    radius: u32,
    words: Vec<Word>,
    points: Vec<Point>,
    /// watchers[d]: points having domain word d among their windows.
    watchers: Vec<Vec<usize>>,
    constraints: Vec<Constraint>,
    /// constraint_watchers[d]: constraints reading domain word d.
    constraint_watchers: Vec<Vec<usize>>,
    f: LocalRule,
    options: SearchOptions,
}

/// `f(ℓ(vars[0]) … ℓ(vars[W-1])) = out`: one window of `f g f = f`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Constraint {
    vars: Vec<usize>,
    out: Symbol,
}

#[derive(Clone, Copy)]
enum Task {
    Point(usize),
    Constraint(usize),
}

#[derive(Clone)]
struct State {
    entries: Vec<Symbol>,
    alive: Vec<Vec<u32>>,
}

impl Problem {
    fn build(f: &LocalRule, r: u32, p: usize, options: SearchOptions) -> Option<Problem> {
        let n = f.alphabet();
        let len = 2 * r as usize + 1;
        let words: Vec<Word> = image_language(f).enumerate(len).into_iter().filter(|w| w.len() == len).collect();
        let mut index = vec![usize::MAX; word_count(n, len)];
        for (d, w) in words.iter().enumerate() {
            index[word_index(n, w)] = d;
        }
        let mut points = Vec::new();
        for key in lyndon_words(n, p) {
            if !in_periodic_image(f, &key) {
                continue;
            }
            let q = key.len();
            let windows: Vec<usize> = (0..q as i64)
                .map(|i| {
                    let w: Word = (i - r as i64..=i + r as i64).map(|j| key.at(j)).collect();
                    index[word_index(n, &w)]
                })
                .collect();
            debug_assert!(windows.iter().all(|&d| d != usize::MAX));
            let candidates: Vec<Word> = periodic_preimages(f, &key, q)
                .expect("period equals length")
                .into_iter()
                .filter(|x| self_consistent(&windows, x))
                .collect();
            if candidates.is_empty() {
                // No g can map this point back onto a preimage of its own period.
                return None;
            }
            points.push(Point { windows, candidates });
        }
        let mut watchers = vec![Vec::new(); words.len()];
        for (k, pt) in points.iter().enumerate() {
            let distinct: BTreeSet<usize> = pt.windows.iter().copied().collect();
            for d in distinct {
                watchers[d].push(k);
            }
        }
        let constraints = if options.no_composition_constraints {
            Vec::new()
        } else {
            composition_constraints(f, r, &index)
        };
        let mut constraint_watchers = vec![Vec::new(); words.len()];
        for (k, c) in constraints.iter().enumerate() {
            let distinct: BTreeSet<usize> = c.vars.iter().copied().collect();
            for d in distinct {
                constraint_watchers[d].push(k);
            }
        }
        Some(Problem {
            alphabet: n,
            radius: r,
            words,
            points,
            watchers,
            constraints,
            constraint_watchers,
            f: f.clone(),
            options,
        })
    }

    fn all_tasks(&self) -> Vec<Task> {
        (0..self.points.len()).map(Task::Point).chain((0..self.constraints.len()).map(Task::Constraint)).collect()
    }

    fn tasks_for(&self, d: usize) -> Vec<Task> {
        self.watchers[d]
            .iter()
            .map(|&k| Task::Point(k))
            .chain(self.constraint_watchers[d].iter().map(|&k| Task::Constraint(k)))
            .collect()
    }

    /// Values forced by a constraint, or `None` if it cannot be satisfied.
    fn constraint_writes(&self, c: &Constraint, entries: &[Symbol]) -> Option<Vec<(usize, Symbol)>> {
        let mut unknown: Vec<usize> = c.vars.iter().copied().filter(|&d| entries[d] == UNKNOWN).collect();
        unknown.sort_unstable();
        unknown.dedup();
        if unknown.len() > 2 {
            return Some(Vec::new());
        }
        let n = self.alphabet;
        let mut feasible = vec![vec![false; n]; unknown.len()];
        let mut any = false;
        let mut window = vec![0; c.vars.len()];
        for combo in 0..n.pow(unknown.len() as u32) {
            let value = |d: usize| {
                unknown.iter().position(|&u| u == d).map_or(entries[d], |k| ((combo / n.pow(k as u32)) % n) as Symbol)
            };
            for (slot, &d) in window.iter_mut().zip(&c.vars) {
                *slot = value(d);
            }
            if self.f.output(&window) == c.out {
                any = true;
                for (k, &u) in unknown.iter().enumerate() {
                    feasible[k][value(u) as usize] = true;
                }
            }
        }
        if !any {
            return None;
        }
        Some(
            unknown
                .iter()
                .zip(&feasible)
                .filter_map(|(&u, f)| {
                    let mut vals = (0..n).filter(|&b| f[b]);
                    match (vals.next(), vals.next()) {
                        (Some(b), None) => Some((u, b as Symbol)),
                        _ => None,
                    }
                })
                .collect(),
        )
    }

    fn initial_state(&self) -> State {
        State {
            entries: vec![UNKNOWN; self.words.len()],
            alive: self.points.iter().map(|pt| (0..pt.candidates.len() as u32).collect()).collect(),
        }
    }

    /// Runs the propagation rules to a fixed point starting from `queue`.
    /// Returns false on a dead branch.
    fn propagate(&self, state: &mut State, mut queue: Vec<Task>) -> bool {
        let mut queued_points = vec![false; self.points.len()];
        let mut queued_constraints = vec![false; self.constraints.len()];
        for &t in &queue {
            match t {
                Task::Point(k) => queued_points[k] = true,
                Task::Constraint(k) => queued_constraints[k] = true,
            }
        }
        while let Some(task) = queue.pop() {
            let writes = match task {
                Task::Point(k) => {
                    queued_points[k] = false;
                    match self.point_writes(state, k) {
                        Some(w) => w,
                        None => return false,
                    }
                }
                Task::Constraint(k) => {
                    queued_constraints[k] = false;
                    match self.constraint_writes(&self.constraints[k], &state.entries) {
                        Some(w) => w,
                        None => return false,
                    }
                }
            };
            for (d, b) in writes {
                if state.entries[d] == UNKNOWN {
                    state.entries[d] = b;
                    for t in self.tasks_for(d) {
                        let flag = match t {
                            Task::Point(j) => &mut queued_points[j],
                            Task::Constraint(j) => &mut queued_constraints[j],
                        };
                        if !*flag {
                            *flag = true;
                            queue.push(t);
                        }
                    }
                } else if state.entries[d] != b {
                    return false;
                }
            }
        }
        true
    }

    /// Drops candidates inconsistent with the entries, then reports the
    /// entries forced by the survivors.
    fn point_writes(&self, state: &mut State, k: usize) -> Option<Vec<(usize, Symbol)>> {
        let pt = &self.points[k];
        let entries = &state.entries;
        state.alive[k].retain(|&c| {
            let x = &pt.candidates[c as usize];
            pt.windows.iter().zip(x).all(|(&d, &b)| entries[d] == UNKNOWN || entries[d] == b)
        });
        let alive = &state.alive[k];
        Some(match alive.len() {
            0 => return None,
            1 => {
                let x = &pt.candidates[alive[0] as usize];
                pt.windows.iter().zip(x).map(|(&d, &b)| (d, b)).collect()
            }
            _ if self.options.unanimous_bits => (0..pt.windows.len())
                .filter_map(|i| {
                    let b = pt.candidates[alive[0] as usize][i];
                    alive.iter().all(|&c| pt.candidates[c as usize][i] == b).then_some((pt.windows[i], b))
                })
                .collect(),
            _ => Vec::new(),
        })
    }

    fn search(&self, state: State, out: &mut Vec<LocalRule>, f: &LocalRule) {
        let Some(d) = state.entries.iter().position(|&e| e == UNKNOWN) else {
            let g = self.complete(&state.entries);
            if verify_weak_inverse(f, &g) {
                out.push(g);
            }
            return;
        };
        for b in 0..self.alphabet as Symbol {
            let mut next = state.clone();
            next.entries[d] = b;
            if self.propagate(&mut next, self.tasks_for(d)) {
                self.search(next, out, f);
            }
        }
    }

    /// The full rule with off-image entries set to 0.
    fn complete(&self, entries: &[Symbol]) -> LocalRule {
        let n = self.alphabet;
        let len = 2 * self.radius as usize + 1;
        let mut table = vec![0; word_count(n, len)];
        for (w, &e) in self.words.iter().zip(entries) {
            table[word_index(n, w)] = e;
        }
        let r = self.radius as i32;
        LocalRule::new(n, -r, r, table).expect("well-formed table")
    }
}

/// The windows of `f g f = f` seen through the image words of length
/// `2r + 1` that `g` reads.
fn composition_constraints(f: &LocalRule, r: u32, index: &[usize]) -> Vec<Constraint> {
    let n = f.alphabet();
    let w = f.width();
    let span = 2 * r as usize + 1;
    let len = 2 * (w - 1) + span;
    let centre = (r as i32 - f.neighborhood().0) as usize;
    let mut out = BTreeSet::new();
    for x in all_words(n, len) {
        let y = f.apply(&x).expect("long enough");
        let vars = y.windows(span).map(|win| index[word_index(n, win)]).collect();
        out.insert(Constraint { vars, out: f.output(&x[centre..centre + w]) });
    }
    out.into_iter().collect()
}

/// A candidate must give equal values on equal windows.
fn self_consistent(windows: &[usize], x: &[Symbol]) -> bool {
    windows
        .iter()
        .enumerate()
        .all(|(i, &d)| windows[..i].iter().zip(x).all(|(&e, &b)| e != d || b == x[i]))
}

/// Every weak inverse of radius `r`, described by its behavior on image
/// words and zero elsewhere, sorted by hex code.
pub fn find_weak_inverses(f: &LocalRule, r: u32, p: usize) -> Vec<LocalRule> {
    find_weak_inverses_with(f, r, p, SearchOptions::default())
}

pub fn find_weak_inverses_with(f: &LocalRule, r: u32, p: usize, options: SearchOptions) -> Vec<LocalRule> {
    let Some(problem) = Problem::build(f, r, p.max(1), options) else {
        return Vec::new();
    };
    let mut state = problem.initial_state();
    let mut out = Vec::new();
    if problem.propagate(&mut state, problem.all_tasks()) {
        problem.search(state, &mut out, f);
    }
    sort_canonical(&mut out);
    out
}

/// Hex order: the table read from its highest window down.
pub(crate) fn sort_canonical(rules: &mut Vec<LocalRule>) {
    rules.sort_by(|a, b| a.table().iter().rev().cmp(b.table().iter().rev()));
    rules.dedup_by(|a, b| a.table() == b.table());
}

/// The partial rule forced by propagation alone, before any branching.
/// `None` when some periodic point already has no usable preimage.
pub fn propagated_partial_rule(f: &LocalRule, r: u32, p: usize) -> Option<PartialLocalRule> {
    let problem = Problem::build(f, r, p.max(1), SearchOptions::default())?;
    let mut state = problem.initial_state();
    if !problem.propagate(&mut state, problem.all_tasks()) {
        return None;
    }
    Some(PartialLocalRule { radius: r, words: problem.words, entries: state.entries })
}

/// Keys of the choice map: the phase-fixed periodic points of length at most
/// `p` in the image, each with its aligned equal-length preimages.
pub fn choice_map(f: &LocalRule, p: usize) -> Vec<(CyclicWord, Vec<Word>)> {
    lyndon_words(f.alphabet(), p)
        .into_iter()
        .filter(|y| in_periodic_image(f, y))
        .map(|y| {
            let c = periodic_preimages(f, &y, y.len()).expect("period equals length");
            (y, c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eca(n: u32) -> LocalRule {
        LocalRule::eca(n).unwrap()
    }

    fn hexes(rules: &[LocalRule]) -> Vec<String> {
        rules.iter().map(|g| g.to_hex().unwrap()).collect()
    }

    #[test]
    fn eca7_inverses() {
        assert_eq!(hexes(&find_weak_inverses(&eca(7), 2, 6)), vec!["21232123"]);
        assert!(find_weak_inverses(&eca(7), 1, 6).is_empty());
    }

    #[test]
    fn eca6_inverses() {
        let found = hexes(&find_weak_inverses(&eca(6), 3, 9));
        let expected: Vec<String> =
            ["7", "f"].iter().map(|s| format!("00000e030f03000f00000e0f0f030e0{s}")).collect();
        assert_eq!(found, expected);
    }

    #[test]
    fn radius_two_examples() {
        assert_eq!(hexes(&find_weak_inverses(&eca(77), 2, 6)), vec!["00733177"]);
        assert_eq!(hexes(&find_weak_inverses(&eca(23), 2, 6)), vec!["23bb003b"]);
        assert_eq!(hexes(&find_weak_inverses(&eca(33), 2, 6)), vec!["00070707"]);
    }

    #[test]
    fn identity_is_its_own_inverse() {
        let id = LocalRule::identity(2);
        assert_eq!(find_weak_inverses(&id, 0, 1), vec![id]);
    }

    #[test]
    fn options_do_not_change_results() {
        let unanimous = SearchOptions { unanimous_bits: true, ..Default::default() };
        let without_composition = SearchOptions { no_composition_constraints: true, ..Default::default() };
        for n in [6, 7, 23, 33, 77] {
            let r = if n == 6 { 3 } else { 2 };
            let p = if n == 6 { 9 } else { 8 };
            let plain = find_weak_inverses(&eca(n), r, p);
            assert_eq!(plain, find_weak_inverses_with(&eca(n), r, p, unanimous), "ECA {n}");
            assert_eq!(plain, find_weak_inverses_with(&eca(n), r, p, without_composition), "ECA {n}");
        }
    }

    #[test]
    fn inverses_do_not_depend_on_p() {
        for n in [6, 7, 23, 33, 77] {
            let r = if n == 6 { 3 } else { 2 };
            assert_eq!(find_weak_inverses(&eca(n), r, 4), find_weak_inverses(&eca(n), r, 6), "ECA {n}");
        }
    }

    #[test]
    fn radius_one_matches_brute_force() {
        for n in 0..256 {
            let f = eca(n);
            let image: BTreeSet<Word> = all_words(2, 5).map(|u| f.apply(&u).unwrap()).collect();
            let mut brute: Vec<LocalRule> = (0..256)
                .map(eca)
                .filter(|g| verify_weak_inverse(&f, g))
                .map(|g| {
                    let t = (0..8).map(|j| {
                        let w = crate::rule::index_word(2, 3, j);
                        if image.contains(&w) { g.table()[j] } else { 0 }
                    });
                    LocalRule::new(2, -1, 1, t.collect()).unwrap()
                })
                .collect();
            sort_canonical(&mut brute);
            let found = find_weak_inverses(&f, 1, 6);
            let tables = |v: &[LocalRule]| v.iter().map(|g| g.table().to_vec()).collect::<Vec<_>>();
            assert_eq!(tables(&found), tables(&brute), "ECA {n}");
        }
    }

    #[test]
    fn propagation_alone_fixes_eca7() {
        let partial = propagated_partial_rule(&eca(7), 2, 6).unwrap();
        assert_eq!(partial.radius(), 2);
        assert!(partial.words().iter().all(|w| w.len() == 5));
        let choices = choice_map(&eca(7), 6);
        assert!(choices.iter().all(|(_, c)| !c.is_empty()));
    }
}
