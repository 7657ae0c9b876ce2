//! Random one-sided CA and the period-1/period-2 failure of the weak
//! periodic point condition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rule::{word_index, LocalRule, Symbol};

/// Uniform rule on the neighborhood `[0, r]` over `n` symbols.
pub fn sample_onesided_rule(n: usize, r: u32, rng: &mut impl Rng) -> Result<LocalRule> {
    check_params(n, r)?;
    let size = n.pow(r + 1);
    let table = (0..size).map(|_| rng.random_range(0..n) as Symbol).collect();
    LocalRule::new(n, 0, r as i32, table)
}

fn check_params(n: usize, r: u32) -> Result<()> {
    if !(2..=256).contains(&n) {
        return Err(Error::InvalidRule(format!("alphabet size {n} outside 2..=256")));
    }
    if r < 1 {
        return Err(Error::InvalidRule("one-sided radius must be at least 1".into()));
    }
    Ok(())
}

/// `f(ι(a))` as a symbol.
fn unary_image(rule: &LocalRule, a: Symbol) -> Symbol {
    let w = vec![a; rule.width()];
    rule.output(&w)
}

/// The two symbols of `f(ι(a, b))`, at an `a` cell and at a `b` cell.
fn binary_image(rule: &LocalRule, a: Symbol, b: Symbol) -> (Symbol, Symbol) {
    let n = rule.alphabet();
    let (lo, _) = rule.neighborhood();
    let window = |first: Symbol, second: Symbol| -> Symbol {
        // Cell lo has the parity of lo relative to the `first` cell at 0.
        let w: Vec<Symbol> =
            (0..rule.width() as i32).map(|k| if (lo + k).rem_euclid(2) == 0 { first } else { second }).collect();
        rule.output_at(word_index(n, &w))
    };
    (window(a, b), window(b, a))
}

/// A unary point `a^Z` with the preimages `ι(b, c)` and `ι(c, b)` of
/// period two but no preimage of period one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Wpp12Witness {
    pub a: Symbol,
    pub b: Symbol,
    pub c: Symbol,
}

pub fn wpp12_witness(rule: &LocalRule) -> Option<Wpp12Witness> {
    let n = rule.alphabet();
    let mut hit = vec![false; n];
    for d in 0..n as Symbol {
        hit[unary_image(rule, d) as usize] = true;
    }
    let mut best: Option<Wpp12Witness> = None;
    for b in 0..n as Symbol {
        for c in b + 1..n as Symbol {
            let (x, y) = binary_image(rule, b, c);
            if x == y && !hit[x as usize] && best.is_none_or(|w| x < w.a) {
                best = Some(Wpp12Witness { a: x, b, c });
            }
        }
    }
    best
}

/// The statistics of one sampled rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Symbols `a` such that `a^Z` has a preimage of period one.
    pub n_count: usize,
    /// Pairs `a < b` with `f(ι(a, b)) = f(ι(b, a))`.
    pub m_count: usize,
    pub witness: Option<Wpp12Witness>,
}

pub fn trial_record(rule: &LocalRule, trial: u64) -> TrialRecord {
    let n = rule.alphabet();
    let mut hit = vec![false; n];
    for d in 0..n as Symbol {
        hit[unary_image(rule, d) as usize] = true;
    }
    let m_count = (0..n as Symbol)
        .flat_map(|a| (a + 1..n as Symbol).map(move |b| (a, b)))
        .filter(|&(a, b)| {
            let (x, y) = binary_image(rule, a, b);
            x == y
        })
        .count();
    TrialRecord { trial, n_count: hit.iter().filter(|&&h| h).count(), m_count, witness: wpp12_witness(rule) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct TrialStats {
    pub n: usize,
    pub r: u32,
    pub trials: u64,
    pub seed: u64,
    pub failure_freq: f64,
    pub mean_N: f64,
    pub mean_M: f64,
    /// Unbiased sample variances.
    pub var_N: f64,
    pub var_M: f64,
}

/// Trial `i` draws from stream `i` of a ChaCha8 generator seeded by `seed`,
/// so results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_trials(n: usize, r: u32, trials: u64, seed: u64) -> Result<Vec<TrialRecord>> {
    check_params(n, r)?;
    if trials == 0 {
        return Err(Error::InvalidRule("at least one trial is needed".into()));
    }
    Ok((0..trials)
        .into_par_iter()
        .map(|t| {
            let rule = sample_onesided_rule(n, r, &mut trial_rng(seed, t)).expect("checked parameters");
            trial_record(&rule, t)
        })
        .collect())
}

pub fn summarize(n: usize, r: u32, seed: u64, records: &[TrialRecord]) -> TrialStats {
    let t = records.len() as f64;
    let mean = |xs: &dyn Fn(&TrialRecord) -> f64| records.iter().map(xs).sum::<f64>() / t;
    let var = |xs: &dyn Fn(&TrialRecord) -> f64, m: f64| {
        if records.len() < 2 {
            0.0
        } else {
            records.iter().map(|r| (xs(r) - m).powi(2)).sum::<f64>() / (t - 1.0)
        }
    };
    let nf = |r: &TrialRecord| r.n_count as f64;
    let mf = |r: &TrialRecord| r.m_count as f64;
    let (mean_n, mean_m) = (mean(&nf), mean(&mf));
    TrialStats {
        n,
        r,
        trials: records.len() as u64,
        seed,
        failure_freq: records.iter().filter(|r| r.witness.is_some()).count() as f64 / t,
        mean_N: mean_n,
        mean_M: mean_m,
        var_N: var(&nf, mean_n),
        var_M: var(&mf, mean_m),
    }
}

pub fn run_experiment(n: usize, r: u32, trials: u64, seed: u64) -> Result<TrialStats> {
    Ok(summarize(n, r, seed, &run_trials(n, r, trials, seed)?))
}

/// `E(N) = n (1 - (1 - 1/n)^n)`: each symbol is missed by all `n` unary
/// images with probability `(1 - 1/n)^n`.
pub fn expected_n(n: usize) -> f64 {
    let n = n as f64;
    n * (1.0 - (1.0 - 1.0 / n).powf(n))
}

pub fn variance_n(n: usize) -> f64 {
    let nf = n as f64;
    let miss = (1.0 - 1.0 / nf).powf(nf);
    let q1 = 1.0 - miss;
    let both = 1.0 - 2.0 * miss + (1.0 - 2.0 / nf).powf(nf);
    nf * q1 * (1.0 - q1) + nf * (nf - 1.0) * (both - q1 * q1)
}

/// `M ~ Bin(C(n, 2), 1/n)`.
pub fn expected_m(n: usize) -> f64 {
    (n as f64 - 1.0) / 2.0
}

pub fn variance_m(n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) / 2.0 * (1.0 / nf) * (1.0 - 1.0 / nf)
}
