//! Local rules of one-dimensional cellular automata on full shifts.
//!
//! A [`LocalRule`] stores a total lookup table over an interval neighborhood
//! `[lo, hi]`. Windows are indexed as base-`alphabet` integers with the
//! leftmost cell most significant, which is also the bit order used by the
//! Wolfram numbering and by the hexadecimal codec.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub type Symbol = u8;

/// A finite word over `0..alphabet`.
pub type Word = Vec<Symbol>;

/// Parses a word written with one digit per symbol (`0-9`, then `a-z`).
pub fn parse_word(s: &str) -> Result<Word> {
    s.chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as Symbol)
                .ok_or_else(|| Error::InvalidWord(s.to_string()))
        })
        .collect()
}

pub fn format_word(w: &[Symbol]) -> String {
    w.iter()
        .map(|&s| std::char::from_digit(s as u32, 36).unwrap_or('?'))
        .collect()
}

/// Number of words of length `len` over an alphabet of `alphabet` symbols.
pub(crate) fn word_count(alphabet: usize, len: usize) -> usize {
    alphabet.pow(len as u32)
}

pub(crate) fn word_index(alphabet: usize, w: &[Symbol]) -> usize {
    w.iter().fold(0, |acc, &s| acc * alphabet + s as usize)
}

pub(crate) fn index_word(alphabet: usize, len: usize, mut idx: usize) -> Word {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = (idx % alphabet) as Symbol;
        idx /= alphabet;
    }
    w
}

/// All words of length `len`, in lexicographic order.
pub(crate) fn all_words(alphabet: usize, len: usize) -> impl Iterator<Item = Word> {
    (0..word_count(alphabet, len)).map(move |i| index_word(alphabet, len, i))
}

/// Symmetry transforms of a rule, for binary alphabets the generators of
/// the equivalence relation on ECA.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// `f ∘ S`: complement every input cell.
    FlipPre,
    /// `S ∘ f`: complement the output.
    FlipPost,
    /// `R ∘ f ∘ R`: mirror the neighborhood.
    ReverseConj,
}

#[derive(Clone)]
pub struct LocalRule {
    alphabet: usize,
    lo: i32,
    hi: i32,
    table: Vec<Symbol>,
}

impl LocalRule {
    pub fn new(alphabet: usize, lo: i32, hi: i32, table: Vec<Symbol>) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::InvalidRule(format!("alphabet size {alphabet} < 2")));
        }
        if lo > hi {
            return Err(Error::InvalidRule(format!("empty neighborhood [{lo}, {hi}]")));
        }
        let width = (hi - lo + 1) as usize;
        let expected = word_count(alphabet, width);
        if table.len() != expected {
            return Err(Error::InvalidRule(format!(
                "table has {} entries, expected {expected}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&s| s as usize >= alphabet) {
            return Err(Error::InvalidRule(format!("table entry {bad} out of alphabet")));
        }
        Ok(LocalRule { alphabet, lo, hi, table })
    }

    /// Tabulates `local` over every window of the neighborhood `[lo, hi]`.
    pub fn from_fn(alphabet: usize, lo: i32, hi: i32, local: impl Fn(&[Symbol]) -> Symbol) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidRule(format!("empty neighborhood [{lo}, {hi}]")));
        }
        let width = (hi - lo + 1) as usize;
        let table = all_words(alphabet, width).map(|w| local(&w)).collect();
        Self::new(alphabet, lo, hi, table)
    }

    /// Elementary CA number `n` in the Wolfram numbering.
    pub fn eca(n: u32) -> Result<Self> {
        if n > 255 {
            return Err(Error::EcaOutOfRange(n));
        }
        let table = (0..8).map(|j| ((n >> j) & 1) as Symbol).collect();
        Self::new(2, -1, 1, table)
    }

    pub fn identity(alphabet: usize) -> Self {
        Self::from_fn(alphabet, 0, 0, |w| w[0]).expect("identity table is valid")
    }

    /// The left shift `σ(x)_i = x_{i+1}`.
    pub fn shift(alphabet: usize) -> Self {
        Self::from_fn(alphabet, 1, 1, |w| w[0]).expect("shift table is valid")
    }

    /// Decodes a big-endian hex code at symmetric radius `radius`: bit `j`
    /// of the integer is the output on the window whose base-2 value is `j`.
    pub fn from_hex(hex: &str, radius: u32) -> Result<Self> {
        let bits = 1usize << (2 * radius + 1);
        let expected = hex_digits(bits);
        let digits: Vec<char> = hex.chars().collect();
        if digits.len() != expected {
            return Err(Error::HexLength { radius, expected, found: digits.len() });
        }
        let mut table = vec![0; bits];
        for (pos, c) in digits.iter().rev().enumerate() {
            let d = c.to_digit(16).ok_or(Error::HexDigit(*c))?;
            for b in 0..4 {
                let j = 4 * pos + b;
                if j < bits {
                    table[j] = ((d >> b) & 1) as Symbol;
                } else if (d >> b) & 1 == 1 {
                    return Err(Error::HexDigit(*c));
                }
            }
        }
        let r = radius as i32;
        Self::new(2, -r, r, table)
    }

    /// Lowercase hex code at the smallest symmetric radius containing the
    /// neighborhood.
    pub fn to_hex(&self) -> Result<String> {
        if self.alphabet != 2 {
            return Err(Error::NonBinary(self.alphabet));
        }
        let r = self.lo.abs().max(self.hi.abs());
        let padded = self.pad(-r, r)?;
        let bits = padded.table.len();
        let mut out = String::with_capacity(hex_digits(bits));
        for pos in (0..hex_digits(bits)).rev() {
            let mut d = 0u32;
            for b in 0..4 {
                let j = 4 * pos + b;
                if j < bits {
                    d |= (padded.table[j] as u32) << b;
                }
            }
            out.push(std::char::from_digit(d, 16).expect("nibble"));
        }
        Ok(out)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn neighborhood(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// Smallest `r` with the neighborhood inside `[-r, r]`.
    pub fn radius(&self) -> u32 {
        self.lo.unsigned_abs().max(self.hi.unsigned_abs())
    }

    pub fn table(&self) -> &[Symbol] {
        &self.table
    }

    /// Output on a window of exactly `width()` cells.
    pub fn output(&self, window: &[Symbol]) -> Symbol {
        debug_assert_eq!(window.len(), self.width());
        self.table[word_index(self.alphabet, window)]
    }

    pub(crate) fn output_at(&self, index: usize) -> Symbol {
        self.table[index]
    }

    /// Applies the rule to a finite word; output position `i` reads
    /// `w[i .. i + width]`.
    pub fn apply(&self, w: &[Symbol]) -> Result<Word> {
        let width = self.width();
        if w.len() < width {
            return Err(Error::WordTooShort { len: w.len(), width });
        }
        self.check_word(w)?;
        Ok(w.windows(width).map(|win| self.output(win)).collect())
    }

    pub(crate) fn check_word(&self, w: &[Symbol]) -> Result<()> {
        match w.iter().find(|&&s| s as usize >= self.alphabet) {
            Some(s) => Err(Error::InvalidWord(format!(
                "symbol {s} outside alphabet of size {}",
                self.alphabet
            ))),
            None => Ok(()),
        }
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &LocalRule) -> Result<LocalRule> {
        if self.alphabet != inner.alphabet {
            return Err(Error::AlphabetMismatch(self.alphabet, inner.alphabet));
        }
        let lo = self.lo + inner.lo;
        let hi = self.hi + inner.hi;
        let width = (hi - lo + 1) as usize;
        let n = self.alphabet;
        let total = word_count(n, width);
        let iw = inner.width();
        let block = word_count(n, iw);
        let mut table = Vec::with_capacity(total);
        let mut w = vec![0 as Symbol; width];
        for _ in 0..total {
            let mut idx = 0;
            let mut win = 0;
            for (k, &s) in w.iter().enumerate() {
                win = (win * n + s as usize) % block;
                if k + 1 >= iw {
                    idx = idx * n + inner.table[win] as usize;
                }
            }
            table.push(self.table[idx]);
            // Next word in lexicographic order.
            for s in w.iter_mut().rev() {
                *s += 1;
                if (*s as usize) < n {
                    break;
                }
                *s = 0;
            }
        }
        LocalRule::new(n, lo, hi, table)
    }

    /// Re-tabulates over a larger neighborhood `[lo, hi] ⊇ [self.lo, self.hi]`;
    /// the added cells are ignored.
    pub fn pad(&self, lo: i32, hi: i32) -> Result<LocalRule> {
        if lo > self.lo || hi < self.hi {
            return Err(Error::InvalidRule(format!(
                "[{lo}, {hi}] does not contain [{}, {}]",
                self.lo, self.hi
            )));
        }
        let n = self.alphabet;
        let right = word_count(n, (hi - self.hi) as usize);
        let block = word_count(n, self.width());
        let total = word_count(n, (hi - lo + 1) as usize);
        let table = (0..total).map(|idx| self.table[(idx / right) % block]).collect();
        LocalRule::new(n, lo, hi, table)
    }

    /// Drops boundary cells the rule ignores.
    pub fn trim(&self) -> LocalRule {
        let mut rule = self.clone();
        while rule.lo < rule.hi {
            if let Some(smaller) = rule.drop_cell(true) {
                rule = smaller;
            } else if let Some(smaller) = rule.drop_cell(false) {
                rule = smaller;
            } else {
                break;
            }
        }
        rule
    }

    fn drop_cell(&self, leftmost: bool) -> Option<LocalRule> {
        let n = self.alphabet;
        let width = self.width();
        let inner = width - 1;
        let mut table = vec![0; word_count(n, inner)];
        for rest in 0..word_count(n, inner) {
            let mut first = None;
            for a in 0..n {
                let idx = if leftmost {
                    a * word_count(n, inner) + rest
                } else {
                    rest * n + a
                };
                let out = self.table[idx];
                match first {
                    None => first = Some(out),
                    Some(o) if o != out => return None,
                    _ => {}
                }
            }
            table[rest] = first.unwrap_or(0);
        }
        let (lo, hi) = if leftmost { (self.lo + 1, self.hi) } else { (self.lo, self.hi - 1) };
        Some(LocalRule { alphabet: n, lo, hi, table })
    }

    /// CA equality: both tables padded to the common hull agree.
    pub fn equals(&self, other: &LocalRule) -> bool {
        if self.alphabet != other.alphabet {
            return false;
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi.max(other.hi);
        let a = self.pad(lo, hi).expect("hull contains neighborhood");
        let b = other.pad(lo, hi).expect("hull contains neighborhood");
        a.table == b.table
    }

    /// The Wolfram number, if this rule is an ECA.
    pub fn eca_number(&self) -> Option<u32> {
        if self.alphabet != 2 || self.lo < -1 || self.hi > 1 {
            let trimmed = self.trim();
            if trimmed.alphabet != 2 || trimmed.lo < -1 || trimmed.hi > 1 {
                return None;
            }
            return trimmed.eca_number();
        }
        let padded = self.pad(-1, 1).ok()?;
        Some(
            padded
                .table
                .iter()
                .enumerate()
                .map(|(j, &b)| (b as u32) << j)
                .sum(),
        )
    }

    /// Symbol complement `a ↦ n-1-a` (the bit flip for binary rules).
    fn complement(&self, s: Symbol) -> Symbol {
        (self.alphabet - 1) as Symbol - s
    }

    pub fn transform(&self, op: Transform) -> LocalRule {
        match op {
            Transform::FlipPost => LocalRule {
                table: self.table.iter().map(|&s| self.complement(s)).collect(),
                ..self.clone()
            },
            Transform::FlipPre => LocalRule::from_fn(self.alphabet, self.lo, self.hi, |w| {
                let flipped: Word = w.iter().map(|&s| self.complement(s)).collect();
                self.output(&flipped)
            })
            .expect("same shape"),
            Transform::ReverseConj => LocalRule::from_fn(self.alphabet, -self.hi, -self.lo, |w| {
                let rev: Word = w.iter().rev().copied().collect();
                self.output(&rev)
            })
            .expect("same shape"),
        }
    }
}

impl PartialEq for LocalRule {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for LocalRule {}

impl fmt::Debug for LocalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.eca_number(), self.to_hex()) {
            (Some(n), _) => write!(f, "LocalRule(ECA {n})"),
            (None, Ok(h)) => write!(f, "LocalRule(hex:{h}@r{})", self.radius()),
            _ => write!(
                f,
                "LocalRule(n={}, [{}, {}], {})",
                self.alphabet,
                self.lo,
                self.hi,
                format_word(&self.table)
            ),
        }
    }
}

fn hex_digits(bits: usize) -> usize {
    bits.div_ceil(4)
}

/// The orbit of ECA `n` under pre/post bit flip and reversal conjugation.
pub fn equivalence_class(n: u32) -> Result<BTreeSet<u32>> {
    let base = LocalRule::eca(n)?;
    let mut class = BTreeSet::new();
    for start in [base.clone(), base.transform(Transform::ReverseConj)] {
        for pre in [false, true] {
            for post in [false, true] {
                let mut g = start.clone();
                if pre {
                    g = g.transform(Transform::FlipPre);
                }
                if post {
                    g = g.transform(Transform::FlipPost);
                }
                class.insert(g.eca_number().expect("symmetries preserve radius 1"));
            }
        }
    }
    Ok(class)
}
