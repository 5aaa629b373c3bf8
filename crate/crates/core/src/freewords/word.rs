use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter of `A^{±1}`: generator `i` is stored as `i + 1`, its inverse as
/// `-(i + 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter(i16);

impl Letter {
    pub fn generator(index: usize) -> Self {
        Letter(index as i16 + 1)
    }

    pub fn from_signed(code: i16) -> Self {
        assert!(code != 0, "letter code 0 is reserved");
        Letter(code)
    }

    pub fn code(self) -> i16 {
        self.0
    }

    pub fn index(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Position in the fixed total order `a < a' < b < b' < ...`.
    pub fn key(self) -> u16 {
        2 * self.index() as u16 + self.is_inverse() as u16
    }

    /// All `2N` letters in key order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> {
        (0..rank).flat_map(|i| [Letter::generator(i), Letter::generator(i).inverse()])
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.index();
        let name = if idx < 26 {
            ((b'a' + idx as u8) as char).to_string()
        } else {
            format!("x{idx}")
        };
        write!(f, "{}{}", name, if self.is_inverse() { "'" } else { "" })
    }
}

/// A freely reduced word. The empty word is the identity.
///
/// Ordered shortlex: shorter words first, then lexicographically by
/// [`Letter::key`].
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for l in &self.0 {
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

/// `w = v · core · v⁻¹` with `core` cyclically reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyDecomposition {
    pub conjugator: Word,
    pub core: Word,
}

impl ConjugacyDecomposition {
    pub fn recompose(&self) -> Word {
        self.conjugator.mul(&self.core).mul(&self.conjugator.inverse())
    }
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            push_reducing(&mut out, l);
        }
        Word(out)
    }

    /// Wraps a sequence that is already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest generator index used, plus one.
    pub fn min_rank(&self) -> usize {
        self.0.iter().map(|l| l.index() + 1).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &Word) -> Self {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reducing(&mut out, l);
        }
        Word(out)
    }

    /// Number of letters cancelled (on each side) when forming `self · other`.
    pub fn cancellation_with(&self, other: &Word) -> usize {
        self.0
            .iter()
            .rev()
            .zip(other.0.iter())
            .take_while(|(x, y)| **x == y.inverse())
            .count()
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.0.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `w = v · w' · v⁻¹` with `w'` cyclically reduced.
    pub fn cyclic_decompose(&self) -> Result<ConjugacyDecomposition> {
        if self.is_empty() {
            return Err(Error::Identity("conjugacy decomposition"));
        }
        let n = self.0.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        Ok(ConjugacyDecomposition {
            conjugator: Word(self.0[..k].to_vec()),
            core: Word(self.0[k..n - k].to_vec()),
        })
    }

    /// The cyclically reduced part; the identity maps to itself.
    pub fn cyclic_core(&self) -> Word {
        match self.cyclic_decompose() {
            Ok(d) => d.core,
            Err(_) => Word::identity(),
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn suffix(&self, n: usize) -> Word {
        let len = self.0.len();
        Word(self.0[len - n.min(len)..].to_vec())
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Removes the initial and final subwords of length `k`; the identity if
    /// `|w| ≤ 2k`.
    pub fn chop(&self, k: usize) -> Word {
        let n = self.0.len();
        if n <= 2 * k {
            Word::identity()
        } else {
            Word(self.0[k..n - k].to_vec())
        }
    }

    pub fn is_factor_of(&self, other: &Word) -> bool {
        is_factor(&self.0, &other.0)
    }

    /// Contiguous nonempty factors of length at most `max_len`, with repetitions.
    pub fn factors(&self, max_len: usize) -> impl Iterator<Item = Word> + '_ {
        let n = self.0.len();
        (0..n).flat_map(move |i| (i + 1..=n.min(i + max_len)).map(move |j| Word(self.0[i..j].to_vec())))
    }

    /// Smallest `r` with `self = r^k`.
    pub fn primitive_root(&self) -> Word {
        let n = self.0.len();
        for d in 1..n {
            if n.is_multiple_of(d) && (d..n).all(|i| self.0[i] == self.0[i - d]) {
                return Word(self.0[..d].to_vec());
            }
        }
        self.clone()
    }

    /// Cyclic rotation by `k` letters to the left. Only meaningful on
    /// cyclically reduced words, where the result is again reduced.
    pub fn rotate_left(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        debug_assert!(self.is_cyclically_reduced());
        Word(v)
    }
}

pub(crate) fn push_reducing(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

pub(crate) fn is_factor(needle: &[Letter], hay: &[Letter]) -> bool {
    needle.is_empty() || hay.windows(needle.len()).any(|w| w == needle)
}

/// All factors of length `1..=depth` of `w`, together with their inverses.
pub fn subwords(w: &Word, depth: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for f in w.factors(depth) {
        out.insert(f.inverse());
        out.insert(f);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Basis;

    fn abc() -> Basis {
        Basis::from_chars("abc").unwrap()
    }

    #[test]
    fn reduce_examples() {
        let b = abc();
        assert_eq!(b.format_word(&b.parse_word("a b b' c").unwrap()), "a c");
        assert_eq!(b.format_word(&b.parse_word("a").unwrap()), "a");
        assert!(b.parse_word("a b b' a'").unwrap().is_empty());
    }

    #[test]
    fn decompose_examples() {
        let b = abc();
        let d = b.parse_word("b a b'").unwrap().cyclic_decompose().unwrap();
        assert_eq!(d.conjugator, b.parse_word("b").unwrap());
        assert_eq!(d.core, b.parse_word("a").unwrap());
        let d = b.parse_word("a b c").unwrap().cyclic_decompose().unwrap();
        assert!(d.conjugator.is_empty());
        assert_eq!(d.core, b.parse_word("abc").unwrap());
        let w = b.parse_word("b b a c a' b' b'").unwrap();
        let d = w.cyclic_decompose().unwrap();
        assert_eq!(d.conjugator, b.parse_word("bba").unwrap());
        assert_eq!(d.core, b.parse_word("c").unwrap());
        assert_eq!(d.recompose(), w);
        assert!(Word::identity().cyclic_decompose().is_err());
    }

    #[test]
    fn subword_examples() {
        let b = abc();
        let got = subwords(&b.parse_word("abc").unwrap(), 2);
        let want: BTreeSet<Word> = ["a", "b", "c", "ab", "bc", "a'", "b'", "c'", "b'a'", "c'b'"]
            .iter()
            .map(|s| b.parse_word(s).unwrap())
            .collect();
        assert_eq!(got, want);
        let got = subwords(&b.parse_word("a").unwrap(), 3);
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn chop_examples() {
        let b = abc();
        let w = b.parse_word("abcab").unwrap();
        assert_eq!(w.chop(1), b.parse_word("bca").unwrap());
        assert_eq!(w.chop(0), w);
        assert!(w.chop(3).is_empty());
        assert!(b.parse_word("ab").unwrap().chop(1).is_empty());
    }

    #[test]
    fn roots_and_powers() {
        let b = abc();
        let w = b.parse_word("abab").unwrap();
        assert_eq!(w.primitive_root(), b.parse_word("ab").unwrap());
        assert_eq!(b.parse_word("ab").unwrap().pow(-2), b.parse_word("b'a'b'a'").unwrap());
        assert!(b.parse_word("aba'").unwrap().pow(0).is_empty());
    }

    #[test]
    fn shortlex_order() {
        let b = abc();
        let mut v: Vec<Word> = ["b", "a'", "ab", "a", "c"]
            .iter()
            .map(|s| b.parse_word(s).unwrap())
            .collect();
        v.sort();
        let s: Vec<String> = v.iter().map(|w| b.format_word(w)).collect();
        assert_eq!(s, vec!["a", "a'", "b", "c", "a b"]);
    }
}
