use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Letter, Word};
use crate::error::{Error, Result};

/// An eventually periodic infinite reduced word `prefix · period^∞`.
///
/// Normal form: `period` is cyclically reduced and primitive, `prefix ·
/// period` does not cancel, and `prefix` is as short as possible (its last
/// letter differs from the last letter of `period`). Two rays are equal as
/// infinite words iff their normal forms are equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ray {
    prefix: Word,
    period: Word,
}

impl Ray {
    /// Normalizes `prefix · period^∞` for arbitrary words.
    pub fn new(prefix: &Word, period: &Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Identity("infinite power"));
        }
        // v = c v' c⁻¹ gives u v^∞ = (u c) v'^∞
        let dec = period.cyclic_decompose()?;
        let mut u = prefix.mul(&dec.conjugator).into_letters();
        let mut v = dec.core.into_letters();
        while let Some(&last) = u.last() {
            if last == v[0].inverse() {
                u.pop();
                v.rotate_left(1);
            } else {
                break;
            }
        }
        let mut v = Word::from_reduced(v).primitive_root().into_letters();
        while let Some(&last) = u.last() {
            if last == *v.last().unwrap() {
                u.pop();
                v.rotate_right(1);
            } else {
                break;
            }
        }
        Ok(Ray {
            prefix: Word::from_reduced(u),
            period: Word::from_reduced(v),
        })
    }

    pub fn periodic(period: &Word) -> Result<Self> {
        Ray::new(&Word::identity(), period)
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    pub fn min_rank(&self) -> usize {
        self.prefix.min_rank().max(self.period.min_rank())
    }

    /// The `i`-th letter (0-based).
    pub fn letter(&self, i: usize) -> Letter {
        let p = self.prefix.len();
        if i < p {
            self.prefix.letters()[i]
        } else {
            self.period.letters()[(i - p) % self.period.len()]
        }
    }

    /// The prefix `X_n` of length `n`.
    pub fn take(&self, n: usize) -> Word {
        Word::from_reduced((0..n).map(|i| self.letter(i)).collect())
    }

    /// The ray with its first `n` letters removed.
    pub fn drop(&self, n: usize) -> Ray {
        let p = self.prefix.len();
        if n <= p {
            Ray {
                prefix: self.prefix.slice(n, p),
                period: self.period.clone(),
            }
        } else {
            Ray {
                prefix: Word::identity(),
                period: self.period.rotate_left((n - p) % self.period.len()),
            }
        }
    }

    /// Left action of a group element: `g · X`.
    pub fn translate(&self, g: &Word) -> Ray {
        Ray::new(&g.mul(&self.prefix), &self.period).expect("period is nontrivial")
    }

    /// Length of the longest common prefix, or `None` if the rays are equal.
    pub fn common_prefix_len(&self, other: &Ray) -> Option<usize> {
        if self == other {
            return None;
        }
        let bound = self.prefix.len().max(other.prefix.len()) + self.period.len() + other.period.len();
        (0..=bound).find(|&i| self.letter(i) != other.letter(i))
    }

    /// Factors of length `1..=depth` of the periodic tail `…vvv…` and their
    /// inverses: the words occurring infinitely often in the ray.
    pub fn recurrent_factors(&self, depth: usize) -> BTreeSet<Word> {
        periodic_factors(&self.period, depth)
    }

    /// Whether `u` occurs infinitely often in the ray (inverse-closed).
    pub fn is_recurrent(&self, u: &Word) -> bool {
        let n = self.period.len();
        let reps = u.len().div_ceil(n) + 1;
        let long = Word::from_reduced(self.period.letters().repeat(reps));
        u.is_factor_of(&long) || u.inverse().is_factor_of(&long)
    }
}

/// Factors of length `1..=depth` of the biinfinite word `…www…` (w cyclically
/// reduced), inverse-closed.
pub(crate) fn periodic_factors(w: &Word, depth: usize) -> BTreeSet<Word> {
    let n = w.len();
    let mut out = BTreeSet::new();
    let l = w.letters();
    for start in 0..n {
        let mut f = Vec::with_capacity(depth);
        for k in 0..depth {
            f.push(l[(start + k) % n]);
            let word = Word::from_reduced(f.clone());
            out.insert(word.inverse());
            out.insert(word);
        }
    }
    out
}

impl fmt::Debug for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}·({:?})^∞", self.prefix, self.period)
    }
}

/// A point `(X, X')` of `∂²F_N`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Debug)]
pub struct Leaf {
    left: Ray,
    right: Ray,
}

impl Leaf {
    pub fn new(left: Ray, right: Ray) -> Result<Self> {
        if left == right {
            return Err(Error::InvalidLeaf);
        }
        Ok(Leaf { left, right })
    }

    pub fn left(&self) -> &Ray {
        &self.left
    }

    pub fn right(&self) -> &Ray {
        &self.right
    }

    pub fn flip(&self) -> Leaf {
        Leaf {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn translate(&self, g: &Word) -> Leaf {
        Leaf {
            left: self.left.translate(g),
            right: self.right.translate(g),
        }
    }

    /// The biinfinite word `X⁻¹ X'` after cancelling the common prefix.
    pub fn rho(&self) -> BiinfiniteWord {
        let h = self.left.common_prefix_len(&self.right).expect("leaf rays differ");
        BiinfiniteWord {
            left_tail: self.left.drop(h),
            right_tail: self.right.drop(h),
            common_prefix: self.left.take(h),
        }
    }
}

/// `… y₋₂ y₋₁ · y₀ y₁ …` where `y₋ᵢ = (left_tail)ᵢ⁻¹` and `yᵢ = (right_tail)ᵢ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BiinfiniteWord {
    pub left_tail: Ray,
    pub right_tail: Ray,
    /// The cancelled common prefix of the two rays.
    pub common_prefix: Word,
}

impl BiinfiniteWord {
    pub fn letter(&self, i: i64) -> Letter {
        if i < 0 {
            self.left_tail.letter((-i - 1) as usize).inverse()
        } else {
            self.right_tail.letter(i as usize)
        }
    }

    /// The central factor `y₋ₖ … y_{k-1}` of length `2k`.
    pub fn window(&self, k: usize) -> Word {
        let k = k as i64;
        Word::from_reduced((-k..k).map(|i| self.letter(i)).collect())
    }

    /// Factors of length `≤ depth` of the window of radius `radius`,
    /// inverse-closed.
    pub fn window_factors(&self, radius: usize, depth: usize) -> BTreeSet<Word> {
        super::subwords(&self.window(radius), depth)
    }

    /// All factors of length `≤ depth` of the whole biinfinite word. Beyond
    /// the junction both tails are periodic, so a window reaching one full
    /// period past each prefix suffices.
    pub fn all_factors(&self, depth: usize) -> BTreeSet<Word> {
        let reach = self.left_tail.prefix().len().max(self.right_tail.prefix().len())
            + self.left_tail.period().len().max(self.right_tail.period().len())
            + depth;
        self.window_factors(reach, depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Basis;

    fn b() -> Basis {
        Basis::from_chars("abc").unwrap()
    }

    fn w(s: &str) -> Word {
        b().parse_word(s).unwrap()
    }

    #[test]
    fn normalization() {
        // a a' b^∞ -> b^∞
        let r = Ray::new(&w("c a'"), &w("a b")).unwrap();
        assert_eq!(r.prefix(), &w("c"));
        assert_eq!(r.period(), &w("b a"));
        let r = Ray::new(&w(""), &w("abab")).unwrap();
        assert_eq!(r.period(), &w("ab"));
        // b a (ba)^∞ absorbs the prefix
        let r = Ray::new(&w("b a"), &w("b a")).unwrap();
        assert!(r.prefix().is_empty());
        // conjugated period
        let r = Ray::new(&w(""), &w("b a b'")).unwrap();
        assert_eq!(r.prefix(), &w("b"));
        assert_eq!(r.period(), &w("a"));
        // prefix cancelling deep into the period
        let r = Ray::new(&w("b' a' b' a'"), &w("a b")).unwrap();
        assert_eq!(r, Ray::periodic(&w("a b")).unwrap());
        assert_eq!(r.take(4), w("a b a b"));
        assert!(Ray::new(&w("a"), &w("")).is_err());
    }

    #[test]
    fn translate_and_drop() {
        let r = Ray::new(&w("a"), &w("c")).unwrap();
        assert_eq!(r.translate(&w("a'")), Ray::periodic(&w("c")).unwrap());
        assert_eq!(r.drop(3), Ray::periodic(&w("c")).unwrap());
        assert_eq!(r.drop(0), r);
    }

    #[test]
    fn rho_examples() {
        let l = Leaf::new(Ray::periodic(&w("a")).unwrap(), Ray::periodic(&w("b")).unwrap()).unwrap();
        assert_eq!(l.rho().window(2), w("a' a' b b"));
        let l = Leaf::new(Ray::new(&w("a"), &w("b")).unwrap(), Ray::new(&w("a"), &w("c")).unwrap()).unwrap();
        let z = l.rho();
        assert_eq!(z.common_prefix, w("a"));
        assert_eq!(z.window(2), w("b' b' c c"));
        assert!(Leaf::new(Ray::periodic(&w("a")).unwrap(), Ray::periodic(&w("aa")).unwrap()).is_err());
    }

    #[test]
    fn recurrent_examples() {
        let r = Ray::new(&w("c"), &w("a")).unwrap();
        let got = r.recurrent_factors(2);
        let want: BTreeSet<Word> = ["a", "aa", "a'", "a'a'"].iter().map(|s| w(s)).collect();
        assert_eq!(got, want);
        let r = Ray::periodic(&w("ab")).unwrap();
        let got = r.recurrent_factors(3);
        let want: BTreeSet<Word> = ["a", "b", "ab", "ba", "aba", "bab"]
            .iter()
            .flat_map(|s| [w(s), w(s).inverse()])
            .collect();
        assert_eq!(got, want);
    }
}
