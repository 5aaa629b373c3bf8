use std::fmt;

use serde::{Deserialize, Serialize};

use super::Word;
use crate::error::{Error, Result};

/// A conjugacy class of a nontrivial element, stored as the
/// lexicographically least rotation of its cyclically reduced representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicWord(Word);

impl CyclicWord {
    /// Canonical representative of the conjugacy class of `w`.
    pub fn new(w: &Word) -> Result<Self> {
        let core = w.cyclic_core();
        if core.is_empty() {
            return Err(Error::Identity("conjugacy class representative"));
        }
        Ok(CyclicWord(least_rotation(&core)))
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord(least_rotation(&self.0.inverse()))
    }

    pub fn pow(&self, n: usize) -> CyclicWord {
        CyclicWord(least_rotation(&self.0.pow(n as i64)))
    }

    pub fn is_proper_power(&self) -> bool {
        self.0.primitive_root().len() < self.0.len()
    }

    /// True if `u` occurs as a factor of some rotation of `self`, i.e. of
    /// `self^∞` within one period plus `|u|` letters.
    pub fn contains_cyclic_factor(&self, u: &Word) -> bool {
        let n = self.0.len();
        if u.is_empty() {
            return true;
        }
        let reps = u.len().div_ceil(n) + 1;
        let long = self.0.letters().repeat(reps);
        super::word::is_factor(u.letters(), &long)
    }
}

pub(crate) fn least_rotation(w: &Word) -> Word {
    let n = w.len();
    if n <= 1 {
        return w.clone();
    }
    let l = w.letters();
    let mut best = 0;
    for start in 1..n {
        for k in 0..n {
            let a = l[(start + k) % n];
            let b = l[(best + k) % n];
            if a != b {
                if a < b {
                    best = start;
                }
                break;
            }
        }
    }
    w.rotate_left(best)
}

impl fmt::Debug for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Basis;

    #[test]
    fn canonical_rotation() {
        let b = Basis::from_chars("abc").unwrap();
        let c1 = CyclicWord::new(&b.parse_word("bca").unwrap()).unwrap();
        let c2 = CyclicWord::new(&b.parse_word("c' abc c").unwrap()).unwrap();
        assert_eq!(c1.word(), &b.parse_word("abc").unwrap());
        assert_eq!(c1, c2);
        assert_eq!(CyclicWord::new(c1.word()).unwrap(), c1);
        assert!(CyclicWord::new(&b.parse_word("a a'").unwrap()).is_err());
        // a < a' < b in the letter order
        let c3 = CyclicWord::new(&b.parse_word("b a'").unwrap()).unwrap();
        assert_eq!(b.format_word(c3.word()), "a' b");
    }

    #[test]
    fn cyclic_factors() {
        let b = Basis::from_chars("abc").unwrap();
        let c = CyclicWord::new(&b.parse_word("ab").unwrap()).unwrap();
        assert!(c.contains_cyclic_factor(&b.parse_word("bab").unwrap()));
        assert!(!c.contains_cyclic_factor(&b.parse_word("aa").unwrap()));
    }
}
