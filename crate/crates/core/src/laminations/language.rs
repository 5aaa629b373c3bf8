use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::{subwords, Basis, Letter, Word};

/// Which construction produced a language, with its parameters and any
/// warning flags (`unstabilized`, `undercount`, `incomplete`, ...).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub flags: BTreeSet<String>,
}

impl Provenance {
    pub fn new(construction: &str) -> Self {
        Provenance {
            construction: construction.to_string(),
            ..Default::default()
        }
    }

    pub fn param<V: Serialize>(mut self, key: &str, value: V) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable parameter"),
        );
        self
    }

    pub fn with_flag(mut self, flag: &str) -> Self {
        self.flags.insert(flag.to_string());
        self
    }

    pub fn add_flag(&mut self, flag: &str) {
        self.flags.insert(flag.to_string());
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.contains(flag)
    }
}

/// A finite set of nontrivial reduced words of length `≤ depth`, closed under
/// inversion and factors, in which every word shorter than `depth` extends by
/// one letter on each side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminaryLanguage {
    rank: usize,
    depth: usize,
    words: BTreeSet<Word>,
    provenance: Provenance,
}

impl LaminaryLanguage {
    pub fn empty(rank: usize, depth: usize, provenance: Provenance) -> Self {
        LaminaryLanguage {
            rank,
            depth,
            words: BTreeSet::new(),
            provenance,
        }
    }

    /// The laminary closure of arbitrary words: add inverses and factors
    /// (words longer than `depth` contribute their factors), then discard
    /// words that cannot be extended on both sides, to a fixpoint.
    pub fn closure<I: IntoIterator<Item = Word>>(rank: usize, depth: usize, words: I, provenance: Provenance) -> Self {
        let mut set = BTreeSet::new();
        for w in words {
            if w.is_empty() {
                continue;
            }
            set.extend(subwords(&w, depth));
        }
        let mut l = LaminaryLanguage {
            rank,
            depth,
            words: set,
            provenance,
        };
        l.prune();
        debug_assert!(l.check().is_ok());
        l
    }

    /// For sets already closed under inversion and factors.
    pub fn from_closed_set(rank: usize, depth: usize, words: BTreeSet<Word>, provenance: Provenance) -> Self {
        LaminaryLanguage::closure(rank, depth, words, provenance)
    }

    fn prune(&mut self) {
        loop {
            let dead: Vec<Word> = self
                .words
                .iter()
                .filter(|u| u.len() < self.depth && !self.extends(u))
                .cloned()
                .collect();
            if dead.is_empty() {
                return;
            }
            let dead: BTreeSet<Word> = dead.into_iter().collect();
            self.words.retain(|w| !dead.iter().any(|d| d.is_factor_of(w)));
        }
    }

    fn extends(&self, u: &Word) -> bool {
        let left = Letter::all(self.rank)
            .filter(|&x| u.first() != Some(x.inverse()))
            .any(|x| self.words.contains(&Word::letter(x).mul(u)));
        let right = Letter::all(self.rank)
            .filter(|&y| u.last() != Some(y.inverse()))
            .any(|y| self.words.contains(&u.mul(&Word::letter(y))));
        left && right
    }

    /// Re-checks the three closure conditions.
    pub fn check(&self) -> Result<()> {
        for w in &self.words {
            if w.is_empty() || w.len() > self.depth {
                return Err(Error::Format(format!(
                    "word of length {} at depth {}",
                    w.len(),
                    self.depth
                )));
            }
            if !self.words.contains(&w.inverse()) {
                return Err(Error::Format("language is not closed under inversion".into()));
            }
            if w.len() > 1
                && !(self.words.contains(&w.prefix(w.len() - 1)) && self.words.contains(&w.suffix(w.len() - 1)))
            {
                return Err(Error::Format("language is not closed under factors".into()));
            }
            if w.len() < self.depth && !self.extends(w) {
                return Err(Error::Format("a word does not extend on both sides".into()));
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn words(&self) -> &BTreeSet<Word> {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.words.contains(w)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn provenance_mut(&mut self) -> &mut Provenance {
        &mut self.provenance
    }

    pub fn is_subset(&self, other: &LaminaryLanguage) -> bool {
        self.words.is_subset(&other.words)
    }

    /// Same words (provenance ignored).
    pub fn same_words(&self, other: &LaminaryLanguage) -> bool {
        self.depth == other.depth && self.words == other.words
    }

    /// Words of length `≤ depth` only.
    pub fn truncate(&self, depth: usize) -> LaminaryLanguage {
        let words = self.words.iter().filter(|w| w.len() <= depth).cloned();
        LaminaryLanguage::closure(self.rank, depth.min(self.depth), words, self.provenance.clone())
    }

    /// Set intersection, re-closed.
    pub fn intersection(&self, other: &LaminaryLanguage, provenance: Provenance) -> LaminaryLanguage {
        let words = self.words.intersection(&other.words).cloned();
        LaminaryLanguage::closure(self.rank, self.depth.min(other.depth), words, provenance)
    }

    /// Set union, re-closed.
    pub fn union(&self, other: &LaminaryLanguage, provenance: Provenance) -> LaminaryLanguage {
        let words = self.words.union(&other.words).cloned();
        LaminaryLanguage::closure(self.rank, self.depth.max(other.depth), words, provenance)
    }

    pub fn to_file(&self, basis: &Basis) -> LanguageFile {
        LanguageFile {
            basis: basis.symbols().join(" "),
            depth: self.depth,
            provenance: self.provenance.clone(),
            words: self.words.iter().map(|w| basis.format_word(w)).collect(),
        }
    }

    pub fn from_file(f: &LanguageFile) -> Result<(Basis, LaminaryLanguage)> {
        let basis = Basis::parse(&f.basis)?;
        let words = f
            .words
            .iter()
            .map(|s| basis.parse_word(s))
            .collect::<Result<BTreeSet<Word>>>()?;
        let l = LaminaryLanguage {
            rank: basis.rank(),
            depth: f.depth,
            words,
            provenance: f.provenance.clone(),
        };
        l.check()?;
        Ok((basis, l))
    }
}

/// On-disk form of a language; words are listed in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanguageFile {
    pub basis: String,
    pub depth: usize,
    pub provenance: Provenance,
    pub words: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub equal: bool,
    pub left_minus_right: Vec<String>,
    pub right_minus_left: Vec<String>,
}

pub fn compare(basis: &Basis, left: &LaminaryLanguage, right: &LaminaryLanguage) -> Comparison {
    let lr: Vec<String> = left
        .words
        .difference(&right.words)
        .map(|w| basis.format_word(w))
        .collect();
    let rl: Vec<String> = right
        .words
        .difference(&left.words)
        .map(|w| basis.format_word(w))
        .collect();
    Comparison {
        equal: lr.is_empty() && rl.is_empty() && left.depth == right.depth,
        left_minus_right: lr,
        right_minus_left: rl,
    }
}
