use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freewords::Word;

/// Which kind of subsequence was selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Only cyclically reduced seeds.
    CyclicallyReduced,
    /// Seeds sharing one conjugator.
    ConstantConjugator,
    /// Seeds with strictly increasing conjugator lengths.
    IncreasingConjugator,
}

/// Cancellation measured between consecutive selected seeds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junction {
    pub left: usize,
    pub right: usize,
    pub cancellation: usize,
    pub left_conjugator: usize,
    pub right_conjugator: usize,
}

impl Junction {
    pub fn within_conjugators(&self) -> bool {
        self.cancellation <= self.left_conjugator.min(self.right_conjugator)
    }
}

/// Selected seeds, their exponents `±1`, the junction measurements and the
/// reduced concatenation `w_{i1}^{d1} w_{i2}^{d2} …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct L1RayConstruction {
    pub regime: Regime,
    pub selected: Vec<usize>,
    pub signs: Vec<i8>,
    pub junctions: Vec<Junction>,
    pub word: Word,
}

impl L1RayConstruction {
    /// Every junction cancels inside the conjugating parts.
    pub fn certified(&self) -> bool {
        self.junctions.iter().all(Junction::within_conjugators)
    }
}

struct Seed {
    conj: Word,
    plus: Word,
    minus: Word,
}

fn signed(s: &Seed, d: i8) -> &Word {
    if d > 0 {
        &s.plus
    } else {
        &s.minus
    }
}

fn junction_ok(a: &Seed, da: i8, b: &Seed, db: i8) -> bool {
    signed(a, da).cancellation_with(signed(b, db)) <= a.conj.len().min(b.conj.len())
}

/// Longest chain `i1 < i2 < …` among `candidates` with signs such that every
/// junction stays within the conjugators; `order_ok` restricts consecutive
/// pairs. Earliest-index chains win ties.
fn longest_chain(seeds: &[Seed], candidates: &[usize], order_ok: impl Fn(usize, usize) -> bool) -> Vec<(usize, i8)> {
    const SIGNS: [i8; 2] = [1, -1];
    let n = candidates.len();
    if n == 0 {
        return Vec::new();
    }
    // best[j][s]: longest chain starting at candidate j with sign s
    let mut best = vec![[1usize; 2]; n];
    let mut next: Vec<[Option<(usize, usize)>; 2]> = vec![[None; 2]; n];
    for j in (0..n).rev() {
        for (si, &s) in SIGNS.iter().enumerate() {
            for k in j + 1..n {
                if !order_ok(candidates[j], candidates[k]) {
                    continue;
                }
                for (ti, &t) in SIGNS.iter().enumerate() {
                    if junction_ok(&seeds[candidates[j]], s, &seeds[candidates[k]], t) && best[k][ti] + 1 > best[j][si]
                    {
                        best[j][si] = best[k][ti] + 1;
                        next[j][si] = Some((k, ti));
                    }
                }
            }
        }
    }
    let mut start = (0, 0);
    for j in 0..n {
        for si in 0..2 {
            if best[j][si] > best[start.0][start.1] {
                start = (j, si);
            }
        }
    }
    let mut chain = Vec::new();
    let mut cur = Some(start);
    while let Some((j, si)) = cur {
        chain.push((candidates[j], SIGNS[si]));
        cur = next[j][si];
    }
    chain
}

/// Chooses a subsequence of the seeds and exponents `±1` so that each
/// consecutive product cancels no more than the conjugating parts of the
/// two factors. The three candidate regimes are tried and the longest
/// result kept.
pub fn build_l1_ray(seeds: &[Word]) -> Result<L1RayConstruction> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("no seeds".into()));
    }
    if seeds.iter().any(Word::is_empty) {
        return Err(Error::InvalidParameter("trivial seed".into()));
    }
    let parsed: Vec<Seed> = seeds
        .iter()
        .map(|w| {
            let d = w.cyclic_decompose().expect("nontrivial");
            Seed {
                conj: d.conjugator,
                plus: w.clone(),
                minus: w.inverse(),
            }
        })
        .collect();
    let all: Vec<usize> = (0..seeds.len()).collect();

    let reduced: Vec<usize> = all.iter().copied().filter(|&i| parsed[i].conj.is_empty()).collect();
    let mut by_conj: BTreeMap<&Word, Vec<usize>> = BTreeMap::new();
    for &i in &all {
        by_conj.entry(&parsed[i].conj).or_default().push(i);
    }
    let constant = by_conj
        .values()
        .max_by(|x, y| x.len().cmp(&y.len()).then(y[0].cmp(&x[0])))
        .cloned()
        .unwrap_or_default();

    let options = [
        (Regime::CyclicallyReduced, longest_chain(&parsed, &reduced, |_, _| true)),
        (
            Regime::ConstantConjugator,
            longest_chain(&parsed, &constant, |_, _| true),
        ),
        (
            Regime::IncreasingConjugator,
            longest_chain(&parsed, &all, |i, j| parsed[i].conj.len() < parsed[j].conj.len()),
        ),
    ];
    let (regime, chain) = options
        .into_iter()
        .fold(None::<(Regime, Vec<(usize, i8)>)>, |acc, o| match acc {
            Some(a) if a.1.len() >= o.1.len() => Some(a),
            _ => Some(o),
        })
        .expect("three options");

    let mut word = Word::identity();
    let mut junctions = Vec::new();
    for (pos, &(i, d)) in chain.iter().enumerate() {
        let piece = signed(&parsed[i], d);
        if pos > 0 {
            let (p, _) = chain[pos - 1];
            junctions.push(Junction {
                left: p,
                right: i,
                // measured on the running product
                cancellation: word.cancellation_with(piece),
                left_conjugator: parsed[p].conj.len(),
                right_conjugator: parsed[i].conj.len(),
            });
        }
        word = word.mul(piece);
    }
    Ok(L1RayConstruction {
        regime,
        selected: chain.iter().map(|c| c.0).collect(),
        signs: chain.iter().map(|c| c.1).collect(),
        junctions,
        word,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freewords::Basis;

    fn w(s: &str) -> Word {
        Basis::from_chars("abc").unwrap().parse_word(s).unwrap()
    }

    #[test]
    fn cyclically_reduced_seeds_do_not_cancel() {
        let seeds = vec![w("a b"), w("b' a"), w("c"), w("c a b'")];
        let r = build_l1_ray(&seeds).unwrap();
        assert_eq!(r.regime, Regime::CyclicallyReduced);
        assert_eq!(r.selected, vec![0, 1, 2, 3]);
        assert!(r.junctions.iter().all(|j| j.cancellation == 0));
        assert_eq!(r.word.len(), 2 + 2 + 1 + 3);
    }

    #[test]
    fn alternating_single_letter() {
        let seeds = vec![w("a"), w("a'"), w("a"), w("a'")];
        let r = build_l1_ray(&seeds).unwrap();
        assert_eq!(r.signs, vec![1, -1, 1, -1]);
        assert_eq!(r.word, w("a a a a"));
    }

    #[test]
    fn constant_conjugator() {
        let seeds = vec![w("b a b'"), w("b c b'"), w("b a' b'")];
        let r = build_l1_ray(&seeds).unwrap();
        assert_eq!(r.regime, Regime::ConstantConjugator);
        assert_eq!(r.selected.len(), 3);
        assert!(r.certified());
        assert!(r.junctions.iter().all(|j| j.cancellation == 1));
    }

    #[test]
    fn increasing_conjugators() {
        let seeds = vec![
            w("c a c'"),
            w("c b c b' c'"),
            w("c b a c a' b' c'"),
            w("c b a b c b' a' b' c'"),
        ];
        let r = build_l1_ray(&seeds).unwrap();
        assert_eq!(r.regime, Regime::IncreasingConjugator);
        assert_eq!(r.selected, vec![0, 1, 2, 3]);
        assert!(r.certified());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_l1_ray(&[]).is_err());
        assert!(build_l1_ray(&[w("a"), Word::identity()]).is_err());
    }
}
