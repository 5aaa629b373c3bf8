//! Exhaustive enumeration of reduced words, canonical cyclic words and
//! normalized rays, in a deterministic order.

use std::collections::BTreeSet;

use super::{CyclicWord, Letter, Ray, Word};

/// All reduced words of length exactly `len`, in lexicographic order.
pub fn reduced_words(rank: usize, len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    extend(rank, len, &mut cur, &mut |w| out.push(Word::from_reduced(w.to_vec())));
    out
}

/// All reduced words of length `0..=max_len`, in shortlex order.
pub fn reduced_words_up_to(rank: usize, max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|n| reduced_words(rank, n)).collect()
}

/// Reduced words of length exactly `len` whose first letter is `first`.
pub fn reduced_words_starting(rank: usize, len: usize, first: Letter) -> Vec<Word> {
    if len == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = vec![first];
    extend(rank, len, &mut cur, &mut |w| out.push(Word::from_reduced(w.to_vec())));
    out
}

fn extend(rank: usize, len: usize, cur: &mut Vec<Letter>, emit: &mut dyn FnMut(&[Letter])) {
    if cur.len() == len {
        emit(cur);
        return;
    }
    for l in Letter::all(rank) {
        if cur.last() == Some(&l.inverse()) {
            continue;
        }
        cur.push(l);
        extend(rank, len, cur, emit);
        cur.pop();
    }
}

/// Canonical cyclic words of length exactly `len`, each conjugacy class once,
/// in shortlex order of the canonical representative.
pub fn canonical_cyclic_words(rank: usize, len: usize) -> Vec<CyclicWord> {
    if len == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in Letter::all(rank) {
        let mut cur = vec![first];
        extend_canonical(rank, len, &mut cur, &mut out);
    }
    out
}

fn extend_canonical(rank: usize, len: usize, cur: &mut Vec<Letter>, out: &mut Vec<CyclicWord>) {
    if cur.len() == len {
        if len == 1 || cur[0] != cur[len - 1].inverse() {
            let w = Word::from_reduced(cur.clone());
            // keep only words that are their own least rotation
            if let Ok(c) = CyclicWord::new(&w) {
                if c.word() == &w {
                    out.push(c);
                }
            }
        }
        return;
    }
    for l in Letter::all(rank) {
        // every letter of a least rotation is >= its first letter
        if l < cur[0] || cur.last() == Some(&l.inverse()) {
            continue;
        }
        cur.push(l);
        extend_canonical(rank, len, cur, out);
        cur.pop();
    }
}

pub fn canonical_cyclic_words_up_to(rank: usize, max_len: usize) -> Vec<CyclicWord> {
    (1..=max_len).flat_map(|n| canonical_cyclic_words(rank, n)).collect()
}

/// All normalized rays `u · v^∞` with `|u| ≤ prefix_cap` and `|v| ≤ period_cap`,
/// deduplicated and sorted.
pub fn rays(rank: usize, prefix_cap: usize, period_cap: usize) -> Vec<Ray> {
    let prefixes = reduced_words_up_to(rank, prefix_cap);
    let periods: Vec<Word> = (1..=period_cap)
        .flat_map(|n| reduced_words(rank, n))
        .filter(|w| w.is_cyclically_reduced() && w.primitive_root().len() == w.len())
        .collect();
    let mut out = BTreeSet::new();
    for u in &prefixes {
        for v in &periods {
            let r = Ray::new(u, v).expect("nonempty period");
            if r.prefix().len() <= prefix_cap {
                out.insert(r);
            }
        }
    }
    out.into_iter().collect()
}
