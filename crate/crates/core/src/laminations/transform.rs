use std::collections::{BTreeMap, BTreeSet};

use super::{LaminaryLanguage, Provenance};
use crate::basischange::Automorphism;
use crate::error::{Error, Result};
use crate::freewords::{subwords, Leaf, Ray};

/// Smallest set containing `pairs` that is closed under flips and under
/// `(X, X'), (X', X'') ↦ (X, X'')` for `X ≠ X''`: all ordered pairs of
/// distinct rays in each connected component.
pub fn diagonal_closure(pairs: &BTreeSet<Leaf>) -> BTreeSet<Leaf> {
    let mut ids: BTreeMap<&Ray, usize> = BTreeMap::new();
    for l in pairs {
        for r in [l.left(), l.right()] {
            let n = ids.len();
            ids.entry(r).or_insert(n);
        }
    }
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for l in pairs {
        let (a, b) = (find(&mut parent, ids[l.left()]), find(&mut parent, ids[l.right()]));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut comps: BTreeMap<usize, Vec<&Ray>> = BTreeMap::new();
    for (r, &i) in &ids {
        let root = find(&mut parent, i);
        comps.entry(root).or_default().push(r);
    }
    let mut out = BTreeSet::new();
    for rays in comps.values() {
        for x in rays {
            for y in rays {
                if x != y {
                    out.insert(Leaf::new((*x).clone(), (*y).clone()).expect("distinct rays"));
                }
            }
        }
    }
    out
}

/// `α^{-1}(L)` chopped by `chop_bound` on each side, taken at depth
/// `depth(L) − 2·chop_bound` and re-closed.
pub fn act_on_language(alpha: &Automorphism, l: &LaminaryLanguage, chop_bound: usize) -> Result<LaminaryLanguage> {
    if 2 * chop_bound >= l.depth() {
        return Err(Error::InvalidParameter(format!(
            "chop bound {chop_bound} leaves nothing at depth {}",
            l.depth()
        )));
    }
    if alpha.rank() != l.rank() {
        return Err(Error::BasisMismatch(
            "automorphism and language have different ranks".into(),
        ));
    }
    let inv = alpha.inverse()?;
    let depth = l.depth() - 2 * chop_bound;
    let mut words = BTreeSet::new();
    for u in l.words() {
        let v = inv.apply(u)?.chop(chop_bound);
        if !v.is_empty() {
            words.extend(subwords(&v, depth));
        }
    }
    let mut p = l.provenance().clone();
    p = Provenance {
        construction: "act".into(),
        params: Default::default(),
        flags: p.flags,
    }
    .param("automorphism", alpha.content_hash())
    .param("chop_bound", chop_bound)
    .param("source_depth", l.depth())
    .param("source", p.construction);
    Ok(LaminaryLanguage::closure(l.rank(), depth, words, p))
}

/// Whether the recurrent language of `r` at the depth of `l` lies in `l`.
pub fn l1_infinity_member(r: &Ray, l: &LaminaryLanguage) -> bool {
    r.recurrent_factors(l.depth()).iter().all(|u| l.contains(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basischange::{dehn_twist, Automorphism};
    use crate::freewords::{Basis, Word};
    use crate::laminations::rational_language;

    fn b() -> Basis {
        Basis::from_chars("abc").unwrap()
    }

    fn w(s: &str) -> Word {
        b().parse_word(s).unwrap()
    }

    fn ray(u: &str, v: &str) -> Ray {
        Ray::new(&w(u), &w(v)).unwrap()
    }

    #[test]
    fn closure_of_a_chain() {
        let (x, y, z) = (ray("", "a"), ray("", "b"), ray("c", "a"));
        let s: BTreeSet<Leaf> = [
            Leaf::new(x.clone(), y.clone()).unwrap(),
            Leaf::new(y, z.clone()).unwrap(),
        ]
        .into_iter()
        .collect();
        let c = diagonal_closure(&s);
        assert_eq!(c.len(), 6);
        assert!(c.contains(&Leaf::new(x.clone(), z.clone()).unwrap()));
        assert!(c.contains(&Leaf::new(z, x).unwrap()));
        assert_eq!(diagonal_closure(&c), c);

        let m = 7;
        let rays: Vec<Ray> = (1..=m).map(|k| ray(&"b ".repeat(k), "a")).collect();
        let chain: BTreeSet<Leaf> = rays
            .windows(2)
            .map(|p| Leaf::new(p[0].clone(), p[1].clone()).unwrap())
            .collect();
        assert_eq!(diagonal_closure(&chain).len(), m * (m - 1));
        assert!(diagonal_closure(&BTreeSet::new()).is_empty());
    }

    #[test]
    fn identity_action_is_trivial() {
        let l = rational_language(3, &crate::freewords::CyclicWord::new(&w("a b")).unwrap(), 4);
        let m = act_on_language(&Automorphism::identity(&b()), &l, 0).unwrap();
        assert!(m.same_words(&l));
        assert!(act_on_language(&Automorphism::identity(&b()), &l, 4).is_err());
    }

    #[test]
    fn twist_acts_on_rational_languages() {
        // the twist fixes c
        let c = crate::freewords::CyclicWord::new(&w("c")).unwrap();
        let m = act_on_language(&dehn_twist(), &rational_language(3, &c, 5), 1).unwrap();
        assert_eq!(m.depth(), 3);
        assert!(m.same_words(&rational_language(3, &c, 3)));
        // a ↦ b'ab moves the a-leaf to a conjugate; the language is unchanged
        let a = crate::freewords::CyclicWord::new(&w("a")).unwrap();
        let m = act_on_language(&dehn_twist(), &rational_language(3, &a, 5), 1).unwrap();
        assert!(m.same_words(&rational_language(3, &a, 3)));
    }

    #[test]
    fn membership_ignores_prefixes() {
        let l = rational_language(3, &crate::freewords::CyclicWord::new(&w("c")).unwrap(), 4);
        assert!(l1_infinity_member(&ray("", "c"), &l));
        assert!(l1_infinity_member(&ray("a b", "c"), &l));
        assert!(!l1_infinity_member(&ray("", "a"), &l));
    }
}
