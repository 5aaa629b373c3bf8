use lamtree::basischange::{dehn_twist, tribonacci};
use lamtree::freewords::{CyclicWord, Letter, Ray, Word};
use proptest::prelude::*;

/// Free reduction on raw letter codes, kept separate from the library.
fn reduce_codes(codes: &[i16]) -> Vec<i16> {
    let mut out: Vec<i16> = Vec::new();
    for &x in codes {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

fn codes(w: &Word) -> Vec<i16> {
    w.letters().iter().map(|l| l.code()).collect()
}

fn word(codes: &[i16]) -> Word {
    Word::reduce(codes.iter().map(|&c| Letter::from_signed(c)))
}

fn letter_code() -> impl Strategy<Value = i16> {
    prop::sample::select(vec![1i16, -1, 2, -2, 3, -3])
}

fn any_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(letter_code(), 0..max).prop_map(|c| word(&c))
}

fn nonempty_word(max: usize) -> impl Strategy<Value = Word> {
    any_word(max).prop_filter("nontrivial", |w| !w.is_empty())
}

fn key_string(w: &Word) -> Vec<u16> {
    w.letters().iter().map(|l| l.key()).collect()
}

proptest! {
    #[test]
    fn multiplication_matches_reduction(x in any_word(12), y in any_word(12), z in any_word(12)) {
        let xy = x.mul(&y);
        prop_assert_eq!(codes(&xy), reduce_codes(&[codes(&x), codes(&y)].concat()));
        prop_assert_eq!(xy.mul(&z), x.mul(&y.mul(&z)));
        prop_assert!(x.mul(&x.inverse()).is_empty());
        prop_assert_eq!(x.cancellation_with(&y), (x.len() + y.len() - xy.len()) / 2);
    }

    #[test]
    fn cyclic_form_is_least_rotation_of_the_core(w in nonempty_word(12), k in 0usize..12) {
        let c = CyclicWord::new(&w).unwrap();
        let core = w.cyclic_core();
        prop_assert_eq!(c.len(), core.len());
        let least = (0..core.len()).map(|i| core.rotate_left(i)).min_by_key(key_string).unwrap();
        prop_assert_eq!(c.word(), &least);
        // conjugates and rotations land on the same form
        let g = core.prefix(k % core.len());
        prop_assert_eq!(CyclicWord::new(&g.inverse().mul(&w).mul(&g)).unwrap(), c.clone());
        prop_assert_eq!(CyclicWord::new(&w.inverse()).unwrap(), c.inverse());
    }

    #[test]
    fn conjugacy_decomposition_recomposes(w in nonempty_word(14)) {
        let d = w.cyclic_decompose().unwrap();
        prop_assert_eq!(d.recompose(), w.clone());
        prop_assert!(d.core.is_cyclically_reduced());
    }

    #[test]
    fn rays_are_equal_iff_their_letters_agree(
        p in any_word(6), v in nonempty_word(5), q in any_word(6), u in nonempty_word(5), n in 1i64..3
    ) {
        let x = Ray::new(&p, &v).unwrap();
        let y = Ray::new(&q, &u).unwrap();
        // enough letters to separate distinct eventually periodic rays
        let horizon = 2 * (p.len() + q.len()) + 4 * (v.len() + u.len()) * 3;
        let same_letters = (0..horizon).all(|i| x.letter(i) == y.letter(i));
        prop_assert_eq!(x == y, same_letters);
        // a power of the period and an extra period in the prefix change nothing
        prop_assert_eq!(Ray::new(&p, &v.pow(n)).unwrap(), x.clone());
        prop_assert_eq!(Ray::new(&p.mul(&v), &v).unwrap(), x.clone());
        prop_assert!(x.period().is_cyclically_reduced());
        prop_assert_eq!(x.period().primitive_root(), x.period().clone());
    }

    #[test]
    fn ray_translation_is_an_action(p in any_word(6), v in nonempty_word(5), g in any_word(6), h in any_word(6)) {
        let x = Ray::new(&p, &v).unwrap();
        prop_assert_eq!(x.translate(&h).translate(&g), x.translate(&g.mul(&h)));
        prop_assert_eq!(x.translate(&g).translate(&g.inverse()), x.clone());
    }

    #[test]
    fn automorphisms_invert(w in any_word(10)) {
        for alpha in [dehn_twist(), tribonacci()] {
            let inv = alpha.inverse().unwrap();
            prop_assert_eq!(inv.apply(&alpha.apply(&w).unwrap()).unwrap(), w.clone());
            prop_assert_eq!(alpha.apply(&inv.apply(&w).unwrap()).unwrap(), w.clone());
        }
    }

    #[test]
    fn automorphisms_act_on_rays(p in any_word(5), v in nonempty_word(4)) {
        let alpha = dehn_twist();
        let x = Ray::new(&p, &v).unwrap();
        let y = alpha.apply_ray(&x).unwrap();
        prop_assert_eq!(y.clone(), Ray::new(&alpha.apply(&p).unwrap(), &alpha.apply(&v).unwrap()).unwrap());
        prop_assert_eq!(alpha.inverse().unwrap().apply_ray(&y).unwrap(), x);
    }
}

#[test]
fn letter_order() {
    let order: Vec<u16> = Letter::all(3).map(|l| l.key()).collect();
    assert_eq!(order, vec![0, 1, 2, 3, 4, 5]);
    assert_eq!(codes(&word(&[1, 2, -2, -1, 3])), vec![3]);
}
