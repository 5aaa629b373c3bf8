use std::collections::BTreeSet;
use std::sync::Arc;

use lamtree::basischange::{chop_constants, chop_transfer_holds, dehn_twist, tribonacci};
use lamtree::freewords::{subwords, Basis, CyclicWord, Letter, Ray, Word};
use lamtree::laminations::{
    act_on_language, l1_infinity_member, l_epsilon_language, l_omega_language, omega_enumerate, rational_language,
    LaminaryLanguage, Provenance,
};
use lamtree::numeric::Rational;
use lamtree::treemodels::{MarkedMetricGraph, SplittingTree, TreeModel};
use proptest::prelude::*;

fn abc() -> Basis {
    Basis::from_chars("abc").unwrap()
}

fn models() -> Vec<Arc<dyn TreeModel>> {
    vec![
        Arc::new(
            MarkedMetricGraph::unit_rose(&abc())
                .unwrap()
                .contract(&["e_c"])
                .unwrap(),
        ),
        Arc::new(SplittingTree::gamma_b(Rational::from_integer(1), 1).unwrap()),
    ]
}

fn word(codes: &[i16]) -> Word {
    Word::reduce(codes.iter().map(|&c| Letter::from_signed(c)))
}

fn nonempty_word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(vec![1i16, -1, 2, -2, 3, -3]), 1..max)
        .prop_map(|c| word(&c))
        .prop_filter("nontrivial", |w| !w.is_empty())
}

/// Inverse-closed, factor-closed, and every word extends on both sides
/// below the depth.
fn assert_laminary(l: &LaminaryLanguage) {
    for u in l.words() {
        assert!(!u.is_empty() && u.len() <= l.depth());
        assert!(l.contains(&u.inverse()));
        for f in subwords(u, u.len()) {
            assert!(l.contains(&f));
        }
        if u.len() < l.depth() {
            let extends = |right: bool| {
                Letter::all(l.rank()).any(|x| {
                    let e = if right {
                        u.mul(&Word::letter(x))
                    } else {
                        Word::letter(x).mul(u)
                    };
                    e.len() == u.len() + 1 && l.contains(&e)
                })
            };
            assert!(extends(true) && extends(false), "{u:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closures_are_laminary(words in prop::collection::vec(nonempty_word(9), 1..6), depth in 1usize..6) {
        let l = LaminaryLanguage::closure(3, depth, words.clone(), Provenance::new("test"));
        assert_laminary(&l);
        prop_assert!(l.check().is_ok());
        // closing again changes nothing
        let again = LaminaryLanguage::closure(3, depth, l.words().iter().cloned(), Provenance::new("test"));
        prop_assert!(again.same_words(&l));
    }

    #[test]
    fn rational_languages_hold_the_powers(w in nonempty_word(6), depth in 1usize..7) {
        let c = CyclicWord::new(&w).unwrap();
        let l = rational_language(3, &c, depth);
        assert_laminary(&l);
        let long = c.word().pow((depth / c.len() + 2) as i64);
        for f in subwords(&long, depth) {
            prop_assert!(l.contains(&f));
        }
        let r = Ray::periodic(c.word()).unwrap();
        prop_assert!(l1_infinity_member(&r, &l));
    }

    #[test]
    fn chop_transfer(u in nonempty_word(8), w in nonempty_word(12)) {
        let to_a = dehn_twist();
        let consts = chop_constants(&to_a, 6).unwrap();
        if let Some(ok) = chop_transfer_holds(&to_a, &consts, &u, &w).unwrap() {
            prop_assert!(ok);
        }
        // the hypothesis holds by construction for a factor of the image
        let image = to_a.apply(&u).unwrap();
        prop_assert_eq!(chop_transfer_holds(&to_a, &consts, &u, &image).unwrap(), Some(true));
    }
}

#[test]
fn languages_shrink_with_epsilon() {
    for t in models() {
        let mut last: Option<LaminaryLanguage> = None;
        for eps in [2.5, 1.5, 1.0, 0.5] {
            let l = l_epsilon_language(t.as_ref(), eps, 4, 8).unwrap();
            assert_laminary(&l);
            if let Some(prev) = &last {
                assert!(l.is_subset(prev), "{} at {eps}", t.model_id());
            }
            last = Some(l);
        }
    }
}

#[test]
fn omega_matches_brute_force() {
    for t in models() {
        let set = omega_enumerate(t.as_ref(), 1.0, 6).unwrap();
        assert!(set.complete);
        let mut expected = BTreeSet::new();
        for n in 1..=6 {
            for c in lamtree::freewords::enumerate::canonical_cyclic_words(3, n) {
                if t.translation_length(&c).value() < 1.0 {
                    expected.insert(c);
                }
            }
        }
        let got: BTreeSet<CyclicWord> = set.elements.iter().cloned().collect();
        assert_eq!(got, expected, "{}", t.model_id());
    }
}

#[test]
fn splitting_language_holds_every_one_sided_word() {
    let t = &models()[1];
    let l = l_omega_language(t.as_ref(), 3, &[1.0, 0.5], 6).unwrap();
    for w in lamtree::freewords::enumerate::reduced_words_up_to(3, 3)
        .into_iter()
        .filter(|w| !w.is_empty())
    {
        let one_sided = w.letters().iter().all(|x| x.index() != 2) || w.letters().iter().all(|x| x.index() != 0);
        if one_sided {
            assert!(l.contains(&w), "{w:?}");
        }
    }
    assert!(!l.contains(&abc().parse_word("a b c").unwrap()));
}

#[test]
fn acting_on_a_rational_language() {
    let b = abc();
    // α⁻¹ is a positive substitution, so no word shrinks under it
    let alpha = tribonacci().inverse().unwrap();
    let v = CyclicWord::new(&b.parse_word("a b c").unwrap()).unwrap();
    let l = rational_language(3, &v, 8);
    let moved = act_on_language(&alpha, &l, 1).unwrap();
    assert_eq!(moved.depth(), 6);
    let image = CyclicWord::new(&tribonacci().apply(v.word()).unwrap()).unwrap();
    let expected = rational_language(3, &image, 6);
    assert!(expected.is_subset(&moved));
    assert_laminary(&moved);
}
