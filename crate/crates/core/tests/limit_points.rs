use std::collections::BTreeSet;
use std::sync::Arc;

use lamtree::freewords::{enumerate, Basis, Leaf, Letter, Ray, Word};
use lamtree::laminations::{build_l1_ray, diagonal_closure};
use lamtree::numeric::Rational;
use lamtree::qmap::{l1_test, q_fibers, q_pair_test, q_point, q_trap_check};
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

fn any_word(max: usize, letters: Vec<i16>) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(letters), 0..max).prop_map(|c| word(&c))
}

fn all_letters() -> Vec<i16> {
    vec![1, -1, 2, -2, 3, -3]
}

/// Rays whose periods are often elliptic in one of the models.
fn ray() -> impl Strategy<Value = Ray> {
    let period = prop_oneof![
        any_word(4, vec![3, -3]),
        any_word(4, vec![1, -1, 2, -2]),
        any_word(4, vec![2, -2, 3, -3]),
        any_word(4, all_letters()),
    ]
    .prop_filter("nontrivial", |w| !w.is_empty());
    (any_word(5, all_letters()), period).prop_map(|(p, v)| Ray::new(&p, &v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn leaf_verdicts_are_symmetric_and_invariant(x in ray(), y in ray(), g in any_word(5, all_letters())) {
        prop_assume!(x != y);
        let leaf = Leaf::new(x, y).unwrap();
        for t in models() {
            let v = q_pair_test(&leaf, t.as_ref()).unwrap();
            let flipped = q_pair_test(&leaf.flip(), t.as_ref()).unwrap();
            prop_assert_eq!(v.equal, flipped.equal);
            prop_assert_eq!(&v.distance, &flipped.distance);
            let moved = q_pair_test(&leaf.translate(&g), t.as_ref()).unwrap();
            prop_assert_eq!(v.equal, moved.equal);
            prop_assert_eq!(&v.distance, &moved.distance);
        }
    }

    #[test]
    fn membership_is_translation_invariant(x in ray(), g in any_word(5, all_letters())) {
        for t in models() {
            prop_assert_eq!(l1_test(&x, t.as_ref()).member, l1_test(&x.translate(&g), t.as_ref()).member);
        }
    }

    #[test]
    fn limit_points_trap_the_ray(x in ray()) {
        for t in models() {
            if l1_test(&x, t.as_ref()).member {
                let r = q_trap_check(&x, t.as_ref(), 0..x.prefix().len() + 12).unwrap();
                prop_assert!(r.pass, "{:?}", r);
            } else {
                prop_assert!(q_point(&x, t.as_ref()).is_err());
            }
        }
    }

    #[test]
    fn seeds_give_rays_with_small_junctions(
        seeds in prop::collection::vec(
            (any_word(4, all_letters()), any_word(4, all_letters()).prop_filter("nontrivial", |w| !w.is_empty())),
            1..10,
        )
    ) {
        let words: Vec<Word> = seeds.iter().map(|(g, v)| g.mul(v).mul(&g.inverse())).filter(|w| !w.is_empty()).collect();
        prop_assume!(!words.is_empty());
        let r = build_l1_ray(&words).unwrap();
        prop_assert!(r.certified());
        prop_assert_eq!(r.selected.len(), r.signs.len());
        prop_assert_eq!(r.junctions.len() + 1, r.selected.len());
        let product = r
            .selected
            .iter()
            .zip(&r.signs)
            .fold(Word::identity(), |acc, (&i, &d)| acc.mul(&words[i].pow(d as i64)));
        prop_assert_eq!(product, r.word.clone());
    }
}

#[test]
fn diagonal_closure_is_transitive() {
    // every graph on four rays, by its edge set
    let rays: Vec<Ray> = ["a", "b", "c", "a b"]
        .iter()
        .map(|s| Ray::periodic(&abc().parse_word(s).unwrap()).unwrap())
        .collect();
    let edges: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    for mask in 0u32..(1 << edges.len()) {
        let pairs: BTreeSet<Leaf> = edges
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &(i, j))| Leaf::new(rays[i].clone(), rays[j].clone()).unwrap())
            .collect();
        let closed = diagonal_closure(&pairs);
        for p in &pairs {
            assert!(closed.contains(p) && closed.contains(&p.flip()));
        }
        for p in &closed {
            for q in &closed {
                if p.right() == q.left() && p.left() != q.right() {
                    assert!(closed.contains(&Leaf::new(p.left().clone(), q.right().clone()).unwrap()));
                }
            }
        }
        assert_eq!(diagonal_closure(&closed), closed);
    }
}

#[test]
fn fibers_partition_the_l1_rays() {
    for t in models() {
        let rays = enumerate::rays(3, 2, 2);
        let fibers = q_fibers(t.as_ref(), &rays).unwrap();
        let members: BTreeSet<Ray> = rays.iter().filter(|r| l1_test(r, t.as_ref()).member).cloned().collect();
        let covered: Vec<Ray> = fibers.iter().flat_map(|f| f.rays.iter().cloned()).collect();
        assert_eq!(covered.len(), members.len());
        assert_eq!(covered.into_iter().collect::<BTreeSet<_>>(), members);
        for f in &fibers {
            for r in &f.rays {
                let q = q_point(r, t.as_ref()).unwrap();
                assert!(lamtree::qmap::q_equal(&q, &f.point, t.as_ref()).unwrap());
            }
        }
    }
}
