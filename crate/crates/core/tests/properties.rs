use careg_core::automata::de_bruijn_automaton;
use careg_core::image::image_language;
use careg_core::periodic::{apply_periodic, periodic_preimages, CyclicWord};
use careg_core::regularity::{generalized_inverse, verify_weak_inverse};
use careg_core::{LocalRule, Transform};
use proptest::prelude::*;

/// A binary rule on a random neighborhood inside [-2, 2].
fn binary_rule() -> impl Strategy<Value = LocalRule> {
    (-2i32..=0, 0i32..=2).prop_flat_map(|(lo, hi)| {
        let size = 1usize << (hi - lo + 1);
        proptest::collection::vec(0u8..2, size).prop_map(move |t| LocalRule::new(2, lo, hi, t).unwrap())
    })
}

fn symmetric_rule(max_r: u32) -> impl Strategy<Value = LocalRule> {
    (0..=max_r).prop_flat_map(|r| {
        let size = 1usize << (2 * r + 1);
        proptest::collection::vec(0u8..2, size)
            .prop_map(move |t| LocalRule::new(2, -(r as i32), r as i32, t).unwrap())
    })
}

fn cyclic(max_len: usize) -> impl Strategy<Value = CyclicWord> {
    proptest::collection::vec(0u8..2, 1..=max_len).prop_map(|w| CyclicWord::new(w).unwrap())
}

proptest! {
    #[test]
    fn hex_round_trip(f in symmetric_rule(2)) {
        let hex = f.to_hex().unwrap();
        let back = LocalRule::from_hex(&hex, f.radius()).unwrap();
        prop_assert_eq!(back.table(), f.table());
        prop_assert_eq!(back.to_hex().unwrap(), hex);
    }

    #[test]
    fn compose_is_associative(f in binary_rule(), g in binary_rule(), h in binary_rule()) {
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert!(left.equals(&right));
    }

    #[test]
    fn identity_is_neutral(f in binary_rule()) {
        let id = LocalRule::identity(2);
        prop_assert!(f.compose(&id).unwrap().equals(&f));
        prop_assert!(id.compose(&f).unwrap().equals(&f));
    }

    #[test]
    fn padding_and_trimming_preserve_the_ca(f in binary_rule()) {
        let (lo, hi) = f.neighborhood();
        prop_assert!(f.pad(lo - 1, hi + 2).unwrap().equals(&f));
        let t = f.trim();
        prop_assert!(t.equals(&f));
        prop_assert!(t.width() <= f.width());
    }

    #[test]
    fn transforms_are_involutions(f in binary_rule()) {
        for op in [Transform::FlipPre, Transform::FlipPost, Transform::ReverseConj] {
            prop_assert!(f.transform(op).transform(op).equals(&f));
        }
    }

    #[test]
    fn apply_periodic_commutes_with_rotation(f in binary_rule(), x in cyclic(8), k in 0usize..8) {
        let k = k % x.len();
        prop_assert_eq!(apply_periodic(&f, &x.rotate(k)), apply_periodic(&f, &x).rotate(k));
    }

    #[test]
    fn apply_periodic_agrees_with_finite_apply(f in binary_rule(), x in cyclic(6)) {
        // Unroll enough copies that every output cell sees a full window.
        let (lo, hi) = f.neighborhood();
        let q = x.len() as i64;
        let word: Vec<u8> = (lo as i64..q + hi as i64).map(|i| x.at(i)).collect();
        prop_assert_eq!(f.apply(&word).unwrap(), apply_periodic(&f, &x).rep().to_vec());
    }

    #[test]
    fn canonical_rotation(x in cyclic(10), k in 0usize..10) {
        let c = x.canonical();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(x.rotate(k % x.len()).canonical(), c.clone());
        prop_assert!(c.same_orbit(&x));
    }

    #[test]
    fn periodic_preimages_map_onto_target(n in 0u32..256, y in cyclic(5)) {
        let f = LocalRule::eca(n).unwrap();
        for x in periodic_preimages(&f, &y, y.len()).unwrap() {
            prop_assert_eq!(apply_periodic(&f, &CyclicWord::new(x).unwrap()), y.clone());
        }
    }

    #[test]
    fn image_language_is_factor_closed(n in 0u32..256, w in proptest::collection::vec(0u8..2, 0..10)) {
        let f = LocalRule::eca(n).unwrap();
        let d = image_language(&f);
        if d.accepts(&w) {
            for i in 0..=w.len() {
                for j in i..=w.len() {
                    prop_assert!(d.accepts(&w[i..j]));
                }
            }
        }
        prop_assert_eq!(d.accepts(&w), de_bruijn_automaton(&f).accepts(&w));
        prop_assert_eq!(d.complement().accepts(&w), !d.accepts(&w));
    }

    #[test]
    fn image_of_f_is_in_language(n in 0u32..256, x in proptest::collection::vec(0u8..2, 3..14)) {
        let f = LocalRule::eca(n).unwrap();
        prop_assert!(image_language(&f).accepts(&f.apply(&x).unwrap()));
    }

    #[test]
    fn generalized_inverse_from_any_weak_inverse(n in 0u32..256, m in 0u32..256) {
        let (f, g) = (LocalRule::eca(n).unwrap(), LocalRule::eca(m).unwrap());
        if verify_weak_inverse(&f, &g) {
            let c = generalized_inverse(&f, &g).unwrap();
            prop_assert!(verify_weak_inverse(&f, &c));
            prop_assert!(verify_weak_inverse(&c, &f));
        }
    }
}
