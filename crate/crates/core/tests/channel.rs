use invarion_core::channel::{
    block_confusability_graph, build_codebook, confusability_graph, max_independent_set, strong_power,
    zero_error_capacity_bounds, Channel,
};
use proptest::prelude::*;

fn channel() -> impl Strategy<Value = Channel> {
    (2usize..=4).prop_flat_map(|q| {
        prop::collection::vec(prop::collection::btree_set(0..q, 1..=q), q).prop_map(move |rel| {
            Channel::new(q, rel.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn block_graph_is_strong_power(ch in channel(), k in 1usize..=3) {
        prop_assert_eq!(block_confusability_graph(&ch, k), strong_power(&confusability_graph(&ch), k));
    }

    #[test]
    fn independence_is_supermultiplicative(ch in channel()) {
        let g = confusability_graph(&ch);
        let a1 = max_independent_set(&g).unwrap().0;
        let a2 = max_independent_set(&strong_power(&g, 2)).unwrap().0;
        prop_assert!(a2 >= a1 * a1);
    }

    #[test]
    fn bounds_are_ordered(ch in channel()) {
        let b = zero_error_capacity_bounds(&ch, 2).unwrap();
        prop_assert!(b.lower <= b.upper + 1e-12);
        prop_assert!(b.lower >= 0.0);
    }

    #[test]
    fn codebooks_decode_under_every_resolution(ch in channel(), k in 1usize..=2) {
        let alpha = max_independent_set(&block_confusability_graph(&ch, k)).unwrap().0;
        let book = build_codebook(&ch, k, alpha).unwrap();
        book.verify(&ch).unwrap();
        for r in ch.resolutions(1 << 12).unwrap() {
            for (i, w) in book.words.iter().enumerate() {
                let rx: Vec<usize> = w.iter().map(|&s| r[s]).collect();
                prop_assert_eq!(book.decode(&ch, &rx), Some(i));
            }
        }
        prop_assert!(build_codebook(&ch, k, alpha + 1).is_err());
    }
}

#[test]
fn reference_channels() {
    let b = zero_error_capacity_bounds(&Channel::noiseless(2), 3).unwrap();
    assert_eq!((b.lower, b.upper), (1.0, 1.0));
    let b = zero_error_capacity_bounds(&Channel::all_confusable(3), 3).unwrap();
    assert_eq!((b.lower, b.upper), (0.0, 0.0));
    let b = zero_error_capacity_bounds(&Channel::pentagon(), 2).unwrap();
    assert!((b.lower - 0.5 * 5f64.log2()).abs() < 1e-9);
    let book = build_codebook(&Channel::pentagon(), 2, 5).unwrap();
    book.verify(&Channel::pentagon()).unwrap();
}
