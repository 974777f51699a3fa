use proptest::prelude::*;
use toric_renorm::decoder::{decode_trace_with, BlockOrder, DecoderOptions};
use toric_renorm::lattice::in_sublattice;
use toric_renorm::{decode_with_trace, syndrome, EdgeSet, TorusLevel};

fn error_strategy() -> impl Strategy<Value = EdgeSet> {
    (3u32..=5).prop_flat_map(|k| {
        let l = TorusLevel::new(k).unwrap();
        proptest::collection::btree_set(0..l.n(), 0..=l.n() / 6)
            .prop_map(move |ix| EdgeSet::from_indices(l, ix))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn correction_reproduces_syndrome(e in error_strategy()) {
        let s = syndrome(&e);
        let trace = decode_with_trace(&s).unwrap();
        prop_assert_eq!(syndrome(&trace.correction()), s);
    }

    #[test]
    fn each_stage_lands_on_the_next_sublattice(e in error_strategy()) {
        let l = e.level();
        let trace = decode_with_trace(&syndrome(&e)).unwrap();
        let mut before = trace.input.clone();
        for st in &trace.stages {
            prop_assert!(st.syndrome_after.iter().all(|v| in_sublattice(l, v, st.stage - 1)));
            prop_assert_eq!(syndrome(&st.correction), before.symmetric_difference(&st.syndrome_after));
            before = st.syndrome_after.clone();
        }
        prop_assert!(before.is_empty());
    }

    #[test]
    fn block_order_does_not_matter(e in error_strategy(), seed in any::<u64>()) {
        let s = syndrome(&e);
        let base = decode_with_trace(&s).unwrap();
        for block_order in [BlockOrder::Shuffled(seed), BlockOrder::Parallel] {
            let opts = DecoderOptions { block_order, ..DecoderOptions::default() };
            prop_assert_eq!(&decode_trace_with(&s, &opts).unwrap().correction(), &base.correction());
        }
    }

    #[test]
    fn residual_is_a_cycle(e in error_strategy()) {
        let trace = decode_with_trace(&syndrome(&e)).unwrap();
        let r = &e ^ &trace.correction();
        prop_assert!(syndrome(&r).is_empty());
    }
}
