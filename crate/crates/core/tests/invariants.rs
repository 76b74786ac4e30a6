use std::sync::Arc;

use proptest::prelude::*;

use contcalc_core::catalog::Catalog;
use contcalc_core::container::{derivative, law_leibniz, law_sum, Container, X};
use contcalc_core::dsl::{no_files, parse_signature, SignatureAst};
use contcalc_core::fixpoint::{
    decompose, down, enumerate_wtrees, fill, plug, up, wpaths, Signature, WPath, ZipperValue,
};
use contcalc_core::points::{is_isolated, replace_functor, sigma_isolate};
use contcalc_core::Limits;

fn sizes(c: &Container, k: usize) -> Vec<usize> {
    (0..c.num_shapes()).map(|s| c.fiber(k, s).num_objects()).collect()
}

fn signatures() -> Vec<(Signature, usize)> {
    vec![(Signature::list(1), 4), (Signature::list(2), 4), (Signature::binary_tree(), 3)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn catalog_groupoids_are_valid(seed in any::<u64>()) {
        let mut cat = Catalog::new(seed);
        let g = cat.groupoid(6, 16);
        prop_assert!(g.validate().is_valid());
        for f in 0..g.num_morphisms() {
            let back = g.compose(g.inverse(f), f);
            prop_assert_eq!(back, g.identity(g.src(f)));
        }
    }

    #[test]
    fn replace_is_an_equivalence_exactly_at_isolated_points(seed in any::<u64>()) {
        let mut cat = Catalog::new(seed);
        let g = Arc::new(cat.groupoid(5, 12));
        for a in 0..g.num_objects() {
            let (_, r) = replace_functor(&g, a).unwrap();
            prop_assert_eq!(r.is_equivalence(), is_isolated(&g, a));
        }
    }

    #[test]
    fn sigma_isolate_is_injective(seed in any::<u64>()) {
        let mut cat = Catalog::new(seed).with_max_fiber(4);
        let g = Arc::new(cat.groupoid(4, 10));
        let r = sigma_isolate(&cat.family(&g)).unwrap();
        prop_assert!(r.total && r.injective);
    }

    #[test]
    fn sum_and_leibniz_hold(seed in any::<u64>()) {
        let mut cat = Catalog::new(seed);
        let f = cat.discrete_container(&[X], 3, 3);
        let g = cat.discrete_container(&[X], 3, 3);
        prop_assert!(law_sum(&f, &g, X).unwrap().holds());
        prop_assert!(law_leibniz(&f, &g, X).unwrap().holds());
    }

    #[test]
    fn derivative_has_one_shape_per_position(seed in any::<u64>()) {
        let mut cat = Catalog::new(seed);
        let f = cat.discrete_container(&[X, "y"], 3, 3);
        let d = derivative(&f, X).unwrap().container;
        prop_assert_eq!(d.num_shapes(), sizes(&f, 0).iter().sum::<usize>());
        prop_assert!(d.validate().is_valid());
    }

    #[test]
    fn declarations_round_trip(seed in any::<u64>()) {
        let mut cat = Catalog::new(seed);
        let c = cat.discrete_container(&[X, "rec"], 3, 3);
        let ast = SignatureAst::from_container("f", &c, &[X.to_string()]).unwrap();
        let back = parse_signature(&ast.pretty()).unwrap();
        prop_assert_eq!(back.pretty(), ast.pretty());
        let d = back.to_container(&no_files).unwrap();
        prop_assert_eq!(sizes(&d, 0), sizes(&c, 0));
        prop_assert_eq!(sizes(&d, 1), sizes(&c, 1));
    }

    #[test]
    fn zipper_round_trips(which in 0usize..3, pick in any::<prop::sample::Index>()) {
        let (sig, depth) = &signatures()[which];
        let limits = Limits::default();
        let pairs: Vec<_> = enumerate_wtrees(sig, *depth, &limits)
            .unwrap()
            .into_iter()
            .flat_map(|w| wpaths(sig, X, &w).unwrap().into_iter().map(move |p| (w.clone(), p)))
            .collect();
        let (w, p) = pick.get(&pairs).clone();
        let z = decompose(sig, X, &w, &p).unwrap();
        prop_assert_eq!(fill(sig, &z).unwrap(), (w.clone(), p.clone()));
        prop_assert_eq!(WPath::parse(&p.to_string()).unwrap(), p);

        let mut nav = ZipperValue::root(w.clone());
        for layer in &z.layers {
            nav = down(sig, &nav, layer.hole).unwrap();
        }
        prop_assert_eq!(&nav.focus, &z.focus);
        prop_assert_eq!(plug(sig, &nav, nav.focus.clone()).unwrap(), w.clone());
        let mut steps = 0;
        while let Some(parent) = up(sig, &nav).unwrap() {
            nav = parent;
            steps += 1;
        }
        prop_assert_eq!(steps, z.layers.len());
        prop_assert_eq!(nav, ZipperValue::root(w));
    }
}
