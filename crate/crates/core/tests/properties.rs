use opwire_core::corpus::{Corpus, CorpusConfig};
use opwire_core::diagram::WiringDiagram;
use opwire_core::dsl::{export_dot, parse_dsl, print_dsl, Workspace};
use opwire_core::variants::{validate, OperadVariant};
use proptest::prelude::*;
use proptest::sample::select;

fn variant() -> impl Strategy<Value = OperadVariant> {
    select(vec![
        OperadVariant::WA,
        OperadVariant::WC,
        OperadVariant::WD,
        OperadVariant::WUA,
        OperadVariant::WUAC,
        OperadVariant::WGround,
    ])
}

fn diagram(seed: u64, v: OperadVariant) -> WiringDiagram {
    Corpus::new(seed, CorpusConfig::structural()).of_variant(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn corpus_diagrams_validate(seed in any::<u64>(), v in variant()) {
        let w = diagram(seed, v);
        prop_assert!(validate(v, &w).ok(), "{}", validate(v, &w));
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), v in variant()) {
        let w = diagram(seed, v);
        let mut ws = Workspace::default();
        ws.insert_diagram("d", v, w.clone()).unwrap();
        let text = print_dsl(&ws);
        let back = parse_dsl(&text).unwrap();
        prop_assert_eq!(back.diagrams["d"].diagram.canonical_form(), w.canonical_form());
        prop_assert_eq!(print_dsl(&back), text);
    }

    #[test]
    fn permutation_inverse_restores(seed in any::<u64>(), v in variant(), shuffle in any::<u64>()) {
        let w = diagram(seed, v);
        let n = w.slot_count();
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = shuffle;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let mut inverse = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let p = w.permute_slots(&order).unwrap();
        prop_assert!(validate(v, &p).ok());
        prop_assert_eq!(p.permute_slots(&inverse).unwrap(), w);
    }

    #[test]
    fn identity_substitution_is_neutral(seed in any::<u64>(), v in variant()) {
        let w = diagram(seed, v);
        for k in 0..w.slot_count() {
            let id = WiringDiagram::identity(&w.slots()[k]).unwrap();
            prop_assert_eq!(w.substitute(k, &id).unwrap().canonical_form(), w.canonical_form());
        }
        if let Ok(outer) = WiringDiagram::identity(w.outer()) {
            prop_assert_eq!(outer.substitute(0, &w).unwrap().canonical_form(), w.canonical_form());
        }
    }

    #[test]
    fn dot_export_stable(seed in any::<u64>(), v in variant()) {
        let w = diagram(seed, v);
        let d = export_dot(&w);
        prop_assert_eq!(d.matches("shape=box").count(), w.slot_count());
        prop_assert_eq!(d.matches("-> \"ground\"").count(), w.grounds().len());
        prop_assert_eq!(&d, &export_dot(&w.clone()));
    }
}
