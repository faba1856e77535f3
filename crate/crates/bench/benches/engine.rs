use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use opwire_core::algebra::{Algebra, TensorAlgebra};
use opwire_core::corpus::{Corpus, CorpusConfig};
use opwire_core::expression::decompose_acyclic;
use opwire_core::variants::OperadVariant;
use opwire_core::WiringDiagram;

fn structural(n: usize, v: OperadVariant) -> Vec<WiringDiagram> {
    let mut c = Corpus::new(17, CorpusConfig::structural());
    (0..n).map(|_| c.of_variant(v)).collect()
}

fn substitute(cr: &mut Criterion) {
    let mut c = Corpus::new(5, CorpusConfig::structural());
    let pairs: Vec<(WiringDiagram, usize, WiringDiagram)> = (0..64)
        .filter_map(|_| {
            let guest = c.of_variant(OperadVariant::WA);
            if guest.outer().is_empty_object() {
                return None;
            }
            let (host, k) = c.with_slot(OperadVariant::WA, guest.outer())?;
            Some((host, k, guest))
        })
        .collect();
    cr.bench_function("substitute/WA", |b| {
        b.iter(|| {
            for (h, k, g) in &pairs {
                black_box(h.substitute(*k, g).unwrap());
            }
        })
    });
}

fn canonical(cr: &mut Criterion) {
    let ws = structural(64, OperadVariant::WC);
    cr.bench_function("canonical_form/WC", |b| {
        b.iter(|| {
            for w in &ws {
                black_box(w.canonical_form());
            }
        })
    });
}

fn tensor(cr: &mut Criterion) {
    let mut c = Corpus::new(9, CorpusConfig::numeric());
    let cases: Vec<_> = (0..32)
        .map(|_| {
            let w = c.numeric(OperadVariant::WD);
            let es = c.elements(&TensorAlgebra, &w);
            (w, es)
        })
        .collect();
    cr.bench_function("tensor_eval/WD", |b| {
        b.iter(|| {
            for (w, es) in &cases {
                black_box(TensorAlgebra.apply(w, es).unwrap());
            }
        })
    });
}

fn decompose(cr: &mut Criterion) {
    let ws = structural(64, OperadVariant::WA);
    cr.bench_function("decompose/WA", |b| {
        b.iter(|| {
            for w in &ws {
                black_box(decompose_acyclic(w).unwrap());
            }
        })
    });
}

criterion_group!(benches, substitute, canonical, tensor, decompose);
criterion_main!(benches);
