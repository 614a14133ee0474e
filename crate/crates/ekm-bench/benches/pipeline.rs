//! Benchmarks for the hot paths: the eigensolver, end-to-end training,
//! probe recognition at camera-image scale, and PGM decoding.

use criterion::{criterion_group, criterion_main, Criterion};
use ekm_core::dataset::synth_dataset;
use ekm_core::image::{encode_pgm, load_pgm, reshape, PgmFormat};
use ekm_core::linalg::{eig_symmetric, gram};
use ekm_core::recognizer::recognize;
use ekm_core::trainer::{mean_face, normalize, train, TrainerConfig};
use std::hint::black_box;

fn bench_eigensolver(c: &mut Criterion) {
    // A realistic 100x100 Gram matrix from centered synthetic faces.
    let data = synth_dataset(20, 5, 256, 40.0, 1);
    let set = data.to_training_set().unwrap();
    let centered = normalize(&set, &mean_face(&set).unwrap()).unwrap();
    let surrogate = gram(&centered.matrix);

    c.bench_function("eig_symmetric_100", |b| {
        b.iter(|| eig_symmetric(black_box(&surrogate), 1e-12).unwrap())
    });
}

fn bench_train(c: &mut Criterion) {
    let data = synth_dataset(16, 4, 1024, 30.0, 2);
    let set = data.to_training_set().unwrap();
    let cfg = TrainerConfig::default();

    c.bench_function("train_64x1024", |b| {
        b.iter(|| train(black_box(&set), &cfg).unwrap())
    });
}

fn bench_recognize(c: &mut Criterion) {
    // Camera-image scale: d = 10304, M = 192.
    let data = synth_dataset(32, 6, 10304, 25.0, 3);
    let set = data.to_training_set().unwrap();
    let model = train(&set, &TrainerConfig::default()).unwrap();
    let probe = data.classes[0].images[0].clone();

    c.bench_function("recognize_10304", |b| {
        b.iter(|| recognize(black_box(&model), black_box(&probe), f64::INFINITY).unwrap())
    });
}

fn bench_pgm_decode(c: &mut Criterion) {
    let data = synth_dataset(1, 1, 92 * 112, 0.0, 4);
    let img = reshape(data.classes[0].images[0].data(), 92, 112, 255).unwrap();
    let bytes = encode_pgm(&img, PgmFormat::Binary);

    c.bench_function("load_pgm_92x112", |b| {
        b.iter(|| load_pgm(black_box(&bytes)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_eigensolver, bench_train, bench_recognize, bench_pgm_decode
}
criterion_main!(benches);
