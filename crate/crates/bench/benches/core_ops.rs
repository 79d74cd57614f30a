use criterion::{criterion_group, criterion_main, Criterion};
use normlab_core::clifford::{lift_similitude_to_omega, CliffordAlgebra};
use normlab_core::field::Field;
use normlab_core::quadform::{random_proper_isometry, QuadSpace};
use normlab_core::similitude::random_proper_similitude;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spaces() -> (QuadSpace, QuadSpace) {
    let f3 = Field::prime(3).unwrap();
    (
        QuadSpace::from_ints(&f3, &[1, 1, 1, 2]).unwrap(),
        QuadSpace::from_ints(&f3, &[1, 1, 1, 1, 1, 1]).unwrap(),
    )
}

fn bench_clifford_mul(c: &mut Criterion) {
    let (_, q6) = spaces();
    let alg = CliffordAlgebra::new(q6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = random_proper_isometry(alg.space(), &mut rng);
    let a = normlab_core::clifford::lift_isometry_to_gamma(&g).unwrap();
    let h = random_proper_isometry(alg.space(), &mut rng);
    let b = normlab_core::clifford::lift_isometry_to_gamma(&h).unwrap();
    c.bench_function("clifford_mul_dim6", |bench| {
        bench.iter(|| std::hint::black_box(a.mul(&b)))
    });
}

fn bench_lift(c: &mut Criterion) {
    let (q4, q6) = spaces();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g4 = random_proper_similitude(&q4, &mut rng);
    let g6 = random_proper_similitude(&q6, &mut rng);
    c.bench_function("lift_similitude_dim4", |bench| {
        bench.iter(|| std::hint::black_box(lift_similitude_to_omega(&g4).unwrap()))
    });
    c.bench_function("lift_similitude_dim6", |bench| {
        bench.iter(|| std::hint::black_box(lift_similitude_to_omega(&g6).unwrap()))
    });
}

fn bench_cartan_dieudonne(c: &mut Criterion) {
    let (_, q6) = spaces();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_proper_isometry(&q6, &mut rng);
    c.bench_function("cartan_dieudonne_dim6", |bench| {
        bench.iter(|| std::hint::black_box(g.cartan_dieudonne()))
    });
}

criterion_group!(benches, bench_clifford_mul, bench_lift, bench_cartan_dieudonne);
criterion_main!(benches);
