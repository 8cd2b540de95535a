use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use monoform_core::polyhedral::{
    generate_symmetric_mesh, poly_equilibria, poly_mass, symmetric_samples, ConvexPolyhedron, DEFAULT_TOL,
};
use monoform_core::radial_family::ShapeParams;

fn hull(c: &mut Criterion) {
    let p = ShapeParams::new(3, 0.0556, 0.0013).unwrap();
    let mut g = c.benchmark_group("hull");
    g.sample_size(10);
    for (mt, mp) in [(16, 24), (32, 66), (64, 132)] {
        let pts = symmetric_samples(&p, mt, mp).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(pts.len()), &pts, |b, pts| {
            b.iter(|| ConvexPolyhedron::hull(black_box(pts), DEFAULT_TOL).unwrap())
        });
    }
    g.finish();
}

fn census(c: &mut Criterion) {
    let p = ShapeParams::new(3, 0.0556, 0.0013).unwrap();
    let poly = generate_symmetric_mesh(&p, 32, 66, DEFAULT_TOL).unwrap();
    let centroid = poly_mass(&poly).unwrap().centroid;
    c.bench_function("poly_mass_32x66", |b| b.iter(|| poly_mass(black_box(&poly)).unwrap()));
    c.bench_function("poly_equilibria_32x66", |b| {
        b.iter(|| poly_equilibria(black_box(&poly), centroid, DEFAULT_TOL).unwrap())
    });
}

criterion_group!(benches, hull, census);
criterion_main!(benches);
