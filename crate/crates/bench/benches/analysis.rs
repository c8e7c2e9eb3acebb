use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qwalk_thermo::isotherm::{isotherm_distributed, isotherm_localized, DEFAULT_SAMPLES};
use qwalk_thermo::transient::DEFAULT_PEAK_HALF_WIDTH;
use qwalk_thermo::{extract_envelope, fit_power_law, integrate_master, MasterModel};

fn analysis(c: &mut Criterion) {
    let series: Vec<(f64, f64)> = (1..=20_000)
        .map(|t| {
            let t = t as f64;
            (t, 0.7 + 0.1 * t.powf(-0.49) * (0.3 * t).cos())
        })
        .collect();
    c.bench_function("envelope and fit 20000 samples", |b| {
        b.iter(|| {
            let (upper, _) =
                extract_envelope(black_box(&series), 0.7, DEFAULT_PEAK_HALF_WIDTH).unwrap();
            fit_power_law(&upper, (2000.0, 20_000.0)).unwrap()
        })
    });

    let model = MasterModel::balanced(0.3, 0.75, 0.05, 0.5, 1.0, 0.0, 0.02).unwrap();
    c.bench_function("integrate master equation t in [1, 100]", |b| {
        b.iter(|| integrate_master(black_box(&model), 1.0, 100.0, 0.01).unwrap())
    });

    c.bench_function("localized isotherm", |b| {
        b.iter(|| isotherm_localized(black_box(1.1), DEFAULT_SAMPLES).unwrap())
    });
    c.bench_function("distributed isotherm", |b| {
        b.iter(|| isotherm_distributed(black_box(1.5), DEFAULT_SAMPLES).unwrap())
    });
}

criterion_group!(benches, analysis);
criterion_main!(benches);
