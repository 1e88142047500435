//! Hot-path benchmarks: single-price evaluation, the 252-step sampled-path
//! variant, implied generalized volatility, and the VIX strip.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use bsx_core::{
    bs_call_price, bs_call_price_td, compute_vix, implied_s, qbs_call_price, ChainQuote, KMode,
    PricingInputs, QuantumVolParams, SampledPath, VixInputs,
};

fn inputs() -> PricingInputs {
    PricingInputs::new(100.0, 105.0, 30.0 / 252.0, 0.0008).unwrap()
}

fn bench_pricing(c: &mut Criterion) {
    let inputs = inputs();
    c.bench_function("bs_call_price", |b| {
        b.iter(|| bs_call_price(black_box(&inputs), black_box(0.3)).unwrap())
    });

    let q = QuantumVolParams::new(1.5, 0.3, KMode::Wiener).unwrap();
    c.bench_function("qbs_call_price", |b| {
        b.iter(|| qbs_call_price(black_box(&inputs), black_box(&q)).unwrap())
    });

    let year = PricingInputs::new(100.0, 105.0, 1.0, 0.0008).unwrap();
    let path = SampledPath::constant(0.3, 252);
    c.bench_function("bs_call_price_td_252_steps", |b| {
        b.iter(|| bs_call_price_td(black_box(&year), black_box(&path)).unwrap())
    });
}

fn bench_implied_s(c: &mut Criterion) {
    let inputs = inputs();
    let market = bs_call_price(&inputs, 0.42).unwrap();
    c.bench_function("implied_s", |b| {
        b.iter(|| implied_s(black_box(&inputs), black_box(market), 1.0, KMode::Wiener).unwrap())
    });
}

fn bench_vix(c: &mut Criterion) {
    // 17 strikes, the bundled chain's shape
    let forward = 3500.0;
    let chain: Vec<ChainQuote> = (0..17)
        .map(|i| {
            let strike = 3300.0 + 25.0 * i as f64;
            let gap = (forward - strike) / 100.0;
            ChainQuote {
                strike,
                call_mid: (50.0 + 20.0 * gap).max(0.5),
                put_mid: (50.0 - 20.0 * gap).max(0.5),
                q_mid: 50.0,
            }
        })
        .collect();
    let inputs = VixInputs::new(chain, 30.0 / 365.0, 0.0008).unwrap();
    c.bench_function("compute_vix_17_strikes", |b| {
        b.iter(|| compute_vix(black_box(&inputs)).unwrap())
    });
}

criterion_group!(benches, bench_pricing, bench_implied_s, bench_vix);
criterion_main!(benches);
