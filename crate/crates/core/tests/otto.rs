use std::f64::consts::PI;

use proptest::prelude::*;
use qotto_core::engine::{macroscopic_efficiency, run_battery, run_otto, CycleRecord};
use qotto_core::{BatteryRunConfig, Execution, OttoParams};

proptest! {
    #[test]
    fn record_bookkeeping(
        z in -1.0..1.0f64, z1 in -1.0..1.0f64, z2 in -1.0..1.0f64,
        d2 in 0.1..1.0f64, extra in 0.01..3.0f64,
    ) {
        let d1 = d2 + extra;
        let r = CycleRecord::from_populations(d1, d2, z, z1, z2);
        prop_assert_eq!(r.w, r.w_out + r.w_in);
        let de = 0.5 * d1 * (z2 - z);
        prop_assert!((de - ((r.q_in + r.q_out) - r.w)).abs() < 1e-12);
        if let Some(eta) = r.eta {
            let closed = (z1 - z2) / (z1 - z) * (1.0 - d2 / d1);
            prop_assert!((eta - closed).abs() < 1e-9 * (1.0 + closed.abs()));
        }
        let closed_cycle = CycleRecord::from_populations(d1, d2, z, z1, z);
        prop_assert!((closed_cycle.w - (closed_cycle.q_in + closed_cycle.q_out)).abs() < 1e-12);
    }
}

#[test]
fn ensemble_mode_matches_otto_value() {
    let mut p = OttoParams::new(3.0, 1.0, 4, PI / 10.0, 5_000, 21).unwrap();
    p.chains = 4;
    let run = run_otto(&p, Execution::Parallel).unwrap();
    assert_eq!(run.records.len(), 20_000);
    let eta = macroscopic_efficiency(&run.records).unwrap();
    assert!((eta - 2.0 / 3.0).abs() < 0.01, "{eta}");
    assert_eq!(run.summary.flagged_eta, run.records.iter().filter(|r| r.eta.is_none()).count());
}

#[test]
fn fluctuations_shrink_with_qudit_size() {
    let sd = |mu| {
        let p = OttoParams::new(2.0, 1.0, mu, PI / 10.0, 20_000, 4).unwrap();
        let s = run_otto(&p, Execution::Serial).unwrap().summary;
        (s.work.std, s.heat_in.std)
    };
    let (a, b) = (sd(2), sd(8));
    assert!(b.0 < 0.6 * a.0 && b.1 < 0.6 * a.1);
}

#[test]
fn battery_settles_into_period_two() {
    let cfg = BatteryRunConfig::new(2, PI / 10.0, 30, 4000, 2).unwrap();
    let means = run_battery(&cfg, Execution::Parallel).unwrap().mean_per_collision();
    // After hot collisions the battery holds more ergotropy than after cold ones.
    for k in (10..30).step_by(2) {
        assert!(means[k] > means[k + 1] + 0.03, "{k}: {means:?}");
    }
    let hot: Vec<f64> = (14..30).step_by(2).map(|k| means[k]).collect();
    let spread = hot.iter().cloned().fold(f64::MIN, f64::max) - hot.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.02, "{hot:?}");
}
