//! Strategies and checks shared by the property suites and the acceptance
//! runner, so both exercise exactly the same invariants.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roomscope::compliance::{builtin_rules, check, ComplianceMetrics, Verdict};
use roomscope::decay::{decay_metrics, schroeder_edc, DecayMetrics, EDC_FLOOR_DB};
use roomscope::energy::{clarity_c80, definition_d50, drr, wellness_score, WellnessInputs};
use roomscope::signal::ImpulseResponse;
use roomscope::spatial::{iacc, EARLY_IACC_LIMIT_S};

pub type Check = Result<(), TestCaseError>;

/// Uniform-sum noise under an exponential envelope with a short pre-delay.
pub fn decaying_noise(seed: u64, t60: f64, fs: u32, seconds: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (seconds * fs as f64) as usize;
    let k = 3.0 * std::f64::consts::LN_10 / t60;
    let delay = rng.random_range(0..n / 20);
    (0..n)
        .map(|i| {
            if i < delay {
                return 0.0;
            }
            let t = (i - delay) as f64 / fs as f64;
            let u: f64 = rng.random_range(-1.0..1.0);
            let v: f64 = rng.random_range(-1.0..1.0);
            (u + v) * (-k * t).exp()
        })
        .collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn same_decay(a: &DecayMetrics, b: &DecayMetrics) -> bool {
    [(a.edt_s(), b.edt_s()), (a.t20_s(), b.t20_s()), (a.t30_s(), b.t30_s())]
        .iter()
        .all(|pair| match pair {
            (Some(x), Some(y)) => close(*x, *y, 1e-9),
            (None, None) => true,
            _ => false,
        })
}

/// Nonzero gain of either sign spanning six decades.
pub fn scale() -> impl Strategy<Value = f64> {
    (1e-3..1e3f64, any::<bool>()).prop_map(|(c, neg)| if neg { -c } else { c })
}

pub fn edc_case() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (
        prop::collection::vec(prop_oneof![Just(0.0), -1.0..1.0f64], 16..3000),
        0usize..16,
    )
}

pub fn edc_monotone((mut samples, spike): (Vec<f64>, usize)) -> Check {
    samples[spike] = 1.0;
    let rir = ImpulseResponse::mono(samples, 16_000).unwrap();
    let edc = schroeder_edc(&rir).unwrap();
    prop_assert_eq!(edc.values_db[0], 0.0);
    for w in edc.values_db.windows(2) {
        prop_assert!(w[1] <= w[0]);
    }
    prop_assert!(edc.values_db.iter().all(|v| *v >= EDC_FLOOR_DB));
    Ok(())
}

pub fn scaling_case() -> impl Strategy<Value = (u64, f64, u32, f64)> {
    (
        any::<u64>(),
        0.2..1.5f64,
        prop::sample::select(vec![8_000u32, 16_000, 22_050]),
        scale(),
    )
}

pub fn scaling_invariance((seed, t60, fs, c): (u64, f64, u32, f64)) -> Check {
    let a = ImpulseResponse::mono(decaying_noise(seed, t60, fs, 1.2 * t60 + 0.1), fs).unwrap();
    let b = a.scaled(c).unwrap();
    prop_assert!(same_decay(
        &decay_metrics(&schroeder_edc(&a).unwrap()),
        &decay_metrics(&schroeder_edc(&b).unwrap()),
    ));
    let (ca, cb) = (clarity_c80(&a).unwrap(), clarity_c80(&b).unwrap());
    prop_assert!(close(ca.db, cb.db, 1e-9) && ca.saturated == cb.saturated);
    prop_assert!(close(definition_d50(&a).unwrap(), definition_d50(&b).unwrap(), 1e-9));
    let (da, db) = (drr(&a).unwrap(), drr(&b).unwrap());
    prop_assert!(close(da.db, db.db, 1e-9) && da.saturated == db.saturated);
    Ok(())
}

pub fn iacc_case() -> impl Strategy<Value = (u64, u32, f64, f64)> {
    (
        any::<u64>(),
        prop::sample::select(vec![16_000u32, 44_100, 48_000]),
        0.0..1.0f64,
        scale(),
    )
}

pub fn iacc_symmetry((seed, fs, mix, c): (u64, u32, f64, f64)) -> Check {
    let left = decaying_noise(seed, 0.4, fs, 0.15);
    let other = decaying_noise(seed ^ 0x5555, 0.4, fs, 0.15);
    let right: Vec<f64> = left.iter().zip(&other).map(|(l, o)| mix * l + (1.0 - mix) * o).collect();
    let rir = ImpulseResponse::stereo(left.clone(), right.clone(), fs).unwrap();
    let v = iacc(&rir, EARLY_IACC_LIMIT_S).unwrap();
    prop_assert!((0.0..=1.0).contains(&v));
    let swapped = ImpulseResponse::stereo(right, left, fs).unwrap();
    prop_assert!(close(v, iacc(&swapped, EARLY_IACC_LIMIT_S).unwrap(), 1e-12));
    prop_assert!(close(v, iacc(&rir.scaled(c).unwrap(), EARLY_IACC_LIMIT_S).unwrap(), 1e-9));
    Ok(())
}

pub fn wellness_case() -> impl Strategy<Value = (WellnessInputs, f64)> {
    (0.05..5.0f64, 0.0..1.0f64, 0.0..1.0f64, -20.0..20.0f64, 10.0..5000.0f64, 0.0..2.0f64).prop_map(
        |(rt60_s, sti, d50, c80_db, volume_m3, delta)| {
            (
                WellnessInputs {
                    rt60_s,
                    sti,
                    d50,
                    c80_db,
                    volume_m3,
                },
                delta,
            )
        },
    )
}

pub fn wellness_monotone((base, delta): (WellnessInputs, f64)) -> Check {
    let w = wellness_score(&base);
    prop_assert!((0.0..=100.0).contains(&w));
    let step = |f: &dyn Fn(&mut WellnessInputs)| {
        let mut i = base;
        f(&mut i);
        wellness_score(&i)
    };
    prop_assert!(step(&|i| i.rt60_s += delta) <= w);
    prop_assert!(step(&|i| i.volume_m3 += delta * 500.0) <= w);
    prop_assert!(step(&|i| i.sti += delta / 4.0) >= w);
    prop_assert!(step(&|i| i.d50 += delta / 4.0) >= w);
    prop_assert!(step(&|i| i.c80_db += delta * 5.0) >= w);
    Ok(())
}

pub fn compliance_case() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.05..4.0f64, 0.0..1.0f64, 0.15..1.0f64, 0.0..0.5f64)
}

pub fn compliance_monotone((rt60, lower, sti, raise): (f64, f64, f64, f64)) -> Check {
    let m = |rt60_s: f64, sti: f64| ComplianceMetrics {
        rt60_s: Some(rt60_s),
        rt60_estimate: Some("T30".into()),
        sti: Some(sti),
    };
    let raised = (sti + raise).min(1.0);
    for rule in builtin_rules() {
        let a = check(&m(rt60, sti), &rule);
        let b = check(&m(rt60, raised), &rule);
        if a.sti_pass == Some(true) {
            prop_assert_eq!(b.sti_pass, Some(true));
        }
        if rule.rt60_min_s.is_none() {
            let c = check(&m(rt60 * lower, raised), &rule);
            if a.rt60_pass == Some(true) {
                prop_assert_eq!(c.rt60_pass, Some(true));
            }
            if a.overall == Verdict::Pass {
                prop_assert_eq!(c.overall, Verdict::Pass);
            }
        }
    }
    Ok(())
}
