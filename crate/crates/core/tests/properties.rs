//! Randomized invariants across the analysis and simulation modules.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roomscope::auralize::fft_convolve;
use roomscope::decay::{decay_metrics, schroeder_edc};
use roomscope::energy::{definition_d50, sti_proxy, SnrSource, StiInputs};
use roomscope::geometry::RoomGeometry;
use roomscope::signal::{preprocess, to_mono, ImpulseResponse};
use roomscope::simulate::{image_sources, simulate_ism, SimulationConfig, TailModel};
use roomscope::spatial::{first_order_reflections, room_modes_for_dims, Surface};
use roomscope::spectral::{magnitude_spectrum, Smoothing, SPECTRAL_FLOOR_DB};
use roomscope::wav::{load_wav, save_wav};

mod support;

use support::{close, decaying_noise};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

proptest! {
    #![proptest_config(cases(256))]

    #[test]
    fn edc_is_monotone_non_increasing(case in support::edc_case()) {
        support::edc_monotone(case)?;
    }

    #[test]
    fn ratios_and_decay_are_scale_invariant(case in support::scaling_case()) {
        support::scaling_invariance(case)?;
    }

    #[test]
    fn iacc_bounded_and_symmetric(case in support::iacc_case()) {
        support::iacc_symmetry(case)?;
    }

    #[test]
    fn wellness_monotone_in_each_input(case in support::wellness_case()) {
        support::wellness_monotone(case)?;
    }

    #[test]
    fn compliance_monotone(case in support::compliance_case()) {
        support::compliance_monotone(case)?;
    }

    #[test]
    fn d50_and_sti_proxy_ranges(
        seed in any::<u64>(),
        t60 in 0.1..3.0f64,
        rt in 0.0..20.0f64,
        snr in -60.0..80.0f64,
    ) {
        let rir = ImpulseResponse::mono(decaying_noise(seed, t60, 8_000, 0.5), 8_000).unwrap();
        let d = definition_d50(&rir).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let s = sti_proxy(&StiInputs { rt60_s: rt, snr_db: snr, snr_source: SnrSource::UserSupplied });
        prop_assert!((0.15..=1.0).contains(&s));
    }

    #[test]
    fn preprocess_idempotent_and_mono_shape(
        seed in any::<u64>(),
        lead in 0usize..200,
        stereo in any::<bool>(),
    ) {
        let mut h = vec![0.0; lead];
        h.extend(decaying_noise(seed, 0.3, 8_000, 0.2));
        let rir = if stereo {
            let r: Vec<f64> = h.iter().rev().copied().collect();
            ImpulseResponse::stereo(h, r, 8_000).unwrap()
        } else {
            ImpulseResponse::mono(h, 8_000).unwrap()
        };
        let (once, _) = preprocess(&rir).unwrap();
        let (twice, _) = preprocess(&once).unwrap();
        prop_assert_eq!(&once, &twice);
        let mono = to_mono(&rir);
        prop_assert_eq!(mono.len(), rir.len());
        prop_assert_eq!(mono.sample_rate(), rir.sample_rate());
    }

    #[test]
    fn wav_round_trip(
        samples in prop::collection::vec(-1.0..1.0f64, 16..2000),
        fs in prop::sample::select(vec![8_000u32, 44_100, 48_000, 96_000]),
        stereo in any::<bool>(),
    ) {
        let rir = if stereo {
            ImpulseResponse::stereo(samples.clone(), samples.iter().map(|s| -s * 0.5).collect(), fs).unwrap()
        } else {
            ImpulseResponse::mono(samples, fs).unwrap()
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        save_wav(&path, &rir).unwrap();
        let back = load_wav(&path).unwrap();
        prop_assert_eq!(back.sample_rate(), fs);
        prop_assert_eq!(back.num_channels(), rir.num_channels());
        for (a, b) in rir.channels().iter().zip(back.channels()) {
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() <= 6e-8 * x.abs());
            }
        }
    }

    #[test]
    fn modes_permutation_consistent(
        l in 2.0..12.0f64,
        w in 2.0..12.0f64,
        h in 2.0..6.0f64,
        perm in prop::sample::select(vec![[0usize, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]),
    ) {
        let dims = [l, w, h];
        let permuted = perm.map(|p| dims[p]);
        let a = room_modes_for_dims(dims, 150.0);
        let b = room_modes_for_dims(permuted, 150.0);
        prop_assert_eq!(a.len(), b.len());
        let mut ka: Vec<_> = a.iter().map(|m| ((m.indices, m.mode_type), m.f_hz)).collect();
        let mut kb: Vec<_> = b
            .iter()
            .map(|m| {
                // Undo the relabeling so each mode pairs with its original.
                let mut orig = [0u32; 3];
                for (slot, p) in perm.iter().enumerate() {
                    orig[*p] = m.indices[slot];
                }
                ((orig, m.mode_type), m.f_hz)
            })
            .collect();
        ka.sort_by_key(|x| x.0 .0);
        kb.sort_by_key(|x| x.0 .0);
        for (x, y) in ka.iter().zip(&kb) {
            prop_assert_eq!(x.0, y.0);
            prop_assert!(close(x.1, y.1, 1e-12));
        }
    }

    #[test]
    fn ism_dimension_doubling(
        dims in (3.0..15.0f64, 3.0..12.0f64, 2.5..6.0f64),
        fr in prop::array::uniform6(0.1..0.9f64),
        order in 0u32..5,
    ) {
        let dims = [dims.0, dims.1, dims.2];
        let pick = |f: &[f64]| [0, 1, 2].map(|k| f[k] * dims[k]);
        let config = SimulationConfig {
            geom: RoomGeometry::new(dims, pick(&fr[..3]), pick(&fr[3..])).unwrap(),
            absorption: [0.3; 6],
            max_order: order,
            sample_rate: 48_000,
            tail: TailModel::None,
            seed: 0,
        };
        let double = |p: [f64; 3]| p.map(|v| 2.0 * v);
        let doubled = SimulationConfig {
            geom: RoomGeometry::new(double(dims), double(config.geom.source), double(config.geom.receiver)).unwrap(),
            ..config
        };
        let mut a = image_sources(&config);
        let mut b = image_sources(&doubled);
        a.sort_by_key(|x| x.indices);
        b.sort_by_key(|x| x.indices);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.indices, y.indices);
            prop_assert!(close(2.0 * x.delay_s, y.delay_s, 1e-12));
        }
        let direct = |v: &[roomscope::simulate::Arrival]| v.iter().find(|x| x.order == 0).unwrap().delay_s;
        prop_assert!(close(2.0 * direct(&a), direct(&b), 1e-12));
    }

    #[test]
    fn reflections_follow_direct_and_mirror(
        dims in (3.0..15.0f64, 3.0..12.0f64, 2.5..6.0f64),
        fr in prop::array::uniform6(0.05..0.95f64),
    ) {
        let dims = [dims.0, dims.1, dims.2];
        let pick = |f: &[f64]| [0, 1, 2].map(|k| f[k] * dims[k]);
        let geom = RoomGeometry::new(dims, pick(&fr[..3]), pick(&fr[3..])).unwrap();
        let paths = first_order_reflections(&geom);
        for r in &paths.reflections {
            prop_assert!(r.arrival_s >= paths.direct.arrival_s);
        }
        // Mirror the room across x = L/2: the x0 and xL paths trade places.
        let flip = |p: [f64; 3]| [dims[0] - p[0], p[1], p[2]];
        let mirrored = RoomGeometry::new(dims, flip(geom.source), flip(geom.receiver)).unwrap();
        let m = first_order_reflections(&mirrored);
        let len = |p: &roomscope::spatial::FirstOrderPaths, s: Surface| {
            p.reflections.iter().find(|r| r.surface == s).unwrap().path_length
        };
        prop_assert!(close(len(&paths, Surface::X0), len(&m, Surface::XL), 1e-12));
        prop_assert!(close(len(&paths, Surface::XL), len(&m, Surface::X0), 1e-12));
    }

    #[test]
    fn spectrum_scaling_shifts_db_uniformly(
        seed in any::<u64>(),
        c in 1e-2..1e2f64,
    ) {
        let rir = ImpulseResponse::mono(decaying_noise(seed, 0.3, 8_000, 0.3), 8_000).unwrap();
        let a = magnitude_spectrum(&rir, Smoothing::None).unwrap();
        let b = magnitude_spectrum(&rir.scaled(c).unwrap(), Smoothing::None).unwrap();
        let shift = 20.0 * c.log10();
        for (x, y) in a.magnitude_db.iter().zip(&b.magnitude_db) {
            if *x > SPECTRAL_FLOOR_DB + 60.0 {
                prop_assert!((y - x - shift).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn convolution_is_linear(
        x in prop::collection::vec(-1.0..1.0f64, 1..300),
        h in prop::collection::vec(-1.0..1.0f64, 1..100),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mixed: Vec<f64> = x.iter().zip(&z).map(|(p, q)| a * p + b * q).collect();
        let lhs = fft_convolve(&mixed, &h);
        let cx = fft_convolve(&x, &h);
        let cz = fft_convolve(&z, &h);
        prop_assert_eq!(lhs.len(), x.len() + h.len() - 1);
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (a * cx[i] + b * cz[i])).abs() < 1e-9);
        }
    }
}

proptest! {
    // Each case renders two full responses, so fewer cases.
    #![proptest_config(cases(40))]

    #[test]
    fn more_absorption_shortens_t30(
        dims in (4.0..10.0f64, 4.0..9.0f64, 2.6..4.0f64),
        alpha in 0.15..0.45f64,
        bump in 0.08..0.3f64,
        seed in any::<u64>(),
    ) {
        let dims = [dims.0, dims.1, dims.2];
        let config = SimulationConfig {
            geom: RoomGeometry::new(dims, [1.0, 1.2, 1.1], [dims[0] - 1.0, dims[1] - 1.5, 1.5]).unwrap(),
            absorption: [alpha; 6],
            max_order: 6,
            sample_rate: 8_000,
            tail: TailModel::ExponentialNoise,
            seed,
        };
        let t30 = |c: &SimulationConfig| {
            let rir = simulate_ism(c).unwrap();
            decay_metrics(&schroeder_edc(&rir).unwrap()).t30_s().unwrap()
        };
        let more = SimulationConfig { absorption: [alpha + bump; 6], ..config };
        prop_assert!(t30(&more) < t30(&config));
    }
}
