use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpslab::gaussian::{com_quadratic_form, gamma_tolerance, masswidth_satisfied, GaussianPacket};
use tpslab::hilbert::{MomentumGrid, ParticleLabel, State, TwoParticleState};
use tpslab::partialwave::{channel_set, Basis, PairLabel, PartialWaveState, RadialGrid};
use tpslab::scattering::{apply_smatrix, PhaseShiftModel};
use tpslab::spin::Spin;
use tpslab::tps::{entanglement_measures, schmidt_spectrum, to_com_variables, Direction, TensorProductStructure};

fn amplitudes(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn com_relabeling_round_trips(r in 1u32..5, s in 1u32..5, seed in any::<u64>()) {
        let grid = MomentumGrid::centered(1, 12, 0.5).unwrap();
        let la = ParticleLabel::new(r as f64, 0.0, Spin::ZERO, grid.clone()).unwrap();
        let lb = ParticleLabel::new(s as f64, 0.0, Spin::HALF, grid).unwrap();
        let x = TwoParticleState::from_amplitudes(la, lb, amplitudes(12 * 12 * 2, seed)).unwrap();
        let back = to_com_variables(&to_com_variables(&x, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        let err = x.amplitudes().iter().zip(back.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err == 0.0);
    }

    #[test]
    fn hard_sphere_keeps_norm_and_ie_entropy(radius in 0.05f64..2.0, seed in any::<u64>()) {
        let pair = PairLabel { s_a: Spin::HALF, ..PairLabel::spinless(1.0, 2.0).unwrap() };
        let (ext, radial) = (MomentumGrid::centered(3, 2, 1.0).unwrap(), RadialGrid::new(4, 3.0).unwrap());
        let n = ext.len() * radial.len() * channel_set(Basis::Coupled, 2, pair.s_a, pair.s_b).len();
        let x = PartialWaveState::from_amplitudes(pair, ext, radial, 2, Basis::Coupled, amplitudes(n, seed))
            .unwrap()
            .normalized()
            .unwrap();
        let y = apply_smatrix(&x, &PhaseShiftModel::HardSphere { radius }).unwrap();
        let tps = TensorProductStructure::named("P|int").unwrap();
        let s = |z: &PartialWaveState| entanglement_measures(&schmidt_spectrum(z, &tps).unwrap()).entropy;
        prop_assert!((y.norm() - 1.0).abs() < 1e-12);
        prop_assert!((s(&x) - s(&y)).abs() < 1e-10);
    }

    #[test]
    fn mass_width_condition_matches_gamma(ma in 0.5f64..5.0, sa in 0.5f64..3.0, mb in 0.5f64..5.0, sb in 0.5f64..3.0) {
        let (a, b) = (GaussianPacket::new(ma, sa, 0.0), GaussianPacket::new(mb, sb, 0.0));
        let tol = 1e-3;
        let gamma = com_quadratic_form(&a, &b, 1).gamma;
        let by_gamma = gamma.abs() <= gamma_tolerance(&a, &b, tol) * (1.0 + 1e-12);
        prop_assert_eq!(masswidth_satisfied(&a, &b, tol), by_gamma);
    }
}
