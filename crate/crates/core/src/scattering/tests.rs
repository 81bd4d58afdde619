use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::galilei::{GroupElement, Rotation};
use crate::gaussian::GaussianPacket;
use crate::hilbert::{sample_gaussian_pair, MomentumGrid, ParticleLabel, State, TwoParticleState};
use crate::partialwave::{couple_channels, PairLabel, RadialGrid};
use crate::tensor::ray_distance;
use crate::tps::{entanglement_measures, schmidt_spectrum, to_com_variables, Direction, TensorProductStructure};

fn random_pw(pair: PairLabel, l_max: u32, seed: u64) -> PartialWaveState {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ext = MomentumGrid::centered(3, 3, 1.0).unwrap();
    let radial = RadialGrid::new(5, 3.0).unwrap();
    let n =
        ext.len() * radial.len() * crate::partialwave::channel_set(Basis::Uncoupled, l_max, pair.s_a, pair.s_b).len();
    let amps = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    PartialWaveState::from_amplitudes(pair, ext, radial, l_max, Basis::Uncoupled, amps).unwrap().normalized().unwrap()
}

fn ie_entropy(x: &PartialWaveState) -> f64 {
    entanglement_measures(&schmidt_spectrum(x, &TensorProductStructure::named("P|int").unwrap()).unwrap()).entropy
}

#[test]
fn hard_sphere_examples() {
    let m = PhaseShiftModel::HardSphere { radius: 0.5 };
    assert!((m.phase_shift(ChannelKey::spinless(0), 1.0).unwrap() + 0.5).abs() < 1e-14);
    // continuous past several branch cuts
    assert!((m.phase_shift(ChannelKey::spinless(0), 14.6).unwrap() + 7.3).abs() < 1e-12);
    let small = PhaseShiftModel::HardSphere { radius: 1.0 };
    assert!(small.phase_shift(ChannelKey::spinless(2), 1e-2).unwrap().abs() < 1e-6);
    let all = m.spinless_shifts(4, 3.0).unwrap();
    for (l, d) in all.iter().enumerate() {
        assert!((d - m.phase_shift(ChannelKey::spinless(l as u32), 3.0).unwrap()).abs() < 1e-14);
    }
    assert!(m.phase_shift(ChannelKey::spinless(0), 0.0).is_err());
    assert_eq!(PhaseShiftModel::Zero.phase_shift(ChannelKey::new(1, 0.5, 1.5).unwrap(), 2.0).unwrap(), 0.0);
}

#[test]
fn table_interpolates_and_checks_range() {
    let csv = "k,l,s,j,delta\n0.0,0,0,0,0.0\n2.0,0,0,0,1.0\n1.0,0,0,0,0.25\n0.5,1,0.5,1.5,0.1\n1.5,1,0.5,1.5,0.3\n";
    let t = PhaseTable::from_csv(csv.as_bytes()).unwrap();
    assert!((t.delta(ChannelKey::spinless(0), 0.5).unwrap() - 0.125).abs() < 1e-15);
    assert!((t.delta(ChannelKey::spinless(0), 1.5).unwrap() - 0.625).abs() < 1e-15);
    assert!((t.delta(ChannelKey::new(1, 0.5, 1.5).unwrap(), 1.0).unwrap() - 0.2).abs() < 1e-15);
    assert!(matches!(t.delta(ChannelKey::spinless(0), 2.5), Err(Error::OutOfRange { .. })));
    assert!(matches!(t.delta(ChannelKey::spinless(1), 1.0), Err(Error::MissingChannel { l: 1, .. })));
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    assert_eq!(PhaseTable::from_csv(buf.as_slice()).unwrap(), t);
    assert!(PhaseTable::from_csv("k,l,s,j,delta\n1,0,0,0,0\n1,0,0,0,1\n".as_bytes()).is_err());
    assert!(PhaseTable::from_csv("k,l,s,j,delta\n1,0,0,1,0\n2,0,0,1,1\n".as_bytes()).is_err());
}

#[test]
fn model_strings() {
    assert_eq!("zero".parse::<PhaseShiftModel>().unwrap(), PhaseShiftModel::Zero);
    assert_eq!("hard_sphere:0.5".parse::<PhaseShiftModel>().unwrap(), PhaseShiftModel::HardSphere { radius: 0.5 });
    assert!("hard_sphere:-1".parse::<PhaseShiftModel>().is_err());
    assert!("square_well:1,2".parse::<PhaseShiftModel>().is_err());
    assert!("coulomb:1".parse::<PhaseShiftModel>().is_err());
}

#[test]
fn zero_model_is_bit_exact() {
    let x = random_pw(PairLabel::spinless(1.0, 2.0).unwrap(), 2, 1);
    assert_eq!(apply_smatrix(&x, &PhaseShiftModel::Zero).unwrap(), x);
}

#[test]
fn smatrix_is_unitary_and_local() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pair = PairLabel { s_a: Spin::HALF, s_b: Spin::HALF, ..PairLabel::spinless(1.0, 3.0).unwrap() };
    let x = couple_channels(&random_pw(pair, 2, 2)).unwrap();
    let table = PhaseTable::random(&mut rng, 2, Spin::HALF, Spin::HALF, 3.0, 7).unwrap();
    for model in [PhaseShiftModel::Table(table), PhaseShiftModel::HardSphere { radius: 0.7 }] {
        let y = apply_smatrix(&x, &model).unwrap();
        assert!((y.norm() - 1.0).abs() < 1e-12);
        assert!((ie_entropy(&x) - ie_entropy(&y)).abs() < 1e-10);
    }
    let uncoupled = random_pw(pair, 1, 3);
    assert!(apply_smatrix(&uncoupled, &PhaseShiftModel::HardSphere { radius: 1.0 }).is_err());
}

#[test]
fn single_channel_single_shell_gets_a_global_phase() {
    let x = random_pw(PairLabel::spinless(1.0, 1.0).unwrap(), 2, 4);
    let [ne, nr, nc] = x.dims();
    let mut amps = vec![C64::new(0.0, 0.0); ne * nr * nc];
    for e in 0..ne {
        amps[(e * nr + 2) * nc + 5] = x.amplitudes()[(e * nr + 2) * nc + 5];
    }
    let x = x.with_amplitudes(amps).normalized().unwrap();
    let y = apply_smatrix(&x, &PhaseShiftModel::HardSphere { radius: 0.9 }).unwrap();
    assert!(ray_distance(x.amplitudes(), y.amplitudes()) < 1e-14);
    assert!((ie_entropy(&x) - ie_entropy(&y)).abs() < 1e-14);
}

#[test]
fn smatrix_commutes_with_galilei_action() {
    let x = random_pw(PairLabel::spinless(1.0, 2.0).unwrap(), 3, 6);
    let model = PhaseShiftModel::HardSphere { radius: 0.8 };
    let quantum = x.external().spacing() / x.pair().total_mass();
    let g = GroupElement {
        b: 0.7,
        a: Vector3::new(0.3, -0.2, 0.1),
        v: Vector3::new(quantum, 0.0, -quantum),
        r: Rotation::octahedral()[5],
    };
    let lhs = crate::partialwave::apply_galilei(&g, &apply_smatrix(&x, &model).unwrap()).unwrap();
    let rhs = apply_smatrix(&crate::partialwave::apply_galilei(&g, &x).unwrap(), &model).unwrap();
    assert!(ray_distance(lhs.amplitudes(), rhs.amplitudes()) < 1e-12);
}

fn equal_mass_labels(n: usize) -> (ParticleLabel, ParticleLabel) {
    let g = MomentumGrid::centered(1, n, 0.25).unwrap();
    let l = ParticleLabel::new(1.0, 0.0, Spin::ZERO, g).unwrap();
    (l.clone(), l)
}

#[test]
fn odd_relative_states_are_contact_eigenstates() {
    let (a, b) = equal_mass_labels(16);
    // odd under p_A <-> p_B, i.e. under q -> -q at fixed P
    let x = TwoParticleState::from_fn(a, b, |pa, _, pb, _| C64::new((pa - pb) * (-(pa * pa + pb * pb)).exp(), 0.0))
        .unwrap();
    let com = to_com_variables(&x, Direction::Forward).unwrap();
    let out = apply_1d_hardcore(&com, &OneDHardCore::new(0.0).unwrap()).unwrap();
    let d = out.amplitudes().iter().zip(com.amplitudes()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    assert!(d < 1e-15);
}

#[test]
fn contact_reflection_is_an_involution() {
    let (a, b) = equal_mass_labels(12);
    let x = TwoParticleState::from_fn(a, b, |pa, _, pb, _| C64::new(pa.sin() + 1.0, pb * pa)).unwrap();
    let com = to_com_variables(&x, Direction::Forward).unwrap();
    let core = OneDHardCore::new(0.0).unwrap();
    let twice = apply_1d_hardcore(&apply_1d_hardcore(&com, &core).unwrap(), &core).unwrap();
    let d = twice.amplitudes().iter().zip(com.amplitudes()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    assert!(d < 1e-12);
    let with_core = apply_1d_hardcore(&com, &OneDHardCore::new(0.4).unwrap()).unwrap();
    assert!((crate::hilbert::norm(&with_core) - crate::hilbert::norm(&com)).abs() < 1e-12);
}

#[test]
fn lattice_and_sampled_reflections_agree_for_equal_masses() {
    let (a, b) = equal_mass_labels(20);
    let pa0 = GaussianPacket::new(1.0, 0.6, 0.5);
    let pb0 = GaussianPacket::new(1.0, 0.9, -0.4);
    let x = sample_gaussian_pair(&pa0, &pb0, &a.grid, &b.grid).unwrap();
    let core = OneDHardCore::new(0.3).unwrap();
    let lattice = to_com_variables(
        &apply_1d_hardcore(&to_com_variables(&x, Direction::Forward).unwrap(), &core).unwrap(),
        Direction::Inverse,
    )
    .unwrap();
    let sampled = hardcore_gaussian_out(&pa0, &pb0, &a.grid, &b.grid, &core).unwrap();
    let d = lattice.amplitudes().iter().zip(sampled.amplitudes()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    assert!(d < 1e-14);
}

#[test]
fn unequal_masses_break_lattice_symmetry() {
    let g = MomentumGrid::centered(1, 8, 0.5).unwrap();
    let a = ParticleLabel::new(1.0, 0.0, Spin::ZERO, g.clone()).unwrap();
    let b = ParticleLabel::new(3.0, 0.0, Spin::ZERO, g).unwrap();
    let x = TwoParticleState::from_fn(a, b, |_, _, _, _| C64::new(1.0, 0.0)).unwrap();
    let com = to_com_variables(&x, Direction::Forward).unwrap();
    assert!(matches!(apply_1d_hardcore(&com, &OneDHardCore::new(0.0).unwrap()), Err(Error::LatticeSymmetry)));
    assert!(matches!(apply_1d_hardcore(&x, &OneDHardCore::new(0.0).unwrap()), Err(Error::FrameMismatch { .. })));
}

#[test]
fn pointwise_zero_model_reproduces_band_limited_input() {
    let pair = PairLabel::spinless(1.0, 2.0).unwrap();
    let grid = MomentumGrid::centered(3, 3, 0.8).unwrap();
    let quad = crate::partialwave::AngularQuadrature::for_lmax(4);
    // quadratic in q at fixed P, so band-limited to l <= 2
    let psi = |pa: &crate::hilbert::Vec3, pb: &crate::hilbert::Vec3| {
        C64::new(1.0 + pa[0] * pb[1] - pa[2] * pa[2], pb[0] - pa[1])
    };
    let s = scatter_pointwise_3d(&pair, &grid, &grid, &PhaseShiftModel::Zero, 4, &quad, psi).unwrap();
    let w = grid.cell_volume();
    for ia in 0..grid.len() {
        for ib in 0..grid.len() {
            let exact = psi(&grid.momentum(ia), &grid.momentum(ib)) * w;
            assert!((s.reference[(ia, ib)] - exact).norm() < 1e-12);
            assert!((s.out[(ia, ib)] - exact).norm() < 1e-12);
        }
    }
}
