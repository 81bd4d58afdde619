use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::tps::{entanglement_measures, schmidt_spectrum, TensorProductStructure};

fn ext() -> MomentumGrid {
    MomentumGrid::centered(3, 2, 1.0).unwrap()
}

fn gaussian_radial(q: &Vec3) -> f64 {
    (-(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) / 2.0).exp()
}

fn random_state(pair: PairLabel, l_max: u32, seed: u64) -> PartialWaveState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radial = RadialGrid::new(3, 2.0).unwrap();
    let n = ext().len() * radial.len() * channel_set(Basis::Uncoupled, l_max, pair.s_a, pair.s_b).len();
    let amps = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    PartialWaveState::from_amplitudes(pair, ext(), radial, l_max, Basis::Uncoupled, amps).unwrap().normalized().unwrap()
}

fn spin_half_pair() -> PairLabel {
    PairLabel { m_a: 1.0, m_b: 2.0, w_a: 0.0, w_b: 0.5, s_a: Spin::HALF, s_b: Spin::HALF }
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn isotropic_state_has_only_s_wave() {
    let pair = PairLabel::spinless(1.0, 1.0).unwrap();
    let s = SampledPair::from_fn(
        pair,
        ext(),
        RadialGrid::new(16, 5.0).unwrap(),
        AngularQuadrature::for_lmax(6),
        |_, q, _, _| C64::new(gaussian_radial(q), 0.0),
    )
    .unwrap();
    let pw = spherical_expand(&s, 6).unwrap();
    for e in 0..pw.dims()[0] {
        for r in 0..pw.dims()[1] {
            assert!(pw.amplitude(e, r, 0).norm() > 1e-6);
            for c in 1..pw.channels().len() {
                assert!(pw.amplitude(e, r, c).norm() < 1e-12);
            }
        }
    }
    assert!(pw.band_leakage() < 1e-12);
}

#[test]
fn z_dipole_has_only_l1_m0() {
    let pair = PairLabel::spinless(1.0, 3.0).unwrap();
    let s = SampledPair::from_fn(
        pair,
        ext(),
        RadialGrid::new(8, 4.0).unwrap(),
        AngularQuadrature::for_lmax(4),
        |_, q, _, _| C64::new(q[2] * gaussian_radial(q), 0.0),
    )
    .unwrap();
    let pw = spherical_expand(&s, 4).unwrap();
    let target =
        pw.channels().iter().position(|c| *c == Channel::Uncoupled { l: 1, m: 0, twice_ma: 0, twice_mb: 0 }).unwrap();
    for (i, z) in pw.amplitudes().iter().enumerate() {
        if i % pw.channels().len() != target {
            assert!(z.norm() < 1e-12);
        }
    }
}

#[test]
fn round_trips_are_exact_for_band_limited_states() {
    for pair in [PairLabel::spinless(1.0, 2.0).unwrap(), spin_half_pair()] {
        let x = random_state(pair, 4, 3);
        let quad = AngularQuadrature::new(6, 11).unwrap();
        let sampled = spherical_contract(&x, &quad).unwrap();
        assert!((sampled.norm() - 1.0).abs() < 1e-12);
        let back = spherical_expand(&sampled, 4).unwrap();
        assert!(max_diff(back.amplitudes(), x.amplitudes()) < 1e-12);
        let again = spherical_contract(&back, &quad).unwrap();
        assert!(max_diff(again.amplitudes(), sampled.amplitudes()) < 1e-12);
    }
}

#[test]
fn expansion_rejects_bad_orders() {
    let pair = PairLabel::spinless(1.0, 1.0).unwrap();
    let s = SampledPair::from_fn(
        pair,
        ext(),
        RadialGrid::new(2, 1.0).unwrap(),
        AngularQuadrature::new(3, 5).unwrap(),
        |_, _, _, _| C64::new(1.0, 0.0),
    )
    .unwrap();
    assert!(matches!(spherical_expand(&s, -1), Err(Error::InvalidParameter(_))));
    assert!(matches!(spherical_expand(&s, 3), Err(Error::InvalidQuadrature(_))));
    assert!(spherical_expand(&s, 2).is_ok());
}

#[test]
fn spinless_coupling_relabels() {
    let x = random_state(PairLabel::spinless(1.0, 1.0).unwrap(), 3, 5);
    let c = couple_channels(&x).unwrap();
    assert_eq!(c.amplitudes(), x.amplitudes());
    for ch in c.channels() {
        let Channel::Coupled { twice_j, l, twice_s, .. } = *ch else { panic!() };
        assert_eq!((twice_j, twice_s), (2 * l, 0));
    }
}

#[test]
fn two_spin_halves_at_l0_split_into_singlet_and_triplet() {
    let pair = spin_half_pair();
    let radial = RadialGrid::new(1, 1.0).unwrap();
    let one = MomentumGrid::centered(1, 2, 1.0).unwrap();
    let n = one.len() * channel_set(Basis::Uncoupled, 0, pair.s_a, pair.s_b).len();
    // |up, down> in the first external point
    let mut amps = vec![C64::new(0.0, 0.0); n];
    amps[1] = C64::new(1.0, 0.0);
    let x = PartialWaveState::from_amplitudes(pair, one, radial, 0, Basis::Uncoupled, amps).unwrap();
    let c = couple_channels(&x).unwrap();
    let weight = |twice_s: u32| -> f64 {
        c.channels()
            .iter()
            .enumerate()
            .filter(|(_, ch)| matches!(ch, Channel::Coupled { twice_s: t, .. } if *t == twice_s))
            .map(|(i, _)| c.amplitude(0, 0, i).norm_sqr())
            .sum()
    };
    assert!((weight(0) - 0.5).abs() < 1e-15);
    assert!((weight(2) - 0.5).abs() < 1e-15);
}

#[test]
fn coupling_is_unitary() {
    let x = random_state(spin_half_pair(), 4, 9);
    let c = couple_channels(&x).unwrap();
    assert!((c.norm() - 1.0).abs() < 1e-12);
    let back = decouple_channels(&c).unwrap();
    assert!(max_diff(back.amplitudes(), x.amplitudes()) < 1e-12);
    let heavy = PairLabel { s_a: Spin::from_twice(2), ..spin_half_pair() };
    assert!(couple_channels(&random_state(heavy, 1, 1)).is_err());
}

#[test]
fn internal_rotation_matches_rotated_samples() {
    let pair = PairLabel { s_a: Spin::ZERO, s_b: Spin::ZERO, ..spin_half_pair() };
    let r = Rotation::euler_zyz(0.4, 1.1, -0.7);
    let f = |q: &Vec3| C64::new(q[0] * q[1] - 0.3 * q[2], q[0] + q[2] * q[2]) * gaussian_radial(q);
    let radial = RadialGrid::new(4, 3.0).unwrap();
    let quad = AngularQuadrature::for_lmax(3);
    let direct = SampledPair::from_fn(pair, ext(), radial.clone(), quad.clone(), |_, q, _, _| f(q)).unwrap();
    let rotated = SampledPair::from_fn(pair, ext(), radial, quad, |_, q, _, _| {
        let rq = r.apply(&Vector3::new(q[0], q[1], q[2]));
        f(&[rq[0], rq[1], rq[2]])
    })
    .unwrap();
    let lhs = rotate_internal(&spherical_expand(&direct, 3).unwrap(), &r);
    let rhs = spherical_expand(&rotated, 3).unwrap();
    assert!(max_diff(lhs.amplitudes(), rhs.amplitudes()) < 1e-12);
}

#[test]
fn coupled_rotation_is_block_diagonal_in_j() {
    let x = random_state(spin_half_pair(), 3, 17);
    let r = Rotation::euler_zyz(2.0, 0.3, 1.2);
    let a = couple_channels(&rotate_internal(&x, &r)).unwrap();
    let b = rotate_internal(&couple_channels(&x).unwrap(), &r);
    assert!(max_diff(a.amplitudes(), b.amplitudes()) < 1e-12);
}

#[test]
fn galilei_action_keeps_ie_spectrum() {
    let x = couple_channels(&random_state(spin_half_pair(), 2, 21)).unwrap();
    let grid_step = x.external().spacing() / x.pair().total_mass();
    let r = Rotation::octahedral()[7];
    let g = GroupElement { b: 0.3, a: Vector3::new(0.2, -0.1, 0.5), v: Vector3::new(0.0, 0.0, 0.0), r };
    let y = apply_galilei(&g, &x).unwrap();
    assert!((y.norm() - 1.0).abs() < 1e-12);
    let tps = TensorProductStructure::named("P|int").unwrap();
    let s0 = entanglement_measures(&schmidt_spectrum(&x, &tps).unwrap()).entropy;
    let s1 = entanglement_measures(&schmidt_spectrum(&y, &tps).unwrap()).entropy;
    assert!((s0 - s1).abs() < 1e-10);
    let boost = GroupElement { v: Vector3::new(grid_step, 0.0, 0.0), ..GroupElement::identity() };
    assert!(apply_galilei(&boost, &x).is_ok());
    let bad = GroupElement { v: Vector3::new(0.37 * grid_step, 0.0, 0.0), ..GroupElement::identity() };
    assert!(matches!(apply_galilei(&bad, &x), Err(Error::Commensurability(_))));
}

#[test]
fn channel_dump_layout() {
    let x = random_state(PairLabel::spinless(1.0, 1.0).unwrap(), 1, 2);
    let mut buf = Vec::new();
    write_channels_csv(&x, 0, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "r_index,|q|,W,l,m,re,im");
    assert_eq!(text.lines().count(), 1 + 3 * 4);
    let c = couple_channels(&random_state(spin_half_pair(), 1, 2)).unwrap();
    let mut buf = Vec::new();
    write_channels_csv(&c, 1, &mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("r_index,|q|,W,j,m_j,l,s,re,im\n"));
}

#[test]
fn random_rotations_preserve_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_state(spin_half_pair(), 3, 8);
    for _ in 0..5 {
        let r = Rotation::euler_zyz(rng.random_range(0.0..6.0), rng.random_range(0.0..3.0), rng.random_range(0.0..6.0));
        assert!((rotate_internal(&x, &r).norm() - 1.0).abs() < 1e-12);
    }
}
