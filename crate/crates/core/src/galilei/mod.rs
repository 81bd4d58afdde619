//! Galilei group elements and their unitary action on momentum grids.
//!
//! The single-particle operator is
//! `(U(g) phi)_chi(p) = e^{-i m a.v/2 + i a.p' - i b E'} sum_chi' D^s(R)_{chi' chi} phi_chi'(p')`
//! with `p' = R p + m v` and `E' = |p'|^2 / (2m) + W`. Boosts must move the
//! grid by whole steps and rotations must map the grid onto itself, so every
//! action is a phased permutation and exactly unitary away from the edges.

mod rotation;
mod wigner;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64 as C64;
use rand::Rng;

pub use rotation::Rotation;
pub use wigner::{small_d, wigner_d};

use crate::error::{Error, Result};
use crate::hilbert::{Frame, MomentumGrid, ParticleLabel, SingleParticleState, State, TwoParticleState};
use crate::tensor;

/// Largest residual of the projective representation law accepted.
pub const REPRESENTATION_TOLERANCE: f64 = 1e-9;

/// `(b, a, v, R)`: time translation, space translation, boost, rotation.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct GroupElement {
    pub b: f64,
    pub a: Vector3<f64>,
    pub v: Vector3<f64>,
    pub r: Rotation,
}

impl GroupElement {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn time_translation(b: f64) -> Self {
        Self { b, ..Self::default() }
    }

    pub fn translation(a: Vector3<f64>) -> Self {
        Self { a, ..Self::default() }
    }

    pub fn boost(v: Vector3<f64>) -> Self {
        Self { v, ..Self::default() }
    }

    pub fn rotation(r: Rotation) -> Self {
        Self { r, ..Self::default() }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.b - other.b).abs() <= tol
            && (self.a - other.a).amax() <= tol
            && (self.v - other.v).amax() <= tol
            && self.r.approx_eq(&other.r, tol)
    }
}

/// Product under which the grid operators compose as
/// `U(g2) U(g1) = e^{i xi} U(compose(g2, g1))`:
/// `(b1 + b2, a1 + R1 a2 + b2 v1, v1 + R1 v2, R1 R2)`.
pub fn compose(g2: &GroupElement, g1: &GroupElement) -> GroupElement {
    GroupElement {
        b: g1.b + g2.b,
        a: g1.a + g1.r.apply(&g2.a) + g2.b * g1.v,
        v: g1.v + g1.r.apply(&g2.v),
        r: g1.r.then_apply(&g2.r),
    }
}

pub fn inverse(g: &GroupElement) -> GroupElement {
    let rt = g.r.inverse();
    let v = -rt.apply(&g.v);
    GroupElement { b: -g.b, a: -rt.apply(&g.a) - g.b * v, v, r: rt }
}

/// Per-grid-point source index and phase, plus the spin matrix, of one
/// particle's factor of `U(g)`.
struct FactorAction {
    source: Vec<Option<usize>>,
    phase: Vec<C64>,
    spin: DMatrix<C64>,
}

pub(crate) fn check_commensurate(g: &GroupElement, mass: f64, grid: &MomentumGrid) -> Result<()> {
    let dim = grid.dim();
    if dim == 1 {
        if !g.r.is_identity() {
            return Err(Error::Commensurability("rotations act trivially only in 3D".into()));
        }
        if g.a.rows(1, 2).amax() > 0.0 || g.v.rows(1, 2).amax() > 0.0 {
            return Err(Error::Commensurability("1D grids take translations and boosts along x only".into()));
        }
    } else if !g.r.is_identity() && !(g.r.is_signed_permutation() && grid.is_centered()) {
        return Err(Error::Commensurability(
            "grid mode needs a lattice rotation (signed permutation) on a centered grid".into(),
        ));
    }
    for ax in 0..dim {
        let t = mass * g.v[ax] / grid.spacing();
        if (t - t.round()).abs() > 1e-9 {
            return Err(Error::Commensurability(format!(
                "m v = {} is not a whole number of grid steps ({})",
                mass * g.v[ax],
                grid.spacing()
            )));
        }
    }
    Ok(())
}

fn factor_action(g: &GroupElement, label: &ParticleLabel) -> Result<FactorAction> {
    let grid = &label.grid;
    check_commensurate(g, label.mass, grid)?;
    let m = label.mass;
    let const_phase = -0.5 * m * g.a.dot(&g.v);
    let mut source = Vec::with_capacity(grid.len());
    let mut phase = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let p = grid.momentum(i);
        let pp = g.r.apply(&Vector3::new(p[0], p[1], p[2])) + m * g.v;
        let energy = pp.norm_squared() / (2.0 * m) + label.internal_energy;
        source.push(grid.locate(&[pp[0], pp[1], pp[2]]));
        phase.push(C64::from_polar(1.0, const_phase + g.a.dot(&pp) - g.b * energy));
    }
    Ok(FactorAction { source, phase, spin: wigner_d(label.spin, &g.r) })
}

/// `U(g)` on one particle. Amplitudes whose source momentum leaves the
/// grid are dropped.
pub fn apply_single(g: &GroupElement, x: &SingleParticleState) -> Result<SingleParticleState> {
    let act = factor_action(g, x.label())?;
    let ns = x.spin().dim();
    let old = x.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); old.len()];
    for (i, src) in act.source.iter().enumerate() {
        let Some(j) = *src else { continue };
        for chi in 0..ns {
            let mut acc = C64::new(0.0, 0.0);
            for chip in 0..ns {
                acc += act.spin[(chip, chi)] * old[j * ns + chip];
            }
            out[i * ns + chi] = act.phase[i] * acc;
        }
    }
    Ok(x.with_amplitudes(out))
}

/// `U_A(g) (x) U_B(g)` on a particle-frame two-particle state.
pub fn apply_two(g: &GroupElement, x: &TwoParticleState) -> Result<TwoParticleState> {
    if !matches!(x.frame(), Frame::Particle) {
        return Err(Error::FrameMismatch { expected: "particle".into(), found: x.frame().name().into() });
    }
    let act_a = factor_action(g, x.label_a())?;
    let act_b = factor_action(g, x.label_b())?;
    let [na, sa, nb, sb] = x.dims();
    let old = x.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); old.len()];
    // gather on the momentum axes, then spin matrices on the spin axes
    for ia in 0..na {
        let Some(ja) = act_a.source[ia] else { continue };
        for ib in 0..nb {
            let Some(jb) = act_b.source[ib] else { continue };
            let ph = act_a.phase[ia] * act_b.phase[ib];
            for ca in 0..sa {
                for cb in 0..sb {
                    out[((ia * sa + ca) * nb + ib) * sb + cb] = ph * old[((ja * sa + ca) * nb + jb) * sb + cb];
                }
            }
        }
    }
    let dims = [na, sa, nb, sb];
    let out = spin_rotate(&dims, out, 1, &act_a.spin);
    let out = spin_rotate(&dims, out, 3, &act_b.spin);
    Ok(x.with_amplitudes(out))
}

/// `new_chi = sum_chi' D_{chi' chi} old_chi'` on one axis.
fn spin_rotate(dims: &[usize], data: Vec<C64>, axis: usize, d: &DMatrix<C64>) -> Vec<C64> {
    if d.nrows() == 1 {
        return data;
    }
    tensor::apply_on_axes(dims, &data, &[axis], &d.transpose())
}

/// `U(g)` on a total/relative (sheared-lattice) state: the total momentum
/// shifts by `M v` with the external phase, the relative momentum only picks
/// up `e^{-i b (W_A + W_B + q^2 / (2 mu))}`.
pub fn apply_com(g: &GroupElement, x: &TwoParticleState) -> Result<TwoParticleState> {
    let Frame::Com(lattice) = x.frame() else {
        return Err(Error::FrameMismatch { expected: "com".into(), found: x.frame().name().into() });
    };
    let (la, lb) = (x.label_a(), x.label_b());
    check_commensurate(g, la.mass, &la.grid)?;
    check_commensurate(g, lb.mass, &lb.grid)?;
    let total = x.total_mass();
    let mu = x.reduced_mass();
    let w_int = la.internal_energy + lb.internal_energy;
    let shift = (total * g.v[0] / lattice.p_spacing()).round() as i64;
    let [np, nq, sa, sb] = x.dims();
    let old = x.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); old.len()];
    let const_phase = -0.5 * total * g.a[0] * g.v[0];
    for n in 0..np {
        let src = n as i64 + shift;
        if src < 0 || src >= np as i64 {
            continue;
        }
        let src = src as usize;
        let pp = lattice.p_value(src);
        let ext = const_phase + g.a[0] * pp - g.b * (pp * pp / (2.0 * total));
        for k in 0..nq {
            if lattice.preimage(n, k).is_none() || lattice.preimage(src, k).is_none() {
                continue;
            }
            let q = lattice.q_value(k);
            let ph = C64::from_polar(1.0, ext - g.b * (w_int + q * q / (2.0 * mu)));
            for c in 0..sa * sb {
                out[(n * nq + k) * sa * sb + c] = ph * old[(src * nq + k) * sa * sb + c];
            }
        }
    }
    let dims = [np, nq, sa, sb];
    let out = spin_rotate(&dims, out, 2, &wigner_d(la.spin, &g.r));
    let out = spin_rotate(&dims, out, 3, &wigner_d(lb.spin, &g.r));
    Ok(x.with_amplitudes(out))
}

/// Fitted phase of `U(g2) U(g1) psi = e^{i xi} U(g2 g1) psi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CocycleFit {
    pub xi: f64,
    pub residual: f64,
}

/// Fits `xi` for one probe; errors when the residual exceeds
/// [`REPRESENTATION_TOLERANCE`].
pub fn projective_phase(g2: &GroupElement, g1: &GroupElement, probe: &SingleParticleState) -> Result<CocycleFit> {
    let lhs = apply_single(g2, &apply_single(g1, probe)?)?;
    let rhs = apply_single(&compose(g2, g1), probe)?;
    let ov = tensor::inner(rhs.amplitudes(), lhs.amplitudes());
    let xi = ov.arg();
    let ph = C64::from_polar(1.0, xi);
    let residual =
        lhs.amplitudes().iter().zip(rhs.amplitudes()).map(|(l, r)| (l - ph * r).norm_sqr()).sum::<f64>().sqrt();
    if residual > REPRESENTATION_TOLERANCE {
        return Err(Error::RepresentationLawViolation(residual));
    }
    Ok(CocycleFit { xi, residual })
}

/// Phase fit over several probes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeSweep {
    pub xi: f64,
    pub max_residual: f64,
    /// Variance of the fitted phases, each wrapped to the first one.
    pub variance: f64,
}

pub fn projective_phase_probes(
    g2: &GroupElement,
    g1: &GroupElement,
    probes: &[SingleParticleState],
) -> Result<ProbeSweep> {
    let fits = probes.iter().map(|p| projective_phase(g2, g1, p)).collect::<Result<Vec<_>>>()?;
    let xi0 = fits[0].xi;
    let devs: Vec<f64> = fits.iter().map(|f| wrap_phase(f.xi - xi0)).collect();
    let mean = devs.iter().sum::<f64>() / devs.len() as f64;
    let variance = devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / devs.len() as f64;
    let max_residual = fits.iter().map(|f| f.residual).fold(0.0, f64::max);
    Ok(ProbeSweep { xi: wrap_phase(xi0 + mean), max_residual, variance })
}

/// Wraps to `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    let t = std::f64::consts::TAU;
    let y = x.rem_euclid(t);
    if y > std::f64::consts::PI {
        y - t
    } else {
        y
    }
}

/// Smallest boost that moves every listed mass by whole grid steps.
pub fn boost_quantum(masses: &[f64], spacing: f64) -> Result<f64> {
    let m0 = masses[0];
    let mut unit = m0;
    for &m in &masses[1..] {
        let (r, _) = crate::tps::mass_ratio(m0, m)?;
        unit = unit.min(m0 / r as f64);
    }
    Ok(spacing / unit)
}

/// Random group element that acts exactly on grids of the given spacing:
/// boosts of up to `max_steps` quanta, translations in `[-a_max, a_max]`,
/// times in `[-b_max, b_max]`, and (in 3D) a random lattice rotation.
pub fn random_commensurate<R: Rng>(
    rng: &mut R,
    dim: usize,
    quantum: f64,
    max_steps: i32,
    a_max: f64,
    b_max: f64,
) -> GroupElement {
    let mut g = GroupElement { b: rng.random_range(-b_max..=b_max), ..GroupElement::default() };
    for ax in 0..dim {
        g.a[ax] = rng.random_range(-a_max..=a_max);
        g.v[ax] = rng.random_range(-max_steps..=max_steps) as f64 * quantum;
    }
    if dim == 3 {
        let group = Rotation::octahedral();
        g.r = group[rng.random_range(0..group.len())];
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::Spin;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn label(n: usize, spin: Spin, mass: f64) -> ParticleLabel {
        ParticleLabel::new(mass, 0.0, spin, MomentumGrid::centered(1, n, 0.5).unwrap()).unwrap()
    }

    fn sample() -> GroupElement {
        GroupElement {
            b: 0.7,
            a: Vector3::new(0.3, -1.2, 2.0),
            v: Vector3::new(1.0, 0.5, -0.25),
            r: Rotation::euler_zyz(0.4, 1.0, -2.0),
        }
    }

    #[test]
    fn group_law_basics() {
        let g = sample();
        assert!(compose(&GroupElement::identity(), &g).approx_eq(&g, 1e-15));
        assert!(compose(&g, &GroupElement::identity()).approx_eq(&g, 1e-15));
        assert!(compose(&g, &inverse(&g)).approx_eq(&GroupElement::identity(), 1e-12));
        assert!(compose(&inverse(&g), &g).approx_eq(&GroupElement::identity(), 1e-12));
        let t = compose(
            &GroupElement::translation(Vector3::new(1.0, 2.0, 0.0)),
            &GroupElement::translation(Vector3::new(0.5, 0.0, -1.0)),
        );
        assert!(t.approx_eq(&GroupElement::translation(Vector3::new(1.5, 2.0, -1.0)), 1e-15));
        let (a, v) =
            (GroupElement::translation(Vector3::new(1.0, 0.0, 0.0)), GroupElement::boost(Vector3::new(0.0, 2.0, 0.0)));
        assert!(compose(&a, &v).approx_eq(&compose(&v, &a), 1e-15));
    }

    #[test]
    fn associativity() {
        let g1 = sample();
        let g2 = GroupElement {
            b: -0.3,
            a: Vector3::new(1.0, 0.0, 0.5),
            v: Vector3::new(0.0, 1.5, 0.2),
            r: Rotation::euler_zyz(1.1, 0.3, 0.9),
        };
        let g3 = GroupElement {
            b: 1.9,
            a: Vector3::new(-0.4, 0.2, 0.0),
            v: Vector3::new(0.7, 0.0, -1.0),
            r: Rotation::euler_zyz(-0.5, 2.0, 0.1),
        };
        let left = compose(&compose(&g3, &g2), &g1);
        let right = compose(&g3, &compose(&g2, &g1));
        assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn identity_is_bit_exact() {
        let s = SingleParticleState::from_fn(label(9, Spin::HALF, 1.0), |p, c| C64::new(p[0], c as f64 + 0.5));
        assert_eq!(apply_single(&GroupElement::identity(), &s).unwrap(), s);
    }

    #[test]
    fn one_step_boost_shifts_without_phase() {
        let s = SingleParticleState::from_fn(label(9, Spin::ZERO, 2.0), |p, _| C64::new(p[0].cos(), p[0]));
        // m v = 0.5 = one grid step
        let out = apply_single(&GroupElement::boost(Vector3::new(0.25, 0.0, 0.0)), &s).unwrap();
        for i in 0..8 {
            assert_eq!(out.amplitudes()[i], s.amplitudes()[i + 1]);
        }
        assert_eq!(out.amplitudes()[8], C64::new(0.0, 0.0));
    }

    #[test]
    fn spin_half_rotation_about_z() {
        let l = ParticleLabel::new(1.0, 0.0, Spin::HALF, MomentumGrid::centered(3, 3, 1.0).unwrap()).unwrap();
        let s = SingleParticleState::from_fn(l, |_, c| C64::new(1.0 + c as f64, 0.0));
        let rz = Rotation::about_z(FRAC_PI_2);
        let out = apply_single(&GroupElement::rotation(rz), &s).unwrap();
        // the origin is fixed by R
        let origin = s.grid().locate(&[0.0, 0.0, 0.0]).unwrap();
        assert!((out.amplitude(origin, 0) - C64::from_polar(1.0, -FRAC_PI_4)).norm() < 1e-15);
        assert!((out.amplitude(origin, 1) - C64::from_polar(2.0, FRAC_PI_4)).norm() < 1e-15);
    }

    #[test]
    fn incommensurate_elements_rejected() {
        let s = SingleParticleState::from_fn(label(9, Spin::ZERO, 1.0), |_, _| C64::new(1.0, 0.0));
        let err = apply_single(&GroupElement::boost(Vector3::new(0.3, 0.0, 0.0)), &s);
        assert!(matches!(err, Err(Error::Commensurability(_))));
        let l3 = ParticleLabel::new(1.0, 0.0, Spin::ZERO, MomentumGrid::centered(3, 3, 1.0).unwrap()).unwrap();
        let s3 = SingleParticleState::from_fn(l3, |_, _| C64::new(1.0, 0.0));
        let err = apply_single(&GroupElement::rotation(Rotation::about_z(0.3)), &s3);
        assert!(matches!(err, Err(Error::Commensurability(_))));
    }

    #[test]
    fn translation_boost_reorder_phase() {
        let m = 2.0;
        let s =
            SingleParticleState::from_fn(label(41, Spin::ZERO, m), |p, _| C64::new((-(p[0] * p[0])).exp(), 0.3 * p[0]));
        let a = GroupElement::translation(Vector3::new(0.8, 0.0, 0.0));
        let v = GroupElement::boost(Vector3::new(0.5, 0.0, 0.0));
        let av = apply_single(&a, &apply_single(&v, &s).unwrap()).unwrap();
        let va = apply_single(&v, &apply_single(&a, &s).unwrap()).unwrap();
        let expected = C64::from_polar(1.0, m * 0.8 * 0.5);
        for (x, y) in va.amplitudes().iter().zip(av.amplitudes()) {
            assert!((x - expected * y).norm() < 1e-14);
        }
        let fit = projective_phase(&a, &GroupElement::translation(Vector3::new(-0.2, 0.0, 0.0)), &s).unwrap();
        assert!(fit.xi.abs() < 1e-12);
    }
}
