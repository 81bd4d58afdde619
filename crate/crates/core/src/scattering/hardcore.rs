use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianPacket;
use crate::hilbert::{Frame, MomentumGrid, ParticleLabel, State, TwoParticleState};
use crate::spin::Spin;

/// Impenetrable core of radius `a` for two particles on a line. The
/// relative wavefunction is reflected, `psi(P, q) -> -e^{2 i delta(|q|)}
/// psi(P, -q)` with `delta(k) = -k a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneDHardCore {
    pub radius: f64,
}

impl OneDHardCore {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("core radius {radius} must be non-negative")));
        }
        Ok(Self { radius })
    }

    pub fn phase_shift(&self, k: f64) -> f64 {
        -k.abs() * self.radius
    }

    /// Reflection amplitude `-e^{2 i delta(|q|)}`.
    pub fn reflection(&self, q: f64) -> C64 {
        -C64::from_polar(1.0, 2.0 * self.phase_shift(q))
    }
}

/// Exact reflection on the sheared total/relative lattice. Every site with
/// a nonzero amplitude must have its mirror `q -> -q` on the lattice, which
/// holds for equal masses on a common grid.
pub fn apply_1d_hardcore(x: &TwoParticleState, core: &OneDHardCore) -> Result<TwoParticleState> {
    let Frame::Com(lattice) = x.frame() else {
        return Err(Error::FrameMismatch { expected: "com".into(), found: x.frame().name().into() });
    };
    let [np, nq, sa, sb] = x.dims();
    let ds = sa * sb;
    let span = -2.0 * lattice.q_value(0) / lattice.q_spacing();
    let rounded = span.round();
    let mirror_sum = if (span - rounded).abs() < 1e-9 { Some(rounded as i64) } else { None };
    let mirror = |k: usize| -> Option<usize> {
        let m = mirror_sum? - k as i64;
        (0..nq as i64).contains(&m).then_some(m as usize)
    };
    let old = x.amplitudes();
    let mut out = vec![C64::new(0.0, 0.0); old.len()];
    for n in 0..np {
        for k in 0..nq {
            let base = (n * nq + k) * ds;
            let block = &old[base..base + ds];
            if block.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            let target = mirror(k).filter(|&m| lattice.preimage(n, m).is_some()).ok_or(Error::LatticeSymmetry)?;
            let f = core.reflection(lattice.q_value(k));
            let dst = (n * nq + target) * ds;
            for c in 0..ds {
                out[dst + c] = f * block[c];
            }
        }
    }
    Ok(x.with_amplitudes(out))
}

/// Samples the reflected out-state of an analytic in-state directly in the
/// particle frame: `psi_out(p_A, p_B) = -e^{2 i delta(|q|)} psi_in(p_A - 2q,
/// p_B + 2q)` with `q = (m_B p_A - m_A p_B) / M`. Works for any mass ratio.
pub fn reflect_sampled(
    a: &ParticleLabel,
    b: &ParticleLabel,
    core: &OneDHardCore,
    psi_in: impl Fn(f64, usize, f64, usize) -> C64,
) -> Result<TwoParticleState> {
    let total = a.mass + b.mass;
    let (ma, mb) = (a.mass, b.mass);
    TwoParticleState::from_fn(a.clone(), b.clone(), |pa, ca, pb, cb| {
        let q = (mb * pa - ma * pb) / total;
        core.reflection(q) * psi_in(pa - 2.0 * q, ca, pb + 2.0 * q, cb)
    })
}

/// Hard-core out-state of two 1D Gaussian packets.
pub fn hardcore_gaussian_out(
    a: &GaussianPacket,
    b: &GaussianPacket,
    grid_a: &MomentumGrid,
    grid_b: &MomentumGrid,
    core: &OneDHardCore,
) -> Result<TwoParticleState> {
    a.validate()?;
    b.validate()?;
    let la = ParticleLabel::new(a.mass, a.internal_energy, Spin::ZERO, grid_a.clone())?;
    let lb = ParticleLabel::new(b.mass, b.internal_energy, Spin::ZERO, grid_b.clone())?;
    reflect_sampled(&la, &lb, core, |pa, _, pb, _| {
        C64::new(a.amplitude(&[pa, 0.0, 0.0], 1) * b.amplitude(&[pb, 0.0, 0.0], 1), 0.0)
    })
}
