//! Partial-wave representation of a two-particle state: the relative
//! momentum is expanded in spherical harmonics on a radial grid and the
//! spins are optionally coupled to total angular momentum `j`.
//!
//! Amplitudes are laid out `[external P][radial shell][channel]` with all
//! quadrature weights folded in, so the array norm is the state norm and the
//! `P|int` bipartition is a plain reshape.

mod clebsch;
mod harmonics;
mod quadrature;

use std::io::Write;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::galilei::{check_commensurate, wigner_d, GroupElement, Rotation};
use crate::hilbert::{MomentumGrid, Vec3};
use crate::spin::Spin;
use crate::tensor;
use crate::tps::{Bipartite, Factor, FrameKind};

pub use clebsch::{cg_twice, clebsch_gordan, degeneracy, j_min};
pub use harmonics::{legendre, spherical_harmonics};
pub use quadrature::{gauss_legendre, AngularQuadrature};

pub const DEFAULT_LMAX: u32 = 8;

/// Relative-momentum shells `|q|_i = i * q_max / n_r`, `i = 1..=n_r`, with
/// the `q^2 dq` measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    n_r: usize,
    q_max: f64,
}

impl RadialGrid {
    pub fn new(n_r: usize, q_max: f64) -> Result<Self> {
        if n_r == 0 || !(q_max > 0.0) || !q_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radial grid needs n_r > 0 and q_max > 0 (got {n_r}, {q_max})"
            )));
        }
        Ok(Self { n_r, q_max })
    }

    pub fn len(&self) -> usize {
        self.n_r
    }

    pub fn is_empty(&self) -> bool {
        self.n_r == 0
    }

    pub fn spacing(&self) -> f64 {
        self.q_max / self.n_r as f64
    }

    pub fn q(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.spacing()
    }

    pub fn weight(&self, i: usize) -> f64 {
        let q = self.q(i);
        q * q * self.spacing()
    }
}

/// Masses, internal energies and spins of the two particles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairLabel {
    pub m_a: f64,
    pub m_b: f64,
    #[serde(default)]
    pub w_a: f64,
    #[serde(default)]
    pub w_b: f64,
    #[serde(default)]
    pub s_a: Spin,
    #[serde(default)]
    pub s_b: Spin,
}

impl PairLabel {
    pub fn spinless(m_a: f64, m_b: f64) -> Result<Self> {
        Self { m_a, m_b, w_a: 0.0, w_b: 0.0, s_a: Spin::ZERO, s_b: Spin::ZERO }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.m_a > 0.0 && self.m_b > 0.0) || !self.m_a.is_finite() || !self.m_b.is_finite() {
            return Err(Error::InvalidParameter("masses must be positive".into()));
        }
        Ok(self)
    }

    pub fn total_mass(&self) -> f64 {
        self.m_a + self.m_b
    }

    pub fn reduced_mass(&self) -> f64 {
        self.m_a * self.m_b / (self.m_a + self.m_b)
    }

    /// `W = W_A + W_B + q^2 / (2 mu)`.
    pub fn energy(&self, q: f64) -> f64 {
        self.w_a + self.w_b + q * q / (2.0 * self.reduced_mass())
    }

    /// Single-particle momenta of the pair `(P, q)`.
    pub fn particle_momenta(&self, p: &Vec3, q: &Vec3) -> (Vec3, Vec3) {
        let (fa, fb) = (self.m_a / self.total_mass(), self.m_b / self.total_mass());
        let pa = [fa * p[0] + q[0], fa * p[1] + q[1], fa * p[2] + q[2]];
        let pb = [fb * p[0] - q[0], fb * p[1] - q[1], fb * p[2] - q[2]];
        (pa, pb)
    }

    fn spin_dims(&self) -> usize {
        self.s_a.dim() * self.s_b.dim()
    }
}

/// Channel label. Projections and half-integer momenta are doubled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Channel {
    Uncoupled { l: u32, m: i32, twice_ma: i32, twice_mb: i32 },
    Coupled { twice_j: u32, twice_mj: i32, l: u32, twice_s: u32 },
}

impl Channel {
    pub fn l(&self) -> u32 {
        match *self {
            Channel::Uncoupled { l, .. } | Channel::Coupled { l, .. } => l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Uncoupled,
    Coupled,
}

/// All channels with `l <= l_max`. Within each `l` block the uncoupled
/// order is `m` descending, then `m_A`, `m_B` descending; the coupled
/// order is `s`, then `j` ascending, then `m_j` descending. Both blocks
/// have `(2l + 1)(2 s_A + 1)(2 s_B + 1)` entries.
pub fn channel_set(basis: Basis, l_max: u32, s_a: Spin, s_b: Spin) -> Vec<Channel> {
    let mut out = Vec::new();
    for l in 0..=l_max {
        match basis {
            Basis::Uncoupled => {
                for m in (-(l as i32)..=l as i32).rev() {
                    for twice_ma in s_a.twice_projections() {
                        for twice_mb in s_b.twice_projections() {
                            out.push(Channel::Uncoupled { l, m, twice_ma, twice_mb });
                        }
                    }
                }
            }
            Basis::Coupled => {
                let (ta, tb) = (s_a.twice() as i32, s_b.twice() as i32);
                for twice_s in ((ta - tb).abs()..=ta + tb).step_by(2) {
                    let lo = (2 * l as i32 - twice_s).abs();
                    for twice_j in (lo..=2 * l as i32 + twice_s).step_by(2) {
                        for twice_mj in Spin::from_twice(twice_j as u32).twice_projections() {
                            out.push(Channel::Coupled {
                                twice_j: twice_j as u32,
                                twice_mj,
                                l,
                                twice_s: twice_s as u32,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn block_len(l: u32, pair: &PairLabel) -> usize {
    (2 * l as usize + 1) * pair.spin_dims()
}

fn block_start(l: u32, pair: &PairLabel) -> usize {
    (l as usize * l as usize) * pair.spin_dims()
}

/// Two-particle state sampled on quadrature nodes: external `P` on a grid,
/// relative `q` on radial shells times angular nodes. Layout
/// `[P][shell][node][m_A][m_B]`, weights folded in.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPair {
    pair: PairLabel,
    external: MomentumGrid,
    radial: RadialGrid,
    quad: AngularQuadrature,
    amplitudes: Vec<C64>,
}

impl SampledPair {
    /// Samples `psi(P, q, index of m_A, index of m_B)`.
    pub fn from_fn(
        pair: PairLabel,
        external: MomentumGrid,
        radial: RadialGrid,
        quad: AngularQuadrature,
        mut psi: impl FnMut(&Vec3, &Vec3, usize, usize) -> C64,
    ) -> Result<Self> {
        let pair = pair.validated()?;
        let (da, db) = (pair.s_a.dim(), pair.s_b.dim());
        let ext_w = external.cell_volume().sqrt();
        let mut amplitudes = Vec::with_capacity(external.len() * radial.len() * quad.len() * da * db);
        for e in 0..external.len() {
            let p = external.momentum(e);
            for r in 0..radial.len() {
                let q = radial.q(r);
                let rw = radial.weight(r).sqrt();
                for node in 0..quad.len() {
                    let d = quad.direction(node);
                    let qv = [q * d[0], q * d[1], q * d[2]];
                    let w = ext_w * rw * quad.weights()[node].sqrt();
                    for ia in 0..da {
                        for ib in 0..db {
                            amplitudes.push(psi(&p, &qv, ia, ib) * w);
                        }
                    }
                }
            }
        }
        Ok(Self { pair, external, radial, quad, amplitudes })
    }

    pub fn pair(&self) -> &PairLabel {
        &self.pair
    }

    pub fn external(&self) -> &MomentumGrid {
        &self.external
    }

    pub fn radial(&self) -> &RadialGrid {
        &self.radial
    }

    pub fn quadrature(&self) -> &AngularQuadrature {
        &self.quad
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        tensor::norm_sqr(&self.amplitudes).sqrt()
    }
}

/// Two-particle state in the partial-wave representation.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialWaveState {
    pair: PairLabel,
    external: MomentumGrid,
    radial: RadialGrid,
    l_max: u32,
    basis: Basis,
    channels: Vec<Channel>,
    amplitudes: Vec<C64>,
    leakage: f64,
}

impl PartialWaveState {
    pub fn from_amplitudes(
        pair: PairLabel,
        external: MomentumGrid,
        radial: RadialGrid,
        l_max: u32,
        basis: Basis,
        amplitudes: Vec<C64>,
    ) -> Result<Self> {
        let pair = pair.validated()?;
        let channels = channel_set(basis, l_max, pair.s_a, pair.s_b);
        let expected = external.len() * radial.len() * channels.len();
        if amplitudes.len() != expected {
            return Err(Error::IncompatibleSpaces(format!("expected {expected} amplitudes, got {}", amplitudes.len())));
        }
        Ok(Self { pair, external, radial, l_max, basis, channels, amplitudes, leakage: 0.0 })
    }

    pub fn pair(&self) -> &PairLabel {
        &self.pair
    }

    pub fn external(&self) -> &MomentumGrid {
        &self.external
    }

    pub fn radial(&self) -> &RadialGrid {
        &self.radial
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Fraction of the sampled norm squared above `l_max` at expansion time.
    pub fn band_leakage(&self) -> f64 {
        self.leakage
    }

    pub fn norm(&self) -> f64 {
        tensor::norm_sqr(&self.amplitudes).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::CannotNormalize);
        }
        Ok(self.with_amplitudes(self.amplitudes.iter().map(|z| z / n).collect()))
    }

    pub fn with_amplitudes(&self, amplitudes: Vec<C64>) -> Self {
        assert_eq!(amplitudes.len(), self.amplitudes.len());
        Self { amplitudes, ..self.clone() }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.external.len(), self.radial.len(), self.channels.len()]
    }

    pub fn amplitude(&self, ext: usize, shell: usize, channel: usize) -> C64 {
        let [_, nr, nc] = self.dims();
        self.amplitudes[(ext * nr + shell) * nc + channel]
    }

    /// Applies `f(shell, l block start, block of internal amplitudes)` to
    /// every `l` block of every `(P, shell)` row.
    fn map_blocks(&self, mut f: impl FnMut(usize, u32, &mut [C64])) -> Vec<C64> {
        let [ne, nr, nc] = self.dims();
        let mut out = self.amplitudes.clone();
        for e in 0..ne {
            for r in 0..nr {
                let row = &mut out[(e * nr + r) * nc..(e * nr + r + 1) * nc];
                for l in 0..=self.l_max {
                    let s = block_start(l, &self.pair);
                    f(r, l, &mut row[s..s + block_len(l, &self.pair)]);
                }
            }
        }
        out
    }
}

/// Projects the sampled relative wavefunction onto `Y_l^m`, `l <= l_max`,
/// in the uncoupled basis.
pub fn spherical_expand(x: &SampledPair, l_max: i64) -> Result<PartialWaveState> {
    let l_max = check_lmax(l_max)?;
    x.quad.check_lmax(l_max)?;
    let pair = x.pair;
    let ds = pair.spin_dims();
    let nq = x.quad.len();
    let ylm = harmonics_table(&x.quad, l_max);
    let nlm = ((l_max + 1) * (l_max + 1)) as usize;
    let rows = x.external.len() * x.radial.len();
    let mut out = vec![C64::new(0.0, 0.0); rows * nlm * ds];
    for row in 0..rows {
        let src = &x.amplitudes[row * nq * ds..(row + 1) * nq * ds];
        let dst = &mut out[row * nlm * ds..(row + 1) * nlm * ds];
        for node in 0..nq {
            let sw = x.quad.weights()[node].sqrt();
            for lm in 0..nlm {
                let y = ylm[node * nlm + lm].conj() * sw;
                for c in 0..ds {
                    dst[lm * ds + c] += y * src[node * ds + c];
                }
            }
        }
    }
    let mut state =
        PartialWaveState::from_amplitudes(pair, x.external.clone(), x.radial.clone(), l_max, Basis::Uncoupled, out)?;
    let before = tensor::norm_sqr(&x.amplitudes);
    state.leakage = if before > 0.0 { (1.0 - tensor::norm_sqr(&state.amplitudes) / before).max(0.0) } else { 0.0 };
    Ok(state)
}

/// Evaluates an uncoupled partial-wave state back on the nodes of `quad`.
pub fn spherical_contract(x: &PartialWaveState, quad: &AngularQuadrature) -> Result<SampledPair> {
    if x.basis != Basis::Uncoupled {
        return Err(Error::InvalidParameter("contract needs the uncoupled basis; decouple first".into()));
    }
    quad.check_lmax(x.l_max)?;
    let ds = x.pair.spin_dims();
    let nq = quad.len();
    let ylm = harmonics_table(quad, x.l_max);
    let nlm = ((x.l_max + 1) * (x.l_max + 1)) as usize;
    let rows = x.external.len() * x.radial.len();
    let mut out = vec![C64::new(0.0, 0.0); rows * nq * ds];
    for row in 0..rows {
        let src = &x.amplitudes[row * nlm * ds..(row + 1) * nlm * ds];
        let dst = &mut out[row * nq * ds..(row + 1) * nq * ds];
        for node in 0..nq {
            let sw = quad.weights()[node].sqrt();
            for lm in 0..nlm {
                let y = ylm[node * nlm + lm] * sw;
                for c in 0..ds {
                    dst[node * ds + c] += y * src[lm * ds + c];
                }
            }
        }
    }
    Ok(SampledPair {
        pair: x.pair,
        external: x.external.clone(),
        radial: x.radial.clone(),
        quad: quad.clone(),
        amplitudes: out,
    })
}

fn check_lmax(l_max: i64) -> Result<u32> {
    if !(0..=64).contains(&l_max) {
        return Err(Error::InvalidParameter(format!("l_max = {l_max} outside 0..=64")));
    }
    Ok(l_max as u32)
}

fn harmonics_table(quad: &AngularQuadrature, l_max: u32) -> Vec<C64> {
    (0..quad.len())
        .flat_map(|i| {
            let (c, p) = quad.node(i);
            spherical_harmonics(l_max, c, p)
        })
        .collect()
}

/// Unitary from the uncoupled to the coupled basis within one `l` block;
/// rows follow the coupled order, columns the uncoupled order.
fn coupling_block(l: u32, pair: &PairLabel) -> DMatrix<C64> {
    let unc: Vec<Channel> = channel_set(Basis::Uncoupled, l, pair.s_a, pair.s_b).split_off(block_start(l, pair));
    let cpl: Vec<Channel> = channel_set(Basis::Coupled, l, pair.s_a, pair.s_b).split_off(block_start(l, pair));
    let (ta, tb) = (pair.s_a.twice() as i32, pair.s_b.twice() as i32);
    DMatrix::from_fn(cpl.len(), unc.len(), |i, k| {
        let Channel::Coupled { twice_j, twice_mj, twice_s, .. } = cpl[i] else { unreachable!() };
        let Channel::Uncoupled { m, twice_ma, twice_mb, .. } = unc[k] else { unreachable!() };
        let twice_ms = twice_ma + twice_mb;
        let c = cg_twice(ta, twice_ma, tb, twice_mb, twice_s as i32, twice_ms)
            * cg_twice(2 * l as i32, 2 * m, twice_s as i32, twice_ms, twice_j as i32, twice_mj);
        C64::new(c, 0.0)
    })
}

fn check_coupling_spins(pair: &PairLabel) -> Result<()> {
    if pair.s_a.twice() > 1 || pair.s_b.twice() > 1 {
        return Err(Error::InvalidParameter(format!(
            "channel coupling supports spins 0 and 1/2 (got {}, {})",
            pair.s_a, pair.s_b
        )));
    }
    Ok(())
}

/// Uncoupled `(l, m, m_A, m_B)` to coupled `(j, m_j, l, s)` channels.
pub fn couple_channels(x: &PartialWaveState) -> Result<PartialWaveState> {
    check_coupling_spins(&x.pair)?;
    if x.basis == Basis::Coupled {
        return Err(Error::InvalidParameter("state is already in the coupled basis".into()));
    }
    change_basis(x, Basis::Coupled, false)
}

/// Inverse of [`couple_channels`].
pub fn decouple_channels(x: &PartialWaveState) -> Result<PartialWaveState> {
    check_coupling_spins(&x.pair)?;
    if x.basis == Basis::Uncoupled {
        return Err(Error::InvalidParameter("state is already in the uncoupled basis".into()));
    }
    change_basis(x, Basis::Uncoupled, true)
}

fn change_basis(x: &PartialWaveState, target: Basis, adjoint: bool) -> Result<PartialWaveState> {
    let blocks: Vec<DMatrix<C64>> = (0..=x.l_max)
        .map(|l| {
            let u = coupling_block(l, &x.pair);
            if adjoint {
                u.adjoint()
            } else {
                u
            }
        })
        .collect();
    let data = x.map_blocks(|_, l, block| apply_matrix(&blocks[l as usize], block));
    let mut out =
        PartialWaveState::from_amplitudes(x.pair, x.external.clone(), x.radial.clone(), x.l_max, target, data)?;
    out.leakage = x.leakage;
    Ok(out)
}

fn apply_matrix(u: &DMatrix<C64>, v: &mut [C64]) {
    let old = v.to_vec();
    for (i, slot) in v.iter_mut().enumerate() {
        *slot = (0..old.len()).map(|k| u[(i, k)] * old[k]).sum();
    }
}

/// Rotation of the internal factor: `D^l(R^-1) (x) D^{s_A}(R^-1) (x)
/// D^{s_B}(R^-1)` on uncoupled channels, `D^j(R^-1)` on coupled ones. This
/// is the action `psi(q) -> psi(R q)` of a rotation on the relative
/// wavefunction, with spins transforming in the same convention.
pub fn rotation_block(l: u32, pair: &PairLabel, basis: Basis, r: &Rotation) -> DMatrix<C64> {
    let inv = r.inverse();
    match basis {
        Basis::Uncoupled => {
            let dl = wigner_d(Spin::from_twice(2 * l), &inv);
            let da = wigner_d(pair.s_a, &inv);
            let db = wigner_d(pair.s_b, &inv);
            dl.kronecker(&da).kronecker(&db)
        }
        Basis::Coupled => {
            let cpl = channel_set(Basis::Coupled, l, pair.s_a, pair.s_b).split_off(block_start(l, pair));
            let mut u = DMatrix::zeros(cpl.len(), cpl.len());
            let mut start = 0;
            while start < cpl.len() {
                let Channel::Coupled { twice_j, .. } = cpl[start] else { unreachable!() };
                let d = wigner_d(Spin::from_twice(twice_j), &inv);
                u.view_mut((start, start), (d.nrows(), d.ncols())).copy_from(&d);
                start += d.nrows();
            }
            u
        }
    }
}

/// Applies an arbitrary rotation to the internal factor only.
pub fn rotate_internal(x: &PartialWaveState, r: &Rotation) -> PartialWaveState {
    let blocks: Vec<DMatrix<C64>> = (0..=x.l_max).map(|l| rotation_block(l, &x.pair, x.basis, r)).collect();
    x.with_amplitudes(x.map_blocks(|_, l, block| apply_matrix(&blocks[l as usize], block)))
}

/// `U(g) = U_P (x) U_int` in channel mode. The external grid moves as in
/// grid mode (`P' = R P + M v`, same commensurability rules); the internal
/// factor picks up `e^{-i b W}` per shell and the rotation of
/// [`rotate_internal`].
pub fn apply_galilei(g: &GroupElement, x: &PartialWaveState) -> Result<PartialWaveState> {
    let total = x.pair.total_mass();
    check_commensurate(g, total, &x.external)?;
    let [ne, nr, nc] = x.dims();
    let const_phase = -0.5 * total * g.a.dot(&g.v);
    let shell_phase: Vec<C64> = (0..nr).map(|r| C64::from_polar(1.0, -g.b * x.pair.energy(x.radial.q(r)))).collect();
    let mut out = vec![C64::new(0.0, 0.0); x.amplitudes.len()];
    for e in 0..ne {
        let p = x.external.momentum(e);
        let pp = g.r.apply(&Vector3::new(p[0], p[1], p[2])) + total * g.v;
        let Some(src) = x.external.locate(&[pp[0], pp[1], pp[2]]) else { continue };
        let ph = C64::from_polar(1.0, const_phase + g.a.dot(&pp) - g.b * pp.norm_squared() / (2.0 * total));
        for r in 0..nr {
            let f = ph * shell_phase[r];
            for c in 0..nc {
                out[(e * nr + r) * nc + c] = f * x.amplitudes[(src * nr + r) * nc + c];
            }
        }
    }
    Ok(rotate_internal(&x.with_amplitudes(out), &g.r))
}

impl Bipartite for PartialWaveState {
    fn frame_kind(&self) -> FrameKind {
        FrameKind::PartialWave
    }

    fn factors(&self) -> Vec<(Factor, usize)> {
        let [ne, nr, nc] = self.dims();
        vec![(Factor::External, ne), (Factor::Radial, nr), (Factor::Channel, nc)]
    }

    fn data(&self) -> &[C64] {
        &self.amplitudes
    }

    fn with_data(&self, data: Vec<C64>) -> Self {
        self.with_amplitudes(data)
    }

    fn factor_grid(&self, f: Factor) -> Option<&MomentumGrid> {
        (f == Factor::External).then_some(&self.external)
    }
}

/// Writes the internal amplitudes at external index `ext` as CSV.
pub fn write_channels_csv<W: Write>(x: &PartialWaveState, ext: usize, out: W) -> Result<()> {
    if ext >= x.external.len() {
        return Err(Error::InvalidParameter(format!("external index {ext} out of range")));
    }
    let mut w = csv::Writer::from_writer(out);
    let spins = x.pair.spin_dims() > 1;
    let mut header = vec!["r_index", "|q|", "W"];
    match (x.basis, spins) {
        (Basis::Uncoupled, false) => header.extend(["l", "m"]),
        (Basis::Uncoupled, true) => header.extend(["l", "m", "m_a", "m_b"]),
        (Basis::Coupled, _) => header.extend(["j", "m_j", "l", "s"]),
    }
    header.extend(["re", "im"]);
    w.write_record(&header)?;
    let half = |t: i32| format!("{}", t as f64 / 2.0);
    for r in 0..x.radial.len() {
        let q = x.radial.q(r);
        for (c, ch) in x.channels.iter().enumerate() {
            let z = x.amplitude(ext, r, c);
            let mut rec = vec![r.to_string(), format!("{q:.12e}"), format!("{:.12e}", x.pair.energy(q))];
            match *ch {
                Channel::Uncoupled { l, m, twice_ma, twice_mb } => {
                    rec.extend([l.to_string(), m.to_string()]);
                    if spins {
                        rec.extend([half(twice_ma), half(twice_mb)]);
                    }
                }
                Channel::Coupled { twice_j, twice_mj, l, twice_s } => {
                    rec.extend([half(twice_j as i32), half(twice_mj), l.to_string(), half(twice_s as i32)]);
                }
            }
            rec.extend([format!("{:.12e}", z.re), format!("{:.12e}", z.im)]);
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests;
