//! Discretized momentum-space Hilbert spaces and state containers.
//!
//! Amplitudes are stored with the quadrature weight folded in,
//! `amplitude = psi(p) * sqrt(dp^dim)`, so the plain l2 norm of the array is
//! the continuum norm and bipartite reshapes feed straight into an SVD.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianPacket;
use crate::spin::Spin;
use crate::tensor;
use crate::tps::ShearedLattice;

/// Probability outside the grid above which a sampled state is flagged.
pub const COVERAGE_TOLERANCE: f64 = 1e-10;

pub type Vec3 = [f64; 3];

/// Uniform Cartesian grid of momenta in 1 or 3 dimensions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    dim: usize,
    n_per_axis: usize,
    spacing: f64,
    origin: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(dim: usize, n_per_axis: usize, spacing: f64, origin: &[f64]) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::InvalidParameter(format!("grid dimension {dim} not in {{1, 3}}")));
        }
        if n_per_axis < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points per axis".into()));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidParameter(format!("grid spacing {spacing} must be positive")));
        }
        if origin.len() != dim || origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidParameter("grid origin must have one finite entry per axis".into()));
        }
        Ok(Self { dim, n_per_axis, spacing, origin: origin.to_vec() })
    }

    /// Grid symmetric about zero momentum on every axis.
    pub fn centered(dim: usize, n_per_axis: usize, spacing: f64) -> Result<Self> {
        let o = -0.5 * (n_per_axis as f64 - 1.0) * spacing;
        Self::new(dim, n_per_axis, spacing, &vec![o; dim])
    }

    /// 1D grid of `n` points with the given spacing, centered on `center`.
    pub fn around(center: f64, n: usize, spacing: f64) -> Result<Self> {
        Self::new(1, n, spacing, &[center - 0.5 * (n as f64 - 1.0) * spacing])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.n_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `dp^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.powi(self.dim as i32)
    }

    pub fn axis_value(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.spacing
    }

    pub fn axis_indices(&self, idx: usize) -> [usize; 3] {
        let n = self.n_per_axis;
        match self.dim {
            1 => [idx, 0, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    pub fn flat_index(&self, ix: [usize; 3]) -> usize {
        let n = self.n_per_axis;
        match self.dim {
            1 => ix[0],
            _ => (ix[0] * n + ix[1]) * n + ix[2],
        }
    }

    /// Momentum of a flat grid index (unused axes are zero).
    pub fn momentum(&self, idx: usize) -> Vec3 {
        let ix = self.axis_indices(idx);
        let mut p = [0.0; 3];
        for (a, pa) in p.iter_mut().enumerate().take(self.dim) {
            *pa = self.axis_value(a, ix[a]);
        }
        p
    }

    /// Flat index of a momentum that must coincide with a grid point.
    /// `None` if it falls outside the grid or between points.
    pub fn locate(&self, p: &Vec3) -> Option<usize> {
        let mut ix = [0usize; 3];
        for a in 0..self.dim {
            let t = (p[a] - self.origin[a]) / self.spacing;
            let r = t.round();
            if (t - r).abs() > 1e-7 || r < 0.0 || r >= self.n_per_axis as f64 {
                return None;
            }
            ix[a] = r as usize;
        }
        Some(self.flat_index(ix))
    }

    /// True when the grid maps onto itself under `p -> -p` on every axis.
    pub fn is_centered(&self) -> bool {
        let half = 0.5 * (self.n_per_axis as f64 - 1.0) * self.spacing;
        self.origin.iter().all(|o| (o + half).abs() <= 1e-9 * self.spacing.max(half))
    }

    /// Lowest and highest momentum on `axis`.
    pub fn axis_range(&self, axis: usize) -> (f64, f64) {
        (self.origin[axis], self.axis_value(axis, self.n_per_axis - 1))
    }
}

/// Invariant labels `(m, W, s)` of a single-particle representation plus
/// the grid its momentum amplitudes live on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleLabel {
    pub mass: f64,
    #[serde(default)]
    pub internal_energy: f64,
    pub spin: Spin,
    pub grid: MomentumGrid,
}

impl ParticleLabel {
    pub fn new(mass: f64, internal_energy: f64, spin: Spin, grid: MomentumGrid) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass {mass} must be positive")));
        }
        if spin.twice() > crate::spin::MAX_PARTICLE_SPIN_TWICE {
            return Err(Error::InvalidParameter(format!("spin {spin} exceeds cap of 2")));
        }
        Ok(Self { mass, internal_energy, spin, grid })
    }

    /// Number of amplitudes: grid points times `2s + 1`.
    pub fn size(&self) -> usize {
        self.grid.len() * self.spin.dim()
    }
}

/// Common surface of all state containers.
pub trait State: Clone {
    fn amplitudes(&self) -> &[C64];
    fn amplitudes_mut(&mut self) -> &mut [C64];
    /// Ok when `other` lives on the same space as `self`.
    fn check_compatible(&self, other: &Self) -> Result<()>;

    fn norm(&self) -> f64 {
        tensor::norm_sqr(self.amplitudes()).sqrt()
    }
}

/// Conjugate-linear in `x`.
pub fn inner_product<S: State>(x: &S, y: &S) -> Result<C64> {
    x.check_compatible(y)?;
    Ok(tensor::inner(x.amplitudes(), y.amplitudes()))
}

pub fn norm<S: State>(x: &S) -> f64 {
    x.norm()
}

pub fn normalize<S: State>(x: &S) -> Result<S> {
    let n = x.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::CannotNormalize);
    }
    let mut out = x.clone();
    out.amplitudes_mut().iter_mut().for_each(|z| *z /= n);
    Ok(out)
}

/// One particle: amplitudes laid out as `[grid point][spin projection]`,
/// projections ordered `m = s, ..., -s`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleState {
    label: ParticleLabel,
    amplitudes: Vec<C64>,
    coverage_warning: bool,
}

impl SingleParticleState {
    pub fn from_amplitudes(label: ParticleLabel, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != label.size() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                label.size(),
                amplitudes.len()
            )));
        }
        Ok(Self { label, amplitudes, coverage_warning: false })
    }

    /// Samples `psi(p, chi)` at every grid point and folds in the weight.
    pub fn from_fn(label: ParticleLabel, mut psi: impl FnMut(&Vec3, usize) -> C64) -> Self {
        let w = label.grid.cell_volume().sqrt();
        let ns = label.spin.dim();
        let mut amplitudes = Vec::with_capacity(label.size());
        for i in 0..label.grid.len() {
            let p = label.grid.momentum(i);
            for chi in 0..ns {
                amplitudes.push(psi(&p, chi) * w);
            }
        }
        Self { label, amplitudes, coverage_warning: false }
    }

    pub fn basis(label: ParticleLabel, point: usize, chi: usize) -> Result<Self> {
        let ns = label.spin.dim();
        if point >= label.grid.len() || chi >= ns {
            return Err(Error::InvalidParameter("basis index out of range".into()));
        }
        let mut amps = vec![C64::new(0.0, 0.0); label.size()];
        amps[point * ns + chi] = C64::new(1.0, 0.0);
        Self::from_amplitudes(label, amps)
    }

    pub fn label(&self) -> &ParticleLabel {
        &self.label
    }

    pub fn mass(&self) -> f64 {
        self.label.mass
    }

    pub fn spin(&self) -> Spin {
        self.label.spin
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.label.grid
    }

    pub fn amplitude(&self, point: usize, chi: usize) -> C64 {
        self.amplitudes[point * self.label.spin.dim() + chi]
    }

    /// Set when more than [`COVERAGE_TOLERANCE`] of the sampled probability
    /// lies outside the grid.
    pub fn coverage_warning(&self) -> bool {
        self.coverage_warning
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        Self { label: self.label.clone(), amplitudes, coverage_warning: self.coverage_warning }
    }

    pub fn to_snapshot(&self) -> Snapshot {
        Snapshot {
            metadata: SnapshotMetadata {
                m: self.label.mass,
                w: self.label.internal_energy,
                s: self.label.spin,
                grid: self.label.grid.clone(),
            },
            amplitudes: self.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_snapshot(snap: &Snapshot) -> Result<Self> {
        let m = &snap.metadata;
        let label = ParticleLabel::new(m.m, m.w, m.s, m.grid.clone())?;
        let amps = snap.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        Self::from_amplitudes(label, amps)
    }
}

impl State for SingleParticleState {
    fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        let (a, b) = (&self.label, &other.label);
        if a.grid != b.grid || a.spin != b.spin {
            return Err(Error::IncompatibleSpaces("grid or spin differs".into()));
        }
        Ok(())
    }
}

/// JSON snapshot of a single-particle state:
/// `{metadata: {m, W, s, grid}, amplitudes: [[re, im], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub metadata: SnapshotMetadata,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMetadata {
    pub m: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub s: Spin,
    pub grid: MomentumGrid,
}

/// Which momentum coordinates a two-particle amplitude array is indexed by.
#[derive(Clone, Debug, PartialEq)]
pub enum Frame {
    /// `[i_A][chi_A][i_B][chi_B]` over the two particle grids.
    Particle,
    /// `[P index][q index][chi_A][chi_B]` over the sheared image lattice.
    Com(ShearedLattice),
}

impl Frame {
    pub fn name(&self) -> &'static str {
        match self {
            Frame::Particle => "particle",
            Frame::Com(_) => "com",
        }
    }
}

/// Two distinguishable particles on 1D grids.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoParticleState {
    a: ParticleLabel,
    b: ParticleLabel,
    frame: Frame,
    amplitudes: Vec<C64>,
}

impl TwoParticleState {
    pub(crate) fn check_labels(a: &ParticleLabel, b: &ParticleLabel) -> Result<()> {
        if a.grid.dim() != 1 || b.grid.dim() != 1 {
            return Err(Error::InvalidParameter(
                "Cartesian two-particle states are 1D only; use the partial-wave representation in 3D".into(),
            ));
        }
        Ok(())
    }

    pub fn from_amplitudes(a: ParticleLabel, b: ParticleLabel, amplitudes: Vec<C64>) -> Result<Self> {
        Self::check_labels(&a, &b)?;
        if amplitudes.len() != a.size() * b.size() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes, got {}",
                a.size() * b.size(),
                amplitudes.len()
            )));
        }
        Ok(Self { a, b, frame: Frame::Particle, amplitudes })
    }

    /// Samples `psi(p_A, chi_A, p_B, chi_B)` in the particle frame.
    pub fn from_fn(
        a: ParticleLabel,
        b: ParticleLabel,
        mut psi: impl FnMut(f64, usize, f64, usize) -> C64,
    ) -> Result<Self> {
        Self::check_labels(&a, &b)?;
        let w = (a.grid.spacing() * b.grid.spacing()).sqrt();
        let (sa, sb) = (a.spin.dim(), b.spin.dim());
        let mut amps = Vec::with_capacity(a.size() * b.size());
        for ia in 0..a.grid.len() {
            let pa = a.grid.axis_value(0, ia);
            for ca in 0..sa {
                for ib in 0..b.grid.len() {
                    let pb = b.grid.axis_value(0, ib);
                    for cb in 0..sb {
                        amps.push(psi(pa, ca, pb, cb) * w);
                    }
                }
            }
        }
        Ok(Self { a, b, frame: Frame::Particle, amplitudes: amps })
    }

    pub(crate) fn from_parts(a: ParticleLabel, b: ParticleLabel, frame: Frame, amplitudes: Vec<C64>) -> Self {
        Self { a, b, frame, amplitudes }
    }

    pub fn label_a(&self) -> &ParticleLabel {
        &self.a
    }

    pub fn label_b(&self) -> &ParticleLabel {
        &self.b
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn total_mass(&self) -> f64 {
        self.a.mass + self.b.mass
    }

    pub fn reduced_mass(&self) -> f64 {
        self.a.mass * self.b.mass / self.total_mass()
    }

    /// Axis extents of the amplitude array in its current frame.
    pub fn dims(&self) -> [usize; 4] {
        let (sa, sb) = (self.a.spin.dim(), self.b.spin.dim());
        match &self.frame {
            Frame::Particle => [self.a.grid.len(), sa, self.b.grid.len(), sb],
            Frame::Com(l) => [l.n_p(), l.n_q(), sa, sb],
        }
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), self.amplitudes.len());
        Self { a: self.a.clone(), b: self.b.clone(), frame: self.frame.clone(), amplitudes }
    }
}

impl State for TwoParticleState {
    fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        let same = |x: &ParticleLabel, y: &ParticleLabel| x.grid == y.grid && x.spin == y.spin;
        if !same(&self.a, &other.a) || !same(&self.b, &other.b) {
            return Err(Error::IncompatibleSpaces("particle grids or spins differ".into()));
        }
        if self.frame != other.frame {
            return Err(Error::IncompatibleSpaces(format!(
                "coordinate frames differ ({} vs {})",
                self.frame.name(),
                other.frame.name()
            )));
        }
        Ok(())
    }
}

/// `a (x) b` in the particle frame.
pub fn tensor_product(a: &SingleParticleState, b: &SingleParticleState) -> Result<TwoParticleState> {
    TwoParticleState::check_labels(a.label(), b.label())?;
    let mut amps = Vec::with_capacity(a.amplitudes.len() * b.amplitudes.len());
    for x in &a.amplitudes {
        for y in &b.amplitudes {
            amps.push(x * y);
        }
    }
    Ok(TwoParticleState::from_parts(a.label.clone(), b.label.clone(), Frame::Particle, amps))
}

/// Probability of a Gaussian `|psi|^2 ~ exp(-(p-p0)^2/sigma^2)` outside the grid.
fn gaussian_outside_probability(packet: &GaussianPacket, grid: &MomentumGrid) -> f64 {
    let mut inside = 1.0;
    for a in 0..grid.dim() {
        let (lo, hi) = grid.axis_range(a);
        // half-cell margin: the sampled mass of a point covers +-dp/2
        let (lo, hi) = (lo - 0.5 * grid.spacing(), hi + 0.5 * grid.spacing());
        let c = packet.center[a];
        let out = 0.5 * libm::erfc((hi - c) / packet.sigma) + 0.5 * libm::erfc((c - lo) / packet.sigma);
        inside *= 1.0 - out.min(1.0);
    }
    1.0 - inside
}

/// Samples `N exp(-(p - p0)^2 / (2 sigma^2))` with the analytic normalization
/// `N = (pi sigma^2)^(-dim/4)` as a spin-0 state.
pub fn sample_gaussian(packet: &GaussianPacket, grid: &MomentumGrid) -> Result<SingleParticleState> {
    sample_gaussian_spinor(packet, grid, Spin::ZERO, &[C64::new(1.0, 0.0)])
}

/// Gaussian momentum profile times a fixed normalized spinor.
pub fn sample_gaussian_spinor(
    packet: &GaussianPacket,
    grid: &MomentumGrid,
    spin: Spin,
    spinor: &[C64],
) -> Result<SingleParticleState> {
    packet.validate()?;
    if spinor.len() != spin.dim() {
        return Err(Error::InvalidParameter("spinor length must be 2s+1".into()));
    }
    let label = ParticleLabel::new(packet.mass, packet.internal_energy, spin, grid.clone())?;
    let mut state =
        SingleParticleState::from_fn(label, |p, chi| C64::new(packet.amplitude(p, grid.dim()), 0.0) * spinor[chi]);
    state.coverage_warning = gaussian_outside_probability(packet, grid) > COVERAGE_TOLERANCE;
    Ok(state)
}

/// Product of two 1D Gaussian packets sampled directly on the pair of grids.
pub fn sample_gaussian_pair(
    a: &GaussianPacket,
    b: &GaussianPacket,
    grid_a: &MomentumGrid,
    grid_b: &MomentumGrid,
) -> Result<TwoParticleState> {
    a.validate()?;
    b.validate()?;
    let la = ParticleLabel::new(a.mass, a.internal_energy, Spin::ZERO, grid_a.clone())?;
    let lb = ParticleLabel::new(b.mass, b.internal_energy, Spin::ZERO, grid_b.clone())?;
    TwoParticleState::from_fn(la, lb, |pa, _, pb, _| {
        C64::new(a.amplitude(&[pa, 0.0, 0.0], 1) * b.amplitude(&[pb, 0.0, 0.0], 1), 0.0)
    })
}
