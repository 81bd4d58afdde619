//! Tensor product structures: bipartitions of a state's factors, the exact
//! total/relative momentum relabeling, Schmidt spectra and entanglement
//! measures.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galilei::{wigner_d, Rotation};
use crate::hilbert::{Frame, MomentumGrid, SingleParticleState, TwoParticleState};
use crate::spin::Spin;
use crate::tensor;

/// Largest smaller side of a matrix handed to the dense SVD.
pub const SVD_CAP: usize = 4096;
/// Largest number of entries of a matrix handed to the dense SVD.
pub const SVD_MAX_ENTRIES: usize = 1 << 26;
/// Schmidt weights below this are treated as numerical noise.
pub const SPECTRUM_FLOOR: f64 = 1e-14;
/// Largest `r + s` for an exactly relabeled mass ratio `r:s`.
pub const MAX_RATIO_SUM: u32 = 16;

/// A tensor factor of some state's amplitude array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Factor {
    Momentum,
    Spin,
    MomentumA,
    SpinA,
    MomentumB,
    SpinB,
    TotalMomentum,
    Relative,
    External,
    Radial,
    Channel,
}

/// The kind of state a tensor product structure applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FrameKind {
    Single,
    Particle,
    Com,
    PartialWave,
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FrameKind::Single => "single",
            FrameKind::Particle => "particle",
            FrameKind::Com => "com",
            FrameKind::PartialWave => "partial_wave",
        };
        f.write_str(s)
    }
}

/// States whose amplitude array is a dense tensor over named factors.
pub trait Bipartite: Sized {
    fn frame_kind(&self) -> FrameKind;
    /// Factors in the axis order of `data`, with their extents.
    fn factors(&self) -> Vec<(Factor, usize)>;
    fn data(&self) -> &[C64];
    fn with_data(&self, data: Vec<C64>) -> Self;

    fn sheared(&self) -> Option<&ShearedLattice> {
        None
    }

    fn factor_spin(&self, _f: Factor) -> Option<Spin> {
        None
    }

    fn factor_grid(&self, _f: Factor) -> Option<&MomentumGrid> {
        None
    }
}

impl Bipartite for SingleParticleState {
    fn frame_kind(&self) -> FrameKind {
        FrameKind::Single
    }

    fn factors(&self) -> Vec<(Factor, usize)> {
        vec![(Factor::Momentum, self.grid().len()), (Factor::Spin, self.spin().dim())]
    }

    fn data(&self) -> &[C64] {
        crate::hilbert::State::amplitudes(self)
    }

    fn with_data(&self, data: Vec<C64>) -> Self {
        self.with_amplitudes(data)
    }

    fn factor_spin(&self, f: Factor) -> Option<Spin> {
        (f == Factor::Spin).then(|| self.spin())
    }

    fn factor_grid(&self, f: Factor) -> Option<&MomentumGrid> {
        (f == Factor::Momentum).then(|| self.grid())
    }
}

impl Bipartite for TwoParticleState {
    fn frame_kind(&self) -> FrameKind {
        match self.frame() {
            Frame::Particle => FrameKind::Particle,
            Frame::Com(_) => FrameKind::Com,
        }
    }

    fn factors(&self) -> Vec<(Factor, usize)> {
        let d = self.dims();
        match self.frame() {
            Frame::Particle => {
                vec![(Factor::MomentumA, d[0]), (Factor::SpinA, d[1]), (Factor::MomentumB, d[2]), (Factor::SpinB, d[3])]
            }
            Frame::Com(_) => vec![
                (Factor::TotalMomentum, d[0]),
                (Factor::Relative, d[1]),
                (Factor::SpinA, d[2]),
                (Factor::SpinB, d[3]),
            ],
        }
    }

    fn data(&self) -> &[C64] {
        crate::hilbert::State::amplitudes(self)
    }

    fn with_data(&self, data: Vec<C64>) -> Self {
        self.with_amplitudes(data)
    }

    fn sheared(&self) -> Option<&ShearedLattice> {
        match self.frame() {
            Frame::Com(l) => Some(l),
            Frame::Particle => None,
        }
    }

    fn factor_spin(&self, f: Factor) -> Option<Spin> {
        match f {
            Factor::SpinA => Some(self.label_a().spin),
            Factor::SpinB => Some(self.label_b().spin),
            _ => None,
        }
    }

    fn factor_grid(&self, f: Factor) -> Option<&MomentumGrid> {
        match (f, self.frame()) {
            (Factor::MomentumA, Frame::Particle) => Some(&self.label_a().grid),
            (Factor::MomentumB, Frame::Particle) => Some(&self.label_b().grid),
            _ => None,
        }
    }
}

/// A named bipartition `left | right` of the factors of one kind of state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorProductStructure {
    pub name: String,
    pub left: Vec<Factor>,
    pub right: Vec<Factor>,
    pub required_frame: FrameKind,
}

impl TensorProductStructure {
    pub fn new(name: &str, required_frame: FrameKind, left: &[Factor], right: &[Factor]) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidParameter("both sides of a bipartition need a factor".into()));
        }
        if left.iter().any(|f| right.contains(f)) {
            return Err(Error::InvalidParameter(format!("factor sets of '{name}' overlap")));
        }
        Ok(Self { name: name.to_string(), left: left.to_vec(), right: right.to_vec(), required_frame })
    }

    /// Resolves the string ids used in scenario files.
    pub fn named(id: &str) -> Result<Self> {
        use Factor::*;
        let compact: String = id.split_whitespace().collect::<Vec<_>>().join(" ");
        match compact.as_str() {
            "mom|spin" => Self::new(id, FrameKind::Single, &[Momentum], &[Spin]),
            "A|B" => Self::new(id, FrameKind::Particle, &[MomentumA, SpinA], &[MomentumB, SpinB]),
            "(pA pB)|(sA sB)" => Self::new(id, FrameKind::Particle, &[MomentumA, MomentumB], &[SpinA, SpinB]),
            "(P q)|(sA sB)" => Self::new(id, FrameKind::Com, &[TotalMomentum, Relative], &[SpinA, SpinB]),
            "P|q" => Self::new(id, FrameKind::Com, &[TotalMomentum], &[Relative, SpinA, SpinB]),
            "P|int" => Self::new(id, FrameKind::PartialWave, &[External], &[Radial, Channel]),
            _ => Err(Error::InvalidParameter(format!("unknown tensor product structure '{id}'"))),
        }
    }

    fn axes(&self, factors: &[(Factor, usize)], side: Side) -> Result<Vec<usize>> {
        let wanted = match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        };
        wanted
            .iter()
            .map(|f| {
                factors
                    .iter()
                    .position(|(g, _)| g == f)
                    .ok_or_else(|| Error::InvalidParameter(format!("state has no factor {f:?}")))
            })
            .collect()
    }

    fn check<S: Bipartite>(&self, state: &S) -> Result<Vec<(Factor, usize)>> {
        if state.frame_kind() != self.required_frame {
            return Err(Error::FrameMismatch {
                expected: self.required_frame.to_string(),
                found: state.frame_kind().to_string(),
            });
        }
        let factors = state.factors();
        let covered = factors.iter().all(|(f, _)| self.left.contains(f) || self.right.contains(f));
        if !covered || self.left.len() + self.right.len() != factors.len() {
            return Err(Error::InvalidParameter(format!("'{}' does not cover the state's factors", self.name)));
        }
        Ok(factors)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// Descending Schmidt weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    values: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Sorts, drops weights under [`SPECTRUM_FLOOR`] and renormalizes.
    pub fn from_weights(mut w: Vec<f64>) -> Result<Self> {
        let total: f64 = w.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::CannotNormalize);
        }
        w.iter_mut().for_each(|x| *x /= total);
        w.retain(|&x| x >= SPECTRUM_FLOOR);
        w.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        Ok(Self { values: w })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntanglementMeasures {
    /// von Neumann entropy in nats.
    pub entropy: f64,
    pub purity: f64,
    pub schmidt_number: f64,
}

pub fn entanglement_measures(spec: &SchmidtSpectrum) -> EntanglementMeasures {
    let entropy = spec.values.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum::<f64>().max(0.0);
    let purity: f64 = spec.values.iter().map(|l| l * l).sum();
    EntanglementMeasures { entropy, purity, schmidt_number: 1.0 / purity }
}

/// Squared singular values of `m` after cropping all-zero rows and columns.
fn squared_singular_values(m: DMatrix<C64>) -> Result<Vec<f64>> {
    let zero = C64::new(0.0, 0.0);
    let rows: Vec<usize> = (0..m.nrows()).filter(|&i| m.row(i).iter().any(|z| *z != zero)).collect();
    let cols: Vec<usize> = (0..m.ncols()).filter(|&j| m.column(j).iter().any(|z| *z != zero)).collect();
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let (nr, nc) = (rows.len(), cols.len());
    if nr.min(nc) > SVD_CAP || nr * nc > SVD_MAX_ENTRIES {
        return Err(Error::ResolutionTooHigh { rows: nr, cols: nc });
    }
    let cropped =
        if nr == m.nrows() && nc == m.ncols() { m } else { DMatrix::from_fn(nr, nc, |i, j| m[(rows[i], cols[j])]) };
    let sv = if nr <= nc { cropped.adjoint().singular_values() } else { cropped.singular_values() };
    Ok(sv.iter().map(|s| s * s).collect())
}

/// Schmidt spectrum of a bipartite amplitude matrix (rows | columns).
pub fn matrix_spectrum(m: DMatrix<C64>) -> Result<SchmidtSpectrum> {
    SchmidtSpectrum::from_weights(squared_singular_values(m)?)
}

/// Schmidt weights of a dense tensor split into `left` axes and the rest.
fn tensor_weights(dims: &[usize], data: &[C64], left: &[usize]) -> Result<Vec<f64>> {
    squared_singular_values(tensor::bipartite_matrix(dims, data, left))
}

/// Schmidt spectrum of `state` across `tps`.
///
/// A sheared total/relative lattice is the disjoint union of `r + s`
/// rectangular coset sublattices. When the two momenta sit on different
/// sides, the spectrum is the probability-weighted, rank-aligned average of
/// the per-coset spectra, which drops the `ln(r + s)` bookkeeping entropy of
/// the coset label itself.
pub fn schmidt_spectrum<S: Bipartite>(state: &S, tps: &TensorProductStructure) -> Result<SchmidtSpectrum> {
    let factors = tps.check(state)?;
    let dims: Vec<usize> = factors.iter().map(|(_, d)| *d).collect();
    let left = tps.axes(&factors, Side::Left)?;
    let split_lattice = tps.left.contains(&Factor::TotalMomentum) != tps.left.contains(&Factor::Relative);
    match state.sheared() {
        Some(lattice) if split_lattice => coset_spectrum(lattice, &dims, state.data(), &left),
        _ => SchmidtSpectrum::from_weights(tensor_weights(&dims, state.data(), &left)?),
    }
}

fn coset_spectrum(lattice: &ShearedLattice, dims: &[usize], data: &[C64], left: &[usize]) -> Result<SchmidtSpectrum> {
    let tail: usize = dims[2..].iter().product();
    let mut merged: Vec<f64> = Vec::new();
    let mut total = 0.0;
    for c in 0..lattice.cosets() {
        let rows = lattice.coset_rows(c);
        let cols = lattice.coset_cols(c);
        let mut sub = Vec::with_capacity(rows.len() * cols.len() * tail);
        for &n in &rows {
            for &k in &cols {
                let base = (n * dims[1] + k) * tail;
                sub.extend_from_slice(&data[base..base + tail]);
            }
        }
        let mut weights = tensor_weights(&[rows.len(), cols.len(), dims[2], dims[3]], &sub, left)?;
        weights.sort_by(|a, b| b.total_cmp(a));
        total += weights.iter().sum::<f64>();
        if merged.len() < weights.len() {
            merged.resize(weights.len(), 0.0);
        }
        // weights already carry the coset probability p; rank-aligned sum
        for (m, w) in merged.iter_mut().zip(&weights) {
            *m += w;
        }
    }
    if total == 0.0 {
        return Err(Error::CannotNormalize);
    }
    SchmidtSpectrum::from_weights(merged)
}

/// Exact rational mass ratio `m_A : m_B = r : s` with `r + s <= 16`.
pub fn mass_ratio(m_a: f64, m_b: f64) -> Result<(u32, u32)> {
    if !(m_a > 0.0 && m_b > 0.0) {
        return Err(Error::UnsupportedRatio { m_a, m_b });
    }
    for total in 2..=MAX_RATIO_SUM {
        for r in 1..total {
            let s = total - r;
            if gcd(r, s) == 1 && ((m_a * s as f64) - (m_b * r as f64)).abs() <= 1e-12 * (m_a * s as f64).abs() {
                return Ok((r, s));
            }
        }
    }
    Err(Error::UnsupportedRatio { m_a, m_b })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `P = p_A + p_B`, `q = (m_B p_A - m_A p_B) / (m_A + m_B)`.
pub fn com_coordinates(m_a: f64, m_b: f64, p_a: f64, p_b: f64) -> (f64, f64) {
    (p_a + p_b, (m_b * p_a - m_a * p_b) / (m_a + m_b))
}

/// Image of the rectangular `(i_A, i_B)` lattice under the total/relative
/// change of variables, for masses in ratio `r:s` on grids of common
/// spacing `dp`.
///
/// Index `n = i_A + i_B` labels `P = P_0 + n dp`; index `k` labels
/// `q = q_0 + k dp / (r + s)` with `k + k_min = s i_A - r i_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShearedLattice {
    r: u32,
    s: u32,
    n_a: usize,
    n_b: usize,
    spacing: f64,
    origin_a: f64,
    origin_b: f64,
}

impl ShearedLattice {
    pub fn new(m_a: f64, m_b: f64, grid_a: &MomentumGrid, grid_b: &MomentumGrid) -> Result<Self> {
        if grid_a.dim() != 1 || grid_b.dim() != 1 {
            return Err(Error::InvalidParameter("sheared lattices are 1D".into()));
        }
        let (da, db) = (grid_a.spacing(), grid_b.spacing());
        if (da - db).abs() > 1e-12 * da.max(db) {
            return Err(Error::IncompatibleSpaces(format!("grid spacings differ ({da} vs {db})")));
        }
        let (r, s) = mass_ratio(m_a, m_b)?;
        Ok(Self {
            r,
            s,
            n_a: grid_a.n_per_axis(),
            n_b: grid_b.n_per_axis(),
            spacing: da,
            origin_a: grid_a.origin()[0],
            origin_b: grid_b.origin()[0],
        })
    }

    pub fn ratio(&self) -> (u32, u32) {
        (self.r, self.s)
    }

    pub fn n_p(&self) -> usize {
        self.n_a + self.n_b - 1
    }

    pub fn n_q(&self) -> usize {
        self.s as usize * (self.n_a - 1) + self.r as usize * (self.n_b - 1) + 1
    }

    fn k_min(&self) -> i64 {
        -(self.r as i64) * (self.n_b as i64 - 1)
    }

    pub fn p_spacing(&self) -> f64 {
        self.spacing
    }

    pub fn q_spacing(&self) -> f64 {
        self.spacing / (self.r + self.s) as f64
    }

    pub fn p_value(&self, n: usize) -> f64 {
        self.origin_a + self.origin_b + n as f64 * self.spacing
    }

    pub fn q_value(&self, k: usize) -> f64 {
        let rs = (self.r + self.s) as f64;
        (self.s as f64 * self.origin_a - self.r as f64 * self.origin_b) / rs
            + (k as i64 + self.k_min()) as f64 * self.q_spacing()
    }

    /// `(n, k)` of the particle-lattice point `(i_A, i_B)`.
    pub fn image(&self, ia: usize, ib: usize) -> (usize, usize) {
        let k_abs = self.s as i64 * ia as i64 - self.r as i64 * ib as i64;
        (ia + ib, (k_abs - self.k_min()) as usize)
    }

    /// Particle-lattice point mapped to `(n, k)`, if any.
    pub fn preimage(&self, n: usize, k: usize) -> Option<(usize, usize)> {
        let rs = (self.r + self.s) as i64;
        let num = k as i64 + self.k_min() + self.r as i64 * n as i64;
        if num < 0 || num % rs != 0 {
            return None;
        }
        let ia = (num / rs) as usize;
        if ia >= self.n_a || ia > n || n - ia >= self.n_b {
            return None;
        }
        Some((ia, n - ia))
    }

    /// Number of rectangular coset sublattices, `r + s`.
    pub fn cosets(&self) -> usize {
        (self.r + self.s) as usize
    }

    pub fn coset_rows(&self, c: usize) -> Vec<usize> {
        (c..self.n_p()).step_by(self.cosets()).collect()
    }

    pub fn coset_cols(&self, c: usize) -> Vec<usize> {
        let rs = self.cosets() as i64;
        let first = (-(self.r as i64) * c as i64 - self.k_min()).rem_euclid(rs) as usize;
        (first..self.n_q()).step_by(self.cosets()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Relabels a 1D two-particle state between `(p_A, p_B)` and `(P, q)`.
/// The map is a permutation onto the sheared lattice, so it is unitary and
/// `Inverse` after `Forward` reproduces the input bit for bit.
pub fn to_com_variables(state: &TwoParticleState, direction: Direction) -> Result<TwoParticleState> {
    let (a, b) = (state.label_a(), state.label_b());
    let (sa, sb) = (a.spin.dim(), b.spin.dim());
    let data = crate::hilbert::State::amplitudes(state);
    let zero = C64::new(0.0, 0.0);
    match (direction, state.frame()) {
        (Direction::Forward, Frame::Particle) => {
            let lattice = ShearedLattice::new(a.mass, b.mass, &a.grid, &b.grid)?;
            let (na, nb, nq) = (a.grid.len(), b.grid.len(), lattice.n_q());
            let mut out = vec![zero; lattice.n_p() * nq * sa * sb];
            for ia in 0..na {
                for ib in 0..nb {
                    let (n, k) = lattice.image(ia, ib);
                    for ca in 0..sa {
                        for cb in 0..sb {
                            out[((n * nq + k) * sa + ca) * sb + cb] = data[((ia * sa + ca) * nb + ib) * sb + cb];
                        }
                    }
                }
            }
            Ok(TwoParticleState::from_parts(a.clone(), b.clone(), Frame::Com(lattice), out))
        }
        (Direction::Inverse, Frame::Com(lattice)) => {
            let (na, nb, nq) = (a.grid.len(), b.grid.len(), lattice.n_q());
            let mut out = vec![zero; na * sa * nb * sb];
            for ia in 0..na {
                for ib in 0..nb {
                    let (n, k) = lattice.image(ia, ib);
                    for ca in 0..sa {
                        for cb in 0..sb {
                            out[((ia * sa + ca) * nb + ib) * sb + cb] = data[((n * nq + k) * sa + ca) * sb + cb];
                        }
                    }
                }
            }
            Ok(TwoParticleState::from_parts(a.clone(), b.clone(), Frame::Particle, out))
        }
        (Direction::Forward, f) => Err(Error::FrameMismatch { expected: "particle".into(), found: f.name().into() }),
        (Direction::Inverse, f) => Err(Error::FrameMismatch { expected: "com".into(), found: f.name().into() }),
    }
}

/// Built-in and user-supplied unitaries acting on one side of a bipartition.
#[derive(Clone, Debug)]
pub enum LocalUnitary {
    /// Unitary discrete Fourier transform of each momentum factor on the
    /// side (every axis of a 3D grid).
    Fourier,
    /// Spin rotation `D^s(R)` of each spin factor on the side.
    SpinRotation(Rotation),
    /// Dense matrix on the combined index of `factors`, in listed order.
    Dense { factors: Vec<Factor>, matrix: DMatrix<C64> },
}

/// Largest `max |U^dagger U - I|` accepted for a supplied unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-12;

pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let p = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

fn fourier_fibre(n: usize) -> impl FnMut(&mut [C64]) {
    let fft = FftPlanner::new().plan_fft_forward(n);
    let scale = 1.0 / (n as f64).sqrt();
    move |buf: &mut [C64]| {
        fft.process(buf);
        buf.iter_mut().for_each(|z| *z *= scale);
    }
}

/// Applies `u` to the factors of `side` only. Entanglement across `tps` is
/// unchanged by construction.
pub fn apply_local_unitary<S: Bipartite>(
    state: &S,
    tps: &TensorProductStructure,
    side: Side,
    u: &LocalUnitary,
    check_unitary: bool,
) -> Result<S> {
    let factors = tps.check(state)?;
    let dims: Vec<usize> = factors.iter().map(|(_, d)| *d).collect();
    let side_factors = match side {
        Side::Left => &tps.left,
        Side::Right => &tps.right,
    };
    let axis_of = |f: Factor| factors.iter().position(|(g, _)| *g == f).expect("checked cover");
    let mut data = state.data().to_vec();
    match u {
        LocalUnitary::Fourier => {
            let momenta: Vec<Factor> = side_factors
                .iter()
                .copied()
                .filter(|f| matches!(f, Factor::Momentum | Factor::MomentumA | Factor::MomentumB))
                .collect();
            if momenta.is_empty() {
                return Err(Error::InvalidParameter("no Cartesian momentum factor on this side".into()));
            }
            for f in momenta {
                let grid = state.factor_grid(f).expect("Cartesian momentum factor");
                let n = grid.n_per_axis();
                let ax = axis_of(f);
                // split the flattened grid axis into per-axis axes
                let mut split: Vec<usize> = dims[..ax].to_vec();
                split.extend(std::iter::repeat_n(n, grid.dim()));
                split.extend_from_slice(&dims[ax + 1..]);
                for sub in 0..grid.dim() {
                    tensor::map_fibres(&split, &mut data, ax + sub, fourier_fibre(n));
                }
            }
        }
        LocalUnitary::SpinRotation(rot) => {
            let spins: Vec<Factor> = side_factors.iter().copied().filter(|f| state.factor_spin(*f).is_some()).collect();
            if spins.is_empty() {
                return Err(Error::InvalidParameter("no spin factor on this side".into()));
            }
            for f in spins {
                let d = wigner_d(state.factor_spin(f).unwrap(), rot);
                data = tensor::apply_on_axes(&dims, &data, &[axis_of(f)], &d.transpose());
            }
        }
        LocalUnitary::Dense { factors: targets, matrix } => {
            if let Some(f) = targets.iter().find(|f| !side_factors.contains(f)) {
                return Err(Error::InvalidParameter(format!("factor {f:?} is not on the chosen side")));
            }
            if state.sheared().is_some()
                && targets.iter().any(|f| matches!(f, Factor::TotalMomentum | Factor::Relative))
            {
                return Err(Error::InvalidParameter(
                    "dense unitaries on sheared-lattice momenta would leave the lattice".into(),
                ));
            }
            let axes: Vec<usize> = targets.iter().map(|f| axis_of(*f)).collect();
            let size: usize = axes.iter().map(|&a| dims[a]).product();
            if matrix.nrows() != size || matrix.ncols() != size {
                return Err(Error::InvalidParameter(format!("unitary must be {size}x{size}")));
            }
            if check_unitary {
                let defect = unitarity_defect(matrix);
                if defect > UNITARY_TOLERANCE {
                    return Err(Error::InvalidUnitary(defect));
                }
            }
            data = tensor::apply_on_axes(&dims, &data, &axes, matrix);
        }
    }
    Ok(state.with_data(data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{tensor_product, ParticleLabel, State};

    fn label(n: usize, spin: Spin) -> ParticleLabel {
        ParticleLabel::new(1.0, 0.0, spin, MomentumGrid::centered(1, n, 1.0).unwrap()).unwrap()
    }

    fn bell() -> TwoParticleState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)];
        TwoParticleState::from_amplitudes(label(2, Spin::ZERO), label(2, Spin::ZERO), amps).unwrap()
    }

    #[test]
    fn bell_state_spectrum() {
        let spec = schmidt_spectrum(&bell(), &TensorProductStructure::named("A|B").unwrap()).unwrap();
        assert_eq!(spec.rank(), 2);
        assert!((spec.values()[0] - 0.5).abs() < 1e-14);
        let m = entanglement_measures(&spec);
        assert!((m.entropy - 2f64.ln()).abs() < 1e-12);
        assert!((m.purity - 0.5).abs() < 1e-12);
        assert!((m.schmidt_number - 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_spectrum_is_trivial() {
        let a = SingleParticleState::from_fn(label(5, Spin::HALF), |p, c| C64::new(p[0] + c as f64, 1.0));
        let b = SingleParticleState::from_fn(label(4, Spin::ZERO), |p, _| C64::new(1.0, p[0]));
        let ab = crate::hilbert::normalize(&tensor_product(&a, &b).unwrap()).unwrap();
        let spec = schmidt_spectrum(&ab, &TensorProductStructure::named("A|B").unwrap()).unwrap();
        assert_eq!(spec.values(), &[1.0]);
        let m = entanglement_measures(&spec);
        assert_eq!((m.entropy, m.purity), (0.0, 1.0));
    }

    #[test]
    fn frame_mismatch_is_reported() {
        let err = schmidt_spectrum(&bell(), &TensorProductStructure::named("P|q").unwrap());
        assert!(matches!(err, Err(Error::FrameMismatch { .. })));
        assert!(TensorProductStructure::named("X|Y").is_err());
    }

    #[test]
    fn com_coordinate_examples() {
        assert_eq!(com_coordinates(1.0, 1.0, 2.0, 1.0), (3.0, 0.5));
        assert_eq!(com_coordinates(1.0, 2.0, 2.0, 1.0), (3.0, 1.0));
    }

    #[test]
    fn mass_ratios() {
        assert_eq!(mass_ratio(1.0, 4.0).unwrap(), (1, 4));
        assert_eq!(mass_ratio(3.0, 2.0).unwrap(), (3, 2));
        assert_eq!(mass_ratio(2.0, 2.0).unwrap(), (1, 1));
        assert!(matches!(mass_ratio(1.0, std::f64::consts::PI), Err(Error::UnsupportedRatio { .. })));
        assert!(mass_ratio(1.0, 16.0).is_err());
    }

    #[test]
    fn lattice_values_match_direct_coordinates() {
        let ga = MomentumGrid::around(0.3, 6, 0.5).unwrap();
        let gb = MomentumGrid::around(-1.0, 5, 0.5).unwrap();
        let l = ShearedLattice::new(2.0, 3.0, &ga, &gb).unwrap();
        let mut seen = std::collections::HashSet::new();
        for ia in 0..6 {
            for ib in 0..5 {
                let (n, k) = l.image(ia, ib);
                assert!(seen.insert((n, k)));
                assert_eq!(l.preimage(n, k), Some((ia, ib)));
                let (pp, qq) = com_coordinates(2.0, 3.0, ga.axis_value(0, ia), gb.axis_value(0, ib));
                assert!((l.p_value(n) - pp).abs() < 1e-12);
                assert!((l.q_value(k) - qq).abs() < 1e-12);
                assert!(l.coset_rows(n % 5).contains(&n));
                assert!(l.coset_cols(n % 5).contains(&k));
            }
        }
        let occupied = (0..l.n_p()).flat_map(|n| (0..l.n_q()).map(move |k| (n, k)));
        assert_eq!(occupied.filter(|&(n, k)| l.preimage(n, k).is_some()).count(), 30);
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let a = label(7, Spin::HALF);
        let b = ParticleLabel::new(3.0, 0.0, Spin::ZERO, MomentumGrid::around(2.0, 5, 1.0).unwrap()).unwrap();
        let x = TwoParticleState::from_fn(a, b, |pa, ca, pb, _| C64::new(pa * 0.3 - ca as f64, pb.sin())).unwrap();
        let com = to_com_variables(&x, Direction::Forward).unwrap();
        assert_eq!(com.norm(), x.norm());
        let back = to_com_variables(&com, Direction::Inverse).unwrap();
        assert_eq!(back, x);
        assert!(to_com_variables(&x, Direction::Inverse).is_err());
    }

    #[test]
    fn local_unitaries_keep_spectrum() {
        let a = label(6, Spin::HALF);
        let b = label(5, Spin::HALF);
        let x = TwoParticleState::from_fn(a, b, |pa, ca, pb, cb| {
            C64::new((pa * pb * 0.2).cos() + ca as f64, (pa - pb + cb as f64).sin())
        })
        .unwrap();
        let x = crate::hilbert::normalize(&x).unwrap();
        let ab = TensorProductStructure::named("A|B").unwrap();
        let before = entanglement_measures(&schmidt_spectrum(&x, &ab).unwrap()).entropy;
        let f = apply_local_unitary(&x, &ab, Side::Left, &LocalUnitary::Fourier, false).unwrap();
        let r = apply_local_unitary(
            &f,
            &ab,
            Side::Right,
            &LocalUnitary::SpinRotation(Rotation::euler_zyz(0.3, 1.1, -0.7)),
            false,
        )
        .unwrap();
        let after = entanglement_measures(&schmidt_spectrum(&r, &ab).unwrap()).entropy;
        assert!((before - after).abs() < 1e-10);
        assert!((r.norm() - 1.0).abs() < 1e-12);
        let id = apply_local_unitary(
            &x,
            &ab,
            Side::Left,
            &LocalUnitary::Dense { factors: vec![Factor::SpinA], matrix: DMatrix::identity(2, 2) },
            true,
        )
        .unwrap();
        assert_eq!(id, x);
        let bad =
            LocalUnitary::Dense { factors: vec![Factor::SpinA], matrix: DMatrix::identity(2, 2) * C64::new(2.0, 0.0) };
        assert!(matches!(apply_local_unitary(&x, &ab, Side::Left, &bad, true), Err(Error::InvalidUnitary(_))));
        let wrong_side = LocalUnitary::Dense { factors: vec![Factor::SpinB], matrix: DMatrix::identity(2, 2) };
        assert!(apply_local_unitary(&x, &ab, Side::Left, &wrong_side, false).is_err());
    }

    #[test]
    fn spin_rotation_keeps_product() {
        let l = label(8, Spin::HALF);
        let s = SingleParticleState::from_fn(l, |p, c| C64::new((-p[0] * p[0]).exp() * [0.6, 0.8][c], 0.0));
        let tps = TensorProductStructure::named("mom|spin").unwrap();
        let r = apply_local_unitary(
            &s,
            &tps,
            Side::Right,
            &LocalUnitary::SpinRotation(Rotation::euler_zyz(1.0, 0.5, 0.2)),
            false,
        )
        .unwrap();
        assert_eq!(schmidt_spectrum(&r, &tps).unwrap().rank(), 1);
    }
}
