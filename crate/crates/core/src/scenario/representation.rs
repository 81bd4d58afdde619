use nalgebra::Vector3;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::{config_error, Check};
use crate::error::Result;
use crate::galilei::{apply_single, boost_quantum, compose, random_commensurate, wrap_phase, GroupElement};
use crate::hilbert::{normalize, MomentumGrid, ParticleLabel, SingleParticleState, State};
use crate::partialwave::{
    cg_twice, channel_set, couple_channels, decouple_channels, degeneracy, spherical_contract, spherical_expand,
    AngularQuadrature, Basis, Channel, PairLabel, PartialWaveState, RadialGrid,
};
use crate::spin::Spin;
use crate::tensor::inner;

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual: f64,
    pub variance: f64,
    pub reorder: f64,
    pub orthonormality: f64,
    pub round_trip: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-9, variance: 1e-9, reorder: 1e-9, orthonormality: 1e-12, round_trip: 1e-10 }
    }
}

/// Angular-momentum bookkeeping checks.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Angular {
    /// Largest `j1`, `j2` for the orthonormality sums.
    pub cg_j_max: f64,
    pub degeneracy_j_max: f64,
    pub round_trip_l_max: u32,
}

impl Default for Angular {
    fn default() -> Self {
        Self { cg_j_max: 2.0, degeneracy_j_max: 4.0, round_trip_l_max: 6 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default)]
    pub internal_energy: f64,
    #[serde(default = "default_spin")]
    pub spin: Spin,
    /// Grid points per axis kept empty at each edge of a probe.
    #[serde(default = "default_margin")]
    pub margin: usize,
    #[serde(default = "default_steps")]
    pub max_steps: i32,
    #[serde(default = "default_a_max")]
    pub a_max: f64,
    #[serde(default = "default_b_max")]
    pub b_max: f64,
    /// Uses the identity for every group element.
    #[serde(default)]
    pub identity_only: bool,
    #[serde(default = "default_reorder")]
    pub reorder_samples: usize,
    /// `null` skips the angular section.
    #[serde(default = "default_angular")]
    pub angular: Option<Angular>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_pairs() -> usize {
    100
}
fn default_probes() -> usize {
    10
}
fn default_dim() -> usize {
    3
}
fn default_n() -> usize {
    10
}
fn default_spacing() -> f64 {
    0.5
}
fn default_mass() -> f64 {
    2.0
}
fn default_spin() -> Spin {
    Spin::HALF
}
fn default_margin() -> usize {
    2
}
fn default_steps() -> i32 {
    1
}
fn default_a_max() -> f64 {
    2.0
}
fn default_b_max() -> f64 {
    1.0
}
fn default_reorder() -> usize {
    20
}
fn default_angular() -> Option<Angular> {
    Some(Angular::default())
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 3 {
            return Err(config_error("/parameters/dim", "dim must be 1 or 3"));
        }
        if self.probes == 0 {
            return Err(config_error("/parameters/probes", "need at least one probe"));
        }
        if self.n < 2 * self.margin + 1 || self.n > if self.dim == 1 { 4096 } else { 24 } {
            return Err(config_error("/parameters/n", "n too small for the margin or too large for the grid"));
        }
        if !(self.spacing > 0.0) {
            return Err(config_error("/parameters/spacing", "spacing must be positive"));
        }
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(config_error("/parameters/mass", "mass must be positive"));
        }
        if self.max_steps < 0 {
            return Err(config_error("/parameters/max_steps", "must be non-negative"));
        }
        if let Some(a) = &self.angular {
            let ok = |x: f64| x >= 0.0 && (2.0 * x).fract() == 0.0 && x <= 8.0;
            if !ok(a.cg_j_max) {
                return Err(config_error("/parameters/angular/cg_j_max", "need a half-integer in [0, 8]"));
            }
            if !ok(a.degeneracy_j_max) {
                return Err(config_error("/parameters/angular/degeneracy_j_max", "need a half-integer in [0, 8]"));
            }
            if a.round_trip_l_max > 12 {
                return Err(config_error("/parameters/angular/round_trip_l_max", "must be at most 12"));
            }
        }
        Ok(())
    }
}

/// Random amplitudes supported `margin` points away from every edge.
fn random_probe(rng: &mut ChaCha8Rng, label: &ParticleLabel, margin: usize) -> Result<SingleParticleState> {
    let grid = label.grid.clone();
    let n = grid.n_per_axis();
    let s = SingleParticleState::from_fn(label.clone(), |p, _| {
        let inside = (0..grid.dim()).all(|a| {
            let i = ((p[a] - grid.origin()[a]) / grid.spacing()).round() as usize;
            i >= margin && i + margin < n
        });
        if inside {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    normalize(&s)
}

/// Fitted phase and residual of `x = e^{i xi} y`.
fn fit_phase(x: &[C64], y: &[C64]) -> (f64, f64) {
    let xi = inner(y, x).arg();
    let ph = C64::from_polar(1.0, xi);
    let res = x.iter().zip(y).map(|(a, b)| (a - ph * b).norm_sqr()).sum::<f64>().sqrt();
    (xi, res)
}

fn law_checks(p: &Params, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let grid = MomentumGrid::centered(p.dim, p.n, p.spacing)?;
    let label = ParticleLabel::new(p.mass, p.internal_energy, p.spin, grid)?;
    let quantum = boost_quantum(&[p.mass], p.spacing)?;
    let draw = |rng: &mut ChaCha8Rng| {
        if p.identity_only {
            GroupElement::identity()
        } else {
            random_commensurate(rng, p.dim, quantum, p.max_steps, p.a_max, p.b_max)
        }
    };
    let (mut max_res, mut max_var) = (0.0f64, 0.0f64);
    for _ in 0..p.pairs {
        let (g1, g2) = (draw(rng), draw(rng));
        let g21 = compose(&g2, &g1);
        let mut phases = Vec::with_capacity(p.probes);
        for _ in 0..p.probes {
            let probe = random_probe(rng, &label, p.margin)?;
            let lhs = apply_single(&g2, &apply_single(&g1, &probe)?)?;
            let rhs = apply_single(&g21, &probe)?;
            let (xi, res) = fit_phase(lhs.amplitudes(), rhs.amplitudes());
            max_res = max_res.max(res);
            phases.push(xi);
        }
        let devs: Vec<f64> = phases.iter().map(|x| wrap_phase(x - phases[0])).collect();
        let mean = devs.iter().sum::<f64>() / devs.len() as f64;
        let var = devs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / devs.len() as f64;
        max_var = max_var.max(var);
    }

    // B(v) T(a) = e^{i m a.v} T(a) B(v)
    let mut max_reorder = 0.0f64;
    for _ in 0..p.reorder_samples {
        let mut a = Vector3::zeros();
        let mut v = Vector3::zeros();
        for ax in 0..p.dim {
            a[ax] = rng.random_range(-p.a_max..=p.a_max);
            v[ax] = rng.random_range(-p.max_steps..=p.max_steps) as f64 * quantum;
        }
        let (ta, bv) = (GroupElement::translation(a), GroupElement::boost(v));
        let probe = random_probe(rng, &label, p.margin)?;
        let va = apply_single(&bv, &apply_single(&ta, &probe)?)?;
        let av = apply_single(&ta, &apply_single(&bv, &probe)?)?;
        let ph = C64::from_polar(1.0, p.mass * a.dot(&v));
        let res = va.amplitudes().iter().zip(av.amplitudes()).map(|(x, y)| (x - ph * y).norm_sqr()).sum::<f64>().sqrt();
        max_reorder = max_reorder.max(res);
    }
    let mut checks = Vec::new();
    if p.pairs > 0 {
        checks.push(Check::record("pairs", p.pairs as f64));
        checks.push(Check::below("max_residual", max_res, p.tolerances.residual));
        checks.push(Check::below("max_phase_variance", max_var, p.tolerances.variance));
    }
    if p.reorder_samples > 0 {
        checks.push(Check::below("reorder/max_residual", max_reorder, p.tolerances.reorder));
    }
    Ok(checks)
}

/// `sum_{m1 m2} <j1 m1 j2 m2|j m><j1 m1 j2 m2|j' m'> = delta` and the
/// completeness relation, worst deviation over `j1, j2 <= j_max`.
fn cg_orthonormality(j_max: f64) -> f64 {
    let tmax = (2.0 * j_max).round() as i32;
    let mut worst = 0.0f64;
    for j1 in 0..=tmax {
        for j2 in 0..=tmax {
            let js: Vec<i32> = ((j1 - j2).abs()..=j1 + j2).step_by(2).collect();
            for &j in &js {
                for &jp in &js {
                    for m in (-j..=j).step_by(2) {
                        for mp in (-jp..=jp).step_by(2) {
                            let mut acc = 0.0;
                            for m1 in (-j1..=j1).step_by(2) {
                                let m2 = m - m1;
                                if m2.abs() > j2 || m2 != mp - m1 {
                                    continue;
                                }
                                acc += cg_twice(j1, m1, j2, m2, j, m) * cg_twice(j1, m1, j2, m2, jp, mp);
                            }
                            let want = if j == jp && m == mp { 1.0 } else { 0.0 };
                            worst = worst.max((acc - want).abs());
                        }
                    }
                }
            }
            for m1 in (-j1..=j1).step_by(2) {
                for m2 in (-j2..=j2).step_by(2) {
                    for m1p in (-j1..=j1).step_by(2) {
                        let m2p = m1 + m2 - m1p;
                        if m2p.abs() > j2 {
                            continue;
                        }
                        let acc: f64 = js
                            .iter()
                            .filter(|&&j| (m1 + m2).abs() <= j)
                            .map(|&j| cg_twice(j1, m1, j2, m2, j, m1 + m2) * cg_twice(j1, m1p, j2, m2p, j, m1 + m2))
                            .sum();
                        let want = if m1 == m1p { 1.0 } else { 0.0 };
                        worst = worst.max((acc - want).abs());
                    }
                }
            }
        }
    }
    worst
}

/// Multiplicity of total `j` read off the uncoupled product basis as
/// `N(M = j) - N(M = j + 1)`.
fn multiplicity_from_projections(twice_j: i32, s_a: Spin, s_b: Spin) -> u32 {
    let l_max = ((twice_j + (s_a.twice() + s_b.twice()) as i32) / 2 + 1) as u32;
    let count = |twice_m: i32| {
        channel_set(Basis::Uncoupled, l_max, s_a, s_b)
            .iter()
            .filter(|c| match c {
                Channel::Uncoupled { m, twice_ma, twice_mb, .. } => 2 * m + twice_ma + twice_mb == twice_m,
                Channel::Coupled { .. } => false,
            })
            .count() as i64
    };
    (count(twice_j) - count(twice_j + 2)).max(0) as u32
}

fn degeneracy_mismatches(j_max: f64) -> Result<usize> {
    let tmax = (2.0 * j_max).round() as i32;
    let mut bad = 0;
    for (sa, sb) in
        [(Spin::ZERO, Spin::ZERO), (Spin::HALF, Spin::ZERO), (Spin::ZERO, Spin::HALF), (Spin::HALF, Spin::HALF)]
    {
        for tj in 0..=tmax {
            let want = multiplicity_from_projections(tj, sa, sb);
            if degeneracy(tj as f64 / 2.0, sa.value(), sb.value())? != want {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

/// Expand, contract, couple and decouple a random band-limited state.
fn round_trip_errors(l_max: u32, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    let pair = PairLabel { s_a: Spin::HALF, s_b: Spin::HALF, ..PairLabel::spinless(1.0, 3.0)? };
    let ext = MomentumGrid::centered(3, 2, 1.0)?;
    let radial = RadialGrid::new(3, 2.0)?;
    let n = ext.len() * radial.len() * channel_set(Basis::Uncoupled, l_max, pair.s_a, pair.s_b).len();
    let amps = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let x = PartialWaveState::from_amplitudes(pair, ext, radial, l_max, Basis::Uncoupled, amps)?.normalized()?;
    let sampled = spherical_contract(&x, &AngularQuadrature::for_lmax(l_max))?;
    let back = spherical_expand(&sampled, l_max as i64)?;
    let spherical = dist(x.amplitudes(), back.amplitudes());
    let recoupled = decouple_channels(&couple_channels(&x)?)?;
    Ok((spherical, dist(x.amplitudes(), recoupled.amplitudes())))
}

fn dist(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

pub fn run(p: &Params, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = law_checks(p, &mut rng)?;
    if let Some(a) = &p.angular {
        let tol = &p.tolerances;
        checks.push(Check::below("angular/cg_orthonormality", cg_orthonormality(a.cg_j_max), tol.orthonormality));
        checks.push(Check::close(
            "angular/degeneracy_mismatches",
            degeneracy_mismatches(a.degeneracy_j_max)? as f64,
            0.0,
            0.0,
        ));
        let (sph, cpl) = round_trip_errors(a.round_trip_l_max, &mut rng)?;
        checks.push(Check::below("angular/spherical_round_trip", sph, tol.round_trip));
        checks.push(Check::below("angular/coupling_round_trip", cpl, tol.round_trip));
    }
    Ok(checks)
}
