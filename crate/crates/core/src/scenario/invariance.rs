use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::{config_error, Check};
use crate::error::Result;
use crate::galilei::{apply_com, apply_single, apply_two, boost_quantum, random_commensurate};
use crate::gaussian::GaussianPacket;
use crate::hilbert::{normalize, MomentumGrid, ParticleLabel, SingleParticleState, State, TwoParticleState};
use crate::spin::Spin;
use crate::tps::{
    entanglement_measures, schmidt_spectrum, to_com_variables, Bipartite, Direction, TensorProductStructure,
};

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub entropy: f64,
    pub norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { entropy: 1e-9, norm: 1e-12 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub elements: usize,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    /// Masses are drawn from this list; ratios must be exactly relabelable.
    #[serde(default = "default_masses")]
    pub masses: Vec<f64>,
    #[serde(default = "default_sigma_range")]
    pub sigma_range: [f64; 2],
    #[serde(default = "default_center_range")]
    pub center_range: f64,
    #[serde(default = "default_steps")]
    pub max_steps: i32,
    #[serde(default = "default_a_max")]
    pub a_max: f64,
    #[serde(default = "default_b_max")]
    pub b_max: f64,
    #[serde(default = "default_spin")]
    pub spin_a: Spin,
    #[serde(default = "default_spin")]
    pub spin_b: Spin,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_n() -> usize {
    96
}
fn default_spacing() -> f64 {
    0.25
}
fn default_masses() -> Vec<f64> {
    vec![1.0, 2.0, 3.0]
}
fn default_sigma_range() -> [f64; 2] {
    [0.8, 1.2]
}
fn default_center_range() -> f64 {
    1.0
}
fn default_steps() -> i32 {
    2
}
fn default_a_max() -> f64 {
    2.0
}
fn default_b_max() -> f64 {
    1.0
}
fn default_spin() -> Spin {
    Spin::HALF
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || self.n > 1024 {
            return Err(config_error("/parameters/n", "n must lie in 8..=1024"));
        }
        if !(self.spacing > 0.0) {
            return Err(config_error("/parameters/spacing", "spacing must be positive"));
        }
        if self.masses.is_empty() || self.masses.iter().any(|m| !(*m > 0.0)) {
            return Err(config_error("/parameters/masses", "need at least one positive mass"));
        }
        for (i, &m) in self.masses.iter().enumerate() {
            if crate::tps::mass_ratio(self.masses[0], m).is_err() {
                return Err(config_error(&format!("/parameters/masses/{i}"), "mass ratio is not exactly relabelable"));
            }
        }
        let [lo, hi] = self.sigma_range;
        if !(lo > 0.0 && hi >= lo) {
            return Err(config_error("/parameters/sigma_range", "need 0 < lo <= hi"));
        }
        if self.max_steps < 0 {
            return Err(config_error("/parameters/max_steps", "must be non-negative"));
        }
        Ok(())
    }
}

/// Two Gaussian components with independent random spinors, so that the
/// momentum and spin factors are entangled.
fn random_components(rng: &mut ChaCha8Rng, p: &Params, mass: f64, spin: Spin) -> Vec<(GaussianPacket, Vec<C64>)> {
    let [lo, hi] = p.sigma_range;
    (0..2)
        .map(|_| {
            let g = GaussianPacket::new(
                mass,
                rng.random_range(lo..=hi),
                rng.random_range(-p.center_range..=p.center_range),
            );
            let chi =
                (0..spin.dim()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            (g, chi)
        })
        .collect()
}

fn eval(components: &[(GaussianPacket, Vec<C64>)], which: usize, p: f64, chi: usize) -> C64 {
    let (g, spinor) = &components[which];
    spinor[chi] * g.amplitude(&[p, 0.0, 0.0], 1)
}

fn entropy<S: Bipartite>(x: &S, tps: &TensorProductStructure) -> Result<f64> {
    Ok(entanglement_measures(&schmidt_spectrum(x, tps)?).entropy)
}

pub fn run(p: &Params, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = MomentumGrid::centered(1, p.n, p.spacing)?;
    let quantum = boost_quantum(&p.masses, p.spacing)?;
    let tps_ab = TensorProductStructure::named("A|B")?;
    let tps_ms = TensorProductStructure::named("(pA pB)|(sA sB)")?;
    let tps_single = TensorProductStructure::named("mom|spin")?;
    let tps_pq = TensorProductStructure::named("P|q")?;
    let mut drift = [0.0f64; 4];
    let mut base = [0.0f64; 4];
    let mut norm_drift = 0.0f64;
    for _ in 0..p.elements {
        let ma = p.masses[rng.random_range(0..p.masses.len())];
        let mb = p.masses[rng.random_range(0..p.masses.len())];
        let la = ParticleLabel::new(ma, 0.0, p.spin_a, grid.clone())?;
        let lb = ParticleLabel::new(mb, 0.0, p.spin_b, grid.clone())?;
        let ca = random_components(&mut rng, p, ma, p.spin_a);
        let cb = random_components(&mut rng, p, mb, p.spin_b);
        let weight = C64::new(rng.random_range(0.3..1.0), rng.random_range(-1.0..1.0));
        let single = normalize(&SingleParticleState::from_fn(la.clone(), |q, chi| {
            eval(&ca, 0, q[0], chi) + eval(&ca, 1, q[0], chi)
        }))?;
        let pair = normalize(&TwoParticleState::from_fn(la, lb, |pa, xa, pb, xb| {
            eval(&ca, 0, pa, xa) * eval(&cb, 0, pb, xb) + weight * eval(&ca, 1, pa, xa) * eval(&cb, 1, pb, xb)
        })?)?;
        let com = to_com_variables(&pair, Direction::Forward)?;
        let g = random_commensurate(&mut rng, 1, quantum, p.max_steps, p.a_max, p.b_max);

        let single_out = apply_single(&g, &single)?;
        let pair_out = apply_two(&g, &pair)?;
        let com_out = apply_com(&g, &com)?;
        let before = [
            entropy(&pair, &tps_ab)?,
            entropy(&pair, &tps_ms)?,
            entropy(&single, &tps_single)?,
            entropy(&com, &tps_pq)?,
        ];
        let after = [
            entropy(&pair_out, &tps_ab)?,
            entropy(&pair_out, &tps_ms)?,
            entropy(&single_out, &tps_single)?,
            entropy(&com_out, &tps_pq)?,
        ];
        for i in 0..4 {
            drift[i] = drift[i].max((before[i] - after[i]).abs());
            base[i] = base[i].max(before[i]);
        }
        for (x, y) in [(single.norm(), single_out.norm()), (pair.norm(), pair_out.norm()), (com.norm(), com_out.norm())]
        {
            norm_drift = norm_drift.max((x - y).abs());
        }
    }
    let names = ["A|B", "(pA pB)|(sA sB)", "mom|spin", "P|q"];
    let mut checks = vec![Check::record("elements", p.elements as f64)];
    for i in 0..4 {
        checks.push(Check::record(format!("{}/max_entropy", names[i]), base[i]));
        checks.push(Check::below(format!("{}/max_entropy_drift", names[i]), drift[i], p.tolerances.entropy));
    }
    checks.push(Check::below("max_norm_drift", norm_drift, p.tolerances.norm));
    Ok(checks)
}
