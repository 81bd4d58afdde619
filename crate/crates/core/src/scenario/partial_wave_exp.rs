use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::gaussian_exp::{Center, PacketSpec};
use super::{config_error, Check};
use crate::error::Result;
use crate::galilei::random_commensurate;
use crate::hilbert::MomentumGrid;
use crate::partialwave::{
    apply_galilei, couple_channels, spherical_expand, AngularQuadrature, PairLabel, PartialWaveState, RadialGrid,
    SampledPair,
};
use crate::scattering::{apply_smatrix, scatter_pointwise_3d, PhaseShiftModel, PhaseTable};
use crate::spin::Spin;
use crate::tensor::ray_distance;
use crate::tps::{entanglement_measures, matrix_spectrum, schmidt_spectrum, TensorProductStructure};

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub ie_entropy: f64,
    pub norm: f64,
    pub commutation: f64,
    /// Smallest interparticle entropy change the pointwise demo must show.
    pub interparticle_change: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ie_entropy: 1e-8, norm: 1e-12, commutation: 1e-9, interparticle_change: 1e-3 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pointwise {
    #[serde(default = "default_pointwise_n")]
    pub n: usize,
    #[serde(default = "default_cover")]
    pub cover_sigmas: f64,
    #[serde(default = "default_pointwise_a")]
    pub a: PacketSpec,
    #[serde(default = "default_pointwise_b")]
    pub b: PacketSpec,
}

impl Default for Pointwise {
    fn default() -> Self {
        Self {
            n: default_pointwise_n(),
            cover_sigmas: default_cover(),
            a: default_pointwise_a(),
            b: default_pointwise_b(),
        }
    }
}

fn default_pointwise_n() -> usize {
    6
}
fn default_cover() -> f64 {
    2.5
}
fn packet(mass: f64, sigma: f64, x: f64) -> PacketSpec {
    PacketSpec { mass, sigma, center: Center::Vector([x, 0.0, 0.0]), internal_energy: 0.0 }
}
fn default_pointwise_a() -> PacketSpec {
    packet(1.0, 1.0, 1.0)
}
fn default_pointwise_b() -> PacketSpec {
    packet(4.0, 2.0, -1.0)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_tables")]
    pub tables: usize,
    #[serde(default = "default_lmax")]
    pub l_max: u32,
    #[serde(default = "default_nr")]
    pub n_r: usize,
    #[serde(default = "default_qmax")]
    pub q_max: f64,
    /// Knots per channel in each random table.
    #[serde(default = "default_knots")]
    pub knots: usize,
    #[serde(default = "default_ext_n")]
    pub external_n: usize,
    #[serde(default = "default_ext_spacing")]
    pub external_spacing: f64,
    #[serde(default = "default_a")]
    pub a: PacketSpec,
    #[serde(default = "default_b")]
    pub b: PacketSpec,
    #[serde(default = "default_spin_a")]
    pub spin_a: Spin,
    #[serde(default)]
    pub spin_b: Spin,
    /// Model string for the commutation and pointwise sections.
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default = "default_commutation")]
    pub commutation_elements: usize,
    #[serde(default = "default_steps")]
    pub max_steps: i32,
    /// `null` skips the pointwise section.
    #[serde(default = "default_pointwise")]
    pub pointwise: Option<Pointwise>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_tables() -> usize {
    50
}
fn default_lmax() -> u32 {
    8
}
fn default_nr() -> usize {
    128
}
fn default_qmax() -> f64 {
    6.0
}
fn default_knots() -> usize {
    16
}
fn default_ext_n() -> usize {
    3
}
fn default_ext_spacing() -> f64 {
    0.5
}
fn default_a() -> PacketSpec {
    packet(1.0, 1.0, 0.3)
}
fn default_b() -> PacketSpec {
    packet(2.0, 1.6, -0.2)
}
fn default_spin_a() -> Spin {
    Spin::HALF
}
fn default_model() -> String {
    "hard_sphere:1.0".into()
}
fn default_commutation() -> usize {
    20
}
fn default_steps() -> i32 {
    1
}
fn default_pointwise() -> Option<Pointwise> {
    Some(Pointwise::default())
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if self.l_max > 16 {
            return Err(config_error("/parameters/l_max", "l_max must be at most 16"));
        }
        if self.n_r == 0 || self.n_r > 1024 {
            return Err(config_error("/parameters/n_r", "n_r must lie in 1..=1024"));
        }
        if !(self.q_max > 0.0) || !self.q_max.is_finite() {
            return Err(config_error("/parameters/q_max", "q_max must be positive"));
        }
        if self.knots < 2 {
            return Err(config_error("/parameters/knots", "need at least two knots"));
        }
        if self.external_n == 0 || self.external_n > 9 {
            return Err(config_error("/parameters/external_n", "external_n must lie in 1..=9"));
        }
        if !(self.external_spacing > 0.0) {
            return Err(config_error("/parameters/external_spacing", "spacing must be positive"));
        }
        self.a.validate("/parameters/a")?;
        self.b.validate("/parameters/b")?;
        for (name, s) in [("spin_a", self.spin_a), ("spin_b", self.spin_b)] {
            if s.twice() > 1 {
                return Err(config_error(&format!("/parameters/{name}"), "spins are limited to 0 and 1/2"));
            }
        }
        self.model_parsed()?;
        if self.max_steps < 0 {
            return Err(config_error("/parameters/max_steps", "must be non-negative"));
        }
        if let Some(pw) = &self.pointwise {
            if pw.n < 2 || pw.n > 12 {
                return Err(config_error("/parameters/pointwise/n", "n must lie in 2..=12"));
            }
            if !(pw.cover_sigmas > 0.0) {
                return Err(config_error("/parameters/pointwise/cover_sigmas", "must be positive"));
            }
            pw.a.validate("/parameters/pointwise/a")?;
            pw.b.validate("/parameters/pointwise/b")?;
        }
        Ok(())
    }

    fn model_parsed(&self) -> Result<PhaseShiftModel> {
        let m: PhaseShiftModel = self.model.parse().map_err(|e| config_error("/parameters/model", format!("{e}")))?;
        m.validate().map_err(|e| config_error("/parameters/model", format!("{e}")))?;
        Ok(m)
    }
}

fn random_spinor(rng: &mut ChaCha8Rng, s: Spin) -> Vec<C64> {
    (0..s.dim()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// Product Gaussian in particle momenta times product spinors, expanded
/// into coupled partial waves.
fn gaussian_state(p: &Params, rng: &mut ChaCha8Rng) -> Result<PartialWaveState> {
    let (ga, gb) = (p.a.packet(), p.b.packet());
    let pair = PairLabel {
        m_a: ga.mass,
        m_b: gb.mass,
        w_a: ga.internal_energy,
        w_b: gb.internal_energy,
        s_a: p.spin_a,
        s_b: p.spin_b,
    };
    let (xa, xb) = (random_spinor(rng, p.spin_a), random_spinor(rng, p.spin_b));
    let external = MomentumGrid::centered(3, p.external_n, p.external_spacing)?;
    let radial = RadialGrid::new(p.n_r, p.q_max)?;
    let sampled =
        SampledPair::from_fn(pair, external, radial, AngularQuadrature::for_lmax(p.l_max), |pp, q, ia, ib| {
            let (pa, pb) = pair.particle_momenta(pp, q);
            xa[ia] * xb[ib] * (ga.amplitude(&pa, 3) * gb.amplitude(&pb, 3))
        })?;
    couple_channels(&spherical_expand(&sampled, p.l_max as i64)?)?.normalized()
}

fn ie_entropy(x: &PartialWaveState, tps: &TensorProductStructure) -> Result<f64> {
    Ok(entanglement_measures(&schmidt_spectrum(x, tps)?).entropy)
}

fn pointwise_checks(p: &Pointwise, l_max: u32, model: &PhaseShiftModel, tol: f64) -> Result<Vec<Check>> {
    let (ga, gb) = (p.a.packet(), p.b.packet());
    let pair = PairLabel::spinless(ga.mass, gb.mass)?;
    let grid = |g: &crate::gaussian::GaussianPacket| {
        let half = p.cover_sigmas * g.sigma;
        let origin: Vec<f64> = g.center.iter().map(|c| c - half).collect();
        MomentumGrid::new(3, p.n, 2.0 * half / (p.n - 1) as f64, &origin)
    };
    let (grid_a, grid_b) = (grid(&ga)?, grid(&gb)?);
    let res =
        scatter_pointwise_3d(&pair, &grid_a, &grid_b, model, l_max, &AngularQuadrature::for_lmax(l_max), |x, y| {
            C64::new(ga.amplitude(x, 3) * gb.amplitude(y, 3), 0.0)
        })?;
    let before = entanglement_measures(&matrix_spectrum(res.reference)?).entropy;
    let after = entanglement_measures(&matrix_spectrum(res.out)?).entropy;
    Ok(vec![
        Check::record("pointwise/in_entropy", before),
        Check::record("pointwise/out_entropy", after),
        Check::above("pointwise/entropy_change", (after - before).abs(), tol),
    ])
}

pub fn run(p: &Params, seed: u64, smatrix: Option<&PhaseShiftModel>) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = match smatrix {
        Some(m) => m.clone(),
        None => p.model_parsed()?,
    };
    let tps = TensorProductStructure::named("P|int")?;
    let x = gaussian_state(p, &mut rng)?;
    let k_max = x.radial().q(p.n_r - 1);
    let s0 = ie_entropy(&x, &tps)?;
    let n0 = x.norm();
    let (mut max_ds, mut max_dn) = (0.0f64, 0.0f64);
    for _ in 0..p.tables {
        let table = PhaseTable::random(&mut rng, p.l_max, p.spin_a, p.spin_b, k_max, p.knots)?;
        let y = apply_smatrix(&x, &PhaseShiftModel::Table(table))?;
        max_ds = max_ds.max((ie_entropy(&y, &tps)? - s0).abs());
        max_dn = max_dn.max((y.norm() - n0).abs());
    }
    let mut checks = vec![Check::record("ie_entropy", s0)];
    if p.tables > 0 {
        checks.push(Check::record("tables", p.tables as f64));
        checks.push(Check::below("tables/max_ie_entropy_change", max_ds, p.tolerances.ie_entropy));
        checks.push(Check::below("tables/max_norm_drift", max_dn, p.tolerances.norm));
    }

    let quantum = p.external_spacing / x.pair().total_mass();
    let mut max_dist = 0.0f64;
    for _ in 0..p.commutation_elements {
        let g = random_commensurate(&mut rng, 3, quantum, p.max_steps, 2.0, 1.0);
        let lhs = apply_galilei(&g, &apply_smatrix(&x, &model)?)?;
        let rhs = apply_smatrix(&apply_galilei(&g, &x)?, &model)?;
        max_dist = max_dist.max(ray_distance(lhs.amplitudes(), rhs.amplitudes()));
    }
    if p.commutation_elements > 0 {
        checks.push(Check::record("commutation/elements", p.commutation_elements as f64));
        checks.push(Check::below("commutation/max_ray_distance", max_dist, p.tolerances.commutation));
    }

    if let Some(pw) = &p.pointwise {
        checks.extend(pointwise_checks(pw, p.l_max, &model, p.tolerances.interparticle_change)?);
    }
    Ok(checks)
}
