use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::{config_error, Check};
use crate::error::Result;
use crate::gaussian::{analytic_ie_entropy, com_quadratic_form, GaussianPacket};
use crate::hilbert::{sample_gaussian_pair, MomentumGrid, TwoParticleState};
use crate::tps::{
    entanglement_measures, schmidt_spectrum, to_com_variables, Direction, SchmidtSpectrum, TensorProductStructure,
};

/// Packet as written in scenario files; `center` may be a number (first
/// axis) or a 3-vector.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub mass: f64,
    pub sigma: f64,
    #[serde(default)]
    pub center: Center,
    #[serde(default)]
    pub internal_energy: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Center {
    Scalar(f64),
    Vector([f64; 3]),
}

impl Default for Center {
    fn default() -> Self {
        Center::Scalar(0.0)
    }
}

impl PacketSpec {
    pub fn packet(&self) -> GaussianPacket {
        let center = match self.center {
            Center::Scalar(x) => [x, 0.0, 0.0],
            Center::Vector(v) => v,
        };
        GaussianPacket { mass: self.mass, sigma: self.sigma, center, internal_energy: self.internal_energy }
    }

    pub fn validate(&self, at: &str) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(config_error(&format!("{at}/mass"), "mass must be positive"));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(config_error(&format!("{at}/sigma"), "sigma must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Product,
    Entangled,
    #[default]
    Any,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Case {
    pub name: String,
    pub a: PacketSpec,
    pub b: PacketSpec,
    #[serde(default)]
    pub expect: Expect,
}

/// Pair of 1D grids sharing one spacing that cover `cover_sigmas` widths
/// of the wider packet around each center.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub n: usize,
    pub cover_sigmas: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n: 256, cover_sigmas: 6.0 }
    }
}

impl GridSpec {
    pub fn validate(&self, at: &str) -> Result<()> {
        if self.n < 8 || self.n > 4096 {
            return Err(config_error(&format!("{at}/n"), "n must lie in 8..=4096"));
        }
        if !(self.cover_sigmas > 0.0) {
            return Err(config_error(&format!("{at}/cover_sigmas"), "cover_sigmas must be positive"));
        }
        Ok(())
    }

    pub fn grids(&self, a: &GaussianPacket, b: &GaussianPacket) -> Result<(MomentumGrid, MomentumGrid)> {
        let dp = 2.0 * self.cover_sigmas * a.sigma.max(b.sigma) / (self.n as f64 - 1.0);
        Ok((MomentumGrid::around(a.center[0], self.n, dp)?, MomentumGrid::around(b.center[0], self.n, dp)?))
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub product: f64,
    pub entangled: f64,
    pub closed_form: f64,
    pub spectrum: f64,
    pub top: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { product: 1e-8, entangled: 1e-3, closed_form: 1e-6, spectrum: 1e-6, top: 10 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomPairs {
    pub count: usize,
    /// Masses are `r / 2` and `s / 2` with `1 <= r, s <= max_ratio_term`.
    #[serde(default = "default_ratio_term")]
    pub max_ratio_term: u32,
    #[serde(default = "default_sigma_range")]
    pub sigma_range: [f64; 2],
    #[serde(default = "default_center_range")]
    pub center_range: f64,
}

fn default_ratio_term() -> u32 {
    5
}

fn default_sigma_range() -> [f64; 2] {
    [0.7, 1.4]
}

fn default_center_range() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default)]
    pub cases: Vec<Case>,
    #[serde(default)]
    pub random_pairs: Option<RandomPairs>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate("/parameters/grid")?;
        for (i, c) in self.cases.iter().enumerate() {
            c.a.validate(&format!("/parameters/cases/{i}/a"))?;
            c.b.validate(&format!("/parameters/cases/{i}/b"))?;
        }
        if let Some(r) = &self.random_pairs {
            let [lo, hi] = r.sigma_range;
            if !(lo > 0.0 && hi >= lo) {
                return Err(config_error("/parameters/random_pairs/sigma_range", "need 0 < lo <= hi"));
            }
            if r.max_ratio_term == 0 || 2 * r.max_ratio_term > crate::tps::MAX_RATIO_SUM {
                return Err(config_error("/parameters/random_pairs/max_ratio_term", "must lie in 1..=8"));
            }
        }
        if self.cases.is_empty() && self.random_pairs.is_none() {
            return Err(config_error("/parameters", "nothing to run: give cases or random_pairs"));
        }
        Ok(())
    }
}

/// Numeric P|q spectrum of the sampled pair.
pub fn numeric_ie(
    a: &GaussianPacket,
    b: &GaussianPacket,
    grid: &GridSpec,
) -> Result<(TwoParticleState, SchmidtSpectrum)> {
    let (ga, gb) = grid.grids(a, b)?;
    let pair = sample_gaussian_pair(a, b, &ga, &gb)?;
    let com = to_com_variables(&pair, Direction::Forward)?;
    let spec = schmidt_spectrum(&com, &TensorProductStructure::named("P|q")?)?;
    Ok((pair, spec))
}

struct Comparison {
    numeric: f64,
    analytic: f64,
    gamma: f64,
    spectrum_error: f64,
}

fn compare(a: &GaussianPacket, b: &GaussianPacket, grid: &GridSpec, top: usize) -> Result<Comparison> {
    let (_, spec) = numeric_ie(a, b, grid)?;
    let form = com_quadratic_form(a, b, 1);
    let closed = analytic_ie_entropy(&form)?;
    let spectrum_error = closed
        .spectrum(top)
        .iter()
        .enumerate()
        .map(|(i, x)| (x - spec.values().get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max);
    Ok(Comparison {
        numeric: entanglement_measures(&spec).entropy,
        analytic: closed.entropy,
        gamma: form.gamma,
        spectrum_error,
    })
}

pub fn run(p: &Params, seed: u64) -> Result<Vec<Check>> {
    let t = &p.tolerances;
    let mut checks = Vec::new();
    for c in &p.cases {
        let (a, b) = (c.a.packet(), c.b.packet());
        let cmp = compare(&a, &b, &p.grid, t.top)?;
        checks.push(Check::record(format!("{}/gamma", c.name), cmp.gamma));
        let name = format!("{}/ie_entropy", c.name);
        checks.push(match c.expect {
            Expect::Product => Check::below(name, cmp.numeric, t.product),
            Expect::Entangled => Check::above(name, cmp.numeric, t.entangled),
            Expect::Any => Check::record(name, cmp.numeric),
        });
        checks.push(Check::close(format!("{}/closed_form_entropy", c.name), cmp.numeric, cmp.analytic, t.closed_form));
        checks.push(Check::below(format!("{}/spectrum_top{}_error", c.name, t.top), cmp.spectrum_error, t.spectrum));
    }
    if let Some(r) = &p.random_pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut worst_spec, mut worst_ent, mut max_entropy) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..r.count {
            let ra = rng.random_range(1..=r.max_ratio_term);
            let rb = rng.random_range(1..=r.max_ratio_term);
            let [lo, hi] = r.sigma_range;
            let a = GaussianPacket::new(
                ra as f64 / 2.0,
                rng.random_range(lo..=hi),
                rng.random_range(-r.center_range..=r.center_range),
            );
            let b = GaussianPacket::new(
                rb as f64 / 2.0,
                rng.random_range(lo..=hi),
                rng.random_range(-r.center_range..=r.center_range),
            );
            let cmp = compare(&a, &b, &p.grid, t.top)?;
            worst_spec = worst_spec.max(cmp.spectrum_error);
            worst_ent = worst_ent.max((cmp.numeric - cmp.analytic).abs());
            max_entropy = max_entropy.max(cmp.analytic);
        }
        checks.push(Check::record("random_pairs/count", r.count as f64));
        checks.push(Check::record("random_pairs/max_analytic_entropy", max_entropy));
        checks.push(Check::below(format!("random_pairs/max_spectrum_top{}_error", t.top), worst_spec, t.spectrum));
        checks.push(Check::below("random_pairs/max_entropy_error", worst_ent, t.closed_form));
    }
    Ok(checks)
}
