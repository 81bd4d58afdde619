use serde::Deserialize;

use super::gaussian_exp::{Case, Expect, GridSpec};
use super::{config_error, Check};
use crate::error::Result;
use crate::gaussian::GaussianPacket;
use crate::hilbert::{norm, normalize, sample_gaussian_pair, MomentumGrid, State, TwoParticleState};
use crate::scattering::{apply_1d_hardcore, hardcore_gaussian_out, OneDHardCore};
use crate::tps::{entanglement_measures, schmidt_spectrum, to_com_variables, Direction, TensorProductStructure};

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub product: f64,
    pub entangled: f64,
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { product: 1e-6, entangled: 1e-3, exact: 1e-12 }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub cases: Vec<Case>,
    #[serde(default)]
    pub core_radius: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// For equal masses, also run the exact lattice reflection and compare.
    #[serde(default = "yes")]
    pub lattice_checks: bool,
}

fn yes() -> bool {
    true
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate("/parameters/grid")?;
        if !(self.core_radius >= 0.0) {
            return Err(config_error("/parameters/core_radius", "core radius must be non-negative"));
        }
        if self.cases.is_empty() {
            return Err(config_error("/parameters/cases", "need at least one case"));
        }
        for (i, c) in self.cases.iter().enumerate() {
            c.a.validate(&format!("/parameters/cases/{i}/a"))?;
            c.b.validate(&format!("/parameters/cases/{i}/b"))?;
        }
        Ok(())
    }
}

/// Centers and widths of the momentum marginals after the reflection
/// `(k_A, k_B) -> ((m_A - m_B) k_A + 2 m_A k_B, 2 m_B k_A + (m_B - m_A) k_B) / M`.
fn out_packets(a: &GaussianPacket, b: &GaussianPacket) -> (GaussianPacket, GaussianPacket) {
    let (ma, mb) = (a.mass, b.mass);
    let m = ma + mb;
    let (ca, cb) = (a.center[0], b.center[0]);
    let pa = GaussianPacket::new(
        ma,
        ((ma - mb) * a.sigma).hypot(2.0 * ma * b.sigma) / m,
        ((ma - mb) * ca + 2.0 * ma * cb) / m,
    );
    let pb = GaussianPacket::new(
        mb,
        (2.0 * mb * a.sigma).hypot((mb - ma) * b.sigma) / m,
        (2.0 * mb * ca + (mb - ma) * cb) / m,
    );
    (pa, pb)
}

fn interparticle(x: &TwoParticleState) -> Result<f64> {
    Ok(entanglement_measures(&schmidt_spectrum(x, &TensorProductStructure::named("A|B")?)?).entropy)
}

fn max_diff(x: &TwoParticleState, y: &TwoParticleState) -> f64 {
    x.amplitudes().iter().zip(y.amplitudes()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

pub fn run(p: &Params) -> Result<Vec<Check>> {
    let core = OneDHardCore::new(p.core_radius)?;
    let t = &p.tolerances;
    let mut checks = Vec::new();
    for c in &p.cases {
        let (a, b) = (c.a.packet(), c.b.packet());
        let (ga, gb) = p.grid.grids(&a, &b)?;
        let s_in = interparticle(&normalize(&sample_gaussian_pair(&a, &b, &ga, &gb)?)?)?;
        let (oa, ob) = out_packets(&a, &b);
        let (oga, ogb) = p.grid.grids(&oa, &ob)?;
        let out = hardcore_gaussian_out(&a, &b, &oga, &ogb, &core)?;
        let out_norm = norm(&out);
        let s_out = interparticle(&normalize(&out)?)?;
        checks.push(Check::record(format!("{}/in_entropy", c.name), s_in));
        checks.push(Check::record(format!("{}/out_norm", c.name), out_norm));
        let name = format!("{}/out_entropy", c.name);
        checks.push(match c.expect {
            Expect::Product => Check::below(name, s_out, t.product),
            Expect::Entangled => Check::above(name, s_out, t.entangled),
            Expect::Any => Check::record(name, s_out),
        });
        checks.push(Check::record(format!("{}/entropy_change", c.name), s_out - s_in));
        if p.lattice_checks && a.mass == b.mass {
            // one grid for both particles keeps the relative lattice symmetric
            let lo = (ga.origin()[0]).min(gb.origin()[0]).min(oga.origin()[0]).min(ogb.origin()[0]);
            let hi = [&ga, &gb, &oga, &ogb].iter().map(|g| g.axis_range(0).1).fold(f64::MIN, f64::max);
            let n = ((hi - lo) / ga.spacing()).ceil() as usize + 1;
            let grid = MomentumGrid::new(1, n, ga.spacing(), &[lo])?;
            let x = sample_gaussian_pair(&a, &b, &grid, &grid)?;
            let com = to_com_variables(&x, Direction::Forward)?;
            let reflected = apply_1d_hardcore(&com, &core)?;
            let lattice = to_com_variables(&reflected, Direction::Inverse)?;
            let sampled = hardcore_gaussian_out(&a, &b, &grid, &grid, &core)?;
            checks.push(Check::below(format!("{}/lattice_vs_sampled", c.name), max_diff(&lattice, &sampled), t.exact));
            checks.push(Check::below(format!("{}/norm_drift", c.name), (norm(&reflected) - norm(&com)).abs(), t.exact));
            if p.core_radius == 0.0 {
                let twice = apply_1d_hardcore(&reflected, &core)?;
                checks.push(Check::below(format!("{}/involution", c.name), max_diff(&twice, &com), t.exact));
            }
        }
    }
    Ok(checks)
}
