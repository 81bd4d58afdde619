//! Elastic S-operators: phase-shift models, their diagonal action on
//! partial-wave channels, and the 1D hard-core reflection.

mod bessel;
mod hardcore;
mod pointwise;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partialwave::{Basis, Channel, PartialWaveState};
use crate::spin::{twice_of, Spin};

pub use bessel::{spherical_j, spherical_y};
pub use hardcore::{apply_1d_hardcore, hardcore_gaussian_out, reflect_sampled, OneDHardCore};
pub use pointwise::{scatter_pointwise_3d, PointwiseScattering};

/// Largest step in `k a` between unwrapping samples of an `atan2` phase.
const UNWRAP_STEP: f64 = 0.25;

/// `(l, 2s, 2j)` key of a scattering channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ChannelKey {
    pub l: u32,
    pub twice_s: u32,
    pub twice_j: u32,
}

impl ChannelKey {
    pub fn spinless(l: u32) -> Self {
        Self { l, twice_s: 0, twice_j: 2 * l }
    }

    pub fn new(l: u32, s: f64, j: f64) -> Result<Self> {
        let (ts, tj) = (twice_of(s)?, twice_of(j)?);
        if ts < 0 || tj < 0 || tj < (2 * l as i32 - ts).abs() || tj > 2 * l as i32 + ts {
            return Err(Error::InvalidParameter(format!("(l={l}, s={s}, j={j}) violates the triangle rule")));
        }
        Ok(Self { l, twice_s: ts as u32, twice_j: tj as u32 })
    }

    fn of(ch: &Channel, spinless: bool) -> Result<Self> {
        match *ch {
            Channel::Coupled { twice_j, l, twice_s, .. } => Ok(Self { l, twice_s, twice_j }),
            Channel::Uncoupled { l, .. } if spinless => Ok(Self::spinless(l)),
            Channel::Uncoupled { .. } => {
                Err(Error::InvalidParameter("phase shifts of spinning pairs need the coupled basis".into()))
            }
        }
    }

    fn missing(&self) -> Error {
        Error::MissingChannel { l: self.l, s: self.twice_s as f64 / 2.0, j: self.twice_j as f64 / 2.0 }
    }
}

/// Phase shifts `delta(l, s, j, k)` tabulated on a `k` grid per channel.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseTable {
    channels: BTreeMap<ChannelKey, Vec<(f64, f64)>>,
}

#[derive(Serialize, Deserialize)]
struct TableRow {
    k: f64,
    l: u32,
    s: f64,
    j: f64,
    delta: f64,
}

impl PhaseTable {
    pub fn new(channels: BTreeMap<ChannelKey, Vec<(f64, f64)>>) -> Result<Self> {
        for (key, pts) in &channels {
            if pts.len() < 2 {
                return Err(Error::InvalidParameter(format!("channel {key:?} needs at least two k points")));
            }
            if pts.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                return Err(Error::InvalidParameter(format!("k values of channel {key:?} must increase strictly")));
            }
            if pts.iter().any(|(k, d)| !k.is_finite() || !d.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite entry in channel {key:?}")));
            }
        }
        Ok(Self { channels })
    }

    /// Reads CSV with header `k,l,s,j,delta`; rows may come in any order.
    pub fn from_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let mut channels: BTreeMap<ChannelKey, Vec<(f64, f64)>> = BTreeMap::new();
        for row in reader.deserialize() {
            let row: TableRow = row?;
            channels.entry(ChannelKey::new(row.l, row.s, row.j)?).or_default().push((row.k, row.delta));
        }
        for pts in channels.values_mut() {
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Self::new(channels)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for (key, pts) in &self.channels {
            for &(k, delta) in pts {
                w.serialize(TableRow { k, l: key.l, s: key.twice_s as f64 / 2.0, j: key.twice_j as f64 / 2.0, delta })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Random phase shifts in `(-pi/2, pi/2)` at `n_k` equally spaced
    /// momenta on `[0, k_max]` for every channel with `l <= l_max`.
    pub fn random<R: Rng>(rng: &mut R, l_max: u32, s_a: Spin, s_b: Spin, k_max: f64, n_k: usize) -> Result<Self> {
        if n_k < 2 || !(k_max > 0.0) {
            return Err(Error::InvalidParameter("random table needs n_k >= 2 and k_max > 0".into()));
        }
        let mut channels = BTreeMap::new();
        let (ta, tb) = (s_a.twice() as i32, s_b.twice() as i32);
        for l in 0..=l_max {
            for ts in ((ta - tb).abs()..=ta + tb).step_by(2) {
                for tj in (((2 * l as i32) - ts).abs()..=2 * l as i32 + ts).step_by(2) {
                    let key = ChannelKey { l, twice_s: ts as u32, twice_j: tj as u32 };
                    let pts = (0..n_k)
                        .map(|i| {
                            let k = k_max * i as f64 / (n_k - 1) as f64;
                            (k, rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2))
                        })
                        .collect();
                    channels.insert(key, pts);
                }
            }
        }
        Self::new(channels)
    }

    pub fn keys(&self) -> impl Iterator<Item = &ChannelKey> {
        self.channels.keys()
    }

    /// Linear interpolation; no extrapolation.
    pub fn delta(&self, key: ChannelKey, k: f64) -> Result<f64> {
        let pts = self.channels.get(&key).ok_or_else(|| key.missing())?;
        let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
        if !(k >= lo && k <= hi) {
            return Err(Error::OutOfRange { k, lo, hi });
        }
        let i = pts.partition_point(|p| p.0 <= k).clamp(1, pts.len() - 1);
        let ((k0, d0), (k1, d1)) = (pts[i - 1], pts[i]);
        Ok(d0 + (d1 - d0) * (k - k0) / (k1 - k0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseShiftModel {
    Zero,
    HardSphere {
        radius: f64,
    },
    /// Attractive well `-V0` for `r < a`; acts in `l = 0` only.
    SquareWell {
        depth: f64,
        radius: f64,
        reduced_mass: f64,
    },
    Table(PhaseTable),
}

impl PhaseShiftModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        match self {
            PhaseShiftModel::HardSphere { radius } if !(*radius >= 0.0) || !radius.is_finite() => {
                bad("hard-sphere radius must be non-negative")
            }
            PhaseShiftModel::SquareWell { depth, radius, reduced_mass }
                if !(*radius >= 0.0 && *reduced_mass > 0.0) || !depth.is_finite() =>
            {
                bad("square well needs radius >= 0, reduced_mass > 0 and a finite depth")
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PhaseShiftModel::Zero => "zero",
            PhaseShiftModel::HardSphere { .. } => "hard_sphere",
            PhaseShiftModel::SquareWell { .. } => "square_well",
            PhaseShiftModel::Table(_) => "table",
        }
    }

    /// `delta(l, s, j, k)` for `k > 0`.
    pub fn phase_shift(&self, key: ChannelKey, k: f64) -> Result<f64> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!("phase shifts need k > 0 (got {k})")));
        }
        match self {
            PhaseShiftModel::Zero => Ok(0.0),
            PhaseShiftModel::HardSphere { radius } => Ok(hard_sphere(key.l as usize, k * radius)[key.l as usize]),
            PhaseShiftModel::SquareWell { depth, radius, reduced_mass } => {
                if key.l != 0 {
                    return Ok(0.0);
                }
                let kk2 = k * k + 2.0 * reduced_mass * depth;
                if kk2 <= 0.0 {
                    return Err(Error::InvalidParameter("square well below threshold inside the well".into()));
                }
                let kk = kk2.sqrt();
                // tan(k a + delta) = (k / k') tan(k' a), principal branch
                let delta = (k / kk * (kk * radius).tan()).atan() - k * radius;
                Ok(delta)
            }
            PhaseShiftModel::Table(t) => t.delta(key, k),
        }
    }

    /// Phase shifts for all `l <= l_max` in the spinless channels.
    pub fn spinless_shifts(&self, l_max: u32, k: f64) -> Result<Vec<f64>> {
        match self {
            PhaseShiftModel::HardSphere { radius } => {
                if !(k > 0.0) {
                    return Err(Error::InvalidParameter(format!("phase shifts need k > 0 (got {k})")));
                }
                Ok(hard_sphere(l_max as usize, k * radius))
            }
            _ => (0..=l_max).map(|l| self.phase_shift(ChannelKey::spinless(l), k)).collect(),
        }
    }
}

impl fmt::Display for PhaseShiftModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseShiftModel::Zero => write!(f, "zero"),
            PhaseShiftModel::HardSphere { radius } => write!(f, "hard_sphere:{radius}"),
            PhaseShiftModel::SquareWell { depth, radius, reduced_mass } => {
                write!(f, "square_well:{depth},{radius},{reduced_mass}")
            }
            PhaseShiftModel::Table(t) => write!(f, "table({} channels)", t.channels.len()),
        }
    }
}

/// Parses `zero`, `hard_sphere:A`, `square_well:V0,A,MU` or `table:PATH`.
impl FromStr for PhaseShiftModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = |n: usize| -> Result<Vec<f64>> {
            let v: Vec<f64> = args
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidParameter(format!("bad number in '{s}': {e}")))?;
            if v.len() != n {
                return Err(Error::InvalidParameter(format!("'{kind}' takes {n} parameter(s)")));
            }
            Ok(v)
        };
        let model = match kind.trim() {
            "zero" => PhaseShiftModel::Zero,
            "hard_sphere" => PhaseShiftModel::HardSphere { radius: nums(1)?[0] },
            "square_well" => {
                let v = nums(3)?;
                PhaseShiftModel::SquareWell { depth: v[0], radius: v[1], reduced_mass: v[2] }
            }
            "table" => PhaseShiftModel::Table(PhaseTable::load(Path::new(args))?),
            other => return Err(Error::InvalidParameter(format!("unknown phase-shift model '{other}'"))),
        };
        model.validate()?;
        Ok(model)
    }
}

/// Hard-sphere shifts `delta_l = -theta_l(x)`, `x = k a`, where `theta_l`
/// is `atan2(j_l, -y_l)` unwrapped from `theta_l(0) = 0`.
fn hard_sphere(l_max: usize, x: f64) -> Vec<f64> {
    let mut theta = vec![0.0; l_max + 1];
    if x == 0.0 {
        return theta;
    }
    let steps = (x / UNWRAP_STEP).ceil().max(1.0) as usize;
    for i in 1..=steps {
        let xi = x * i as f64 / steps as f64;
        let (j, y) = (spherical_j(l_max, xi), spherical_y(l_max, xi));
        for l in 0..=l_max {
            let raw = j[l].atan2(-y[l]);
            let turns = ((theta[l] - raw) / std::f64::consts::TAU).round();
            theta[l] = raw + turns * std::f64::consts::TAU;
        }
    }
    theta.iter().map(|t| -t).collect()
}

/// Multiplies every internal amplitude by `e^{2 i delta(l, s, j, |q|)}`.
/// The external factor is untouched.
pub fn apply_smatrix(x: &PartialWaveState, model: &PhaseShiftModel) -> Result<PartialWaveState> {
    model.validate()?;
    if *model == PhaseShiftModel::Zero {
        return Ok(x.clone());
    }
    let spinless = x.pair().s_a == Spin::ZERO && x.pair().s_b == Spin::ZERO;
    let keys: Vec<ChannelKey> = x.channels().iter().map(|c| ChannelKey::of(c, spinless)).collect::<Result<_>>()?;
    debug_assert!(x.basis() == Basis::Coupled || spinless);
    let [ne, nr, nc] = x.dims();
    let mut cache: BTreeMap<(ChannelKey, usize), C64> = BTreeMap::new();
    let mut phases = vec![C64::new(0.0, 0.0); nr * nc];
    for r in 0..nr {
        let k = x.radial().q(r);
        for (c, key) in keys.iter().enumerate() {
            let z = match cache.get(&(*key, r)) {
                Some(z) => *z,
                None => {
                    let z = C64::from_polar(1.0, 2.0 * model.phase_shift(*key, k)?);
                    cache.insert((*key, r), z);
                    z
                }
            };
            phases[r * nc + c] = z;
        }
    }
    let mut out = x.amplitudes().to_vec();
    for e in 0..ne {
        for (z, p) in out[e * nr * nc..(e + 1) * nr * nc].iter_mut().zip(&phases) {
            *z *= p;
        }
    }
    Ok(x.with_amplitudes(out))
}

#[cfg(test)]
mod tests;
