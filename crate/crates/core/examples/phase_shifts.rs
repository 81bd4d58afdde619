//! Phase-shift models: hard sphere, square well and an interpolated table,
//! applied to a partial-wave state. The P|int entropy never changes.

use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpslab::hilbert::MomentumGrid;
use tpslab::partialwave::{channel_set, Basis, PairLabel, PartialWaveState, RadialGrid};
use tpslab::scattering::{apply_smatrix, ChannelKey, PhaseShiftModel, PhaseTable};
use tpslab::spin::Spin;
use tpslab::tps::{entanglement_measures, schmidt_spectrum, TensorProductStructure};

fn main() -> tpslab::error::Result<()> {
    let hard = PhaseShiftModel::from_str("hard_sphere:0.5")?;
    let well = PhaseShiftModel::from_str("square_well:3.0,1.0,0.5")?;
    println!("{:>6} {:>12} {:>12} {:>12}", "k", "hs l=0", "hs l=1", "well l=0");
    for k in [0.5, 1.0, 2.0, 4.0] {
        println!(
            "{k:>6.2} {:>12.6} {:>12.6} {:>12.6}",
            hard.phase_shift(ChannelKey::spinless(0), k)?,
            hard.phase_shift(ChannelKey::spinless(1), k)?,
            well.phase_shift(ChannelKey::spinless(0), k)?
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l_max = 3;
    let pair = PairLabel::spinless(1.0, 3.0)?;
    let (ext, radial) = (MomentumGrid::centered(3, 3, 1.0)?, RadialGrid::new(16, 4.0)?);
    let n = ext.len() * radial.len() * channel_set(Basis::Coupled, l_max, Spin::ZERO, Spin::ZERO).len();
    let amps = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let x = PartialWaveState::from_amplitudes(pair, ext, radial, l_max, Basis::Coupled, amps)?.normalized()?;
    let table = PhaseTable::random(&mut rng, l_max, Spin::ZERO, Spin::ZERO, 4.0, 9)?;
    let tps = TensorProductStructure::named("P|int")?;
    let s = |y: &PartialWaveState| -> tpslab::error::Result<f64> {
        Ok(entanglement_measures(&schmidt_spectrum(y, &tps)?).entropy)
    };
    println!("before: S(P|int) = {:.12}", s(&x)?);
    for model in [hard, well, PhaseShiftModel::Table(table)] {
        let y = apply_smatrix(&x, &model)?;
        println!("{:<12} S(P|int) = {:.12}, norm {:.15}", model.name(), s(&y)?, y.norm());
    }
    Ok(())
}
