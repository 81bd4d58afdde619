//! Expands a sampled 3D two-particle state into partial waves, couples the
//! spins to total angular momentum and dumps one external point as CSV.

use num_complex::Complex64 as C64;

use tpslab::gaussian::GaussianPacket;
use tpslab::hilbert::MomentumGrid;
use tpslab::partialwave::{
    couple_channels, degeneracy, spherical_contract, spherical_expand, write_channels_csv, AngularQuadrature,
    PairLabel, RadialGrid, SampledPair,
};
use tpslab::spin::Spin;
use tpslab::tps::{entanglement_measures, schmidt_spectrum, TensorProductStructure};

fn main() -> tpslab::error::Result<()> {
    let l_max = 4;
    let pair = PairLabel { s_a: Spin::HALF, s_b: Spin::HALF, ..PairLabel::spinless(1.0, 2.0)? };
    let a = GaussianPacket::new(1.0, 1.0, 0.4);
    let b = GaussianPacket::new(2.0, 1.5, 0.0);
    let quad = AngularQuadrature::for_lmax(l_max);
    let sampled = SampledPair::from_fn(
        pair,
        MomentumGrid::centered(3, 3, 0.5)?,
        RadialGrid::new(24, 5.0)?,
        quad.clone(),
        |p, q, ia, ib| {
            let (pa, pb) = pair.particle_momenta(p, q);
            // spin singlet times the product of packets
            let singlet = match (ia, ib) {
                (0, 1) => 1.0,
                (1, 0) => -1.0,
                _ => 0.0,
            };
            C64::new(singlet * a.amplitude(&pa, 3) * b.amplitude(&pb, 3), 0.0)
        },
    )?;
    let pw = spherical_expand(&sampled, l_max as i64)?;
    println!("{} channels up to l = {l_max}; weight above l_max: {:.2e}", pw.channels().len(), pw.band_leakage());
    let back = spherical_expand(&spherical_contract(&pw, &quad)?, l_max as i64)?;
    let err: f64 = pw.amplitudes().iter().zip(back.amplitudes()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    println!("contract/expand round trip: {err:.2e}");

    let ie = entanglement_measures(&schmidt_spectrum(&pw.normalized()?, &TensorProductStructure::named("P|int")?)?);
    println!("P|int entropy {:.6e}", ie.entropy);
    for j in [0.0, 1.0, 2.0] {
        println!("d(j = {j}, 1/2, 1/2) = {}", degeneracy(j, 0.5, 0.5)?);
    }

    let coupled = couple_channels(&pw)?;
    let mut csv = Vec::new();
    write_channels_csv(&coupled, 13, &mut csv)?;
    let text = String::from_utf8(csv).expect("csv is utf-8");
    for line in text.lines().take(6) {
        println!("{line}");
    }
    Ok(())
}
