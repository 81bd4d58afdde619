//! 1D contact reflection of two Gaussian packets: no interparticle
//! entanglement comes out when the mass-width condition holds.

use tpslab::gaussian::{masswidth_satisfied, GaussianPacket};
use tpslab::hilbert::{normalize, sample_gaussian_pair, MomentumGrid};
use tpslab::scattering::{hardcore_gaussian_out, OneDHardCore};
use tpslab::tps::{entanglement_measures, schmidt_spectrum, TensorProductStructure};

fn main() -> tpslab::error::Result<()> {
    let ab = TensorProductStructure::named("A|B")?;
    let a = GaussianPacket::new(1.0, 1.0, 0.0);
    for (core, sigma_b) in [(0.0, 2.0), (0.0, 1.8), (0.5, 2.0)] {
        let b = GaussianPacket::new(4.0, sigma_b, 0.0);
        let grid = MomentumGrid::centered(1, 256, 12.0 * sigma_b / 255.0)?;
        let s_in =
            entanglement_measures(&schmidt_spectrum(&normalize(&sample_gaussian_pair(&a, &b, &grid, &grid)?)?, &ab)?);
        let out = hardcore_gaussian_out(&a, &b, &grid, &grid, &OneDHardCore::new(core)?)?;
        let s_out = entanglement_measures(&schmidt_spectrum(&normalize(&out)?, &ab)?);
        println!(
            "core {core}, sigma_B {sigma_b}: condition {}, S(A|B) in {:.3e}, out {:.3e}",
            masswidth_satisfied(&a, &b, 1e-12),
            s_in.entropy,
            s_out.entropy
        );
    }
    Ok(())
}
