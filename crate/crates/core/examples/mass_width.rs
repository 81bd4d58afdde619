//! Internal/external entanglement of two 1D Gaussian packets, numerically
//! and in closed form, with and without the mass-width condition.

use tpslab::gaussian::{analytic_ie_entropy, com_quadratic_form, masswidth_satisfied, GaussianPacket};
use tpslab::hilbert::{normalize, sample_gaussian_pair, MomentumGrid};
use tpslab::tps::{entanglement_measures, schmidt_spectrum, to_com_variables, Direction, TensorProductStructure};

fn main() -> tpslab::error::Result<()> {
    let a = GaussianPacket::new(1.0, 1.0, 0.0);
    let pq = TensorProductStructure::named("P|q")?;
    for sigma_b in [2.0, 1.8, 1.2] {
        let b = GaussianPacket::new(4.0, sigma_b, 0.0);
        let dp = 12.0 * sigma_b.max(1.0) / 255.0;
        let grid = MomentumGrid::centered(1, 256, dp)?;
        let pair = normalize(&sample_gaussian_pair(&a, &b, &grid, &grid)?)?;
        let com = to_com_variables(&pair, Direction::Forward)?;
        let numeric = entanglement_measures(&schmidt_spectrum(&com, &pq)?).entropy;
        let form = com_quadratic_form(&a, &b, 1);
        let closed = analytic_ie_entropy(&form)?;
        println!(
            "sigma_B = {sigma_b}: condition {}, gamma = {:+.4}, mu = {:.3e}, S numeric = {numeric:.9e}, S closed form = {:.9e}",
            masswidth_satisfied(&a, &b, 1e-12),
            form.gamma,
            closed.mu,
            closed.entropy
        );
    }
    Ok(())
}
