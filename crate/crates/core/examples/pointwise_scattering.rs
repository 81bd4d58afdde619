//! Hard-sphere scattering of two 3D packets evaluated pointwise on the
//! particle grids, showing the change in interparticle entanglement.

use num_complex::Complex64 as C64;

use tpslab::gaussian::GaussianPacket;
use tpslab::hilbert::MomentumGrid;
use tpslab::partialwave::{AngularQuadrature, PairLabel};
use tpslab::scattering::{scatter_pointwise_3d, PhaseShiftModel};
use tpslab::tps::{entanglement_measures, matrix_spectrum};

fn grid_around(p: &GaussianPacket, n: usize, cover: f64) -> tpslab::error::Result<MomentumGrid> {
    let half = cover * p.sigma;
    let origin: Vec<f64> = p.center.iter().map(|c| c - half).collect();
    MomentumGrid::new(3, n, 2.0 * half / (n - 1) as f64, &origin)
}

fn main() -> tpslab::error::Result<()> {
    let a = GaussianPacket::new(1.0, 1.0, 0.0).with_center([1.0, 0.0, 0.0]);
    let b = GaussianPacket::new(4.0, 2.0, 0.0).with_center([-1.0, 0.0, 0.0]);
    let pair = PairLabel::spinless(a.mass, b.mass)?;
    let (ga, gb) = (grid_around(&a, 6, 2.5)?, grid_around(&b, 6, 2.5)?);
    let l_max = 8;
    let quad = AngularQuadrature::for_lmax(l_max);
    for model in ["zero", "hard_sphere:0.3", "hard_sphere:1.0"] {
        let model: PhaseShiftModel = model.parse()?;
        let res = scatter_pointwise_3d(&pair, &ga, &gb, &model, l_max, &quad, |x, y| {
            C64::new(a.amplitude(x, 3) * b.amplitude(y, 3), 0.0)
        })?;
        let s_in = entanglement_measures(&matrix_spectrum(res.reference)?).entropy;
        let s_out = entanglement_measures(&matrix_spectrum(res.out)?).entropy;
        println!("{model}: S(A|B) in {s_in:.3e}, out {s_out:.3e}");
    }
    Ok(())
}
