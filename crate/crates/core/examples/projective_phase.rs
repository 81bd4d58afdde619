//! The single-particle action is a projective representation: composing two
//! transformations agrees with the composite up to a state-independent phase.

use nalgebra::Vector3;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpslab::galilei::{boost_quantum, projective_phase_probes, random_commensurate, GroupElement};
use tpslab::hilbert::{normalize, MomentumGrid, ParticleLabel, SingleParticleState};
use tpslab::spin::Spin;

fn main() -> tpslab::error::Result<()> {
    let (m, dp) = (2.0, 0.5);
    let grid = MomentumGrid::centered(3, 10, dp)?;
    let label = ParticleLabel::new(m, 0.0, Spin::HALF, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // random amplitudes kept two points away from the edges, so that one
    // boost quantum never pushes weight off the grid
    let probes: Vec<SingleParticleState> = (0..4)
        .map(|_| {
            normalize(&SingleParticleState::from_fn(label.clone(), |p, _| {
                if p.iter().all(|x| x.abs() < 1.5) {
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    C64::new(0.0, 0.0)
                }
            }))
        })
        .collect::<Result<_, _>>()?;

    let q = boost_quantum(&[m], dp)?;
    for _ in 0..3 {
        let g1 = random_commensurate(&mut rng, 3, q, 1, 1.0, 1.0);
        let g2 = random_commensurate(&mut rng, 3, q, 1, 1.0, 1.0);
        let fit = projective_phase_probes(&g2, &g1, &probes)?;
        println!("xi = {:+.6}, residual {:.2e}, variance over probes {:.2e}", fit.xi, fit.max_residual, fit.variance);
    }
    let t = GroupElement::translation(Vector3::new(0.8, 0.0, 0.0));
    let b = GroupElement::boost(Vector3::new(q, 0.0, 0.0));
    let fit = projective_phase_probes(&b, &t, &probes)?;
    println!("boost after translation: xi = {:+.6} (m a v / 2 = {:.6})", fit.xi, 0.5 * m * 0.8 * q);
    Ok(())
}
