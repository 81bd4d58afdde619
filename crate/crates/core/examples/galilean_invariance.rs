//! Random commensurate Galilei transformations leave the entropy of every
//! invariant bipartition unchanged, while the state itself moves.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tpslab::galilei::{apply_com, apply_two, boost_quantum, random_commensurate};
use tpslab::gaussian::GaussianPacket;
use tpslab::hilbert::{normalize, MomentumGrid, ParticleLabel, State, TwoParticleState};
use tpslab::spin::Spin;
use tpslab::tensor::ray_distance;
use tpslab::tps::{entanglement_measures, schmidt_spectrum, to_com_variables, Direction, TensorProductStructure};

fn entropy(tps: &str, s: &TwoParticleState) -> tpslab::error::Result<f64> {
    Ok(entanglement_measures(&schmidt_spectrum(s, &TensorProductStructure::named(tps)?)?).entropy)
}

fn main() -> tpslab::error::Result<()> {
    let grid = MomentumGrid::centered(1, 96, 0.25)?;
    let la = ParticleLabel::new(1.0, 0.0, Spin::HALF, grid.clone())?;
    let lb = ParticleLabel::new(2.0, 0.0, Spin::ZERO, grid.clone())?;
    let (a1, a2) = (GaussianPacket::new(1.0, 1.0, 0.5), GaussianPacket::new(1.0, 0.8, -0.7));
    let (b1, b2) = (GaussianPacket::new(2.0, 0.9, -0.3), GaussianPacket::new(2.0, 1.2, 0.6));
    let up = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let tilted = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
    // two products with different spinors: entangled across A|B and mom|spin
    let pair = normalize(&TwoParticleState::from_fn(la, lb, |pa, ca, pb, _| {
        let (pa, pb) = ([pa, 0.0, 0.0], [pb, 0.0, 0.0]);
        up[ca] * a1.amplitude(&pa, 1) * b1.amplitude(&pb, 1) + tilted[ca] * a2.amplitude(&pa, 1) * b2.amplitude(&pb, 1)
    })?)?;
    let com = to_com_variables(&pair, Direction::Forward)?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let quantum = boost_quantum(&[1.0, 2.0], grid.spacing())?;
    for _ in 0..3 {
        let g = random_commensurate(&mut rng, 1, quantum, 2, 2.0, 1.0);
        let moved = apply_two(&g, &pair)?;
        let moved_com = apply_com(&g, &com)?;
        println!(
            "b = {:+.3}, a = {:+.3}, v = {:+.3}: moved by {:.3}; S(A|B) {:.12} -> {:.12}; S(P|q) {:.12} -> {:.12}",
            g.b,
            g.a[0],
            g.v[0],
            ray_distance(pair.amplitudes(), moved.amplitudes()),
            entropy("A|B", &pair)?,
            entropy("A|B", &moved)?,
            entropy("P|q", &com)?,
            entropy("P|q", &moved_com)?,
        );
    }
    Ok(())
}
