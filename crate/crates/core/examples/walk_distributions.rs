//! Walk distributions, the stationary law and mixing time.

use linkveil::walk::{mixing_time, stationary_distribution, walk_distribution};
use linkveil::{ba_generate, GenSpec, VertexSample};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(300, 3, 2))?;
    let pi = stationary_distribution(&g)?;
    for l in [1, 2, 4, 8, 16] {
        let p = walk_distribution(&g, 0, l)?;
        let gap = p.probs().iter().zip(pi.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("l = {l:2}: sup |P^l(0, .) - pi| = {gap:.5}");
    }
    for eps in [0.1, 0.01, 0.001] {
        let m = mixing_time(&g, eps, VertexSample::All)?;
        println!("tau({eps}) = {:?} over {} start vertices", m.tau, m.vertices_evaluated);
    }
    Ok(())
}
