//! Utility loss of perturbed graphs under the three distances.

use linkveil::utility::vu_curves;
use linkveil::{ba_generate, transform, DistanceKind, GenSpec, PerturbParams, VertexSample};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(1000, 4, 4))?;
    let ls = [5, 10, 20];
    for t in [2, 5, 10] {
        let gp = transform(&g, &PerturbParams::new(t, 1))?.graph;
        for r in vu_curves(&g, &gp, &ls, &DistanceKind::STANDARD_KINDS, VertexSample::All)? {
            println!("t = {t:2}, l = {:2}, {:>20}: mean {:.4}, max {:.4}", r.l, r.kind.name(), r.vu_mean, r.vu_max);
        }
    }
    Ok(())
}
