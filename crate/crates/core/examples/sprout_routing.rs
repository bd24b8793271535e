//! Lookup reliability of social routing over a Chord ring.

use linkveil::chord::{build_ring, reliability_experiment, sprout_route, TrustModel};
use linkveil::{ba_generate, GenSpec, PerturbParams};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(1000, 4, 11))?;
    let ring = build_ring(g.n(), 1)?;
    let route = sprout_route(&ring, &g, 0, 0x8000_0000);
    println!("lookup from 0 for key 0x80000000: {:?} (success {})", route.path, route.success);
    let params: Vec<PerturbParams> = [3, 5, 10].iter().map(|&t| PerturbParams::new(t, t as u64)).collect();
    let rep = reliability_experiment(&g, &params, &TrustModel::default(), 1000, 3, 2)?;
    for r in &rep.rows {
        println!("{:>8} {:>6}: reliability {:.4}, hops {:.2}", r.topology, r.mechanism, r.reliability, r.mean_hops);
    }
    Ok(())
}
