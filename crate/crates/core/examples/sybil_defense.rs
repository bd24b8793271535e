//! Honest acceptance against route length, and attack-edge growth.

use linkveil::sybil::{
    attach_sybil_region, attack_edge_growth, required_route_length, sybillimit_accept_rates, AttackGraph,
    SybilLimitConfig, SybilModel,
};
use linkveil::{ba_generate, transform, GenSpec, PerturbParams};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(500, 4, 10))?;
    let cfg = SybilLimitConfig { verifiers: 30, seed: 1, ..Default::default() };
    let ws: Vec<usize> = (1..=8).collect();
    let gp = transform(&g, &PerturbParams::new(10, 2))?.graph;
    for (name, h) in [("original", g.clone()), ("t=10", gp)] {
        let rates = sybillimit_accept_rates(&AttackGraph::honest_only(h), &ws, &cfg)?;
        let curve: Vec<String> = rates.iter().map(|r| format!("{:.3}", r.honest_accept_fraction)).collect();
        println!("{name}: {} -> w(0.98) = {:?}", curve.join(" "), required_route_length(&rates, 0.98));
    }
    let ag = attach_sybil_region(&g, 50, SybilModel::default(), 10, 3)?;
    let rates = sybillimit_accept_rates(&ag, &[4], &cfg)?;
    println!("sybils accepted per attack edge at w = 4: {:.2}", rates[0].sybils_accepted_per_attack_edge);
    for t in [1, 2, 5, 10] {
        let grow = attack_edge_growth(&ag, &PerturbParams::new(t, 4), 10)?;
        println!("t = {t:2}: g' = {:.1}, ratio {:.2}", grow.mean_g_prime, grow.ratio);
    }
    Ok(())
}
