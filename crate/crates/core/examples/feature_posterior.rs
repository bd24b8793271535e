//! Posterior from observed k-hop transition probabilities, and the
//! privacy floor of one link.

use linkveil::bayes::{privacy_floor, FeatureConfig, FeatureStudy};
use linkveil::{ba_generate, transform, GenSpec, PerturbParams};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(300, 4, 8))?;
    for t in [2, 5] {
        let mut cfg = FeatureConfig::new(t, 3);
        cfg.trials = 3;
        let study = FeatureStudy::run(&g, &cfg)?;
        for k in [1, 3, 5] {
            let c = study.curves(k, &[0.01, 0.1])?;
            println!("t = {t}, k = {k}: median given link {:.4}, given no link {:.6}", c.median_link, c.median_nolink);
        }
        let post = study.link_posteriors();
        let low = post.iter().filter(|&&p| p <= 0.1).count() as f64 / post.len() as f64;
        println!("t = {t}: {:.0}% of links have posterior <= 0.1 (prior {:.4})", 100.0 * low, study.prior);
    }
    let gp = transform(&g, &PerturbParams::new(5, 1))?.graph;
    let l = g.links()[0];
    let floor = privacy_floor(&g, &gp, l.u(), l.v(), 10)?;
    println!("privacy floor of {l}: delta = {:?}, floor = {:.4}", floor.delta, floor.floor);
    Ok(())
}
