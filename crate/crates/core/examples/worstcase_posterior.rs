//! Posterior of a link for an adversary who knows the rest of the graph.

use linkveil::bayes::worstcase_study;
use linkveil::{ba_generate, GenSpec};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(200, 4, 7))?;
    for t in [2, 3] {
        let study = worstcase_study(&g, t, 10, 5, false)?;
        for p in &study.posteriors {
            println!("t = {t}, link {}: posterior {:?} over {} candidates", p.link, p.posterior, p.candidates);
        }
        println!("t = {t}: fraction <= 0.1 is {:.2}", study.fraction(|p| p <= 0.1));
    }
    Ok(())
}
