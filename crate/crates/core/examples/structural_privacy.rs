//! Structural impact and structural equivalence of sampled links.

use linkveil::risk::{sample_links, se_sweep, si_sweep};
use linkveil::{ba_generate, GenSpec};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(500, 4, 9))?;
    let links = sample_links(&g, 20, 1);
    for t in [2, 5, 10] {
        let si = si_sweep(&g, &links, t)?;
        let mut eps: Vec<f64> = si.iter().filter(|r| r.defined).map(|r| r.epsilon_bound).collect();
        eps.sort_by(f64::total_cmp);
        println!("t = {t:2}: median impact bound {:.5}", eps[eps.len() / 2]);
    }
    for r in se_sweep(&g, &links[..5], 10, 0.1, 300, 2)? {
        println!("link {}: {} of {} alternates within 0.1", r.link, r.k, r.candidates_examined);
    }
    Ok(())
}
