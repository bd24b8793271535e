//! Executable bound checks relating perturbed and original graphs.

use linkveil::utility::{
    check_degree_preservation, check_eigenvalue_bracket, check_mixing_bracket, check_theorem_mixing,
    check_theorem_slem,
};
use linkveil::{ba_generate, transform, GenSpec, PerturbParams};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(300, 4, 5))?;
    let params = PerturbParams::new(5, 11);
    let gp = transform(&g, &params)?.graph;
    if gp.is_connected() {
        let m = check_theorem_mixing(&g, &gp, 0.01)?;
        println!("mixing bound: tau_G = {}, tau_G'(eps') = {:?}, pass = {}", m.tau_g, m.tau_gp, m.pass);
        let s = check_theorem_slem(&g, &gp, 0.01)?;
        println!("slem bracket: {:.4} <= {:.4} <= {:.4}: {}", s.lower, s.mu_gp, s.upper, s.within);
    }
    let d = check_degree_preservation(&g, &params, 50)?;
    println!("degree preservation: {} of {} vertices outside 3 SE", d.violations.len(), d.checked);
    let b = check_mixing_bracket(&g, &params, 0.01, 10)?;
    println!("mixing bracket: {:.2} <= {:.2} <= {}: {}", b.lower, b.mean_tau_gp, b.tau_g, b.pass);
    let e = check_eigenvalue_bracket(&g, &params, 10)?;
    println!("eigenvalue bracket: {:.2} <= {:.2} <= {:.2}: {}", e.lower, e.mean_lambda, e.upper, e.pass);
    Ok(())
}
