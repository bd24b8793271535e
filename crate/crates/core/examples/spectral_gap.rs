//! Second largest eigenvalue modulus before and after perturbation.

use linkveil::spectral::{adjacency_top_eigenvalue, slem};
use linkveil::{ba_generate, transform, GenSpec, PerturbParams};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(1000, 4, 3))?;
    let r = slem(&g)?;
    println!("original: mu = {:.5} (nu2 = {:.5}, nu_min = {:.5})", r.mu, r.nu2, r.nu_min);
    println!("original: lambda_1 = {:.3}", adjacency_top_eigenvalue(&g)?);
    for t in [2, 5, 10] {
        let gp = transform(&g, &PerturbParams::new(t, 9))?.graph;
        if !gp.is_connected() {
            println!("t = {t}: perturbed graph disconnected");
            continue;
        }
        println!("t = {t:2}: mu = {:.5}, lambda_1 = {:.3}", slem(&gp)?.mu, adjacency_top_eigenvalue(&gp)?);
    }
    Ok(())
}
