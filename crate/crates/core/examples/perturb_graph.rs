//! Random-walk perturbation at several noise levels, next to the uniform
//! delete/add baseline.

use linkveil::{ba_generate, transform, transform_baseline_hay, GenSpec, PerturbParams};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(1000, 4, 1))?;
    println!("original: m = {}", g.m());
    for t in [1, 2, 5, 10] {
        let out = transform(&g, &PerturbParams::new(t, 42))?;
        let kept = out.graph.links().iter().filter(|l| g.has_link(**l)).count();
        println!(
            "t = {t:2}: m' = {}, kept original links = {kept}, skipped slots = {}",
            out.graph.m(),
            out.skipped_slots
        );
    }
    let hay = transform_baseline_hay(&g, g.m() / 2, 42)?;
    let kept = hay.links().iter().filter(|l| g.has_link(**l)).count();
    println!("delete/add half: m' = {}, kept = {kept}", hay.m());
    Ok(())
}
