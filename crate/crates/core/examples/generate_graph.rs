//! Preferential-attachment graph and its edge-list form.

use linkveil::{ba_generate, GenSpec};

fn main() -> linkveil::Result<()> {
    let g = ba_generate(&GenSpec::new(500, 4, 7))?;
    println!("n = {}, m = {}, average degree = {:.2}", g.n(), g.m(), g.average_degree());
    println!("degree range = {}..={}", g.min_degree(), g.max_degree());
    let text = g.to_edge_list(false);
    println!("first edges:\n{}", text.lines().take(5).collect::<Vec<_>>().join("\n"));
    Ok(())
}
