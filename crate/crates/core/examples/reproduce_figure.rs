//! Regenerates one figure's data in quick mode and prints the comparison summary.
//!
//! cargo run --example reproduce_figure -- fig6

use tipctl::reproduce::{reproduce, ReproduceOptions, FIGURES};

fn main() -> tipctl::Result<()> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "fig4".into());
    if !FIGURES.contains(&id.as_str()) {
        eprintln!("figures: {}", FIGURES.join(", "));
    }
    let out = reproduce(&id, &ReproduceOptions { quick: true, seed: 1 })?;
    for (name, text) in &out.files {
        println!("{name}: {} lines", text.lines().count());
    }
    for n in &out.notes {
        println!("note: {n}");
    }
    println!("{}", serde_json::to_string_pretty(&out.comparison)?);
    Ok(())
}
