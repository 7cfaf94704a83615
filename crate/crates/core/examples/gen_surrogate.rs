//! Regenerates `data/surrogate_reviews.jsonl`.
//!
//! cargo run -p autoaug --example gen_surrogate -- [OUT]

use autoaug::harness::surrogate::{bundled_rows, to_jsonl};

fn main() -> anyhow::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/surrogate_reviews.jsonl").to_string());
    std::fs::write(&out, to_jsonl(&bundled_rows()))?;
    println!("wrote {out}");
    Ok(())
}
