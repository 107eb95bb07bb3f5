//! Runs a bundled preset and writes its result directory.
//!
//! `cargo run --release --example run_preset -- [preset] [out-dir]`
use std::path::PathBuf;

use polyma::harness::{list_presets, load_preset, run_experiment, write_result};

fn main() -> Result<(), polyma::Error> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "exact-quadratic".into());
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join(format!("polyma-{name}")));
    if name == "list" {
        for n in list_presets() {
            println!("{n}");
        }
        return Ok(());
    }
    let doc = run_experiment(&load_preset(&name)?)?;
    for v in &doc.verdicts {
        println!("[{}] {} {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    for p in write_result(&doc, &out)? {
        println!("wrote {}", p.display());
    }
    std::process::exit(if doc.passed() { 0 } else { 1 });
}
