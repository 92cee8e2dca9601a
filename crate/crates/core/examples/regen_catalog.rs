//! Rewrites `data/base_catalog.json` from the bounded base search.

use std::path::Path;

use ehrhart_core::signpattern::catalog::regenerate;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/base_catalog.json");
    let catalog = regenerate();
    std::fs::write(&path, catalog.to_json_pretty()).expect("write catalog");
    for e in &catalog.entries {
        println!("{:>3}  {}  {}", e.pattern, e.expr, e.ehrhart);
    }
}
