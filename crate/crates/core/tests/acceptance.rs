//! Acceptance criteria A1–A9 at full budget, one line per criterion.

use algconj::verify::{run_all, Budget};

fn main() {
    let results = run_all(Budget::Full);
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
