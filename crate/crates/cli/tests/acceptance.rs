//! All nine acceptance criteria at full size, one line per criterion.
//!
//! A single test runs them in order so the timings are not distorted by
//! criteria competing for cores.

use gou_cli::criteria::{self, RunOptions, Suite};

#[test]
fn acceptance() {
    let opts = RunOptions::default();
    let mut failed = Vec::new();
    for &id in Suite::All.ids() {
        let r = criteria::run(id, &opts);
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {id} {status}: {} ({:.2} s of {:.0} s) {}",
            r.name, r.elapsed_s, r.limit_s, r.detail
        );
        if !r.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
