use std::io::Write;

use tvlab_core::verify::{verify_all, VerifyOptions};

#[test]
fn acceptance() {
    let summary = verify_all(&VerifyOptions::default());
    // Written to the raw handle so the verdicts show without --nocapture.
    let mut err = std::io::stderr().lock();
    writeln!(err).unwrap();
    for c in &summary.criteria {
        writeln!(err, "{c}").unwrap();
    }
    writeln!(err, "acceptance: {} ms total", summary.elapsed_ms).unwrap();
    assert!(summary.passed, "failed criteria: {:?}", summary.failed);
}
