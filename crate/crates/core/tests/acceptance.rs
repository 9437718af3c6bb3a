use std::io::Write;

use osx_core::suite::{run, SuiteConfig, Sizes, CRITERIA};

const SEED: u64 = 20_240_611;

/// Criteria whose stated outcome does not hold for the implemented
/// definitions. They are still run in full and their lines still print FAIL.
const EXPECTED_FAIL: [(u32, &str); 2] = [
    (10, "the factor from y_i to x is 1 + 1/(m(i-1)), which tends to 1, so no uniform bound exists"),
    (12, "rose-a to split-a-b is 2: the loop generator is elliptic there and syllable length bounds the ratio"),
];

fn sizes() -> Sizes {
    match std::env::var("OSX_ACCEPTANCE").as_deref() {
        Ok("quick") => Sizes::quick(),
        _ => Sizes::full(),
    }
}

/// Written to the process stdout so the lines survive output capture.
fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig { threads: std::thread::available_parallelism().map_or(1, |n| n.get()), ..SuiteConfig::new(SEED, sizes()) };
    let mut surprises = Vec::new();
    for (id, _) in CRITERIA {
        let start = std::time::Instant::now();
        let r = run(id, &cfg).expect("known criterion");
        say(&format!("{r} [{:.1}s]", start.elapsed().as_secs_f64()));
        let expected = EXPECTED_FAIL.iter().find(|(e, _)| *e == id);
        if let Some((_, why)) = expected {
            say(&format!("     expected failure: {why}"));
        }
        if r.passed == expected.is_some() {
            surprises.push(id);
        }
    }
    assert!(surprises.is_empty(), "criteria with unexpected outcome: {surprises:?}");
}
