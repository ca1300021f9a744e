//! Reports are byte-identical for the same parameters and seed, whatever the thread count.

use gaussopt::harness::{run, verifier_ids, VerifyParams};
use gaussopt::GlobalConfig;

/// Small settings so every verifier finishes quickly.
fn quick(id: &str, seed: u64) -> VerifyParams {
    let mut p = VerifyParams { seed, trials: Some(6), ..VerifyParams::default() };
    p.optimizer.restarts = 4;
    p.optimizer.local_steps = 10;
    match id {
        "debruijn" | "stam" => p.trials = Some(2),
        "qcepi" => p.trials = Some(3),
        _ => {}
    }
    p
}

fn report(id: &str, seed: u64, threads: usize) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| run(id, &quick(id, seed), &GlobalConfig::default()))
        .unwrap_or_else(|e| panic!("{id}: {e}"))
        .to_json_string()
}

#[test]
fn every_verifier_is_deterministic_across_thread_counts() {
    for id in verifier_ids() {
        let one = report(id, 21, 1);
        assert_eq!(one, report(id, 21, 1), "{id} differs between identical runs");
        assert_eq!(one, report(id, 21, 3), "{id} depends on the thread count");
    }
}

#[test]
fn seeds_change_randomized_reports() {
    for id in ["moe", "maj", "qepi", "epni", "thin-ent"] {
        assert_ne!(report(id, 1, 1), report(id, 2, 1), "{id}");
    }
}
