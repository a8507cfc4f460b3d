use gencumul_core::oracle::{differential_test, GeneratorParams};

fn run(seed: u64, trials: u64, fixpoint: bool) {
    let params = GeneratorParams { fixpoint, ..GeneratorParams::default() };
    match differential_test(seed, trials, &params) {
        Ok(summary) => {
            assert_eq!(summary.trials, trials);
            // the generator must exercise filtering and failure, not only no-ops
            assert!(summary.prunings > trials / 20, "{summary:?}");
            assert!(summary.failures > 0, "{summary:?}");
        }
        Err(cx) => panic!("{:?} violated:\n{}", cx.property, cx.to_dzn()),
    }
}

#[test]
fn single_call_is_sound() {
    run(1, 10_000, false);
}

#[test]
fn fixpoint_is_sound() {
    run(2, 5_000, true);
}

#[test]
fn small_horizons_are_sound() {
    let params = GeneratorParams { max_tasks: 4, max_horizon: 6, ..GeneratorParams::default() };
    if let Err(cx) = differential_test(3, 10_000, &params) {
        panic!("{:?} violated:\n{}", cx.property, cx.to_dzn());
    }
}
