use sembit_core::noma;
use sembit_core::rsma;
use sembit_core::sca::SolverOptions;
use sembit_core::scenario::Scenario;
use sembit_core::semantic::{LogisticParams, SemanticConfig};

fn scenario(gain_bit: f64, gains: Vec<f64>) -> Scenario {
    Scenario::new_explicit(
        1e6, -140.0, 0.1, gain_bit, gains,
        SemanticConfig::new(8, 1.0, 0.8).unwrap(),
        LogisticParams::new(0.22, 0.95, 0.5, 0.45, 8).unwrap(), 0,
    ).unwrap()
}

fn main() {
    let opts = SolverOptions::default();

    // Case 1: three-user oracle mismatch.
    let scn = scenario(3.7e-8, vec![2.8e-8, 1.4e-8, 0.9e-8]);
    for q in 0..=3 {
        match noma::sca_noma(&scn, 0.06e6, q, &opts) {
            Ok(a) => println!(
                "q={q}: rate={:.1} iters={} conv={} trace_len={}",
                a.bit_rate, a.report.iterations, a.report.converged,
                a.report.objective_trace.len()
            ),
            Err(e) => println!("q={q}: {e}"),
        }
    }

    // Case 2: single user q0 convergence.
    let scn2 = scenario(3e-8, vec![2e-8]);
    match noma::sca_noma(&scn2, 0.05e6, 0, &opts) {
        Ok(a) => println!(
            "single q0: rate={:.1} iters={} conv={} trace={:?}",
            a.bit_rate, a.report.iterations, a.report.converged, a.report.objective_trace
        ),
        Err(e) => println!("single q0: {e}"),
    }

    // Case 3: two-bit alpha sweep failure at r2=362418.
    match rsma::two_bit_user_baseline(3e-8, 2e-8, 0.1, 1e6, 1e-11, 362418.238, &opts) {
        Ok(b) => println!("two-bit: alpha={} r1={} conv={}", b.alpha, b.r1_max, b.report.converged),
        Err(e) => println!("two-bit: {e}"),
    }
}
