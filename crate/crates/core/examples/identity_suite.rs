//! Runs the analytic identity suite, once clean and once with δ₀ perturbed.

use fbl_mimo::validate::{run_identity_suite, SuiteOptions};

fn main() {
    let report = run_identity_suite(SuiteOptions::default());
    print!("{}", report.render());

    let faulty = run_identity_suite(SuiteOptions { delta0_fault: 1e-6 });
    println!("\nwith δ₀ + 1e−6:");
    for check in faulty.failed() {
        println!(
            "  {} fails (worst {:.2e} at {})",
            check.name, check.worst_error, check.worst_at
        );
    }
}
