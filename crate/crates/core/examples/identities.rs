//! Run the identity catalog and the truncation-doubling comparison.

use equivariant_forms::identities::{full_catalog, run_check, truncation_doubling, IDENTITY_TOL};
use equivariant_forms::qseries::Truncation;

fn main() {
    for c in full_catalog() {
        let r = run_check(&c, Truncation::Auto, IDENTITY_TOL);
        let d = truncation_doubling(&c, 12);
        println!(
            "{:<4} {:<14} max {:.2e}  N=12 {:.2e}  N=24 {:.2e}",
            if r.passed { "ok" } else { "FAIL" },
            r.name,
            r.max_residual,
            d.residual,
            d.doubled_residual
        );
    }
}
