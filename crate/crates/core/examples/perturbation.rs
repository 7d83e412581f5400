//! Zeros of j' F'(j) + (i pi/6) E2 for a few choices of F.

use equivariant_forms::identities::{quasimodular_perturbation_demo, PerturbationRule};
use equivariant_forms::zerofinder::{FinderOptions, SearchBox};
use equivariant_forms::{format_complex, Result};

fn main() -> Result<()> {
    let opts = FinderOptions {
        max_zeros: 6,
        ..FinderOptions::default()
    };
    let b = SearchBox::new(-0.5, 0.5, 0.3, 1.2)?;
    for rule in ["exp", "poly", "constant"] {
        let r = quasimodular_perturbation_demo(PerturbationRule::parse(rule)?, &b, 2, &opts)?;
        println!(
            "{rule}: {} zeros in {} orbits ({} of {} tiles), equivariance max dev {:.2e}",
            r.zeros.len(),
            r.partition.orbit_count,
            r.tiles_searched,
            r.tiles_total,
            r.equivariance.max_dev
        );
        for z in &r.zeros {
            println!("  {}", format_complex(z.location));
        }
    }
    Ok(())
}
