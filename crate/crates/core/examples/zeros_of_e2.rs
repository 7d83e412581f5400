//! Locate zeros of E2 and critical points of Delta, then group them into orbits.

use equivariant_forms::forms::Form;
use equivariant_forms::jet::Derivative;
use equivariant_forms::zerofinder::{classify_points, find_zeros, FinderOptions, SearchBox};
use equivariant_forms::{format_complex, Result};

fn main() -> Result<()> {
    let b = SearchBox::new(-0.5, 0.5, 0.05, 1.0)?;
    let opts = FinderOptions::default();

    let e2 = Form::by_name("E2")?;
    let out = find_zeros(&e2, &b, &opts)?;
    println!("E2: winding {} over {} zeros", out.total_winding, out.zeros.len());
    for z in &out.zeros {
        println!(
            "  {:<44} |f| {:.1e}  certified {}  fd {}",
            format_complex(z.location),
            z.residual,
            z.certified,
            format_complex(z.fd_representative)
        );
    }
    let locations: Vec<_> = out.zeros.iter().map(|z| z.location).collect();
    println!("  orbits: {}", classify_points(&locations, 1e-8)?.orbit_count);

    let d = Derivative(Form::by_name("Delta")?);
    let crit = find_zeros(&d, &b, &opts)?;
    let same = crit
        .zeros
        .iter()
        .filter(|c| out.zeros.iter().any(|z| (z.location - c.location).norm() < 1e-8))
        .count();
    println!(
        "Delta': {} critical points, {} coincide with E2 zeros",
        crit.zeros.len(),
        same
    );
    Ok(())
}
