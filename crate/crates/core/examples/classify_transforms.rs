//! Classify a few Möbius transforms and follow their iterates.

use equivariant_forms::moebius::ExtendedPoint;
use equivariant_forms::{MoebiusTransform, Result};
use num_complex::Complex64;

fn main() -> Result<()> {
    let samples = [
        ("T: z+1", MoebiusTransform::t()),
        ("S: -1/z", MoebiusTransform::s()),
        ("P: -1/(z+1)", MoebiusTransform::p()),
        ("(2z+1)/(z+1)", MoebiusTransform::real(2.0, 1.0, 1.0, 1.0)?),
        ("scale by 2+i", MoebiusTransform::scaling(Complex64::new(2.0, 1.0))?),
    ];
    for (label, g) in samples {
        let class = g.classify();
        println!(
            "{label:>14}  Tr^2 = {:<24} {:?}",
            format!("{}", class.trace_value),
            class.tag
        );
        for fp in g.fixed_points()? {
            println!(
                "{:>16}fixed {} ({:?}, multiplier {:.4})",
                "", fp.point, fp.kind, fp.multiplier
            );
        }
    }

    let g = MoebiusTransform::real(2.0, 1.0, 1.0, 1.0)?;
    let z = ExtendedPoint::Finite(Complex64::new(-3.0, 0.5));
    for n in [1, 5, 20, 60] {
        println!("g^{n}(z) = {}", g.iterate(z, n));
    }
    Ok(())
}
