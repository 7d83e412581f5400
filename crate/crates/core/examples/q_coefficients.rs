//! Print leading q-expansion coefficients of the built-in series.

use equivariant_forms::qseries::{j_series_exact, SeriesKind};
use equivariant_forms::Result;

fn main() -> Result<()> {
    let n = 8;
    for kind in SeriesKind::ALL {
        let s = kind.generate(n)?;
        let coeffs: Vec<String> = s.coeffs.iter().map(|c| c.to_string()).collect();
        println!("{:>7}  q^({}/24) * [{}]", kind.name(), s.exponent_24, coeffs.join(", "));
    }
    let j = j_series_exact(n)?;
    let coeffs: Vec<String> = j.coeffs.iter().map(|c| c.to_string()).collect();
    println!("{:>7}  q^({}/24) * [{}]", "j", j.exponent_24, coeffs.join(", "));
    Ok(())
}
