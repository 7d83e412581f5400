//! Move points of the upper half-plane into the standard fundamental domain.

use equivariant_forms::moebius::reduce_to_fundamental_domain;
use equivariant_forms::{format_complex, parse_complex, Result};

fn main() -> Result<()> {
    for text in [
        "5+1i",
        "0.1+0.01i",
        "-2.37+0.3i",
        "0.5+0.8660254037844386i",
        "1e-3+1e-4i",
    ] {
        let z = parse_complex(text)?;
        let r = reduce_to_fundamental_domain(z)?;
        let m = r.word.integer_matrix();
        println!(
            "{:>26} -> {:<40} word {} = [{} {}; {} {}]",
            text,
            format_complex(r.z_reduced),
            r.word,
            m[0],
            m[1],
            m[2],
            m[3]
        );
    }
    Ok(())
}
