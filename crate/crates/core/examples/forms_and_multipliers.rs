//! Evaluate forms with error bounds and recover their multiplier systems.

use std::f64::consts::PI;

use equivariant_forms::forms::{evaluate_with_bound, multiplier_of, Form, REGISTRY};
use equivariant_forms::{format_complex, MoebiusTransform, Result};
use num_complex::Complex64;

fn main() -> Result<()> {
    let i = Complex64::new(0.0, 1.0);
    let rho = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    for name in ["E4", "E6", "Delta", "j", "eta"] {
        let f = Form::by_name(name)?;
        for z in [i, rho] {
            let v = evaluate_with_bound(&f, z)?;
            println!(
                "{name:>6}({:<22}) = {:<48} bound {:.1e}",
                format_complex(z),
                format_complex(v.value),
                v.tail_bound.unwrap_or(f64::NAN)
            );
        }
    }

    println!();
    let probe = Complex64::new(0.05, 1.05);
    for name in REGISTRY {
        let f = Form::by_name(name)?;
        for m in f.multipliers() {
            let nu = multiplier_of(&f, &m.element, probe)?;
            println!(
                "{name:>7} weight {:<4} nu({}) = e^(i pi {:+.6})",
                f.weight(),
                m.generator,
                nu.arg() / PI
            );
        }
    }
    let eta = Form::by_name("eta")?;
    let nu = multiplier_of(&eta, &MoebiusTransform::p(), probe)?;
    println!("    eta nu(P) = e^(i pi {:+.6})", nu.arg() / PI);
    Ok(())
}
