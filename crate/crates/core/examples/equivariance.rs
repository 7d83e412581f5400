//! Build h_f = z + k f/f' and check equivariance under the modular group.

use equivariant_forms::equivariant::{check_equivariance, hat, make_h_f, quasi_law_check, Generator, SampleParams};
use equivariant_forms::forms::Form;
use equivariant_forms::Result;

fn main() -> Result<()> {
    let params = SampleParams {
        n_samples: 300,
        ..SampleParams::default()
    };
    for (name, k) in [("E4", 4.0), ("E6", 6.0), ("Delta", 12.0), ("E2", 2.0)] {
        let h = make_h_f(Form::by_name(name)?, k)?;
        let r = check_equivariance(&h, &Generator::modular(), &params);
        println!(
            "h_{name:<6} max dev {:.2e}  mean {:.2e}  failures {}/{}",
            r.max_dev, r.mean_dev, r.n_fail, r.n_samples
        );
    }

    let g = hat(&make_h_f(Form::by_name("Delta")?, 12.0)?);
    for scale in [1.0, 2.0] {
        let r = quasi_law_check(&g, scale, &Generator::modular(), &params);
        println!("quasi law for hat(h_Delta), scale {scale}: max dev {:.2e}", r.max_dev);
    }
    Ok(())
}
