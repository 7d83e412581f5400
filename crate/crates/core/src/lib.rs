//! Möbius transformations, classical modular and quasi-modular forms, the
//! equivariant functions `h_f = z + k f/f'` attached to them, and a zero
//! finder that certifies zeros and critical points up to PSL(2,Z)-equivalence.
//!
//! The crate is organized bottom-up:
//!
//! - [`moebius`]: algebra of Möbius transformations and fundamental-domain reduction.
//! - [`qseries`]: exact q-expansions and their numerical evaluation.
//! - [`forms`]: weighted forms, the slash operator, multiplier systems and
//!   the closed forms for elementary groups.
//! - [`equivariant`]: `h_f`, the correspondence with weight-2 depth-1 quasi-forms
//!   and randomized equivariance checks.
//! - [`zerofinder`]: argument-principle zero search with Newton refinement.
//! - [`identities`]: a catalog of numerically verified identities.
//! - [`cli`]: configuration and report types behind the `mforms` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod equivariant;
pub mod error;
pub mod forms;
pub mod identities;
pub mod jet;
pub mod moebius;
pub mod qseries;
pub mod zerofinder;

use num_complex::Complex64;

pub use error::{Error, Result};
pub use jet::{Holomorphic, Jet};
pub use moebius::{ExtendedPoint, MoebiusTransform};

/// Formats `z` as `a+bi`.
pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses complex numbers written as `a+bi`, `a-bi`, `bi`, `i`, `-i` or `a`,
/// with optional spaces.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(format!("not a complex number: {text:?}"));
    if s.is_empty() {
        return Err(err());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| err());
    };
    // the split is the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_part.is_empty() {
        0.0
    } else {
        re_part.parse::<f64>().map_err(|_| err())?
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| err())?,
    };
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_complex_forms() {
        let cases = [
            ("0.5+0.8660254i", Complex64::new(0.5, 0.8660254)),
            ("5+1i", Complex64::new(5.0, 1.0)),
            ("5 + 1i", Complex64::new(5.0, 1.0)),
            ("i", Complex64::new(0.0, 1.0)),
            ("-i", Complex64::new(0.0, -1.0)),
            ("2.5i", Complex64::new(0.0, 2.5)),
            ("-0.25", Complex64::new(-0.25, 0.0)),
            ("1e-3-2E+1i", Complex64::new(1e-3, -20.0)),
            ("-1-i", Complex64::new(-1.0, -1.0)),
        ];
        for (text, want) in cases {
            assert_eq!(parse_complex(text).unwrap(), want, "{text}");
        }
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("1+2").is_err());
    }

    #[test]
    fn format_round_trips() {
        for z in [Complex64::new(0.5, -2.0), Complex64::new(-1.25, 3.5)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }
}
