//! Reduction of points of the upper half-plane into the standard fundamental
//! domain of PSL(2,Z).

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use super::MoebiusTransform;
use crate::error::{Error, Result};

const MAX_STEPS: usize = 10_000;
const INVERSION_SLACK: f64 = 1e-15;
const CIRCLE_TOL: f64 = 1e-12;

/// A letter of a word in the generators `S` and `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    S,
    T(i64),
}

/// A word in `S` and `T`, stored in application order (first letter acts first).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Appends a letter acting after the current word.
    pub fn push(&mut self, letter: Letter) {
        match (self.letters.last_mut(), letter) {
            (_, Letter::T(0)) => {}
            (Some(Letter::T(m)), Letter::T(n)) => {
                *m += n;
                if *m == 0 {
                    self.letters.pop();
                }
            }
            (Some(Letter::S), Letter::S) => {
                self.letters.pop();
            }
            _ => self.letters.push(letter),
        }
    }

    /// The integer matrix of the word, as `[a, b, c, d]`.
    pub fn integer_matrix(&self) -> [i64; 4] {
        let mut m = [1i64, 0, 0, 1];
        for l in &self.letters {
            let left = match *l {
                Letter::S => [0, -1, 1, 0],
                Letter::T(n) => [1, n, 0, 1],
            };
            m = [
                left[0] * m[0] + left[1] * m[2],
                left[0] * m[1] + left[1] * m[3],
                left[2] * m[0] + left[3] * m[2],
                left[2] * m[1] + left[3] * m[3],
            ];
        }
        m
    }

    pub fn transform(&self) -> MoebiusTransform {
        let [a, b, c, d] = self.integer_matrix();
        MoebiusTransform::real(a as f64, b as f64, c as f64, d as f64).expect("words in S and T have determinant one")
    }
}

impl fmt::Display for Word {
    /// Written as a matrix product, so the rightmost letter acts first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .rev()
            .map(|l| match l {
                Letter::S => "S".to_string(),
                Letter::T(1) => "T".to_string(),
                Letter::T(n) => format!("T^{n}"),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Reduction {
    pub z_reduced: Complex64,
    pub word: Word,
}

/// Maps `z` to its representative in `|Re z| ≤ 1/2, |z| ≥ 1`.
///
/// Boundary convention: on `|z| = 1` the representative has `Re z ≤ 0`, and on
/// the vertical sides `Re z = -1/2` is kept.
pub fn reduce_to_fundamental_domain(z: Complex64) -> Result<Reduction> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NotInUpperHalfPlane(crate::format_complex(z)));
    }
    let mut z = z;
    let mut word = Word::new();
    let mut steps = 0;
    loop {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::ReductionDiverged);
        }
        let n = (z.re + 0.5).floor();
        if n != 0.0 {
            z.re -= n;
            word.push(Letter::T(-(n as i64)));
        }
        if z.norm_sqr() < 1.0 - INVERSION_SLACK {
            z = -z.inv();
            word.push(Letter::S);
        } else {
            break;
        }
    }
    if (z.norm_sqr() - 1.0).abs() <= CIRCLE_TOL && z.re > 0.0 {
        z = -z.inv();
        word.push(Letter::S);
    }
    Ok(Reduction { z_reduced: z, word })
}
