//! Exact integer q-expansions of the classical forms.

use crate::error::{Error, Result};

use super::series::IntSeries;

/// `σ_k(n) = Σ_{d | n} d^k`.
pub fn divisor_sum(n: u64, k: u32) -> Result<i128> {
    if n == 0 {
        return Err(Error::ZeroDivisorSum);
    }
    let overflow = || Error::CoefficientOverflow {
        series: "divisor_sum",
        index: n as usize,
    };
    let mut total: i128 = 0;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let e = n / d;
            total = total
                .checked_add((d as i128).checked_pow(k).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
            if e != d {
                total = total
                    .checked_add((e as i128).checked_pow(k).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
        }
        d += 1;
    }
    Ok(total)
}

/// `σ_k(n)` for `n = 0..=n_max` by sieving (entry 0 is unused and zero).
fn divisor_sum_table(n_max: usize, k: u32, series: &'static str) -> Result<Vec<i128>> {
    let mut table = vec![0i128; n_max + 1];
    for d in 1..=n_max {
        let p = (d as i128)
            .checked_pow(k)
            .ok_or(Error::CoefficientOverflow { series, index: d })?;
        for m in (d..=n_max).step_by(d) {
            table[m] = table[m]
                .checked_add(p)
                .ok_or(Error::CoefficientOverflow { series, index: m })?;
        }
    }
    Ok(table)
}

/// Normalized Eisenstein series `E_2 = 1 - 24 Σ σ_1(n) q^n`,
/// `E_4 = 1 + 240 Σ σ_3(n) q^n`, `E_6 = 1 - 504 Σ σ_5(n) q^n`.
pub fn eisenstein_series(k: u32, order: usize) -> Result<IntSeries> {
    let (factor, name): (i128, &'static str) = match k {
        2 => (-24, "E2"),
        4 => (240, "E4"),
        6 => (-504, "E6"),
        _ => return Err(Error::UnsupportedWeight(k)),
    };
    let sigma = divisor_sum_table(order, k - 1, name)?;
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(1);
    for (n, s) in sigma.iter().enumerate().skip(1) {
        coeffs.push(
            s.checked_mul(factor)
                .ok_or(Error::CoefficientOverflow { series: name, index: n })?,
        );
    }
    Ok(IntSeries { exponent_24: 0, coeffs })
}

/// Coefficients of `Π_{n≥1} (1 - q^n)` through `q^order`, by Euler's
/// pentagonal number theorem.
pub fn euler_product(order: usize) -> Vec<i128> {
    let mut coeffs = vec![0i128; order + 1];
    coeffs[0] = 1;
    let mut k: i64 = 1;
    loop {
        let sign = if k % 2 == 1 { -1 } else { 1 };
        let p1 = (k * (3 * k - 1) / 2) as usize;
        let p2 = (k * (3 * k + 1) / 2) as usize;
        if p1 > order {
            break;
        }
        coeffs[p1] += sign;
        if p2 <= order {
            coeffs[p2] += sign;
        }
        k += 1;
    }
    coeffs
}

fn checked_mul_series(a: &[i128], b: &[i128], series: &'static str) -> Result<Vec<i128>> {
    let n = a.len().min(b.len());
    let mut out = vec![0i128; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            let t = x
                .checked_mul(y)
                .and_then(|t| out[i + j].checked_add(t))
                .ok_or(Error::CoefficientOverflow { series, index: i + j })?;
            out[i + j] = t;
        }
    }
    Ok(out)
}

fn checked_pow_series(a: &[i128], n: u32, series: &'static str) -> Result<Vec<i128>> {
    let mut result = vec![0i128; a.len()];
    result[0] = 1;
    let mut base = a.to_vec();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            result = checked_mul_series(&result, &base, series)?;
        }
        n >>= 1;
        if n > 0 {
            base = checked_mul_series(&base, &base, series)?;
        }
    }
    Ok(result)
}

/// `Δ = q Π (1 - q^n)^24`, stored with exponent 0 and `a_0 = 0`.
pub fn delta_series(order: usize) -> Result<IntSeries> {
    let order = order.max(1);
    let p24 = checked_pow_series(&euler_product(order - 1), 24, "Delta")?;
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(0);
    coeffs.extend(p24);
    Ok(IntSeries { exponent_24: 0, coeffs })
}

/// `j = E4^3 / Δ = q^{-1} (1 + 744 q + 196884 q^2 + ...)`, by exact long
/// division of `E4^3` by `Δ/q`. Coefficients leave `i128` near `n = 50`.
pub fn j_series_exact(order: usize) -> Result<IntSeries> {
    let e4 = eisenstein_series(4, order)?;
    let num = checked_pow_series(&e4.coeffs, 3, "j")?;
    let den = checked_pow_series(&euler_product(order), 24, "j")?;
    let mut out: Vec<i128> = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let mut acc = num[n];
        for k in 1..=n {
            acc = den[k]
                .checked_mul(out[n - k])
                .and_then(|t| acc.checked_sub(t))
                .ok_or(Error::CoefficientOverflow { series: "j", index: n })?;
        }
        out.push(acc);
    }
    Ok(IntSeries {
        exponent_24: -24,
        coeffs: out,
    })
}

/// `η = q^{1/24} Π (1 - q^n)`.
pub fn eta_series(order: usize) -> IntSeries {
    IntSeries {
        exponent_24: 1,
        coeffs: euler_product(order),
    }
}

/// `θ_2 = Σ q^{(n+1/2)^2}` (exponent 1/4 factored out), `θ_3 = Σ q^{n^2}`,
/// `θ_4 = Σ (-1)^n q^{n^2}`.
pub fn theta_series(which: u8, order: usize) -> Result<IntSeries> {
    let mut coeffs = vec![0i128; order + 1];
    match which {
        2 => {
            // (n + 1/2)^2 = n(n+1) + 1/4, each value hit by n and -n-1
            let mut n = 0usize;
            while n * (n + 1) <= order {
                coeffs[n * (n + 1)] = 2;
                n += 1;
            }
            Ok(IntSeries { exponent_24: 6, coeffs })
        }
        3 | 4 => {
            coeffs[0] = 1;
            let mut n = 1usize;
            while n * n <= order {
                let sign = if which == 4 && n % 2 == 1 { -1 } else { 1 };
                coeffs[n * n] = 2 * sign;
                n += 1;
            }
            Ok(IntSeries { exponent_24: 0, coeffs })
        }
        _ => Err(Error::UnknownForm(format!("theta{which}"))),
    }
}
