use crate::{Error, Result};

/// `d/dτ` of a logged series by three-point finite differences on a
/// nonuniform grid: centered in the interior, one-sided at both ends.
///
/// The truncation error is `−f‴·h₁h₂/6` in the interior and
/// `f‴·h₁(h₁+h₂)/6` at the ends, so `O(Δτ²)` throughout.
pub fn d_dtau(tau: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    check_series(tau, f)?;
    let n = f.len();
    let mut out = Vec::with_capacity(n);
    let (h1, h2) = (tau[1] - tau[0], tau[2] - tau[1]);
    out.push(
        -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1]
            - h1 / (h2 * (h1 + h2)) * f[2],
    );
    for i in 1..n - 1 {
        let (h1, h2) = (tau[i] - tau[i - 1], tau[i + 1] - tau[i]);
        out.push(
            -h2 / (h1 * (h1 + h2)) * f[i - 1]
                + (h2 - h1) / (h1 * h2) * f[i]
                + h1 / (h2 * (h1 + h2)) * f[i + 1],
        );
    }
    let (h1, h2) = (tau[n - 2] - tau[n - 3], tau[n - 1] - tau[n - 2]);
    out.push(
        h2 / (h1 * (h1 + h2)) * f[n - 3] - (h1 + h2) / (h1 * h2) * f[n - 2]
            + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * f[n - 1],
    );
    Ok(out)
}

/// Estimated size of the [`d_dtau`] error at each row: the leading
/// truncation term with `|f‴|` taken from neighbouring third divided
/// differences, plus a roundoff term `ε|f|/h`. End rows are multiplied by
/// `end_factor`.
pub fn derivative_error(tau: &[f64], f: &[f64], end_factor: f64) -> Result<Vec<f64>> {
    check_series(tau, f)?;
    let n = f.len();
    // 6·f[x_j..x_{j+3}] approximates f‴ on each window of four rows
    let third: Vec<f64> = (0..n.saturating_sub(3))
        .map(|j| {
            let d1: Vec<f64> = (j..j + 3)
                .map(|i| (f[i + 1] - f[i]) / (tau[i + 1] - tau[i]))
                .collect();
            let d2: Vec<f64> = (0..2)
                .map(|i| (d1[i + 1] - d1[i]) / (tau[j + i + 2] - tau[j + i]))
                .collect();
            6.0 * (d2[1] - d2[0]) / (tau[j + 3] - tau[j])
        })
        .collect();
    let third_near = |i: usize| -> f64 {
        let lo = i.saturating_sub(3);
        let hi = i.min(third.len().saturating_sub(1));
        (lo..=hi)
            .filter_map(|j| third.get(j))
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    };
    Ok((0..n)
        .map(|i| {
            let (a, b, c) = match i {
                0 => (0, 1, 2),
                i if i == n - 1 => (n - 3, n - 2, n - 1),
                i => (i - 1, i, i + 1),
            };
            let (h1, h2) = (tau[b] - tau[a], tau[c] - tau[b]);
            let size = f[a].abs().max(f[b].abs()).max(f[c].abs());
            let roundoff = 8.0 * f64::EPSILON * size / h1.min(h2);
            if i == 0 {
                end_factor * (third_near(i) * h1 * (h1 + h2) / 6.0 + roundoff)
            } else if i == n - 1 {
                end_factor * (third_near(i) * h2 * (h1 + h2) / 6.0 + roundoff)
            } else {
                third_near(i) * h1 * h2 / 6.0 + roundoff
            }
        })
        .collect())
}

fn check_series(tau: &[f64], f: &[f64]) -> Result<()> {
    if tau.len() != f.len() {
        return Err(Error::InvalidLedger(format!(
            "series length {} does not match {} times",
            f.len(),
            tau.len()
        )));
    }
    if f.len() < 3 {
        return Err(Error::InvalidLedger(format!(
            "differencing needs at least 3 rows, got {}",
            f.len()
        )));
    }
    Ok(())
}
