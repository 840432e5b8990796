//! Kendall's tau with the raw sign kernel (no tie correction).
//!
//! All three variants share one statistic,
//! `τ̂ = 2/(n(n−1)) Σ_{i<i′} sign(x_i − x_i′) sign(y_i − y_i′)`,
//! because `sign(x_i − x_i′) = x_i − x_i′` for 0/1 data. The binary/binary
//! case uses the 2×2 contingency table; everything else uses Knight's
//! O(n log n) merge-sort count.

use std::cmp::Ordering;

use crate::error::{Error, Result};

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "kendall tau needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Dimension(format!(
            "kendall tau needs at least 2 observations, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Domain("NaN observation".into()));
    }
    Ok(())
}

fn check_binary(x: &[f64], what: &str) -> Result<()> {
    if let Some(v) = x.iter().find(|&&v| v != 0.0 && v != 1.0) {
        return Err(Error::Domain(format!("{what} column has non-binary value {v}")));
    }
    Ok(())
}

fn pair_count(n: usize) -> f64 {
    n as f64 * (n as f64 - 1.0) / 2.0
}

/// 2×2 contingency counts `(n_a, n_b, n_c, n_d)`: (1,1), (1,0), (0,1), (0,0).
pub fn contingency(x: &[f64], y: &[f64]) -> (u64, u64, u64, u64) {
    let mut counts = [0u64; 4];
    for (&a, &b) in x.iter().zip(y) {
        let idx = match (a == 1.0, b == 1.0) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        counts[idx] += 1;
    }
    (counts[0], counts[1], counts[2], counts[3])
}

/// Kendall's tau for two binary columns, `2(n_a n_d − n_b n_c)/(n(n−1))`.
pub fn kendall_tau_binary(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    check_binary(x, "first")?;
    check_binary(y, "second")?;
    Ok(tau_binary_unchecked(x, y))
}

pub(crate) fn tau_binary_unchecked(x: &[f64], y: &[f64]) -> f64 {
    let (na, nb, nc, nd) = contingency(x, y);
    let num = na as f64 * nd as f64 - nb as f64 * nc as f64;
    num / pair_count(x.len())
}

/// Kendall's tau for two continuous columns.
pub fn kendall_tau_continuous(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    Ok(concordance_sum(x, y) / pair_count(x.len()))
}

/// Kendall's tau between a binary column and a continuous column,
/// `2/(n(n−1)) Σ_{i<i′} (x_i − x_i′) sign(y_i − y_i′)`.
pub fn kendall_tau_mixed(x_binary: &[f64], y_continuous: &[f64]) -> Result<f64> {
    check_pair(x_binary, y_continuous)?;
    check_binary(x_binary, "binary")?;
    Ok(concordance_sum(x_binary, y_continuous) / pair_count(x_binary.len()))
}

/// `Σ_{i<i′} sign(x_i − x_i′) sign(y_i − y_i′)` via Knight's algorithm:
/// `n0 − n1 − n2 + n3 − 2·(discordant swaps)`.
pub(crate) fn concordance_sum(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    // `+ 0.0` folds −0.0 into 0.0 so total_cmp agrees with ==
    let mut pairs: Vec<(f64, f64)> = x.iter().zip(y).map(|(&a, &b)| (a + 0.0, b + 0.0)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let mut tied_x = 0u64;
    let mut tied_xy = 0u64;
    let mut run_x = 1u64;
    let mut run_xy = 1u64;
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            run_x += 1;
            if w[0].1 == w[1].1 {
                run_xy += 1;
            } else {
                tied_xy += run_xy * (run_xy - 1) / 2;
                run_xy = 1;
            }
        } else {
            tied_x += run_x * (run_x - 1) / 2;
            tied_xy += run_xy * (run_xy - 1) / 2;
            run_x = 1;
            run_xy = 1;
        }
    }
    tied_x += run_x * (run_x - 1) / 2;
    tied_xy += run_xy * (run_xy - 1) / 2;

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);

    let mut tied_y = 0u64;
    let mut run_y = 1u64;
    for w in ys.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            tied_y += run_y * (run_y - 1) / 2;
            run_y = 1;
        }
    }
    tied_y += run_y * (run_y - 1) / 2;

    let untied = n0 as i128 - tied_x as i128 - tied_y as i128 + tied_xy as i128;
    (untied - 2 * swaps as i128) as f64
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j].total_cmp(&v[i]) == Ordering::Less {
            buf[k] = v[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}
