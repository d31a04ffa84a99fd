use crate::{Error, Result, TOLERANCE};

fn validate(seq: &[f64], k: f64) -> Result<()> {
    if seq.len() < 2 {
        return Err(Error::param("sequence needs at least two terms"));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::param(format!("K must be a finite number >= 1, got {k}")));
    }
    for (index, &v) in seq.iter().enumerate() {
        if !(v >= 1.0 - TOLERANCE && v <= k + TOLERANCE) {
            return Err(Error::OutOfRange {
                index,
                value: v,
                lo: 1.0,
                hi: k,
            });
        }
    }
    for (index, w) in seq.windows(2).enumerate() {
        if w[1] > w[0] + TOLERANCE {
            return Err(Error::NotMonotone {
                index,
                prev: w[0],
                next: w[1],
            });
        }
    }
    Ok(())
}

/// For a non-increasing sequence `k_0 >= ... >= k_n` in `[1, K]`, the
/// smallest `i` with `k_i - k_{i+1} <= (K - 1) / n`.
///
/// Such an index exists because the `n` consecutive drops add up to at most
/// `K - 1`; at it `k_i / k_{i+1} <= 1 + K / (n k_{i+1})`, and when
/// `n >= K^p` also `k_i / k_{i+1} <= 1 + 1 / k_{i+1}^p`.
pub fn sequence_stable_index(seq: &[f64], k: f64) -> Result<usize> {
    validate(seq, k)?;
    let n = (seq.len() - 1) as f64;
    let step = (k - 1.0) / n;
    let drops = seq.windows(2).map(|w| w[0] - w[1]);
    if let Some(i) = drops.clone().position(|d| d <= step) {
        return Ok(i);
    }
    // only reachable through rounding in the tolerated range; fall back to
    // the smallest drop
    Ok(drops
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .expect("at least one drop"))
}

/// `1 + K / (n k_{i+1})`.
pub fn ratio_bound(seq: &[f64], k: f64, i: usize) -> f64 {
    let n = (seq.len() - 1) as f64;
    1.0 + k / (n * seq[i + 1])
}

/// `1 + 1 / k_{i+1}^p`, valid when `n >= K^p`.
pub fn refined_ratio_bound(seq: &[f64], p: f64, i: usize) -> f64 {
    1.0 + 1.0 / seq[i + 1].powf(p)
}
