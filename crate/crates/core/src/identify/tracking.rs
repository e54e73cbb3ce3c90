/// D-Tracking: forced exploration of arms with `N_a ≤ (√t - K/2)₊`, otherwise
/// the arm furthest behind its target `t w_a`. Ties go to the lowest index.
pub fn tracking_step(counts: &[u64], weights: &[f64]) -> usize {
    let k = counts.len();
    let t: u64 = counts.iter().sum();
    let floor = ((t as f64).sqrt() - k as f64 / 2.0).max(0.0);
    let mut under: Option<usize> = None;
    for (a, &n) in counts.iter().enumerate() {
        if n as f64 <= floor && under.is_none_or(|u| n < counts[u]) {
            under = Some(a);
        }
    }
    if let Some(a) = under {
        return a;
    }
    let tf = t as f64;
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (a, (&n, &w)) in counts.iter().zip(weights).enumerate() {
        let v = tf * w - n as f64;
        if v > best_v {
            best = a;
            best_v = v;
        }
    }
    best
}

/// Round robin: the least pulled arm, lowest index on ties.
pub fn uniform_step(counts: &[u64]) -> usize {
    let mut best = 0;
    for (a, &n) in counts.iter().enumerate() {
        if n < counts[best] {
            best = a;
        }
    }
    best
}

/// `(√t - K/2)₊ - 1`, the count every arm keeps above under
/// [`tracking_step`].
pub fn tracking_floor(t: u64, arms: usize) -> f64 {
    ((t as f64).sqrt() - arms as f64 / 2.0).max(0.0) - 1.0
}
