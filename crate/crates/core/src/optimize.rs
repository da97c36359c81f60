//! One-dimensional maximization helpers shared by the supremum computations.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a local maximum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol * max(1, |x|)` or after
/// `max_iter` contractions. Returns `(x, f(x))` for the best point seen.
pub fn golden_section_max<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol * x1.abs().max(1.0) {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }

    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes `f` over the grid `lo + (hi - lo) k / n` for `k` in `k_range`,
/// then refines the best few local peaks by golden-section search.
///
/// The returned value is never below the best grid sample.
pub fn scan_then_refine_max<F>(f: F, lo: f64, hi: f64, n: usize, include_lo: bool, peaks: usize, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let start = if include_lo { 0 } else { 1 };
    let step = (hi - lo) / n as f64;
    let point = |k: usize| if k == n { hi } else { lo + step * k as f64 };
    let samples: Vec<(usize, f64)> = (start..=n).map(|k| (k, f(point(k)))).collect();

    // local maxima of the sampled sequence, best first
    let mut candidates: Vec<(usize, f64)> = samples
        .iter()
        .enumerate()
        .filter(|(i, (_, v))| {
            let left = if *i == 0 { f64::NEG_INFINITY } else { samples[i - 1].1 };
            let right = samples.get(i + 1).map_or(f64::NEG_INFINITY, |s| s.1);
            *v >= left && *v >= right
        })
        .map(|(_, s)| *s)
        .collect();
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1));
    candidates.truncate(peaks.max(1));

    let (mut best_x, mut best_v) = (point(candidates[0].0), candidates[0].1);
    for &(k, _) in &candidates {
        let a = if k > start { point(k - 1) } else { point(k) };
        let b = if k < n { point(k + 1) } else { point(k) };
        if b <= a {
            continue;
        }
        let (x, v) = golden_section_max(&f, a, b, tol, 200);
        if v > best_v {
            best_x = x;
            best_v = v;
        }
    }
    (best_x, best_v)
}
