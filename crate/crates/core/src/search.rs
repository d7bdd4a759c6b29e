//! One-dimensional searches shared by the metrics and scanners.

use crate::error::Result;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> Result<f64>>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut iter = 0;
    while (b - a).abs() > tol && iter < 200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        iter += 1;
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for cand in [(a, fa), (b, fb)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub at: f64,
    pub value: f64,
}

const REFINE_ROUNDS: usize = 3;
const REFINE_FACTOR: usize = 10;
const MAX_CANDIDATES: usize = 8;

/// Maximum of `g` on `[a, b]`: uniform sampling at `per_unit` points per
/// time unit, then three rounds of 10× local refinement around every
/// sampled local maximum that could still be the global one (within the
/// largest second difference of the running maximum), then a golden-section
/// polish.
pub fn refined_max<G: FnMut(f64) -> Result<f64>>(mut g: G, a: f64, b: f64, per_unit: usize) -> Result<Peak> {
    if b <= a {
        let v = g(a)?;
        return Ok(Peak { at: a, value: v });
    }
    let n = ((b - a) * per_unit.max(1) as f64).ceil().max(2.0) as usize;
    let h = (b - a) / n as f64;
    let node = |i: usize| if i == n { b } else { a + i as f64 * h };
    let mut values = Vec::with_capacity(n + 1);
    for i in 0..=n {
        values.push(g(node(i))?);
    }
    let (mut best_i, mut best) = (0, values[0]);
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let curvature = values.windows(3).map(|w| (w[0] - 2.0 * w[1] + w[2]).abs()).fold(0.0, f64::max);
    let threshold = best - curvature;
    let mut candidates: Vec<usize> = (0..=n)
        .filter(|&i| {
            let v = values[i];
            let left = i == 0 || values[i - 1] <= v;
            let right = i == n || values[i + 1] <= v;
            left && right && v >= threshold
        })
        .collect();
    candidates.sort_by(|&x, &y| values[y].total_cmp(&values[x]).then(x.cmp(&y)));
    candidates.truncate(MAX_CANDIDATES);
    if !candidates.contains(&best_i) {
        candidates.push(best_i);
    }

    let mut peak = Peak { at: node(best_i), value: best };
    for &i in &candidates {
        let mut center = node(i);
        let mut center_value = values[i];
        let mut spacing = h;
        for _ in 0..REFINE_ROUNDS {
            let fine = spacing / REFINE_FACTOR as f64;
            let lo = (center - spacing).max(a);
            let hi = (center + spacing).min(b);
            let steps = ((hi - lo) / fine).round() as usize;
            for k in 0..=steps {
                let t = (lo + k as f64 * fine).min(hi);
                let v = g(t)?;
                if v > center_value {
                    center_value = v;
                    center = t;
                }
            }
            spacing = fine;
        }
        let lo = (center - spacing).max(a);
        let hi = (center + spacing).min(b);
        if hi > lo {
            let (t, neg) = golden_min(|t| g(t).map(|v| -v), lo, hi, 1e-12 * (1.0 + center.abs()))?;
            if -neg > center_value {
                center_value = -neg;
                center = t;
            }
        }
        if center_value > peak.value {
            peak = Peak { at: center, value: center_value };
        }
    }
    Ok(peak)
}
