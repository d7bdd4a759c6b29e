//! Quadrature: adaptive Simpson for primitives, fixed composite Simpson
//! for window integrals, and a sliding-window kernel for scans.
//!
//! The composite rule has strictly positive weights, so a window
//! `(Σ w_i |f_i − g_i|^p)^{1/p}` is an honest weighted ℓ^p seminorm and
//! Minkowski's inequality holds for the discretized metrics as well.

use crate::error::{LabError, Result};
use crate::function::FunctionHandle;

/// Default subdivision budget for adaptive quadrature (panels).
pub const DEFAULT_PANEL_BUDGET: usize = 1 << 20;

const MAX_DEPTH: u32 = 48;

/// Sum with a fixed binary tree shape, independent of thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Adaptive Simpson with bisection and Richardson correction on `[a, b]`
/// (`b < a` is allowed and flips the sign). Fails with
/// [`LabError::Accuracy`] when the panel budget runs out, reporting the best
/// estimate and its error bound.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, budget: usize) -> Result<Quad> {
    if !(tol > 0.0) {
        return Err(LabError::Argument(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(Quad { value: 0.0, error: 0.0, panels: 0 });
    }
    if b < a {
        let q = adaptive_simpson(f, b, a, tol, budget)?;
        return Ok(Quad { value: -q.value, ..q });
    }
    let len = b - a;
    // At least one initial panel per time unit so oscillatory integrands
    // are not under-sampled by the first Simpson estimate.
    let initial = (len.ceil() as usize).clamp(1, (budget / 4).max(1));
    let h = len / initial as f64;
    let mut stack = Vec::with_capacity(64);
    for k in (0..initial).rev() {
        let sa = a + k as f64 * h;
        let sb = if k + 1 == initial { b } else { a + (k + 1) as f64 * h };
        let sm = 0.5 * (sa + sb);
        let (fa, fm, fb) = (f(sa), f(sm), f(sb));
        stack.push(Segment { a: sa, b: sb, fa, fm, fb, whole: simpson(sa, sb, fa, fm, fb), tol: tol * (sb - sa) / len, depth: 0 });
    }

    let mut total = KahanSum::default();
    let mut error = 0.0;
    let mut panels = initial;
    let mut exhausted = false;
    while let Some(s) = stack.pop() {
        let m = 0.5 * (s.a + s.b);
        let (lm, rm) = (0.5 * (s.a + m), 0.5 * (m + s.b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(s.a, m, s.fa, flm, s.fm);
        let right = simpson(m, s.b, s.fm, frm, s.fb);
        let diff = left + right - s.whole;
        if !diff.is_finite() {
            return Err(LabError::Domain(format!("integrand not finite near t = {m}")));
        }
        if diff.abs() <= 15.0 * s.tol || s.depth >= MAX_DEPTH || exhausted || m <= s.a || m >= s.b {
            total.add(left + right + diff / 15.0);
            error += diff.abs() / 15.0;
            continue;
        }
        if panels >= budget {
            exhausted = true;
            total.add(left + right + diff / 15.0);
            error += diff.abs() / 15.0;
            continue;
        }
        panels += 1;
        stack.push(Segment { a: m, b: s.b, fa: s.fm, fm: frm, fb: s.fb, whole: right, tol: 0.5 * s.tol, depth: s.depth + 1 });
        stack.push(Segment { a: s.a, b: m, fa: s.fa, fm: flm, fb: s.fm, whole: left, tol: 0.5 * s.tol, depth: s.depth + 1 });
    }
    let value = total.value();
    if exhausted && error > tol {
        return Err(LabError::Accuracy { estimate: vec![value], error_bound: error });
    }
    Ok(Quad { value, error, panels })
}

/// `∫_a^b f(s) ds` of every component of a handle.
pub fn integrate(f: &FunctionHandle, a: f64, b: f64, tol: f64) -> Result<Vec<f64>> {
    integrate_with_budget(f, a, b, tol, DEFAULT_PANEL_BUDGET)
}

/// [`integrate`] with an explicit panel budget per component.
pub fn integrate_with_budget(f: &FunctionHandle, a: f64, b: f64, tol: f64, budget: usize) -> Result<Vec<f64>> {
    f.check_window(a.min(b), a.max(b))?;
    let dim = f.dim();
    let mut out = Vec::with_capacity(dim);
    let mut failed_bound: Option<f64> = None;
    for k in 0..dim {
        let component = |s: f64| {
            let mut buf = [0.0; 16];
            if dim <= buf.len() {
                f.eval_into(s, &mut buf[..dim]).map(|_| buf[k]).unwrap_or(f64::NAN)
            } else {
                f.evaluate(s).map(|v| v[k]).unwrap_or(f64::NAN)
            }
        };
        match adaptive_simpson(component, a, b, tol / dim as f64, budget) {
            Ok(q) => out.push(q.value),
            Err(LabError::Accuracy { estimate, error_bound }) => {
                out.push(estimate[0]);
                failed_bound = Some(failed_bound.unwrap_or(0.0) + error_bound);
            }
            Err(e) => return Err(e),
        }
    }
    match failed_bound {
        Some(bound) => Err(LabError::Accuracy { estimate: out, error_bound: bound }),
        None => Ok(out),
    }
}

/// The primitive `∫_0^t f(s) ds`.
pub fn primitive(f: &FunctionHandle, t: f64, tol: f64) -> Result<Vec<f64>> {
    if !f.domain().contains(t) {
        return Err(LabError::Domain(format!("t = {t} outside the domain of {}", f.name())));
    }
    integrate(f, 0.0, t, tol)
}

/// Smallest even panel count covering `length` at `samples_per_unit`.
pub fn even_panels(length: f64, samples_per_unit: usize) -> usize {
    let n = (length * samples_per_unit as f64).ceil().max(2.0) as usize;
    n + n % 2
}

/// Composite Simpson sum over equally spaced `values` (odd length).
pub fn composite_simpson(values: &[f64], h: f64) -> f64 {
    debug_assert!(values.len() % 2 == 1 && values.len() >= 3);
    let last = values.len() - 1;
    let weighted: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == last {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * v
        })
        .collect();
    h / 3.0 * pairwise_sum(&weighted)
}

/// Composite Simpson integrals of every length-`panels` window of a
/// sampled sequence in O(1) per window, via double-word prefix sums.
pub struct SlidingSimpson {
    all: Vec<(f64, f64)>,
    by_parity: [Vec<(f64, f64)>; 2],
    values: Vec<f64>,
    h: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn push_prefix(prefix: &mut Vec<(f64, f64)>, x: f64) {
    let (hi, lo) = *prefix.last().unwrap();
    let (s, e) = two_sum(hi, x);
    prefix.push((s, lo + e));
}

fn range_sum(prefix: &[(f64, f64)], from: usize, to: usize) -> f64 {
    let (h1, l1) = prefix[to];
    let (h0, l0) = prefix[from];
    (h1 - h0) + (l1 - l0)
}

impl SlidingSimpson {
    pub fn new(values: Vec<f64>, h: f64) -> SlidingSimpson {
        let mut all = Vec::with_capacity(values.len() + 1);
        all.push((0.0, 0.0));
        let mut even = Vec::with_capacity(values.len() + 1);
        let mut odd = Vec::with_capacity(values.len() + 1);
        even.push((0.0, 0.0));
        odd.push((0.0, 0.0));
        for (i, &v) in values.iter().enumerate() {
            push_prefix(&mut all, v);
            push_prefix(&mut even, if i % 2 == 0 { v } else { 0.0 });
            push_prefix(&mut odd, if i % 2 == 1 { v } else { 0.0 });
        }
        SlidingSimpson { all, by_parity: [even, odd], values, h }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Simpson integral over samples `start ..= start + panels`
    /// (`panels` even).
    pub fn window(&self, start: usize, panels: usize) -> f64 {
        debug_assert!(panels.is_multiple_of(2) && start + panels < self.values.len());
        let end = start + panels;
        let total = range_sum(&self.all, start, end + 1);
        // Entries at odd offsets from `start` have the opposite parity.
        let odd_offsets = range_sum(&self.by_parity[(start + 1) % 2], start, end + 1);
        self.h / 3.0 * (2.0 * total + 2.0 * odd_offsets - self.values[start] - self.values[end])
    }
}
