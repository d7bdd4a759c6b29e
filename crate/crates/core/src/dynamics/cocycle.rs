//! The primitive cocycle `φ(t, v, ψ) = v + ∫_0^t ψ(s) ds` over the shift
//! flow, and sampled primitives built from it.

use rayon::prelude::*;

use super::orbit::{view_grid, Lookahead, OrbitMetric, OrbitSample};
use crate::error::{LabError, Result};
use crate::function::{FunctionHandle, GridSpec, TimeDomain};
use crate::quadrature::{integrate_with_budget, primitive, KahanSum};

/// `v + ∫_0^t ψ(s) ds`. Satisfies `φ(t+τ, v, ψ) = φ(t, φ(τ, v, ψ), ψ^τ)`.
pub fn cocycle_primitive(t: f64, v: &[f64], psi: &FunctionHandle, quad_tol: f64) -> Result<Vec<f64>> {
    if v.len() != psi.dim() {
        return Err(LabError::Shape(format!("initial value has {} components, ψ has {}", v.len(), psi.dim())));
    }
    if t == 0.0 {
        return Ok(v.to_vec());
    }
    let q = primitive(psi, t, quad_tol)?;
    Ok(v.iter().zip(q).map(|(a, b)| a + b).collect())
}

const MIN_CHUNK: f64 = 64.0;
const CHUNK_BUDGET: usize = 1 << 14;

/// `∫_a^b ψ` over a long range, split into chunks of length
/// `max(64, |t|/100)`, each integrated to `quad_tol`. Far out, rounding in
/// `ψ` itself can sit above `quad_tol`; a chunk that exhausts its panel
/// budget contributes its best estimate.
pub fn integrate_long(psi: &FunctionHandle, a: f64, b: f64, quad_tol: f64) -> Result<Vec<f64>> {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut sums = vec![KahanSum::default(); psi.dim()];
    let mut x = lo;
    while x < hi {
        let y = (x + MIN_CHUNK.max(x.abs() / 100.0)).min(hi);
        let part = match integrate_with_budget(psi, x, y, quad_tol, CHUNK_BUDGET) {
            Ok(v) => v,
            Err(LabError::Accuracy { estimate, .. }) => estimate,
            Err(e) => return Err(e),
        };
        for (s, p) in sums.iter_mut().zip(part) {
            s.add(p);
        }
        x = y;
    }
    Ok(sums.iter().map(|s| sign * s.value()).collect())
}

/// Per-step Simpson integrals of `ψ` on `[t0 + i·step, t0 + (i+1)·step]`,
/// `dim` values per step.
fn step_integrals(psi: &FunctionHandle, t0: f64, step: f64, steps: usize) -> Result<Vec<f64>> {
    let dim = psi.dim();
    let mut out = vec![0.0; steps * dim];
    out.par_chunks_mut(dim).enumerate().try_for_each(|(i, q)| -> Result<()> {
        let a = t0 + i as f64 * step;
        let mut fa = [0.0; 16];
        let mut fm = [0.0; 16];
        let mut fb = [0.0; 16];
        if dim > fa.len() {
            return Err(LabError::Unsupported(format!("sampled primitives of dimension {dim}")));
        }
        psi.eval_into(a, &mut fa[..dim])?;
        psi.eval_into(a + 0.5 * step, &mut fm[..dim])?;
        psi.eval_into(a + step, &mut fb[..dim])?;
        for k in 0..dim {
            q[k] = step / 6.0 * (fa[k] + 4.0 * fm[k] + fb[k]);
        }
        Ok(())
    })?;
    Ok(out)
}

/// Running sums `v + Σ_{j<i} q_j` as a node table.
fn accumulate(v: &[f64], q: &[f64], dim: usize) -> Vec<f64> {
    let mut sums: Vec<KahanSum> = v
        .iter()
        .map(|&x| {
            let mut s = KahanSum::default();
            s.add(x);
            s
        })
        .collect();
    let mut out = Vec::with_capacity(q.len() + dim);
    out.extend_from_slice(v);
    for row in q.chunks(dim) {
        for (s, x) in sums.iter_mut().zip(row) {
            s.add(*x);
        }
        out.extend(sums.iter().map(|s| s.value()));
    }
    out
}

/// The primitive `F(t) = ∫_0^t ψ` sampled on `[lower, upper]` with
/// `lower ≤ 0 ≤ upper`, by per-step Simpson sums.
pub fn sampled_primitive(psi: &FunctionHandle, lower: f64, upper: f64, step: f64) -> Result<FunctionHandle> {
    if !(step > 0.0) || !(lower <= 0.0 && upper > 0.0) {
        return Err(LabError::Argument(format!("primitive range [{lower}, {upper}] must contain 0, step {step}")));
    }
    if psi.domain() == TimeDomain::HalfLine && lower < 0.0 {
        return Err(LabError::Domain("negative times on the half-line".into()));
    }
    let dim = psi.dim();
    let right = (upper / step).ceil() as usize;
    let left = (-lower / step).ceil() as usize;
    let forward = accumulate(&vec![0.0; dim], &step_integrals(psi, 0.0, step, right)?, dim);
    let values = if left == 0 {
        forward
    } else {
        // Integrate leftwards from 0: F(−(i+1)h) = F(−ih) − ∫ over that step.
        let back_q: Vec<f64> = step_integrals(psi, -(left as f64) * step, step, left)?
            .chunks(dim)
            .rev()
            .flat_map(|r| r.iter().map(|x| -x).collect::<Vec<_>>())
            .collect();
        let back = accumulate(&vec![0.0; dim], &back_q, dim);
        let mut all: Vec<f64> = back.chunks(dim).skip(1).rev().flatten().copied().collect();
        all.extend(forward);
        all
    };
    let grid = GridSpec::with_nodes(-(left as f64) * step, step, left + right + 1)?;
    Ok(FunctionHandle::sampled(psi.domain(), grid, dim, values)?.with_name(format!("prim({})", psi.name())).with_norm(psi.norm()))
}

/// Translates of the primitive `F` of `ψ` at `times`, built from the
/// cocycle: `F^h(s) = F(h) + ∫_h^{h+s} ψ`. `extra` time units past the
/// viewing window are kept for translate fits.
pub fn primitive_orbit(
    psi: &FunctionHandle,
    times: &[f64],
    l_view: f64,
    resolution: usize,
    metric: OrbitMetric,
    extra: f64,
    quad_tol: f64,
) -> Result<OrbitSample> {
    if times.is_empty() || times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < 0.0 {
        return Err(LabError::Argument("orbit times must be nonempty, nonnegative and strictly increasing".into()));
    }
    if !(extra >= 0.0) {
        return Err(LabError::Argument(format!("lookahead must be nonnegative, got {extra}")));
    }
    let view = view_grid(l_view, resolution)?;
    let ext_nodes = view.nodes + (extra / view.step).ceil() as usize;
    let dim = psi.dim();
    let mut offsets = Vec::with_capacity(times.len());
    let mut v = vec![0.0; dim];
    let mut prev = 0.0;
    for &h in times {
        let d = integrate_long(psi, prev, h, quad_tol)?;
        v.iter_mut().zip(d).for_each(|(a, b)| *a += b);
        offsets.push(v.clone());
        prev = h;
    }
    let name = format!("prim({})", psi.name());
    let built = times
        .iter()
        .zip(&offsets)
        .map(|(&h, v0)| {
            let table = accumulate(v0, &step_integrals(psi, h, view.step, ext_nodes - 1)?, dim);
            let ext = FunctionHandle::sampled(TimeDomain::HalfLine, GridSpec::with_nodes(0.0, view.step, ext_nodes)?, dim, table.clone())?
                .with_name(format!("{name}^{h}"))
                .with_norm(psi.norm());
            let shown = FunctionHandle::sampled(TimeDomain::HalfLine, view, dim, table[..view.nodes * dim].to_vec())?
                .with_name(format!("{name}^{h}"))
                .with_norm(psi.norm());
            Ok((shown, ext))
        })
        .collect::<Result<Vec<_>>>()?;
    let (translates, extended): (Vec<_>, Vec<_>) = built.into_iter().unzip();
    Ok(OrbitSample { base: name, times: times.to_vec(), l_view, resolution, metric, translates, lookahead: Lookahead::Extended(extended) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::builders;

    #[test]
    fn zero_time_and_zero_integrand() {
        let v = [0.3];
        assert_eq!(cocycle_primitive(0.0, &v, &builders::ex4_1_mu(), 1e-9).unwrap(), vec![0.3]);
        for t in [0.5, 3.0, 40.0] {
            assert_eq!(cocycle_primitive(t, &v, &builders::zero(), 1e-9).unwrap(), vec![0.3]);
        }
    }

    #[test]
    fn sampled_primitive_of_cos_is_sin() {
        let cos = builders::trig_polynomial(TimeDomain::FullLine, &[(1.0, 1.0, std::f64::consts::FRAC_PI_2)]);
        let f = sampled_primitive(&cos, -10.0, 30.0, 0.01).unwrap();
        for t in [-9.3, -1.0, 0.0, 2.5, 29.9] {
            assert!((f.eval_scalar(t).unwrap() - t.sin()).abs() < 2e-5, "{t}");
        }
    }

    #[test]
    fn long_integral_matches_closed_form() {
        let v = integrate_long(&builders::ex4_1_mu(), 0.0, 5000.0, 1e-10).unwrap()[0];
        let exact = (5000.0f64 + 5001.0f64.ln()).sin();
        assert!((v - exact).abs() < 1e-7, "{v} vs {exact}");
    }

    #[test]
    fn primitive_orbit_translates_follow_closed_form() {
        let s = primitive_orbit(&builders::cos(), &[3.0, 100.0], 5.0, 20, OrbitMetric::CompactOpen, 2.0, 1e-11).unwrap();
        for (k, &h) in s.times.iter().enumerate() {
            let t = &s.translates[k];
            for x in [0.0, 1.3, 5.0] {
                assert!((t.eval_scalar(x).unwrap() - (h + x).sin()).abs() < 1e-8);
            }
            assert!((s.lookahead(k).unwrap().eval_scalar(6.5).unwrap() - (h + 6.5).sin()).abs() < 1e-8);
        }
    }
}
