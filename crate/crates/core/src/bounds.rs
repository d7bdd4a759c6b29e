//! Closed-form decay bounds for the two worked examples.

use std::f64::consts::PI;

/// `ln(1 + 2π/(1+T))`, the bound on `|φ(t+2π) − φ(t)|` for `t ≥ T` when
/// `φ(t) = cos(t + ln(1+t))`.
pub fn ex4_1_bound(t: f64) -> f64 {
    (2.0 * PI / (1.0 + t)).ln_1p()
}

/// `A^{2/3} + A^{1/3}B^{1/3} + B^{2/3}` with `A = π³+(t+τ)²`, `B = π³+t²`;
/// it divides `A − B` in the difference of cube roots.
pub fn ex4_2_denominator(t: f64, tau: f64) -> f64 {
    let pi3 = PI.powi(3);
    let a = (pi3 + (t + tau) * (t + tau)).cbrt();
    let b = (pi3 + t * t).cbrt();
    a * a + a * b + b * b
}

/// `τ(t+τ) / (A^{2/3} + A^{1/3}B^{1/3} + B^{2/3})`, the bound on
/// `|F(t+τ) − F(t)|` in the form it is usually quoted.
///
/// Since `A − B = τ(2t+τ)`, this quantity is smaller than the true
/// difference of cube roots by about a factor 2 for `t ≫ τ`, and measured
/// discrepancies exceed it; see [`ex4_2_bound_corrected`].
pub fn ex4_2_bound(t: f64, tau: f64) -> f64 {
    tau * (t + tau) / ex4_2_denominator(t, tau)
}

/// `τ(2t+τ) / (A^{2/3} + A^{1/3}B^{1/3} + B^{2/3}) = A^{1/3} − B^{1/3}`,
/// which dominates `|sin A^{1/3} − sin B^{1/3}|`.
pub fn ex4_2_bound_corrected(t: f64, tau: f64) -> f64 {
    tau * (2.0 * t + tau) / ex4_2_denominator(t, tau)
}

/// Smallest `T` with `ex4_1_bound(T) ≤ ε`: `2π/(e^ε − 1) − 1`.
pub fn ex4_1_threshold(epsilon: f64) -> f64 {
    2.0 * PI / epsilon.exp_m1() - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ex4_1_bound_reference_values() {
        // 40-digit references
        assert!((ex4_1_bound(100.0) - 0.060_351_413_219_898_561).abs() < 1e-15);
        assert!((ex4_1_bound(1000.0) - 0.006_257_290_658_963_922).abs() < 1e-16);
        assert!((ex4_1_bound(10000.0) - 0.000_628_058_435_151_594_7).abs() < 1e-17);
    }

    #[test]
    fn corrected_bound_is_cube_root_difference() {
        for (t, tau) in [(0.0, 1.0), (50.0, 2f64.sqrt()), (1e4, PI)] {
            let pi3 = PI.powi(3);
            let direct = (pi3 + (t + tau) * (t + tau)).cbrt() - (pi3 + t * t).cbrt();
            assert!((ex4_2_bound_corrected(t, tau) - direct).abs() < 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn threshold_inverts_bound() {
        let l = ex4_1_threshold(0.05);
        assert!((l - 121.548_292_338).abs() < 1e-8);
        assert!((ex4_1_bound(l) - 0.05).abs() < 1e-14);
    }
}
