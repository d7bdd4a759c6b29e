//! Ready-made handles, including the two worked examples.
//!
//! The vanishing integrand `ex4_2_phi` is built with the chain-rule factor 1/3, so that
//! `ex4_2_f` is exactly its primitive; the formula as usually printed
//! (without the factor) is kept as [`ex4_2_phi_as_printed`] and integrates
//! to `3·sin((π³+t²)^{1/3})`.

use std::f64::consts::PI;

use super::expr::Expr;
use super::handle::{FunctionHandle, TimeDomain};
use crate::error::{LabError, Result};

fn half_line(expr: Expr, name: &str) -> FunctionHandle {
    FunctionHandle::scalar(TimeDomain::HalfLine, expr).expect("builder expressions are valid on the half-line").with_name(name)
}

pub fn constant(c: f64) -> FunctionHandle {
    half_line(Expr::constant(c), &format!("constant({c})"))
}

pub fn zero() -> FunctionHandle {
    half_line(Expr::constant(0.0), "zero")
}

pub fn identity() -> FunctionHandle {
    half_line(Expr::Identity, "identity")
}

pub fn sin() -> FunctionHandle {
    half_line(Expr::sin(Expr::Identity), "sin")
}

pub fn cos() -> FunctionHandle {
    half_line(Expr::cos(Expr::Identity), "cos")
}

/// `Σ a_k sin(ω_k t + θ_k)` on the given domain.
pub fn trig_polynomial(domain: TimeDomain, terms: &[(f64, f64, f64)]) -> FunctionHandle {
    let expr =
        Expr::sum(terms.iter().map(|&(a, w, phase)| Expr::product(vec![Expr::constant(a), Expr::sin(Expr::affine(w, phase))])).collect());
    FunctionHandle::scalar(domain, expr).expect("trigonometric polynomials are total").with_name("trig_poly")
}

/// `Σ c_k t^k`.
pub fn polynomial(coeffs: &[f64]) -> FunctionHandle {
    let expr = Expr::sum(
        coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| match k {
                0 => Expr::constant(c),
                _ => Expr::product(vec![Expr::constant(c), Expr::power(Expr::Identity, k as i32, 1)]),
            })
            .collect(),
    );
    half_line(expr, "polynomial")
}

/// `t + ln(1 + t)`
fn log_phase() -> Expr {
    Expr::sum(vec![Expr::Identity, Expr::ln1p(Expr::Identity)])
}

/// `ψ(t) = sin(t + ln(1+t))`
pub fn ex4_1_psi() -> FunctionHandle {
    half_line(Expr::sin(log_phase()), "ex4_1_psi")
}

/// `φ(t) = cos(t + ln(1+t))`
pub fn ex4_1_phi() -> FunctionHandle {
    half_line(Expr::cos(log_phase()), "ex4_1_phi")
}

/// `μ(t) = (1 + 1/(1+t))·cos(t + ln(1+t))`, the derivative of ψ.
pub fn ex4_1_mu() -> FunctionHandle {
    let factor = Expr::sum(vec![Expr::constant(1.0), Expr::quotient(Expr::constant(1.0), Expr::affine(1.0, 1.0))]);
    half_line(Expr::product(vec![factor, Expr::cos(log_phase())]), "ex4_1_mu")
}

/// `π³ + t²`
fn ex4_2_base() -> Expr {
    Expr::sum(vec![Expr::constant(PI.powi(3)), Expr::power(Expr::Identity, 2, 1)])
}

/// `(π³ + t²)^{1/3}`
fn ex4_2_phase() -> Expr {
    Expr::power(ex4_2_base(), 1, 3)
}

fn ex4_2_integrand(scale: f64) -> Expr {
    Expr::product(vec![Expr::constant(scale), Expr::Identity, Expr::power(ex4_2_base(), -2, 3), Expr::cos(ex4_2_phase())])
}

/// `F(t) = sin((π³+t²)^{1/3})`
pub fn ex4_2_f() -> FunctionHandle {
    half_line(Expr::sin(ex4_2_phase()), "ex4_2_F")
}

/// `φ(t) = (2t/3)·(π³+t²)^{-2/3}·cos((π³+t²)^{1/3})`, so that `F' = φ`.
pub fn ex4_2_phi() -> FunctionHandle {
    half_line(ex4_2_integrand(2.0 / 3.0), "ex4_2_phi")
}

/// `2t·(π³+t²)^{-2/3}·cos((π³+t²)^{1/3})`, three times [`ex4_2_phi`].
pub fn ex4_2_phi_as_printed() -> FunctionHandle {
    half_line(ex4_2_integrand(2.0), "ex4_2_phi_as_printed")
}

/// Names accepted by [`by_name`].
pub const BUILDER_NAMES: &[&str] =
    &["zero", "constant", "identity", "sin", "cos", "ex4_1_psi", "ex4_1_phi", "ex4_1_mu", "ex4_2_phi", "ex4_2_phi_as_printed", "ex4_2_F"];

/// Resolves a builder by name. `constant` is the constant 1; `constant:<c>`
/// selects another value.
pub fn by_name(name: &str) -> Result<FunctionHandle> {
    if let Some(value) = name.strip_prefix("constant:") {
        let c: f64 = value.parse().map_err(|_| LabError::Argument(format!("bad constant value in builder name {name:?}")))?;
        return Ok(constant(c));
    }
    Ok(match name {
        "zero" => zero(),
        "constant" => constant(1.0),
        "identity" => identity(),
        "sin" => sin(),
        "cos" => cos(),
        "ex4_1_psi" => ex4_1_psi(),
        "ex4_1_phi" => ex4_1_phi(),
        "ex4_1_mu" => ex4_1_mu(),
        "ex4_2_phi" => ex4_2_phi(),
        "ex4_2_phi_as_printed" => ex4_2_phi_as_printed(),
        "ex4_2_F" | "ex4_2_f" => ex4_2_f(),
        other => return Err(LabError::Argument(format!("unknown builder {other:?}; expected one of {}", BUILDER_NAMES.join(", ")))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_anchor_values() {
        assert_eq!(ex4_1_psi().eval_scalar(0.0).unwrap(), 0.0);
        assert_eq!(ex4_1_phi().eval_scalar(0.0).unwrap(), 1.0);
        assert!(ex4_2_f().eval_scalar(0.0).unwrap().abs() < 1e-15);
        assert_eq!(zero().eval_scalar(17.3).unwrap(), 0.0);
    }

    #[test]
    fn psi_at_ten_matches_extended_precision() {
        // sin(10 + ln 11), 40-digit reference
        let reference = -0.167_679_472_877_568_58;
        assert!((ex4_1_psi().eval_scalar(10.0).unwrap() - reference).abs() < 1e-14);
    }

    #[test]
    fn printed_integrand_is_three_times_corrected() {
        for t in [0.5, 3.0, 10.0, 77.0] {
            let a = ex4_2_phi_as_printed().eval_scalar(t).unwrap();
            let b = ex4_2_phi().eval_scalar(t).unwrap();
            assert!((a - 3.0 * b).abs() < 1e-14);
        }
    }

    #[test]
    fn unknown_builder_rejected() {
        assert!(matches!(by_name("ex9"), Err(LabError::Argument(_))));
        assert_eq!(by_name("constant:2.5").unwrap().eval_scalar(4.0).unwrap(), 2.5);
        for name in BUILDER_NAMES {
            by_name(name).unwrap();
        }
    }
}
