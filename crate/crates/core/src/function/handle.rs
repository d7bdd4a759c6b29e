use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::expr::{Expr, Interval};
use crate::error::{LabError, Result};

/// The time axis a function lives on: `[0, ∞)` or `ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeDomain {
    HalfLine,
    FullLine,
}

impl TimeDomain {
    pub fn contains(self, t: f64) -> bool {
        match self {
            TimeDomain::HalfLine => t >= 0.0 && t.is_finite(),
            TimeDomain::FullLine => t.is_finite(),
        }
    }

    pub fn lower(self) -> f64 {
        match self {
            TimeDomain::HalfLine => 0.0,
            TimeDomain::FullLine => f64::NEG_INFINITY,
        }
    }

    pub(crate) fn interval(self) -> Interval {
        Interval::new(self.lower(), f64::INFINITY)
    }
}

/// Norm used on the (finite-dimensional) value space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointNorm {
    #[default]
    Euclidean,
    Max,
}

impl PointNorm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        if a.len() == 1 {
            return (a[0] - b[0]).abs();
        }
        match self {
            PointNorm::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            PointNorm::Max => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        }
    }

    pub fn norm(self, a: &[f64]) -> f64 {
        if a.len() == 1 {
            return a[0].abs();
        }
        match self {
            PointNorm::Euclidean => a.iter().map(|x| x * x).sum::<f64>().sqrt(),
            PointNorm::Max => a.iter().map(|x| x.abs()).fold(0.0, f64::max),
        }
    }
}

/// Uniform time grid `t_start, t_start + step, …, t_start + (nodes-1)·step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_start: f64,
    pub step: f64,
    pub nodes: usize,
}

impl GridSpec {
    pub fn new(t_start: f64, t_end: f64, step: f64) -> Result<GridSpec> {
        if !(step > 0.0) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(LabError::Argument(format!("bad grid [{t_start}, {t_end}] step {step}")));
        }
        if t_end <= t_start {
            return Err(LabError::Argument(format!("grid end {t_end} must exceed start {t_start}")));
        }
        let count = (t_end - t_start) / step;
        let rounded = count.round();
        if (count - rounded).abs() > 1e-6 * rounded.max(1.0) {
            return Err(LabError::Argument(format!("grid span {} is not an integer multiple of step {step}", t_end - t_start)));
        }
        Self::with_nodes(t_start, step, rounded as usize + 1)
    }

    pub fn with_nodes(t_start: f64, step: f64, nodes: usize) -> Result<GridSpec> {
        if nodes < 2 || !(step > 0.0) {
            return Err(LabError::Argument(format!("grid needs >= 2 nodes and positive step, got {nodes}, {step}")));
        }
        Ok(GridSpec { t_start, step, nodes })
    }

    pub fn t_end(&self) -> f64 {
        self.node(self.nodes - 1)
    }

    pub fn node(&self, i: usize) -> f64 {
        self.t_start + i as f64 * self.step
    }
}

#[derive(Debug)]
enum Backing {
    ClosedForm(Vec<Expr>),
    Sampled {
        grid: GridSpec,
        /// Row-major `nodes × dim`.
        values: Vec<f64>,
        /// Accumulated translation: evaluates the table at `t + shift`.
        shift: f64,
    },
}

#[derive(Debug)]
struct Inner {
    name: String,
    domain: TimeDomain,
    dim: usize,
    norm: PointNorm,
    backing: Backing,
}

/// An immutable, cheaply clonable function `𝕋 → ℝ^dim`.
#[derive(Debug, Clone)]
pub struct FunctionHandle(Arc<Inner>);

impl FunctionHandle {
    /// Closed-form handle with one expression per component. Every
    /// expression must be certified valid on the whole domain.
    pub fn closed_form(domain: TimeDomain, components: Vec<Expr>) -> Result<FunctionHandle> {
        if components.is_empty() {
            return Err(LabError::Shape("codomain dimension must be at least 1".into()));
        }
        for e in &components {
            e.range(domain.interval())?;
        }
        Ok(FunctionHandle(Arc::new(Inner {
            name: String::from("expr"),
            domain,
            dim: components.len(),
            norm: PointNorm::default(),
            backing: Backing::ClosedForm(components),
        })))
    }

    pub fn scalar(domain: TimeDomain, expr: Expr) -> Result<FunctionHandle> {
        Self::closed_form(domain, vec![expr])
    }

    /// Piecewise-linear handle through a value table (`nodes × dim`, row-major).
    pub fn sampled(domain: TimeDomain, grid: GridSpec, dim: usize, values: Vec<f64>) -> Result<FunctionHandle> {
        if dim == 0 {
            return Err(LabError::Shape("codomain dimension must be at least 1".into()));
        }
        if values.len() != grid.nodes * dim {
            return Err(LabError::Shape(format!("value table has {} entries, expected {} nodes x {dim}", values.len(), grid.nodes)));
        }
        if !domain.contains(grid.t_start) {
            return Err(LabError::Domain(format!("grid start {} outside the domain", grid.t_start)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Argument("sampled values must be finite".into()));
        }
        Ok(FunctionHandle(Arc::new(Inner {
            name: String::from("sampled"),
            domain,
            dim,
            norm: PointNorm::default(),
            backing: Backing::Sampled { grid, values, shift: 0.0 },
        })))
    }

    /// Samples `self` on `grid` into a new sampled handle.
    pub fn resample(&self, grid: GridSpec) -> Result<FunctionHandle> {
        let dim = self.dim();
        let mut values = vec![0.0; grid.nodes * dim];
        for (i, row) in values.chunks_mut(dim).enumerate() {
            self.eval_into(grid.node(i), row)?;
        }
        Ok(Self::sampled(self.domain(), grid, dim, values)?.with_name(self.name()).with_norm(self.norm()))
    }

    pub fn with_name(self, name: impl Into<String>) -> FunctionHandle {
        self.rebuild(|inner| inner.name = name.into())
    }

    pub fn with_norm(self, norm: PointNorm) -> FunctionHandle {
        self.rebuild(|inner| inner.norm = norm)
    }

    fn rebuild(self, edit: impl FnOnce(&mut Inner)) -> FunctionHandle {
        let mut inner = match Arc::try_unwrap(self.0) {
            Ok(inner) => inner,
            Err(shared) => Inner {
                name: shared.name.clone(),
                domain: shared.domain,
                dim: shared.dim,
                norm: shared.norm,
                backing: match &shared.backing {
                    Backing::ClosedForm(e) => Backing::ClosedForm(e.clone()),
                    Backing::Sampled { grid, values, shift } => Backing::Sampled { grid: *grid, values: values.clone(), shift: *shift },
                },
            },
        };
        edit(&mut inner);
        FunctionHandle(Arc::new(inner))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn domain(&self) -> TimeDomain {
        self.0.domain
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn norm(&self) -> PointNorm {
        self.0.norm
    }

    pub fn expressions(&self) -> Option<&[Expr]> {
        match &self.0.backing {
            Backing::ClosedForm(e) => Some(e),
            Backing::Sampled { .. } => None,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.0.backing, Backing::Sampled { .. })
    }

    /// The grid of a sampled handle expressed in this handle's own time
    /// (i.e. with the accumulated translation removed), and its table.
    pub fn samples(&self) -> Option<(GridSpec, &[f64])> {
        match &self.0.backing {
            Backing::Sampled { grid, values, shift } => Some((GridSpec { t_start: grid.t_start - shift, ..*grid }, values.as_slice())),
            Backing::ClosedForm(_) => None,
        }
    }

    /// Closed interval on which evaluation is permitted.
    pub fn support(&self) -> (f64, f64) {
        match &self.0.backing {
            Backing::ClosedForm(_) => (self.domain().lower(), f64::INFINITY),
            Backing::Sampled { grid, shift, .. } => ((grid.t_start - shift).max(self.domain().lower()), grid.t_end() - shift),
        }
    }

    /// Errors unless every point of `[a, b]` can be evaluated.
    pub fn check_window(&self, a: f64, b: f64) -> Result<()> {
        let (lo, hi) = self.support();
        let slack = self.slack();
        if !(a.is_finite() && b.is_finite()) || a < lo - slack || b > hi + slack {
            return Err(LabError::Domain(format!("window [{a}, {b}] not inside the evaluable range [{lo}, {hi}] of {}", self.name())));
        }
        Ok(())
    }

    fn slack(&self) -> f64 {
        match &self.0.backing {
            Backing::ClosedForm(_) => 0.0,
            Backing::Sampled { grid, .. } => 1e-9 * grid.step,
        }
    }

    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// Scalar evaluation; the handle must have one component.
    pub fn eval_scalar(&self, t: f64) -> Result<f64> {
        if self.dim() != 1 {
            return Err(LabError::Shape(format!("{} has {} components, expected 1", self.name(), self.dim())));
        }
        let mut out = [0.0];
        self.eval_into(t, &mut out)?;
        Ok(out[0])
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        debug_assert_eq!(out.len(), self.dim());
        if !self.domain().contains(t) {
            return Err(LabError::Domain(format!("t = {t} outside the domain of {}", self.name())));
        }
        match &self.0.backing {
            Backing::ClosedForm(exprs) => {
                for (o, e) in out.iter_mut().zip(exprs) {
                    *o = e.eval(t);
                }
            }
            Backing::Sampled { grid, values, shift } => {
                let x = (t + shift - grid.t_start) / grid.step;
                let last = (grid.nodes - 1) as f64;
                let tol = 1e-9;
                if x < -tol || x > last + tol {
                    return Err(LabError::Domain(format!(
                        "t = {t} outside the sampled range [{}, {}] of {}",
                        grid.t_start - shift,
                        grid.t_end() - shift,
                        self.name()
                    )));
                }
                let x = x.clamp(0.0, last);
                let i = (x.floor() as usize).min(grid.nodes - 2);
                let w = x - i as f64;
                let dim = self.dim();
                let (a, b) = (&values[i * dim..(i + 1) * dim], &values[(i + 1) * dim..(i + 2) * dim]);
                for k in 0..dim {
                    out[k] = a[k] + w * (b[k] - a[k]);
                }
            }
        }
        Ok(())
    }

    /// `t ↦ self(t + h)`.
    pub fn translate(&self, h: f64) -> Result<FunctionHandle> {
        if !h.is_finite() {
            return Err(LabError::Argument(format!("non-finite shift {h}")));
        }
        if self.domain() == TimeDomain::HalfLine && h < 0.0 {
            return Err(LabError::Domain(format!("negative shift {h} leaves the half-line")));
        }
        let backing = match &self.0.backing {
            Backing::ClosedForm(exprs) => Backing::ClosedForm(exprs.iter().map(|e| Expr::translate(e.clone(), h)).collect()),
            Backing::Sampled { grid, values, shift } => Backing::Sampled { grid: *grid, values: values.clone(), shift: shift + h },
        };
        Ok(FunctionHandle(Arc::new(Inner {
            name: format!("{}^{h}", self.name()),
            domain: self.domain(),
            dim: self.dim(),
            norm: self.norm(),
            backing,
        })))
    }

    /// Symbolic derivative of a closed-form handle.
    pub fn differentiate(&self) -> Result<FunctionHandle> {
        let exprs = self.expressions().ok_or_else(|| LabError::Unsupported("differentiation of a sampled handle".into()))?;
        let dom = self.domain().interval();
        let derived = exprs.iter().map(|e| e.derivative(dom)).collect::<Result<Vec<_>>>()?;
        let h = FunctionHandle::closed_form(self.domain(), derived).map_err(|e| match e {
            LabError::Domain(msg) => LabError::Unsupported(format!("derivative not defined on the whole domain: {msg}")),
            other => other,
        })?;
        Ok(h.with_name(format!("{}'", self.name())).with_norm(self.norm()))
    }

    /// The restriction `s ↦ self(t + s)` on `[0, 1]`, sampled at
    /// `samples_per_unit` intervals.
    pub fn hat_lift(&self, t: f64, samples_per_unit: usize) -> Result<FunctionHandle> {
        if samples_per_unit == 0 {
            return Err(LabError::Argument("samples_per_unit must be positive".into()));
        }
        self.check_window(t, t + 1.0)?;
        let grid = GridSpec::with_nodes(0.0, 1.0 / samples_per_unit as f64, samples_per_unit + 1)?;
        let dim = self.dim();
        let mut values = vec![0.0; grid.nodes * dim];
        for (i, row) in values.chunks_mut(dim).enumerate() {
            self.eval_into(t + grid.node(i), row)?;
        }
        Ok(FunctionHandle::sampled(TimeDomain::HalfLine, grid, dim, values)?
            .with_name(format!("hat({})({t})", self.name()))
            .with_norm(self.norm()))
    }

    pub(crate) fn ensure_compatible(&self, other: &FunctionHandle) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(LabError::Shape(format!(
                "codomain dimensions differ: {} has {}, {} has {}",
                self.name(),
                self.dim(),
                other.name(),
                other.dim()
            )));
        }
        if self.domain() != other.domain() {
            return Err(LabError::Shape(format!("time domains differ: {:?} vs {:?}", self.domain(), other.domain())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin() -> FunctionHandle {
        FunctionHandle::scalar(TimeDomain::HalfLine, Expr::sin(Expr::Identity)).unwrap()
    }

    #[test]
    fn grid_requires_integer_span() {
        assert!(GridSpec::new(0.0, 1.0, 0.3).is_err());
        let g = GridSpec::new(0.0, 1.0, 0.25).unwrap();
        assert_eq!(g.nodes, 5);
        assert!(GridSpec::new(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn half_line_rejects_negative_times_and_shifts() {
        let f = sin();
        assert!(matches!(f.evaluate(-0.5), Err(LabError::Domain(_))));
        assert!(matches!(f.translate(-1.0), Err(LabError::Domain(_))));
    }

    #[test]
    fn sampled_interpolates_and_refuses_outside() {
        let grid = GridSpec::new(0.0, 2.0, 1.0).unwrap();
        let f = FunctionHandle::sampled(TimeDomain::HalfLine, grid, 1, vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(f.eval_scalar(0.5).unwrap(), 1.0);
        assert_eq!(f.eval_scalar(2.0).unwrap(), 0.0);
        assert!(f.eval_scalar(2.5).is_err());
        let g = f.translate(1.0).unwrap();
        assert_eq!(g.eval_scalar(0.0).unwrap(), 2.0);
        assert!(g.eval_scalar(1.5).is_err());
    }

    #[test]
    fn sampled_differentiation_is_unsupported() {
        let f = sin().resample(GridSpec::new(0.0, 1.0, 0.5).unwrap()).unwrap();
        assert!(matches!(f.differentiate(), Err(LabError::Unsupported(_))));
    }

    #[test]
    fn hat_lift_of_identity() {
        let id = FunctionHandle::scalar(TimeDomain::HalfLine, Expr::Identity).unwrap();
        let lift = id.hat_lift(3.0, 10).unwrap();
        let (grid, values) = lift.samples().unwrap();
        for (i, v) in values.iter().enumerate() {
            assert!((v - (3.0 + grid.node(i))).abs() < 1e-15);
        }
    }

    #[test]
    fn vector_norms() {
        assert_eq!(PointNorm::Euclidean.distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_eq!(PointNorm::Max.distance(&[0.0, 0.0], &[3.0, 4.0]), 4.0);
    }
}
