//! Closed-form expression trees.
//!
//! Trees are validated once against the time domain with a conservative
//! interval enclosure: a tree is accepted only when every quotient
//! denominator provably avoids zero and every `ln1p` / even-root argument
//! provably stays in range over the whole domain.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case", deny_unknown_fields)]
pub enum Expr {
    Constant {
        value: f64,
    },
    Identity,
    /// `a * t + b`
    Affine {
        a: f64,
        b: f64,
    },
    Sin {
        child: Box<Expr>,
    },
    Cos {
        child: Box<Expr>,
    },
    /// `ln(1 + child)`
    Ln1p {
        child: Box<Expr>,
    },
    /// `child ^ (exp_num / exp_den)`
    Power {
        child: Box<Expr>,
        exp_num: i32,
        exp_den: u32,
    },
    Abs {
        child: Box<Expr>,
    },
    Sum {
        children: Vec<Expr>,
    },
    Product {
        children: Vec<Expr>,
    },
    Quotient {
        num: Box<Expr>,
        den: Box<Expr>,
    },
    /// `outer(inner(t))`
    Compose {
        outer: Box<Expr>,
        inner: Box<Expr>,
    },
    /// `child(t + h)`
    Translate {
        child: Box<Expr>,
        h: f64,
    },
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Constant { value }
    }

    pub fn affine(a: f64, b: f64) -> Expr {
        Expr::Affine { a, b }
    }

    pub fn sin(child: Expr) -> Expr {
        Expr::Sin { child: Box::new(child) }
    }

    pub fn cos(child: Expr) -> Expr {
        Expr::Cos { child: Box::new(child) }
    }

    pub fn ln1p(child: Expr) -> Expr {
        Expr::Ln1p { child: Box::new(child) }
    }

    pub fn abs(child: Expr) -> Expr {
        Expr::Abs { child: Box::new(child) }
    }

    pub fn power(child: Expr, exp_num: i32, exp_den: u32) -> Expr {
        Expr::Power { child: Box::new(child), exp_num, exp_den }
    }

    pub fn quotient(num: Expr, den: Expr) -> Expr {
        Expr::Quotient { num: Box::new(num), den: Box::new(den) }
    }

    pub fn compose(outer: Expr, inner: Expr) -> Expr {
        Expr::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }

    /// Sum with zero terms dropped.
    pub fn sum(children: Vec<Expr>) -> Expr {
        let mut kept: Vec<Expr> = children.into_iter().filter(|c| !c.is_zero()).collect();
        match kept.len() {
            0 => Expr::constant(0.0),
            1 => kept.pop().unwrap(),
            _ => Expr::Sum { children: kept },
        }
    }

    /// Product that collapses to zero on a zero factor and drops unit factors.
    pub fn product(children: Vec<Expr>) -> Expr {
        if children.iter().any(Expr::is_zero) {
            return Expr::constant(0.0);
        }
        let mut kept: Vec<Expr> = children.into_iter().filter(|c| !c.is_one()).collect();
        match kept.len() {
            0 => Expr::constant(1.0),
            1 => kept.pop().unwrap(),
            _ => Expr::Product { children: kept },
        }
    }

    /// `child(t + h)`, folding nested shifts into one so that repeated
    /// translation evaluates bit-identically to a single one.
    pub fn translate(child: Expr, h: f64) -> Expr {
        match child {
            Expr::Translate { child, h: inner } => Expr::translate(*child, inner + h),
            other if h == 0.0 => other,
            other => Expr::Translate { child: Box::new(other), h },
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Expr::Constant { value } if *value == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Constant { value } if *value == 1.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Constant { value } => *value,
            Expr::Identity => t,
            Expr::Affine { a, b } => a * t + b,
            Expr::Sin { child } => child.eval(t).sin(),
            Expr::Cos { child } => child.eval(t).cos(),
            Expr::Ln1p { child } => child.eval(t).ln_1p(),
            Expr::Power { child, exp_num, exp_den } => rational_pow(child.eval(t), *exp_num, *exp_den),
            Expr::Abs { child } => child.eval(t).abs(),
            Expr::Sum { children } => children.iter().map(|c| c.eval(t)).sum(),
            Expr::Product { children } => children.iter().map(|c| c.eval(t)).product(),
            Expr::Quotient { num, den } => num.eval(t) / den.eval(t),
            Expr::Compose { outer, inner } => outer.eval(inner.eval(t)),
            Expr::Translate { child, h } => child.eval(t + h),
        }
    }

    /// Conservative enclosure of the range of the tree when its argument
    /// ranges over `input`. Fails when validity cannot be certified.
    pub fn range(&self, input: Interval) -> Result<Interval> {
        Ok(match self {
            Expr::Constant { value } => {
                if !value.is_finite() {
                    return Err(LabError::Domain(format!("non-finite constant {value}")));
                }
                Interval::point(*value)
            }
            Expr::Identity => input,
            Expr::Affine { a, b } => input.scale(*a).shift(*b),
            Expr::Sin { child } | Expr::Cos { child } => {
                child.range(input)?;
                Interval::new(-1.0, 1.0)
            }
            Expr::Ln1p { child } => {
                let r = child.range(input)?;
                if r.lo <= -1.0 {
                    return Err(LabError::Domain(format!("ln(1 + x) argument may reach {} on the domain", r.lo)));
                }
                Interval::new(r.lo.ln_1p(), r.hi.ln_1p())
            }
            Expr::Power { child, exp_num, exp_den } => power_range(child.range(input)?, *exp_num, *exp_den)?,
            Expr::Abs { child } => child.range(input)?.abs(),
            Expr::Sum { children } => {
                let mut acc = Interval::point(0.0);
                for c in children {
                    acc = acc.add(c.range(input)?);
                }
                acc
            }
            Expr::Product { children } => {
                let mut acc = Interval::point(1.0);
                for c in children {
                    acc = acc.mul(c.range(input)?);
                }
                acc
            }
            Expr::Quotient { num, den } => {
                let n = num.range(input)?;
                let d = den.range(input)?;
                if d.contains_zero() {
                    return Err(LabError::Domain(format!("quotient denominator range [{}, {}] may vanish on the domain", d.lo, d.hi)));
                }
                n.mul(Interval::new(1.0 / d.hi, 1.0 / d.lo))
            }
            Expr::Compose { outer, inner } => outer.range(inner.range(input)?)?,
            Expr::Translate { child, h } => child.range(input.shift(*h))?,
        })
    }

    /// Symbolic derivative with respect to the argument, for arguments
    /// ranging over `input` (needed to resolve the sign of `abs`).
    pub fn derivative(&self, input: Interval) -> Result<Expr> {
        Ok(match self {
            Expr::Constant { .. } => Expr::constant(0.0),
            Expr::Identity => Expr::constant(1.0),
            Expr::Affine { a, .. } => Expr::constant(*a),
            Expr::Sin { child } => Expr::product(vec![Expr::cos((**child).clone()), child.derivative(input)?]),
            Expr::Cos { child } => Expr::product(vec![Expr::constant(-1.0), Expr::sin((**child).clone()), child.derivative(input)?]),
            Expr::Ln1p { child } => Expr::quotient(child.derivative(input)?, Expr::sum(vec![Expr::constant(1.0), (**child).clone()])),
            Expr::Power { child, exp_num, exp_den } => {
                if *exp_num == 0 {
                    return Ok(Expr::constant(0.0));
                }
                let e = *exp_num as f64 / *exp_den as f64;
                let lowered = *exp_num as i64 - *exp_den as i64;
                let lowered = i32::try_from(lowered).map_err(|_| LabError::Unsupported("exponent out of range".into()))?;
                let base = if lowered == 0 { Expr::constant(1.0) } else { Expr::power((**child).clone(), lowered, *exp_den) };
                Expr::product(vec![Expr::constant(e), base, child.derivative(input)?])
            }
            Expr::Abs { child } => {
                let r = child.range(input)?;
                let inner = child.derivative(input)?;
                if r.lo > 0.0 {
                    inner
                } else if r.hi < 0.0 {
                    Expr::product(vec![Expr::constant(-1.0), inner])
                } else {
                    return Err(LabError::Unsupported("derivative of abs whose argument may vanish (kink)".into()));
                }
            }
            Expr::Sum { children } => Expr::sum(children.iter().map(|c| c.derivative(input)).collect::<Result<Vec<_>>>()?),
            Expr::Product { children } => {
                let mut terms = Vec::with_capacity(children.len());
                for i in 0..children.len() {
                    let mut factors = children.clone();
                    factors[i] = children[i].derivative(input)?;
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Expr::Quotient { num, den } => {
                let dn = num.derivative(input)?;
                let dd = den.derivative(input)?;
                let top = Expr::sum(vec![
                    Expr::product(vec![dn, (**den).clone()]),
                    Expr::product(vec![Expr::constant(-1.0), (**num).clone(), dd]),
                ]);
                Expr::quotient(top, Expr::product(vec![(**den).clone(), (**den).clone()]))
            }
            Expr::Compose { outer, inner } => {
                let inner_range = inner.range(input)?;
                Expr::product(vec![Expr::compose(outer.derivative(inner_range)?, (**inner).clone()), inner.derivative(input)?])
            }
            Expr::Translate { child, h } => Expr::translate(child.derivative(input.shift(*h))?, *h),
        })
    }
}

/// `x^(num/den)` with real odd roots of negative numbers.
pub(crate) fn rational_pow(x: f64, num: i32, den: u32) -> f64 {
    match den {
        0 => f64::NAN,
        1 => x.powi(num),
        2 if x >= 0.0 => x.sqrt().powi(num),
        3 => x.cbrt().powi(num),
        _ => {
            let e = num as f64 / den as f64;
            if x >= 0.0 {
                x.powf(e)
            } else if den % 2 == 1 {
                let m = (-x).powf(e);
                if num % 2 == 0 {
                    m
                } else {
                    -m
                }
            } else {
                f64::NAN
            }
        }
    }
}

fn power_range(r: Interval, num: i32, den: u32) -> Result<Interval> {
    if den == 0 {
        return Err(LabError::Domain("rational exponent with zero denominator".into()));
    }
    if num == 0 {
        return Ok(Interval::point(1.0));
    }
    if r.lo < 0.0 && den.is_multiple_of(2) {
        return Err(LabError::Domain(format!("even root of an argument that may be negative (down to {})", r.lo)));
    }
    if num < 0 && r.contains_zero() {
        return Err(LabError::Domain("negative power of an argument that may vanish".into()));
    }
    let f = |x: f64| rational_pow(x, num, den);
    let (a, b) = (f(r.lo), f(r.hi));
    // Odd-denominator powers are even functions when the numerator is even.
    let even = num % 2 == 0;
    if r.lo >= 0.0 || r.hi <= 0.0 || !even {
        Ok(Interval::new(a.min(b), a.max(b)))
    } else if num > 0 {
        Ok(Interval::new(0.0, a.max(b)))
    } else {
        unreachable!("negative exponent with zero in range rejected above")
    }
}

/// Closed interval with possibly infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Interval {
        Interval { lo: x, hi: x }
    }

    fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    fn shift(self, h: f64) -> Interval {
        Interval::new(self.lo + h, self.hi + h)
    }

    fn scale(self, a: f64) -> Interval {
        if a == 0.0 {
            return Interval::point(0.0);
        }
        let (x, y) = (self.lo * a, self.hi * a);
        Interval::new(x.min(y), x.max(y))
    }

    fn add(self, o: Interval) -> Interval {
        Interval::new(self.lo + o.lo, self.hi + o.hi)
    }

    fn mul(self, o: Interval) -> Interval {
        // 0 * inf is taken as 0: a zero factor bounds the product.
        let m = |x: f64, y: f64| if x == 0.0 || y == 0.0 { 0.0 } else { x * y };
        let c = [m(self.lo, o.lo), m(self.lo, o.hi), m(self.hi, o.lo), m(self.hi, o.hi)];
        Interval::new(c.iter().copied().fold(f64::INFINITY, f64::min), c.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            Interval::new(-self.hi, -self.lo)
        } else {
            Interval::new(0.0, (-self.lo).max(self.hi))
        }
    }
}
