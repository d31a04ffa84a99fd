use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of terms summed for the integral diagnostic and the limiting
/// Lipschitz bound.
pub const DIAGNOSTIC_TERMS: u64 = 1_000_000;

/// Relative growth over the last decade above which partial sums count as not
/// yet settled.
pub const PLATEAU_TOLERANCE: f64 = 1e-6;

/// The increasing function `f` of a compression profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProfileFn {
    /// `f(t) = a (1 + t)^alpha`.
    Power { a: f64, alpha: f64 },
    Constant { value: f64 },
    /// Piecewise linear through `(t, f(t))` knots starting at `t = 0`,
    /// constant after the last knot.
    Table { knots: Vec<(f64, f64)> },
}

impl ProfileFn {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ProfileFn::Power { a, alpha } => a * (1.0 + t).powf(*alpha),
            ProfileFn::Constant { value } => *value,
            ProfileFn::Table { knots } => {
                let i = knots.partition_point(|k| k.0 <= t);
                if i == 0 {
                    return knots[0].1;
                }
                if i == knots.len() {
                    return knots[i - 1].1;
                }
                let (t0, f0) = knots[i - 1];
                let (t1, f1) = knots[i];
                f0 + (f1 - f0) * (t - t0) / (t1 - t0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ProfileFn::Power { a, alpha } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(Error::param("profile scale a must be positive"));
                }
                if !(*alpha >= 0.0 && alpha.is_finite()) {
                    return Err(Error::param("profile exponent alpha must be non-negative"));
                }
            }
            ProfileFn::Constant { value } => {
                if !(*value >= 0.0 && value.is_finite()) {
                    return Err(Error::param("constant profile must be non-negative"));
                }
            }
            ProfileFn::Table { knots } => {
                if knots.is_empty() || knots[0].0 != 0.0 {
                    return Err(Error::param("profile table must start at t = 0"));
                }
                if knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
                    return Err(Error::param("profile table must be finite"));
                }
                if knots[0].1 < 0.0 {
                    return Err(Error::param("profile must satisfy f(0) >= 0"));
                }
                for (i, w) in knots.windows(2).enumerate() {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::param("profile table knots must increase in t"));
                    }
                    if w[1].1 < w[0].1 {
                        return Err(Error::NotMonotone {
                            index: i + 1,
                            prev: w[0].1,
                            next: w[1].1,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for ProfileFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileFn::Power { a, alpha } => write!(f, "{a}*(1+t)^{alpha}"),
            ProfileFn::Constant { value } => write!(f, "{value}"),
            ProfileFn::Table { knots } => write!(f, "table({} knots)", knots.len()),
        }
    }
}

/// Parses `a,alpha` as the power family.
impl FromStr for ProfileFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::param(format!("bad profile number {x:?}")))
        };
        match parts.as_slice() {
            [a, alpha] => Ok(ProfileFn::Power {
                a: num(a)?,
                alpha: num(alpha)?,
            }),
            _ => Err(Error::param(format!("profile must be `a,alpha`, got {s:?}"))),
        }
    }
}

/// Partial sums of `sum (f(i)/i)^p / i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralDiagnostic {
    /// `(N, S_N)` at each power of ten up to [`DIAGNOSTIC_TERMS`].
    pub partial_sums: Vec<(u64, f64)>,
    pub plateaued: bool,
    /// Analytic for the power family (`alpha >= 1`), else `!plateaued`.
    pub divergent: bool,
    /// `max_i max{(f(i)/i)^p / i, 1}`.
    pub s_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionProfile {
    pub f: ProfileFn,
    pub p: f64,
}

impl CompressionProfile {
    pub fn new(f: ProfileFn, p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::param(format!("p must be finite and at least 1, got {p}")));
        }
        f.validate()?;
        Ok(CompressionProfile { f, p })
    }

    pub fn power(a: f64, alpha: f64, p: f64) -> Result<Self> {
        Self::new(ProfileFn::Power { a, alpha }, p)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.f.eval(t)
    }

    /// `Delta_i^p = (f(i)/i)^p / i`, the `i`-th diagnostic term.
    fn term(&self, i: u64) -> f64 {
        let i = i as f64;
        (self.eval(i) / i).powf(self.p) / i
    }

    pub fn integral_diagnostic(&self) -> IntegralDiagnostic {
        let mut partial_sums = Vec::new();
        let mut sum = 0.0;
        let mut s_constant = 1.0f64;
        let mut next = 10;
        for i in 1..=DIAGNOSTIC_TERMS {
            let term = self.term(i);
            s_constant = s_constant.max(term);
            sum += term;
            if i == next {
                partial_sums.push((i, sum));
                next *= 10;
            }
        }
        let plateaued = match partial_sums.as_slice() {
            [.., (_, prev), (_, last)] => *last == 0.0 || (last - prev) / last <= PLATEAU_TOLERANCE,
            _ => true,
        };
        let divergent = match self.f {
            ProfileFn::Power { alpha, .. } => alpha >= 1.0,
            _ => !plateaued,
        };
        IntegralDiagnostic {
            partial_sums,
            plateaued,
            divergent,
            s_constant,
        }
    }

    /// Warnings for the run manifest.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.integral_diagnostic().divergent {
            out.push("DIVERGENT-INTEGRAL".to_string());
        }
        if self.eval(0.0) == 0.0 {
            out.push("COLLISION".to_string());
        }
        out
    }
}

/// `xi_0 = f(0)`, `xi_i - xi_{i-1} = i^{-1/p} f(i) / i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiSequence {
    pub p: f64,
    pub values: Vec<f64>,
    /// `increments[i] = Delta_i`; `increments[0]` is unused and 0.
    pub increments: Vec<f64>,
    /// `(xi_0^p + sum_{i <= len} Delta_i^p)^{1/p}`.
    pub s_p: f64,
    /// The same sum continued to [`DIAGNOSTIC_TERMS`].
    pub s_p_limit: f64,
}

impl XiSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn xi(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// `(xi_0^p + sum_{i=1}^{m} Delta_i^p)^{1/p}`.
    pub fn partial_s_p(&self, m: usize) -> f64 {
        let p = self.p;
        let sum: f64 = self.values[0].abs().powf(p)
            + self.increments[1..=m].iter().map(|d| d.powf(p)).sum::<f64>();
        sum.powf(1.0 / p)
    }
}

pub fn xi_build(profile: &CompressionProfile, length: usize) -> Result<XiSequence> {
    if length < 1 {
        return Err(Error::param("xi sequence length must be at least 1"));
    }
    let p = profile.p;
    let mut prev_f = profile.eval(0.0);
    if prev_f < 0.0 {
        return Err(Error::param("profile must satisfy f(0) >= 0"));
    }
    let mut values = vec![prev_f];
    let mut increments = vec![0.0];
    for i in 1..=length {
        let fi = profile.eval(i as f64);
        if fi < prev_f {
            return Err(Error::NotMonotone {
                index: i,
                prev: prev_f,
                next: fi,
            });
        }
        prev_f = fi;
        let x = i as f64;
        let delta = x.powf(-1.0 / p) * fi / x;
        increments.push(delta);
        values.push(values[i - 1] + delta);
    }
    let head = values[0].powf(p);
    let body: f64 = increments[1..].iter().map(|d| d.powf(p)).sum();
    let tail: f64 = (length as u64 + 1..=DIAGNOSTIC_TERMS.max(length as u64))
        .map(|i| profile.term(i))
        .sum();
    Ok(XiSequence {
        p,
        values,
        increments,
        s_p: (head + body).powf(1.0 / p),
        s_p_limit: (head + body + tail).powf(1.0 / p),
    })
}
