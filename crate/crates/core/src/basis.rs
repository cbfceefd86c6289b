//! Named scalar functions of time used as regression columns.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Angular multiplier `num/den` in `sin(pi * x * num / den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frequency {
    pub num: u32,
    pub den: u32,
}

impl Frequency {
    /// `pi * x / i`
    pub fn per(i: u32) -> Self {
        Self { num: 1, den: i }
    }

    /// `pi * x * k`
    pub fn times(k: u32) -> Self {
        Self { num: k, den: 1 }
    }

    pub fn omega(self) -> f64 {
        PI * f64::from(self.num) / f64::from(self.den)
    }

    fn key(self) -> (u32, u32) {
        // larger divisor means lower frequency; order by i for the pool case
        (self.den, u32::MAX - self.num)
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// One basis member. Variant order is the family order used for
/// tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisFunctionSpec {
    /// `(i/12)^(x - base)`
    PowerDecay { i: u32, base: i32 },
    /// `(x - base)^(i/12)`
    RootPower { i: u32, base: i32 },
    /// `ln(x - base)`
    LogShift { base: i32 },
    Sin(Frequency),
    Cos(Frequency),
    /// `x * sin(...)`
    XSin(Frequency),
    /// `x * cos(...)`
    XCos(Frequency),
    Constant,
}

use BasisFunctionSpec::*;

impl BasisFunctionSpec {
    fn family_index(&self) -> u8 {
        match self {
            PowerDecay { .. } => 0,
            RootPower { .. } => 1,
            LogShift { .. } => 2,
            Sin(_) => 3,
            Cos(_) => 4,
            XSin(_) => 5,
            XCos(_) => 6,
            Constant => 7,
        }
    }

    /// Lexicographic (family, parameter) key.
    pub fn order_key(&self) -> (u8, i64, i64, i64) {
        let fam = self.family_index();
        match *self {
            PowerDecay { i, base } | RootPower { i, base } => (fam, i64::from(base), i64::from(i), 0),
            LogShift { base } => (fam, -i64::from(base), 0, 0),
            Sin(w) | Cos(w) | XSin(w) | XCos(w) => {
                let (a, b) = w.key();
                (fam, i64::from(a), i64::from(b), 0)
            }
            Constant => (fam, 0, 0, 0),
        }
    }

    pub fn cmp_order(&self, other: &Self) -> Ordering {
        self.order_key().cmp(&other.order_key())
    }

    /// Value at `x`; `None` outside the function's natural domain.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let y = match *self {
            PowerDecay { i, base } => (f64::from(i) / 12.0).powf(x - f64::from(base)),
            RootPower { i, base } => {
                let s = x - f64::from(base);
                if s < 0.0 {
                    return None;
                }
                s.powf(f64::from(i) / 12.0)
            }
            LogShift { base } => {
                let s = x - f64::from(base);
                if s <= 0.0 {
                    return None;
                }
                s.ln()
            }
            Sin(w) => (w.omega() * x).sin(),
            Cos(w) => (w.omega() * x).cos(),
            XSin(w) => x * (w.omega() * x).sin(),
            XCos(w) => x * (w.omega() * x).cos(),
            Constant => 1.0,
        };
        y.is_finite().then_some(y)
    }

    /// Analytic derivative at `x`.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        let y = match *self {
            PowerDecay { i, base } => {
                let c = f64::from(i) / 12.0;
                c.powf(x - f64::from(base)) * c.ln()
            }
            RootPower { i, base } => {
                let s = x - f64::from(base);
                let p = f64::from(i) / 12.0;
                if s <= 0.0 {
                    return None;
                }
                p * s.powf(p - 1.0)
            }
            LogShift { base } => {
                let s = x - f64::from(base);
                if s <= 0.0 {
                    return None;
                }
                1.0 / s
            }
            Sin(w) => w.omega() * (w.omega() * x).cos(),
            Cos(w) => -w.omega() * (w.omega() * x).sin(),
            XSin(w) => (w.omega() * x).sin() + x * w.omega() * (w.omega() * x).cos(),
            XCos(w) => (w.omega() * x).cos() - x * w.omega() * (w.omega() * x).sin(),
            Constant => 0.0,
        };
        y.is_finite().then_some(y)
    }

    pub fn eval_checked(&self, x: f64) -> Result<f64> {
        self.eval(x).ok_or_else(|| Error::Basis { name: self.to_string(), at: x })
    }

    pub fn derivative_checked(&self, x: f64) -> Result<f64> {
        self.derivative(x).ok_or_else(|| Error::Basis { name: self.to_string(), at: x })
    }

    /// Human-readable formula.
    pub fn formula(&self) -> String {
        let trig = |w: Frequency| match (w.num, w.den) {
            (1, 1) => "pi*x".to_string(),
            (n, 1) => format!("{n}*pi*x"),
            (1, d) => format!("pi*x/{d}"),
            (n, d) => format!("{n}*pi*x/{d}"),
        };
        match *self {
            PowerDecay { i, base } => format!("({i}/12)^(x-{base})"),
            RootPower { i, base } => format!("(x-{base})^({i}/12)"),
            LogShift { base } => format!("ln(x-{base})"),
            Sin(w) => format!("sin({})", trig(w)),
            Cos(w) => format!("cos({})", trig(w)),
            XSin(w) => format!("x*sin({})", trig(w)),
            XCos(w) => format!("x*cos({})", trig(w)),
            Constant => "1".to_string(),
        }
    }
}

/// Machine-readable name: `const`, `pow:5:1992`, `root:5:1993`, `ln:1991`,
/// `sin:1/5`, `xcos:2/1`.
impl fmt::Display for BasisFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PowerDecay { i, base } => write!(f, "pow:{i}:{base}"),
            RootPower { i, base } => write!(f, "root:{i}:{base}"),
            LogShift { base } => write!(f, "ln:{base}"),
            Sin(w) => write!(f, "sin:{w}"),
            Cos(w) => write!(f, "cos:{w}"),
            XSin(w) => write!(f, "xsin:{w}"),
            XCos(w) => write!(f, "xcos:{w}"),
            Constant => write!(f, "const"),
        }
    }
}

impl FromStr for BasisFunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Report(format!("unknown basis function {s:?}"));
        let parts: Vec<&str> = s.split(':').collect();
        let int = |p: &str| p.parse::<i32>().map_err(|_| bad());
        let uint = |p: &str| p.parse::<u32>().map_err(|_| bad());
        let freq = |p: &str| -> Result<Frequency> {
            let (n, d) = p.split_once('/').ok_or_else(bad)?;
            let w = Frequency { num: uint(n)?, den: uint(d)? };
            if w.num == 0 || w.den == 0 {
                return Err(bad());
            }
            Ok(w)
        };
        let spec = match parts.as_slice() {
            ["const"] => Constant,
            ["pow", i, b] => PowerDecay { i: uint(i)?, base: int(b)? },
            ["root", i, b] => RootPower { i: uint(i)?, base: int(b)? },
            ["ln", b] => LogShift { base: int(b)? },
            ["sin", w] => Sin(freq(w)?),
            ["cos", w] => Cos(freq(w)?),
            ["xsin", w] => XSin(freq(w)?),
            ["xcos", w] => XCos(freq(w)?),
            _ => return Err(bad()),
        };
        if let PowerDecay { i: 0, .. } | RootPower { i: 0, .. } = spec {
            return Err(bad());
        }
        Ok(spec)
    }
}

/// Trend candidates: `(i/12)^(x-1992)`, `(i/12)^(x-1993)`, `(x-1992)^(i/12)`,
/// `(x-1993)^(i/12)` for `i = 1..=24`, then `ln(x-1992)` and `ln(x-1991)`.
/// `(12/12)^(...)` is identically one and duplicates the constant column, so
/// both power-decay `i = 12` members are left out.
pub fn trend_pool() -> Vec<BasisFunctionSpec> {
    let mut pool = Vec::with_capacity(98);
    for base in [1992, 1993] {
        pool.extend((1..=24).filter(|&i| i != 12).map(|i| PowerDecay { i, base }));
    }
    for base in [1992, 1993] {
        pool.extend((1..=24).map(|i| RootPower { i, base }));
    }
    pool.push(LogShift { base: 1992 });
    pool.push(LogShift { base: 1991 });
    pool
}

/// `sin(pi x/i)`, `cos(pi x/i)`, `x sin(pi x/i)`, `x cos(pi x/i)` for `i = 1..=5`.
pub fn seasonal_pool() -> Vec<BasisFunctionSpec> {
    (1..=5)
        .flat_map(|i| {
            let w = Frequency::per(i);
            [Sin(w), Cos(w), XSin(w), XCos(w)]
        })
        .collect()
}
