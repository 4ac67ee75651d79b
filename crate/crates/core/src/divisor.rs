//! Divisors: finitely supported integer combinations of points.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use crate::automorphism::{Automorphism, FiniteGroup};
use crate::error::{Error, Result};
use crate::metric_graph::{Model, Point};

/// Stored without zero coefficients, so structural equality is divisor equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Divisor {
    chips: BTreeMap<Point, i64>,
}

impl Divisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (Point, i64)>>(pairs: I) -> Self {
        let mut d = Self::zero();
        for (p, c) in pairs {
            d.add_chips(p, c);
        }
        d
    }

    pub fn point(p: Point) -> Self {
        Self::from_pairs([(p, 1)])
    }

    pub fn add_chips(&mut self, p: Point, c: i64) {
        if c == 0 {
            return;
        }
        let slot = self.chips.entry(p).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.chips.retain(|_, v| *v != 0);
        }
    }

    pub fn coefficient(&self, p: &Point) -> i64 {
        self.chips.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.chips.values().sum()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.values().all(|&c| c >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn support(&self) -> Vec<Point> {
        self.chips.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, i64)> {
        self.chips.iter().map(|(p, &c)| (p, c))
    }

    pub fn check_on(&self, m: &Model) -> Result<()> {
        self.chips.keys().try_for_each(|p| m.check_point(p))
    }

    /// Text form: one `chip <point> <n>` line per support point.
    pub fn to_text(&self, m: &Model) -> String {
        self.chips
            .iter()
            .map(|(p, c)| format!("chip {} {}\n", m.format_point(p), c))
            .collect()
    }

    /// Compact form such as `1*v:x + -2*e:e@1/2`.
    pub fn display(&self, m: &Model) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.chips
            .iter()
            .map(|(p, c)| format!("{}*{}", c, m.format_point(p)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        let mut d = self.clone();
        for (p, c) in rhs.iter() {
            d.add_chips(p.clone(), c);
        }
        d
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor { chips: self.chips.iter().map(|(p, c)| (p.clone(), -c)).collect() }
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        self + &(-rhs)
    }
}

pub fn degree(d: &Divisor) -> i64 {
    d.degree()
}

pub fn is_effective(d: &Divisor) -> bool {
    d.is_effective()
}

/// Push-forward: the coefficient of `σ(x)` in the result is `D(x)`.
pub fn apply_automorphism(d: &Divisor, sigma: &Automorphism) -> Result<Divisor> {
    d.check_on(sigma.model())
        .map_err(|e| Error::ModelMismatch(format!("divisor is not on the automorphism's model: {e}")))?;
    let mut out = Divisor::zero();
    for (p, c) in d.iter() {
        out.add_chips(sigma.act(p), c);
    }
    Ok(out)
}

pub fn is_invariant(d: &Divisor, g: &FiniteGroup) -> Result<bool> {
    for sigma in g.elements() {
        if apply_automorphism(d, sigma)? != *d {
            return Ok(false);
        }
    }
    Ok(true)
}
