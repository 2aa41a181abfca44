//! Exact rational posynomials for replaying constant aggregations.
//!
//! A bound like `C <= 3 g + 1118 E` is a posynomial: a sum of monomials in
//! named positive atoms with rational coefficients. When every atom is known
//! to be at least 1, a monomial is dominated by any monomial with
//! componentwise larger exponents, so collapsing a sum onto a few target
//! monomials is an exact, checkable operation. Replaying an aggregation step
//! by step this way reproduces the published integer constants without any
//! floating point.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::LogScalar;

/// Exponent vector keyed by atom name.
pub type Monomial = BTreeMap<&'static str, i32>;

/// A named positive quantity. Atoms with `at_least_one` may be used as
/// domination slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub name: &'static str,
    pub at_least_one: bool,
}

impl Atom {
    pub const fn unit(name: &'static str) -> Self {
        Self {
            name,
            at_least_one: true,
        }
    }

    pub const fn free(name: &'static str) -> Self {
        Self {
            name,
            at_least_one: false,
        }
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Lossy conversion used when comparing to floating values.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Posynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Posynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, &[])
    }

    pub fn int(c: i64) -> Self {
        Self::constant(integer(c))
    }

    /// `c * prod atom^exp`.
    pub fn monomial(c: BigRational, powers: &[(&'static str, i32)]) -> Self {
        let mut p = Self::zero();
        let mut m = Monomial::new();
        for &(name, e) in powers {
            *m.entry(name).or_insert(0) += e;
        }
        m.retain(|_, e| *e != 0);
        p.push(m, c);
        p
    }

    pub fn atom(name: &'static str) -> Self {
        Self::monomial(BigRational::one(), &[(name, 1)])
    }

    fn push(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, powers: &[(&'static str, i32)]) -> BigRational {
        let key = Self::monomial(BigRational::one(), powers)
            .terms
            .into_keys()
            .next()
            .unwrap_or_default();
        self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(m.clone(), c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (k, e) in m2 {
                    *m.entry(k).or_insert(0) += e;
                }
                m.retain(|_, e| *e != 0);
                out.push(m, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero();
        for (m, k) in &self.terms {
            out.push(m.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::int(1), |acc, _| acc.mul(self))
    }

    /// Drops terms with negative coefficients, which can only increase the
    /// value.
    pub fn drop_negative(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.is_positive())
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn has_negative(&self) -> bool {
        self.terms.values().any(|c| c.is_negative())
    }

    /// Replaces `name` by an upper bound. Requires nonnegative coefficients
    /// and a nonnegative exponent of `name` everywhere, so the result is an
    /// upper bound of the original.
    pub fn substitute(&self, name: &'static str, bound: &Self) -> Result<Self> {
        if self.has_negative() || bound.has_negative() {
            return Err(Error::Config(format!(
                "substituting {name} needs nonnegative coefficients"
            )));
        }
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.get(name).copied().unwrap_or(0);
            if e < 0 {
                return Err(Error::Config(format!(
                    "substituting {name} into a negative power is not monotone"
                )));
            }
            let mut rest = m.clone();
            rest.remove(name);
            let mut base = Self::zero();
            base.push(rest, c.clone());
            out = out.add(&base.mul(&bound.pow(e as u32)));
        }
        Ok(out)
    }

    /// Collapses every term onto the first target monomial that dominates it.
    /// Domination needs each exponent gap to be nonnegative and to involve
    /// only atoms that are at least 1.
    pub fn dominate_into(&self, targets: &[Monomial], atoms: &[Atom]) -> Result<Self> {
        if self.has_negative() {
            return Err(Error::Config("cannot dominate a signed sum".into()));
        }
        let unit = |name: &str| atoms.iter().any(|a| a.name == name && a.at_least_one);
        let mut out = Self::zero();
        'terms: for (m, c) in &self.terms {
            for t in targets {
                let mut names: Vec<&'static str> = m.keys().chain(t.keys()).copied().collect();
                names.sort_unstable();
                names.dedup();
                let ok = names.iter().all(|n| {
                    let gap = t.get(n).copied().unwrap_or(0) - m.get(n).copied().unwrap_or(0);
                    gap == 0 || (gap > 0 && unit(n))
                });
                if ok {
                    out.push(t.clone(), c.clone());
                    continue 'terms;
                }
            }
            return Err(Error::Config(format!(
                "no target dominates the term {}",
                format_monomial(m)
            )));
        }
        Ok(out)
    }

    /// Rounds every coefficient up to an integer.
    pub fn ceil_coefficients(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.ceil())).collect(),
        }
    }

    /// True when every coefficient of `self` is at most the matching one in
    /// `other` (missing terms count as 0).
    pub fn coefficientwise_le(&self, other: &Self) -> bool {
        let zero = BigRational::zero();
        let keys = self.terms.keys().chain(other.terms.keys());
        keys.into_iter()
            .all(|m| self.terms.get(m).unwrap_or(&zero) <= other.terms.get(m).unwrap_or(&zero))
    }

    /// Evaluates with the given atom values as LogScalars.
    pub fn evaluate(&self, values: &dyn Fn(&str) -> LogScalar) -> LogScalar {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.iter().fold(LogScalar::from_f64(to_f64(c)), |acc, (name, e)| {
                    acc * values(name).powf(*e as f64)
                })
            })
            .sum()
    }

    /// Largest coefficient, or zero for the empty sum.
    pub fn max_coefficient(&self) -> BigRational {
        self.terms.values().cloned().max().unwrap_or_else(BigRational::zero)
    }
}

/// One aggregation step of the exact replay: `computed` is the operation
/// applied to the previous displayed value, `displayed` the published form.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayStep {
    pub name: &'static str,
    pub computed: Posynomial,
    pub displayed: Posynomial,
}

impl ReplayStep {
    /// The displayed form dominates the computed one coefficientwise.
    pub fn holds(&self) -> bool {
        self.computed.drop_negative().coefficientwise_le(&self.displayed)
    }

    /// The displayed form is exactly the computed one with coefficients
    /// rounded up.
    pub fn reproduces(&self) -> bool {
        self.computed.drop_negative().ceil_coefficients() == self.displayed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub steps: Vec<ReplayStep>,
}

impl Replay {
    pub fn step(&self, name: &str) -> Option<&ReplayStep> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.steps.iter().all(ReplayStep::holds)
    }

    /// Coefficient of a monomial in the displayed form of a step.
    pub fn coefficient(&self, step: &str, powers: &[(&'static str, i32)]) -> Option<BigRational> {
        self.step(step).map(|s| s.displayed.coefficient(powers))
    }
}

pub fn mono(powers: &[(&'static str, i32)]) -> Monomial {
    powers.iter().filter(|(_, e)| *e != 0).map(|&(n, e)| (n, e)).collect()
}

fn format_monomial(m: &Monomial) -> String {
    if m.is_empty() {
        return "1".into();
    }
    m.iter()
        .map(|(n, e)| if *e == 1 { n.to_string() } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Posynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("{c}*{}", format_monomial(m)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ATOMS: [Atom; 3] = [Atom::unit("g"), Atom::unit("E"), Atom::free("x")];

    #[test]
    fn algebra() {
        let g = Posynomial::atom("g");
        let e = Posynomial::atom("E");
        let p = g.add(&e.scale(&integer(3))).mul(&g);
        assert_eq!(p.coefficient(&[("g", 2)]), integer(1));
        assert_eq!(p.coefficient(&[("g", 1), ("E", 1)]), integer(3));
        assert_eq!(p.add(&p.scale(&integer(-1))), Posynomial::zero());
    }

    #[test]
    fn domination_needs_unit_atoms() {
        let p = Posynomial::int(5).add(&Posynomial::atom("g").scale(&integer(2)));
        let d = p.dominate_into(&[mono(&[("g", 1)])], &ATOMS).unwrap();
        assert_eq!(d.coefficient(&[("g", 1)]), integer(7));
        let x = Posynomial::int(1);
        assert!(x.dominate_into(&[mono(&[("x", 1)])], &ATOMS).is_err());
    }

    #[test]
    fn substitution_and_rounding() {
        let p = Posynomial::atom("x").scale(&rational(41, 6));
        let q = p.substitute("x", &Posynomial::int(5578)).unwrap();
        assert_eq!(q.coefficient(&[]), rational(41 * 5578, 6));
        assert_eq!(q.ceil_coefficients().coefficient(&[]), integer(38117));
        let signed = Posynomial::int(-1).add(&Posynomial::atom("x"));
        assert!(signed.substitute("x", &Posynomial::int(2)).is_err());
        assert_eq!(signed.drop_negative(), Posynomial::atom("x"));
    }

    proptest! {
        #[test]
        fn evaluation_is_a_ring_map(a in 1i64..50, b in 1i64..50, g in 1.0..20.0f64) {
            let p = Posynomial::atom("g").scale(&integer(a)).add(&Posynomial::int(b));
            let q = Posynomial::atom("g").pow(2);
            let value = |_: &str| LogScalar::from_f64(g);
            let lhs = p.mul(&q).evaluate(&value);
            let rhs = p.evaluate(&value) * q.evaluate(&value);
            prop_assert!((lhs.ln_abs() - rhs.ln_abs()).abs() < 1e-12);
        }

        #[test]
        fn domination_never_decreases(c in 1i64..1000, g in 1.0..50.0f64, e in 1.0..50.0f64) {
            let p = Posynomial::int(c).add(&Posynomial::atom("E").scale(&integer(c)));
            let d = p.dominate_into(&[mono(&[("g", 1), ("E", 1)])], &ATOMS).unwrap();
            let value = |n: &str| LogScalar::from_f64(if n == "g" { g } else { e });
            prop_assert!(p.evaluate(&value) <= d.evaluate(&value));
        }
    }
}
