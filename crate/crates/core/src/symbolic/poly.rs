use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::model::FormCoefficients;

/// Exponents of `(f1, f2, f3)`.
pub type Monomial = [u32; 3];

/// Polynomial with integer coefficients in `f1, f2, f3`. Zero coefficients
/// are never stored, so structural equality is polynomial equality.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coefficient {
    terms: BTreeMap<Monomial, i64>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn monomial(m: Monomial, c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Coefficient { terms }
    }

    /// The indeterminate `f{i+1}`; `i` in `0..3`.
    pub fn var(i: usize) -> Self {
        let mut m = [0; 3];
        m[i] = 1;
        Self::monomial(m, 1)
    }

    /// `f1 - f3`.
    pub fn beta() -> Self {
        Self::var(0) - Self::var(2)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(1)
    }

    pub fn as_constant(&self) -> Option<i64> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&[0, 0, 0]).copied(),
            _ => None,
        }
    }

    /// The only monomial and its coefficient, if there is exactly one.
    pub fn single_monomial(&self) -> Option<(Monomial, i64)> {
        match self.terms.len() {
            1 => self.terms.iter().next().map(|(m, c)| (*m, *c)),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &i64)> {
        self.terms.iter()
    }

    fn accumulate(&mut self, m: Monomial, c: i64) {
        let slot = self.terms.entry(m).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, f: &FormCoefficients) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                *c as f64 * f.f1.powi(m[0] as i32) * f.f2.powi(m[1] as i32) * f.f3.powi(m[2] as i32)
            })
            .sum()
    }

    /// Monomials in display order: higher total degree first, then
    /// lexicographically larger exponents first.
    fn display_order(&self) -> Vec<(Monomial, i64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(m, c)| (*m, *c)).collect();
        v.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        v
    }
}

fn write_monomial(out: &mut String, m: &Monomial) {
    let mut first = true;
    for (i, e) in m.iter().enumerate() {
        if *e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(&format!("f{}", i + 1));
        if *e > 1 {
            out.push_str(&format!("^{e}"));
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (m, c)) in self.display_order().into_iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            let a = c.unsigned_abs();
            let constant = m == [0, 0, 0];
            if constant {
                out.push_str(&a.to_string());
            } else {
                if a != 1 {
                    out.push_str(&format!("{a}*"));
                }
                write_monomial(&mut out, &m);
            }
        }
        f.write_str(&out)
    }
}

impl From<i64> for Coefficient {
    fn from(c: i64) -> Self {
        Self::constant(c)
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.accumulate(*m, *c);
        }
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        self + &(-rhs)
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        let mut out = Coefficient::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
                out.accumulate(m, ca * cb);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for Coefficient {
            type Output = Coefficient;
            fn $method(self, rhs: Coefficient) -> Coefficient {
                (&self).$method(&rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(i: usize) -> Coefficient {
        Coefficient::var(i)
    }

    #[test]
    fn display_forms() {
        assert_eq!(Coefficient::zero().to_string(), "0");
        assert_eq!((f(0) - Coefficient::one()).to_string(), "f1 - 1");
        assert_eq!(Coefficient::beta().to_string(), "f1 - f3");
        let sq = Coefficient::beta().pow(2);
        assert_eq!(sq.to_string(), "f1^2 - 2*f1*f3 + f3^2");
        assert_eq!((f(2) + sq).to_string(), "f1^2 - 2*f1*f3 + f3^2 + f3");
        assert_eq!(Coefficient::constant(-3).to_string(), "-3");
        assert_eq!((-f(1) * Coefficient::constant(2)).to_string(), "-2*f2");
    }

    #[test]
    fn arithmetic() {
        let b = Coefficient::beta();
        assert!((&b - &b).is_zero());
        assert_eq!(b.pow(0), Coefficient::one());
        assert!(Coefficient::one().is_one());
        assert_eq!(Coefficient::constant(4).as_constant(), Some(4));
        assert_eq!(b.as_constant(), None);
        let fc = FormCoefficients::new(2.0, -1.0, 0.5);
        assert_eq!((b.pow(2) + f(1) * Coefficient::constant(3)).eval(&fc), 2.25 - 3.0);
    }
}
