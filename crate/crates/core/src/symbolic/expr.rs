use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::poly::Coefficient;
use super::SymbolicError;
use crate::model::{AmbientSpace, FormCoefficients, TermSum, Vector};

/// Vector-valued leaf: a named slot, `xi`, or `phi` of another atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(String),
    Xi,
    Phi(Box<Atom>),
}

impl Atom {
    pub fn var(name: &str) -> Self {
        Atom::Var(name.to_string())
    }

    pub fn phi(self) -> Self {
        Atom::Phi(Box::new(self))
    }

    /// Number of nested `phi` applications.
    pub fn phi_depth(&self) -> usize {
        match self {
            Atom::Phi(a) => 1 + a.phi_depth(),
            _ => 0,
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Atom::Var(v) => {
                out.insert(v.clone());
            }
            Atom::Xi => {}
            Atom::Phi(a) => a.collect_vars(out),
        }
    }

    fn eval(&self, s: &AmbientSpace, vars: &BTreeMap<String, Vector>) -> Result<Vector, SymbolicError> {
        match self {
            Atom::Var(v) => {
                let x = vars
                    .get(v)
                    .ok_or_else(|| SymbolicError::UnassignedVariable(v.clone()))?;
                if x.len() != s.dim() {
                    return Err(SymbolicError::DimensionMismatch {
                        expected: s.dim(),
                        found: x.len(),
                    });
                }
                Ok(x.clone())
            }
            Atom::Xi => Ok(s.xi().clone()),
            Atom::Phi(a) => Ok(s.phi(&a.eval(s, vars)?)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Var(v) => f.write_str(v),
            Atom::Xi => f.write_str("xi"),
            Atom::Phi(a) => write!(f, "phi({a})"),
        }
    }
}

/// Scalar factor of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    G(Atom, Atom),
    Eta(Atom),
}

impl Factor {
    fn atoms(&self) -> Vec<&Atom> {
        match self {
            Factor::G(a, b) => vec![a, b],
            Factor::Eta(a) => vec![a],
        }
    }

    fn eval(&self, s: &AmbientSpace, vars: &BTreeMap<String, Vector>) -> Result<f64, SymbolicError> {
        Ok(match self {
            Factor::G(a, b) => s.g(&a.eval(s, vars)?, &b.eval(s, vars)?),
            Factor::Eta(a) => s.eta(&a.eval(s, vars)?),
        })
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::G(a, b) => write!(f, "g({a},{b})"),
            Factor::Eta(a) => write!(f, "eta({a})"),
        }
    }
}

/// `coeff * factors[0] * ... * vector`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: Coefficient,
    pub factors: Vec<Factor>,
    pub vector: Atom,
}

impl Term {
    pub fn new(coeff: Coefficient, factors: Vec<Factor>, vector: Atom) -> Self {
        Term {
            coeff,
            factors,
            vector,
        }
    }

    fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.factors
            .iter()
            .flat_map(|f| f.atoms())
            .chain(std::iter::once(&self.vector))
    }
}

/// Finite sum of terms. Construction does not normalize; see
/// [`normalize`](super::normalize).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TensorExpr {
    pub terms: Vec<Term>,
}

impl TensorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        TensorExpr { terms }
    }

    /// A single bare atom with coefficient one.
    pub fn atom(a: Atom) -> Self {
        Self::from_terms(vec![Term::new(Coefficient::one(), Vec::new(), a)])
    }

    pub fn var(name: &str) -> Self {
        Self::atom(Atom::var(name))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, c: &Coefficient) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| Term::new(&t.coeff * c, t.factors.clone(), t.vector.clone()))
                .collect(),
        )
    }

    pub fn plus(&self, other: &TensorExpr) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(terms)
    }

    pub fn minus(&self, other: &TensorExpr) -> Self {
        self.plus(&other.scaled(&Coefficient::constant(-1)))
    }

    /// Free slot names, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in &self.terms {
            for a in t.atoms() {
                a.collect_vars(&mut out);
            }
        }
        out
    }

    /// Largest `phi` nesting anywhere in the expression.
    pub fn max_phi_depth(&self) -> usize {
        self.terms
            .iter()
            .flat_map(|t| t.atoms())
            .map(Atom::phi_depth)
            .max()
            .unwrap_or(0)
    }

    /// Simultaneous substitution of slot names by vector expressions,
    /// expanded multilinearly. The result is not normalized.
    pub fn substitute(&self, map: &BTreeMap<String, TensorExpr>) -> TensorExpr {
        let mut out = Vec::new();
        for t in &self.terms {
            let mut partial: Vec<(Coefficient, Vec<Factor>)> = vec![(t.coeff.clone(), Vec::new())];
            for factor in &t.factors {
                let options = subst_factor(factor, map);
                partial = product(&partial, &options);
            }
            for (c, fs, a) in subst_atom(&t.vector, map) {
                for (pc, pf) in &partial {
                    let mut factors = pf.clone();
                    factors.extend(fs.iter().cloned());
                    out.push(Term::new(pc * &c, factors, a.clone()));
                }
            }
        }
        TensorExpr::from_terms(out)
    }

    /// Simultaneous renaming of slots.
    pub fn rename(&self, pairs: &[(&str, &str)]) -> TensorExpr {
        let map = pairs
            .iter()
            .map(|(from, to)| (from.to_string(), TensorExpr::var(to)))
            .collect();
        self.substitute(&map)
    }

    /// Numeric value together with the largest single-term magnitude.
    pub fn evaluate_scaled(
        &self,
        s: &AmbientSpace,
        f: &FormCoefficients,
        vars: &BTreeMap<String, Vector>,
    ) -> Result<(Vector, f64), SymbolicError> {
        let mut acc = TermSum::new(s);
        for t in &self.terms {
            let mut c = t.coeff.eval(f);
            for factor in &t.factors {
                c *= factor.eval(s, vars)?;
            }
            acc.add(c, &t.vector.eval(s, vars)?);
        }
        Ok(acc.finish())
    }
}

type Expansion = Vec<(Coefficient, Vec<Factor>, Atom)>;

fn subst_atom(a: &Atom, map: &BTreeMap<String, TensorExpr>) -> Expansion {
    match a {
        Atom::Var(v) => match map.get(v) {
            Some(e) => e
                .terms
                .iter()
                .map(|t| (t.coeff.clone(), t.factors.clone(), t.vector.clone()))
                .collect(),
            None => vec![(Coefficient::one(), Vec::new(), a.clone())],
        },
        Atom::Xi => vec![(Coefficient::one(), Vec::new(), Atom::Xi)],
        Atom::Phi(inner) => subst_atom(inner, map)
            .into_iter()
            .map(|(c, f, a)| (c, f, a.phi()))
            .collect(),
    }
}

fn subst_factor(f: &Factor, map: &BTreeMap<String, TensorExpr>) -> Vec<(Coefficient, Vec<Factor>)> {
    match f {
        Factor::G(a, b) => {
            let (sa, sb) = (subst_atom(a, map), subst_atom(b, map));
            let mut out = Vec::with_capacity(sa.len() * sb.len());
            for (ca, fa, xa) in &sa {
                for (cb, fb, xb) in &sb {
                    let mut fs = fa.clone();
                    fs.extend(fb.iter().cloned());
                    fs.push(Factor::G(xa.clone(), xb.clone()));
                    out.push((ca * cb, fs));
                }
            }
            out
        }
        Factor::Eta(a) => subst_atom(a, map)
            .into_iter()
            .map(|(c, mut fs, x)| {
                fs.push(Factor::Eta(x));
                (c, fs)
            })
            .collect(),
    }
}

fn product(
    left: &[(Coefficient, Vec<Factor>)],
    right: &[(Coefficient, Vec<Factor>)],
) -> Vec<(Coefficient, Vec<Factor>)> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for (cl, fl) in left {
        for (cr, fr) in right {
            let mut fs = fl.clone();
            fs.extend(fr.iter().cloned());
            out.push((cl * cr, fs));
        }
    }
    out
}

impl fmt::Display for Term {
    /// Unsigned rendering; the sign is handled by the enclosing sum.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (_, text) = signed_term(self);
        f.write_str(&text)
    }
}

/// Sign and magnitude text of a term.
fn signed_term(t: &Term) -> (bool, String) {
    let mut parts = Vec::new();
    let mut negative = false;
    match t.coeff.single_monomial() {
        Some((m, c)) => {
            negative = c < 0;
            let magnitude = Coefficient::monomial(m, c.abs());
            if !magnitude.is_one() {
                parts.push(magnitude.to_string());
            }
        }
        None => parts.push(format!("({})", t.coeff)),
    }
    parts.extend(t.factors.iter().map(|f| f.to_string()));
    parts.push(t.vector.to_string());
    (negative, parts.join("*"))
}

impl fmt::Display for TensorExpr {
    /// Deterministic plain-text form, readable by the expression parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let (neg, text) = signed_term(t);
            match (i, neg) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            f.write_str(&text)?;
        }
        Ok(())
    }
}

impl FromStr for TensorExpr {
    type Err = SymbolicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::harness::parse_vector_expr(s)?.to_tensor()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Atom {
        Atom::var("X")
    }

    #[test]
    fn display_round_trip_text() {
        let t = TensorExpr::from_terms(vec![
            Term::new(Coefficient::beta(), vec![Factor::Eta(Atom::var("Y"))], x()),
            Term::new(Coefficient::constant(-2), vec![Factor::G(x(), Atom::var("Y").phi())], Atom::Xi),
            Term::new(Coefficient::constant(-1), vec![], x().phi()),
        ]);
        assert_eq!(
            t.to_string(),
            "(f1 - f3)*eta(Y)*X - 2*g(X,phi(Y))*xi - phi(X)"
        );
        assert_eq!(TensorExpr::zero().to_string(), "0");
    }

    #[test]
    fn substitution_is_simultaneous() {
        let e = TensorExpr::from_terms(vec![Term::new(
            Coefficient::one(),
            vec![Factor::G(x(), Atom::var("Y"))],
            x(),
        )]);
        let swapped = e.rename(&[("X", "Y"), ("Y", "X")]);
        assert_eq!(swapped.to_string(), "g(Y,X)*Y");
    }

    #[test]
    fn substitution_expands_multilinearly() {
        let e = TensorExpr::from_terms(vec![Term::new(
            Coefficient::one(),
            vec![Factor::Eta(x())],
            x().phi(),
        )]);
        let mut map = BTreeMap::new();
        map.insert(
            "X".to_string(),
            TensorExpr::var("A").plus(&TensorExpr::atom(Atom::Xi).scaled(&Coefficient::constant(2))),
        );
        let out = e.substitute(&map);
        assert_eq!(out.len(), 4);
        assert_eq!(
            out.to_string(),
            "eta(A)*phi(A) + 2*eta(xi)*phi(A) + 2*eta(A)*phi(xi) + 4*eta(xi)*phi(xi)"
        );
        assert_eq!(out.variables().into_iter().collect::<Vec<_>>(), vec!["A"]);
    }

    #[test]
    fn depth() {
        let e = TensorExpr::atom(x().phi().phi());
        assert_eq!(e.max_phi_depth(), 2);
        assert_eq!(TensorExpr::zero().max_phi_depth(), 0);
    }
}
