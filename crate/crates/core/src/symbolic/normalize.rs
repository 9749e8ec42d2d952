//! Normal forms for tensor expressions.
//!
//! Every atom reduces to a slot `X`, `phi(X)` or `xi`. Every scalar factor
//! reduces to `g(A,B)` with `A <= B`, `g(A,phi(B))` with `A < B`, or
//! `eta(A)`. Terms are collected and sorted by coefficient, factor multiset
//! and atom.

use std::collections::BTreeMap;

use super::expr::{Atom, Factor, TensorExpr, Term};
use super::poly::Coefficient;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum NormAtom {
    Var(String),
    PhiVar(String),
    Xi,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum NormFactor {
    G(String, String),
    GPhi(String, String),
    Eta(String),
}

type Monomial = Vec<NormFactor>;
/// Integer combination of factor monomials.
type ScalarSum = BTreeMap<Monomial, i64>;
/// Integer combination of (factor monomial, atom).
type VectorSum = BTreeMap<(Monomial, NormAtom), i64>;

fn add_to<K: Ord>(map: &mut BTreeMap<K, i64>, k: K, c: i64) {
    let slot = map.entry(k).or_insert(0);
    *slot += c;
}

fn prune<K: Ord>(mut map: BTreeMap<K, i64>) -> BTreeMap<K, i64> {
    map.retain(|_, c| *c != 0);
    map
}

fn merge(a: &Monomial, b: &Monomial) -> Monomial {
    let mut m = a.clone();
    m.extend(b.iter().cloned());
    m.sort();
    m
}

fn scalar_one() -> ScalarSum {
    BTreeMap::from([(Vec::new(), 1)])
}

fn scalar_factor(f: NormFactor, c: i64) -> ScalarSum {
    BTreeMap::from([(vec![f], c)])
}

fn scalar_mul(a: &ScalarSum, b: &ScalarSum) -> ScalarSum {
    let mut out = BTreeMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_to(&mut out, merge(ma, mb), ca * cb);
        }
    }
    prune(out)
}

fn apply_phi(v: &VectorSum) -> VectorSum {
    let mut out = BTreeMap::new();
    for ((m, a), c) in v {
        match a {
            NormAtom::Var(x) => add_to(&mut out, (m.clone(), NormAtom::PhiVar(x.clone())), *c),
            // phi^2 X = -X + eta(X) xi
            NormAtom::PhiVar(x) => {
                add_to(&mut out, (m.clone(), NormAtom::Var(x.clone())), -c);
                let with_eta = merge(m, &vec![NormFactor::Eta(x.clone())]);
                add_to(&mut out, (with_eta, NormAtom::Xi), *c);
            }
            NormAtom::Xi => {}
        }
    }
    prune(out)
}

fn norm_atom(a: &Atom) -> VectorSum {
    match a {
        Atom::Var(x) => BTreeMap::from([((Vec::new(), NormAtom::Var(x.clone())), 1)]),
        Atom::Xi => BTreeMap::from([((Vec::new(), NormAtom::Xi), 1)]),
        Atom::Phi(inner) => apply_phi(&norm_atom(inner)),
    }
}

/// `g(a, phi b)` for slots `a`, `b`.
fn g_phi(a: &str, b: &str) -> ScalarSum {
    use std::cmp::Ordering::*;
    match a.cmp(b) {
        Equal => BTreeMap::new(),
        Less => scalar_factor(NormFactor::GPhi(a.into(), b.into()), 1),
        Greater => scalar_factor(NormFactor::GPhi(b.into(), a.into()), -1),
    }
}

/// Metric on two reduced atoms.
fn g_atoms(a: &NormAtom, b: &NormAtom) -> ScalarSum {
    use NormAtom::*;
    match (a, b) {
        (Var(x), Var(y)) => {
            let (p, q) = if x <= y { (x, y) } else { (y, x) };
            scalar_factor(NormFactor::G(p.clone(), q.clone()), 1)
        }
        (Var(x), PhiVar(y)) => g_phi(x, y),
        (PhiVar(x), Var(y)) => g_phi(y, x),
        (PhiVar(x), PhiVar(y)) => {
            let mut s = g_atoms(&Var(x.clone()), &Var(y.clone()));
            let eta = merge(&vec![NormFactor::Eta(x.clone())], &vec![NormFactor::Eta(y.clone())]);
            add_to(&mut s, eta, -1);
            prune(s)
        }
        (Var(x), Xi) | (Xi, Var(x)) => scalar_factor(NormFactor::Eta(x.clone()), 1),
        (PhiVar(_), Xi) | (Xi, PhiVar(_)) => BTreeMap::new(),
        (Xi, Xi) => scalar_one(),
    }
}

fn lift(v: &VectorSum, f: impl Fn(&NormAtom) -> ScalarSum) -> ScalarSum {
    let mut out = BTreeMap::new();
    for ((m, a), c) in v {
        for (fm, fc) in f(a) {
            add_to(&mut out, merge(m, &fm), c * fc);
        }
    }
    prune(out)
}

fn norm_factor(f: &Factor) -> ScalarSum {
    match f {
        Factor::G(a, b) => {
            let (va, vb) = (norm_atom(a), norm_atom(b));
            let mut out = BTreeMap::new();
            for ((ma, xa), ca) in &va {
                for ((mb, xb), cb) in &vb {
                    for (m, c) in g_atoms(xa, xb) {
                        add_to(&mut out, merge(&merge(ma, mb), &m), ca * cb * c);
                    }
                }
            }
            prune(out)
        }
        Factor::Eta(a) => lift(&norm_atom(a), |x| g_atoms(x, &NormAtom::Xi)),
    }
}

fn to_atom(a: &NormAtom) -> Atom {
    match a {
        NormAtom::Var(x) => Atom::var(x),
        NormAtom::PhiVar(x) => Atom::var(x).phi(),
        NormAtom::Xi => Atom::Xi,
    }
}

fn to_factor(f: &NormFactor) -> Factor {
    match f {
        NormFactor::G(a, b) => Factor::G(Atom::var(a), Atom::var(b)),
        NormFactor::GPhi(a, b) => Factor::G(Atom::var(a), Atom::var(b).phi()),
        NormFactor::Eta(a) => Factor::Eta(Atom::var(a)),
    }
}

/// Reduces an expression to its normal form. The result is a fixed point:
/// normalizing it again returns it unchanged.
pub fn normalize(e: &TensorExpr) -> TensorExpr {
    let mut collected: BTreeMap<(Monomial, NormAtom), Coefficient> = BTreeMap::new();
    for t in &e.terms {
        if t.coeff.is_zero() {
            continue;
        }
        let mut scalars = scalar_one();
        for f in &t.factors {
            scalars = scalar_mul(&scalars, &norm_factor(f));
            if scalars.is_empty() {
                break;
            }
        }
        if scalars.is_empty() {
            continue;
        }
        for ((vm, a), vc) in norm_atom(&t.vector) {
            for (sm, sc) in &scalars {
                let key = (merge(&vm, sm), a.clone());
                let slot = collected.entry(key).or_default();
                *slot = &*slot + &(&t.coeff * &Coefficient::constant(vc * sc));
            }
        }
    }
    let mut terms: Vec<(Coefficient, Monomial, NormAtom)> = collected
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((m, a), c)| (c, m, a))
        .collect();
    terms.sort();
    TensorExpr::from_terms(
        terms
            .into_iter()
            .map(|(c, m, a)| Term::new(c, m.iter().map(to_factor).collect(), to_atom(&a)))
            .collect(),
    )
}

pub fn is_normalized(e: &TensorExpr) -> bool {
    normalize(e) == *e
}

/// The identities the normalizer applies, each stated as an equality of
/// vector expressions in the parser's syntax. Scalar identities are
/// multiplied by a free slot `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    PhiSquared,
    PhiXi,
    EtaPhi,
    EtaXi,
    PhiIsometry,
    PhiAdjoint,
    GSymmetry,
    GPhiSwap,
    GPhiDiagonal,
    GXi,
    GXiPhi,
    GXiXi,
    CollectLike,
}

impl Rule {
    pub const ALL: [Rule; 13] = [
        Rule::PhiSquared,
        Rule::PhiXi,
        Rule::EtaPhi,
        Rule::EtaXi,
        Rule::PhiIsometry,
        Rule::PhiAdjoint,
        Rule::GSymmetry,
        Rule::GPhiSwap,
        Rule::GPhiDiagonal,
        Rule::GXi,
        Rule::GXiPhi,
        Rule::GXiXi,
        Rule::CollectLike,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::PhiSquared => "phi-squared",
            Rule::PhiXi => "phi-xi",
            Rule::EtaPhi => "eta-phi",
            Rule::EtaXi => "eta-xi",
            Rule::PhiIsometry => "phi-isometry",
            Rule::PhiAdjoint => "phi-adjoint",
            Rule::GSymmetry => "g-symmetry",
            Rule::GPhiSwap => "g-phi-swap",
            Rule::GPhiDiagonal => "g-phi-diagonal",
            Rule::GXi => "g-xi",
            Rule::GXiPhi => "g-xi-phi",
            Rule::GXiXi => "g-xi-xi",
            Rule::CollectLike => "collect-like",
        }
    }

    /// `(lhs, rhs)`; the rhs is already in normal form.
    pub fn sides(self) -> (&'static str, &'static str) {
        match self {
            Rule::PhiSquared => ("phi(phi(A))", "-A + eta(A)*xi"),
            Rule::PhiXi => ("phi(xi)", "0"),
            Rule::EtaPhi => ("eta(phi(A))*Z", "0"),
            Rule::EtaXi => ("eta(xi)*Z", "Z"),
            Rule::PhiIsometry => ("g(phi(A),phi(B))*Z", "-eta(A)*eta(B)*Z + g(A,B)*Z"),
            Rule::PhiAdjoint => ("g(phi(A),B)*Z", "-g(A,phi(B))*Z"),
            Rule::GSymmetry => ("g(B,A)*Z", "g(A,B)*Z"),
            Rule::GPhiSwap => ("g(B,phi(A))*Z", "-g(A,phi(B))*Z"),
            Rule::GPhiDiagonal => ("g(A,phi(A))*Z", "0"),
            Rule::GXi => ("g(A,xi)*Z", "eta(A)*Z"),
            Rule::GXiPhi => ("g(phi(A),xi)*Z", "0"),
            Rule::GXiXi => ("g(xi,xi)*Z", "Z"),
            Rule::CollectLike => ("2*eta(A)*Z - eta(A)*Z + f1*Z - f1*Z", "eta(A)*Z"),
        }
    }

    pub fn parsed(self) -> (TensorExpr, TensorExpr) {
        let (l, r) = self.sides();
        (
            l.parse().expect("rule lhs parses"),
            r.parse().expect("rule rhs parses"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(text: &str) -> String {
        normalize(&text.parse().unwrap()).to_string()
    }

    #[test]
    fn rule_rhs_is_the_normal_form_of_lhs() {
        for rule in Rule::ALL {
            let (l, r) = rule.parsed();
            assert_eq!(normalize(&l), r, "{}", rule.name());
            assert!(is_normalized(&r), "{}", rule.name());
        }
    }

    #[test]
    fn documented_examples() {
        assert_eq!(n("phi(phi(X))"), "-X + eta(X)*xi");
        assert_eq!(n("g(phi(X),phi(Y))*Z"), "-eta(X)*eta(Y)*Z + g(X,Y)*Z");
        assert_eq!(n("g(X,Y)*Z - g(Y,X)*Z"), "0");
        assert_eq!(n("phi(phi(phi(X)))"), "-phi(X)");
        assert_eq!(n("eta(phi(phi(X)))*Y"), "0");
        assert_eq!(n("g(phi(phi(X)),Y)*Z"), "-g(X,Y)*Z + eta(X)*eta(Y)*Z");
    }

    #[test]
    fn canonical_orientation() {
        assert_eq!(n("g(Y,phi(X))*Z"), "-g(X,phi(Y))*Z");
        assert_eq!(n("g(phi(Y),X)*Z"), "g(X,phi(Y))*Z");
        assert_eq!(n("g(Y,X)*g(X,phi(Y))*xi"), "g(X,Y)*g(X,phi(Y))*xi");
        assert_eq!(n("eta(Y)*eta(X)*Z"), "eta(X)*eta(Y)*Z");
    }

    #[test]
    fn coefficients_collect() {
        assert_eq!(n("f1*X - f3*X + (f3 - f1)*X"), "0");
        assert_eq!(n("(f1 - f3)^2*X + 2*f1*f3*X"), "(f1^2 + f3^2)*X");
    }

    #[test]
    fn idempotent_on_examples() {
        for text in [
            "phi(phi(X)) + g(phi(Y),phi(Z))*phi(phi(X))",
            "(f1 - 1)*g(Y,Z)*X + f2*g(X,phi(Z))*phi(Y)",
            "eta(X)*g(phi(X),xi)*Y",
        ] {
            let once = normalize(&text.parse().unwrap());
            assert_eq!(normalize(&once), once);
        }
    }
}
