use std::collections::BTreeMap;

use super::expr::{Atom, Factor, TensorExpr, Term};
use super::normalize::normalize;
use super::poly::Coefficient;
use super::SymbolicError;
use crate::model::{AmbientSpace, ConnectionKind, FormCoefficients, Vector};

type ScalarTerms = Vec<(Coefficient, Vec<Factor>)>;

fn var_name(a: &Atom) -> Option<&str> {
    match a {
        Atom::Var(v) => Some(v),
        _ => None,
    }
}

/// Derivative of a normal-form atom along `d`, with slots held parallel.
fn d_atom(a: &Atom, d: &Atom, beta: &Coefficient) -> Vec<Term> {
    match a {
        Atom::Var(_) => Vec::new(),
        // nabla_D xi = -beta phi D
        Atom::Xi => vec![Term::new(-beta, Vec::new(), d.clone().phi())],
        // (nabla_D phi) a = beta [g(D,a) xi - eta(a) D]
        Atom::Phi(inner) => vec![
            Term::new(beta.clone(), vec![Factor::G(d.clone(), (**inner).clone())], Atom::Xi),
            Term::new(-beta, vec![Factor::Eta((**inner).clone())], d.clone()),
        ],
    }
}

/// Derivative of a normal-form scalar factor along `d`.
fn d_factor(f: &Factor, d: &Atom, beta: &Coefficient) -> ScalarTerms {
    match f {
        Factor::G(a, Atom::Phi(b)) => {
            let b = (**b).clone();
            // g(a, (nabla_D phi) b) = beta [g(D,b) eta(a) - eta(b) g(a,D)]
            vec![
                (beta.clone(), vec![Factor::G(d.clone(), b.clone()), Factor::Eta(a.clone())]),
                (-beta, vec![Factor::Eta(b), Factor::G(a.clone(), d.clone())]),
            ]
        }
        Factor::G(_, _) => Vec::new(),
        // (nabla_D eta)(a) = g(a, nabla_D xi) = -beta g(a, phi D)
        Factor::Eta(a) => vec![(-beta, vec![Factor::G(a.clone(), d.clone().phi())])],
    }
}

/// Covariant derivative along the slot `direction`, treating `f1, f2, f3`
/// as constants and every slot as parallel, so only `g`, `eta`, `phi` and
/// `xi` contribute. Fails on nested `phi` in the input.
pub fn covariant_differentiate(e: &TensorExpr, direction: &str) -> Result<TensorExpr, SymbolicError> {
    if let Some(t) = e.terms.iter().find(|t| {
        t.vector.phi_depth() > 1
            || t.factors.iter().any(|f| match f {
                Factor::G(a, b) => a.phi_depth() > 1 || b.phi_depth() > 1,
                Factor::Eta(a) => a.phi_depth() > 1,
            })
    }) {
        return Err(SymbolicError::NestedPhi(
            TensorExpr::from_terms(vec![t.clone()]).to_string(),
        ));
    }
    let d = Atom::var(direction);
    let beta = Coefficient::beta();
    let mut out = Vec::new();
    for t in &normalize(e).terms {
        debug_assert!(t.factors.iter().all(|f| match f {
            Factor::G(a, b) => var_name(a).is_some() && (var_name(b).is_some() || b.phi_depth() == 1),
            Factor::Eta(a) => var_name(a).is_some(),
        }));
        for (i, f) in t.factors.iter().enumerate() {
            for (c, mut fs) in d_factor(f, &d, &beta) {
                fs.extend(
                    t.factors
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, g)| g.clone()),
                );
                out.push(Term::new(&t.coeff * &c, fs, t.vector.clone()));
            }
        }
        for dt in d_atom(&t.vector, &d, &beta) {
            let mut fs = t.factors.clone();
            fs.extend(dt.factors);
            out.push(Term::new(&t.coeff * &dt.coeff, fs, dt.vector));
        }
    }
    Ok(normalize(&TensorExpr::from_terms(out)))
}

/// `U(X,Y) = (modified nabla)_X Y - nabla_X Y`, stored with slots `X`, `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceTensor {
    pub expr: TensorExpr,
}

impl DifferenceTensor {
    pub const FIRST: &'static str = "X";
    pub const SECOND: &'static str = "Y";

    pub fn new(expr: TensorExpr) -> Self {
        DifferenceTensor { expr }
    }

    pub fn for_kind(kind: ConnectionKind) -> Self {
        let text = match kind {
            ConnectionKind::LeviCivita => "0",
            ConnectionKind::SemiSymMetric => "eta(Y)*X - g(X,Y)*xi",
            ConnectionKind::SemiSymNonMetric => "eta(Y)*X",
            ConnectionKind::SchoutenVanKampen => {
                "(f1 - f3)*eta(Y)*phi(X) - (f1 - f3)*g(phi(X),Y)*xi"
            }
            ConnectionKind::TanakaWebster => {
                "eta(X)*phi(Y) + (f1 - f3)*eta(Y)*phi(X) - (f1 - f3)*g(phi(X),Y)*xi"
            }
        };
        Self::new(text.parse().expect("difference tensor parses"))
    }

    /// `U(a, b)`, not normalized.
    pub fn apply(&self, a: &TensorExpr, b: &TensorExpr) -> TensorExpr {
        let mut map = BTreeMap::new();
        map.insert(Self::FIRST.to_string(), a.clone());
        map.insert(Self::SECOND.to_string(), b.clone());
        self.expr.substitute(&map)
    }
}

/// `R(X,Y)Z + (nabla_X U)(Y,Z) - (nabla_Y U)(X,Z) + U(X,U(Y,Z)) - U(Y,U(X,Z))`
/// with `R` the Levi-Civita form, normalized.
pub fn curvature_from_difference(u: &DifferenceTensor) -> Result<TensorExpr, SymbolicError> {
    let (x, y, z) = (TensorExpr::var("X"), TensorExpr::var("Y"), TensorExpr::var("Z"));
    let u_yz = u.apply(&y, &z);
    let u_xz = u.apply(&x, &z);
    let total = stated_curvature(ConnectionKind::LeviCivita)
        .plus(&covariant_differentiate(&u_yz, "X")?)
        .minus(&covariant_differentiate(&u_xz, "Y")?)
        .plus(&u.apply(&x, &u_yz))
        .minus(&u.apply(&y, &u_xz));
    Ok(normalize(&total))
}

const LEVI_CIVITA_TEXT: &str = "f1*{g(Y,Z)*X - g(X,Z)*Y} \
    + f2*{g(X,phi(Z))*phi(Y) - g(Y,phi(Z))*phi(X) + 2*g(X,phi(Y))*phi(Z)} \
    + f3*{eta(X)*eta(Z)*Y - eta(Y)*eta(Z)*X + g(X,Z)*eta(Y)*xi - g(Y,Z)*eta(X)*xi}";

const SEMISYM_METRIC_TEXT: &str = "(f1 - 1)*{g(Y,Z)*X - g(X,Z)*Y} \
    + f2*{g(X,phi(Z))*phi(Y) - g(Y,phi(Z))*phi(X) + 2*g(X,phi(Y))*phi(Z)} \
    + (f3 - 1)*{eta(X)*eta(Z)*Y - eta(Y)*eta(Z)*X + g(X,Z)*eta(Y)*xi - g(Y,Z)*eta(X)*xi} \
    + (f1 - f3)*{g(X,phi(Z))*Y - g(Y,phi(Z))*X + g(Y,Z)*phi(X) - g(X,Z)*phi(Y)}";

const SEMISYM_NONMETRIC_TEXT: &str = "f1*{g(Y,Z)*X - g(X,Z)*Y} \
    + f2*{g(X,phi(Z))*phi(Y) - g(Y,phi(Z))*phi(X) + 2*g(X,phi(Y))*phi(Z)} \
    + f3*{eta(X)*eta(Z)*Y - eta(Y)*eta(Z)*X + g(X,Z)*eta(Y)*xi - g(Y,Z)*eta(X)*xi} \
    + (f1 - f3)*[g(X,phi(Z))*Y - g(Y,phi(Z))*X] \
    + eta(Y)*eta(Z)*X - eta(X)*eta(Z)*Y";

const SCHOUTEN_VAN_KAMPEN_TEXT: &str = "f1*{g(Y,Z)*X - g(X,Z)*Y} \
    + f2*{g(X,phi(Z))*phi(Y) - g(Y,phi(Z))*phi(X) + 2*g(X,phi(Y))*phi(Z)} \
    + {f3 + (f1 - f3)^2}*{eta(X)*eta(Z)*Y - eta(Y)*eta(Z)*X + g(X,Z)*eta(Y)*xi - g(Y,Z)*eta(X)*xi} \
    + (f1 - f3)^2*[g(X,phi(Z))*phi(Y) - g(Y,phi(Z))*phi(X)]";

const TANAKA_WEBSTER_TEXT: &str = "f1*{g(Y,Z)*X - g(X,Z)*Y} \
    + f2*{g(X,phi(Z))*phi(Y) - g(Y,phi(Z))*phi(X) + 2*g(X,phi(Y))*phi(Z)} \
    + {f3 + (f1 - f3)^2}*{eta(X)*eta(Z)*Y - eta(Y)*eta(Z)*X + g(X,Z)*eta(Y)*xi - g(Y,Z)*eta(X)*xi} \
    + (f1 - f3)^2*[g(X,phi(Z))*phi(Y) - g(Y,phi(Z))*phi(X)] \
    + 2*(f1 - f3)*g(X,phi(Y))*phi(Z)";

/// Stated text of the curvature formula for `kind`, in the
/// parser's syntax.
pub fn stated_curvature_text(kind: ConnectionKind) -> &'static str {
    match kind {
        ConnectionKind::LeviCivita => LEVI_CIVITA_TEXT,
        ConnectionKind::SemiSymMetric => SEMISYM_METRIC_TEXT,
        ConnectionKind::SemiSymNonMetric => SEMISYM_NONMETRIC_TEXT,
        ConnectionKind::SchoutenVanKampen => SCHOUTEN_VAN_KAMPEN_TEXT,
        ConnectionKind::TanakaWebster => TANAKA_WEBSTER_TEXT,
    }
}

/// The stated curvature formula as a term list, distributed but not
/// normalized.
pub fn stated_curvature(kind: ConnectionKind) -> TensorExpr {
    stated_curvature_text(kind)
        .parse()
        .expect("stated curvature parses")
}

/// Whether `a - b` normalizes to zero, with the normalized difference.
pub fn expr_equal(a: &TensorExpr, b: &TensorExpr) -> (bool, TensorExpr) {
    let residual = normalize(&a.minus(b));
    (residual.is_zero(), residual)
}

/// Numeric value of `e` with slots bound by `assignment`.
pub fn evaluate(
    e: &TensorExpr,
    s: &AmbientSpace,
    f: &FormCoefficients,
    assignment: &BTreeMap<String, Vector>,
) -> Result<Vector, SymbolicError> {
    Ok(e.evaluate_scaled(s, f, assignment)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{curvature, nabla_phi_rhs, standard_structure};

    fn p(text: &str) -> TensorExpr {
        text.parse().unwrap()
    }

    #[test]
    fn differentiation_examples() {
        let d = covariant_differentiate(&p("eta(Y)*X"), "Xd").unwrap();
        assert_eq!(d.to_string(), "(f1 - f3)*g(Xd,phi(Y))*X");
        assert!(expr_equal(&d, &p("-(f1 - f3)*g(Y,phi(Xd))*X")).0);
        let d = covariant_differentiate(&p("g(X,Y)*xi"), "Xd").unwrap();
        assert_eq!(d.to_string(), "(-f1 + f3)*g(X,Y)*phi(Xd)");
        assert!(covariant_differentiate(&p("g(X,Y)*Z"), "W").unwrap().is_zero());
        assert!(covariant_differentiate(&TensorExpr::zero(), "W").unwrap().is_zero());
    }

    #[test]
    fn nested_phi_is_rejected() {
        let err = covariant_differentiate(&p("phi(phi(X))"), "D").unwrap_err();
        assert!(matches!(err, SymbolicError::NestedPhi(_)));
    }

    #[test]
    fn phi_derivative_matches_model() {
        let d = covariant_differentiate(&p("phi(Y)"), "X").unwrap();
        let s = standard_structure(2).unwrap();
        let f = FormCoefficients::new(1.5, 0.2, -0.5);
        let x = Vector::from_vec(vec![0.3, -1.0, 0.2, 0.7, 0.4]);
        let y = Vector::from_vec(vec![1.0, 0.5, -0.3, 0.1, -0.8]);
        let vars = BTreeMap::from([("X".to_string(), x.clone()), ("Y".to_string(), y.clone())]);
        let v = evaluate(&d, &s, &f, &vars).unwrap();
        assert!((v - nabla_phi_rhs(&s, &f, &x, &y).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn zero_difference_gives_levi_civita() {
        let r = curvature_from_difference(&DifferenceTensor::new(TensorExpr::zero())).unwrap();
        assert_eq!(r, normalize(&stated_curvature(ConnectionKind::LeviCivita)));
    }

    #[test]
    fn stated_term_counts() {
        assert_eq!(stated_curvature(ConnectionKind::LeviCivita).len(), 9);
        assert_eq!(stated_curvature(ConnectionKind::SemiSymMetric).len(), 13);
        assert_eq!(stated_curvature(ConnectionKind::SemiSymNonMetric).len(), 13);
        assert_eq!(stated_curvature(ConnectionKind::SchoutenVanKampen).len(), 11);
        assert_eq!(stated_curvature(ConnectionKind::TanakaWebster).len(), 12);
    }

    #[test]
    fn derived_matches_stated_for_every_kind() {
        for kind in ConnectionKind::ALL {
            let derived = curvature_from_difference(&DifferenceTensor::for_kind(kind)).unwrap();
            let (equal, residual) = expr_equal(&derived, &stated_curvature(kind));
            assert!(equal, "{kind}: {residual}");
        }
    }

    #[test]
    fn semisym_metric_differs_from_levi_civita() {
        let (equal, residual) = expr_equal(
            &stated_curvature(ConnectionKind::SemiSymMetric),
            &stated_curvature(ConnectionKind::LeviCivita),
        );
        assert!(!equal);
        let expected = p("-{g(Y,Z)*X - g(X,Z)*Y} \
            - {eta(X)*eta(Z)*Y - eta(Y)*eta(Z)*X + g(X,Z)*eta(Y)*xi - g(Y,Z)*eta(X)*xi} \
            + (f1 - f3)*{g(X,phi(Z))*Y - g(Y,phi(Z))*X + g(Y,Z)*phi(X) - g(X,Z)*phi(Y)}");
        assert!(expr_equal(&residual, &expected).0);
    }

    #[test]
    fn evaluation_matches_model_example() {
        let s = standard_structure(2).unwrap();
        let f = FormCoefficients::new(1.0, 0.5, 0.25);
        let vars = BTreeMap::from([
            ("X".to_string(), s.basis_vector(0)),
            ("Y".to_string(), s.basis_vector(1)),
            ("Z".to_string(), s.basis_vector(0)),
        ]);
        let v = evaluate(&stated_curvature(ConnectionKind::LeviCivita), &s, &f, &vars).unwrap();
        let m = curvature(&s, &f, ConnectionKind::LeviCivita, &vars["X"], &vars["Y"], &vars["Z"]).unwrap();
        assert!((&v - &m).norm() < 1e-14);
        assert!((v + s.basis_vector(1) * 2.5).norm() < 1e-14);
        let zero = evaluate(&TensorExpr::zero(), &s, &f, &vars).unwrap();
        assert_eq!(zero.norm(), 0.0);
        let missing = evaluate(&p("W"), &s, &f, &vars).unwrap_err();
        assert_eq!(missing, SymbolicError::UnassignedVariable("W".into()));
    }
}
