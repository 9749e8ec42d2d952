//! Registry of reviewed discrepancies between the stated claims and
//! the computed geometry, plus the classifier that attaches them to failing
//! suite records.

use serde::{Deserialize, Serialize};

use crate::model::ConnectionKind;
use crate::submanifold::{SubspaceClass, SuiteId, SuiteReport, Verdict, COEFF_EPS, WITNESS_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub id: String,
    pub claim: String,
    pub finding: String,
    pub counterexample: String,
}

pub const VANISHING_NORMAL_ACTION: &str = "E-vanishing-normal-action";
pub const SEMISYM_NORMALITY: &str = "E-semisym-normality";
pub const NORMAL_BUNDLE_CONVERSE: &str = "E-normal-bundle-converse";

/// All reviewed entries, in a fixed order.
pub fn registry() -> Vec<Erratum> {
    vec![
        Erratum {
            id: VANISHING_NORMAL_ACTION.into(),
            claim: "R(X,Y)V = 0 for X, Y tangent and V normal to an anti-invariant W".into(),
            finding: "the f2 bracket contributes f2 [g(X, phi V) phi Y - g(Y, phi V) phi X], which is \
                      normal but nonzero once W has two horizontal directions; for the \
                      Schouten-van Kampen and Tanaka-Webster forms the coefficient is f2 + (f1 - f3)^2"
                .into(),
            counterexample: "standard structure, n = 2, W = span{xi, e1, e3}, X = e1, Y = e3, V = e4: \
                             the Levi-Civita value is f2 e2"
                .into(),
        },
        Erratum {
            id: SEMISYM_NORMALITY.into(),
            claim: "R(X,Y)V is normal for the semisymmetric connections on anti-invariant W".into(),
            finding: "with f1 != f3 both semisymmetric forms carry (f1 - f3)[g(X, phi V) Y - g(Y, phi V) X], \
                      which is tangent and nonzero"
                .into(),
            counterexample: "standard structure, n = 2, W = span{xi, e1}, X = e1, Y = xi, V = e2: \
                             the tangential part is -(f1 - f3) xi"
                .into(),
        },
        Erratum {
            id: NORMAL_BUNDLE_CONVERSE.into(),
            claim: "if R(U,V)U is normal for all normal U, V then W is invariant or anti-invariant".into(),
            finding: "tan(R(U,V)U) reduces to -c g(V, phi U) tU with tU the tangential part of phi U; \
                      when the normal space is itself anti-invariant this vanishes for a mixed W"
                .into(),
            counterexample: "n = 3, W = span{xi, phi u1, phi u2, u3, phi u3} for an adapted frame \
                             u1, u2, u3: W is mixed and its normal space span{u1, u2} has phi-image inside W"
                .into(),
        },
    ]
}

pub fn lookup(id: &str) -> Option<Erratum> {
    registry().into_iter().find(|e| e.id == id)
}

/// Matches a failed suite record against the registry. Returns the entry id
/// only when the observed residual is large enough to certify the discrepancy.
pub fn classify_failure(report: &SuiteReport) -> Option<&'static str> {
    if report.verdict != Verdict::Fail {
        return None;
    }
    let anti = report.subspace == Some(SubspaceClass::AntiInvariant);
    let semisym = matches!(
        report.kind,
        ConnectionKind::SemiSymMetric | ConnectionKind::SemiSymNonMetric
    );
    match report.suite {
        SuiteId::Normality if anti => {
            let tangential = report.max_residual;
            let whole = report.secondary_residual.unwrap_or(0.0);
            if semisym
                && report.coefficients.diff13().abs() > COEFF_EPS
                && tangential >= WITNESS_THRESHOLD
            {
                Some(SEMISYM_NORMALITY)
            } else if report.max_ratio > 1.0 && tangential < WITNESS_THRESHOLD && whole >= WITNESS_THRESHOLD {
                Some(VANISHING_NORMAL_ACTION)
            } else {
                None
            }
        }
        SuiteId::NormalWitnessCounterexample => {
            let w = report.witness.as_ref()?;
            (!w.found && report.subspace == Some(SubspaceClass::Mixed)).then_some(NORMAL_BUNDLE_CONVERSE)
        }
        _ => None,
    }
}

/// Rewrites certified failures to [`Verdict::Erratum`] and records the entry id.
pub fn apply(report: &mut SuiteReport) {
    if let Some(id) = classify_failure(report) {
        report.verdict = Verdict::Erratum;
        report.erratum = Some(id.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{frame_structure, FormCoefficients};
    use crate::submanifold::{
        check_normality_rxyv, make_anti_invariant_subspace, make_invariant_subspace,
        mixed_with_anti_invariant_normal, witness_suite, SuiteParams,
    };
    use std::sync::Arc;

    #[test]
    fn registry_ids_are_unique() {
        let ids: Vec<_> = registry().into_iter().map(|e| e.id).collect();
        let mut sorted = ids.clone();
        sorted.dedup();
        assert_eq!(ids.len(), 3);
        assert_eq!(ids, sorted);
        assert!(lookup(SEMISYM_NORMALITY).is_some());
        assert!(lookup("E-unknown").is_none());
    }

    #[test]
    fn classifies_normality_failures() {
        let s = Arc::new(frame_structure(2, 1).unwrap());
        let p = SuiteParams::default();
        let anti = make_anti_invariant_subspace(&s, 2).unwrap();
        let f = FormCoefficients::new(1.0, 0.5, 1.0);
        let mut r = check_normality_rxyv(&f, ConnectionKind::TanakaWebster, &anti, &p).unwrap();
        apply(&mut r);
        assert_eq!(r.erratum.as_deref(), Some(VANISHING_NORMAL_ACTION));

        let g = FormCoefficients::new(1.0, 0.5, 0.25);
        let mut r = check_normality_rxyv(&g, ConnectionKind::SemiSymMetric, &anti, &p).unwrap();
        apply(&mut r);
        assert_eq!(r.erratum.as_deref(), Some(SEMISYM_NORMALITY));

        let inv = make_invariant_subspace(&s, 1).unwrap();
        let mut r = check_normality_rxyv(&g, ConnectionKind::SemiSymMetric, &inv, &p).unwrap();
        apply(&mut r);
        assert_eq!((r.verdict, r.erratum), (Verdict::Pass, None));
    }

    #[test]
    fn classifies_normal_bundle_counterexample() {
        let s = Arc::new(frame_structure(3, 2).unwrap());
        let w = mixed_with_anti_invariant_normal(&s).unwrap();
        let f = FormCoefficients::new(1.0, 0.5, 0.25);
        let mut r = witness_suite(
            SuiteId::NormalWitnessCounterexample,
            &f,
            ConnectionKind::SchoutenVanKampen,
            &w,
            200,
            1,
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        apply(&mut r);
        assert_eq!(r.verdict, Verdict::Erratum);
    }

    #[test]
    fn genuine_failures_are_left_alone() {
        let mut r = SuiteReport::new(
            SuiteId::Tangency,
            ConnectionKind::LeviCivita,
            2,
            FormCoefficients::new(1.0, 1.0, 1.0),
        );
        r.verdict = Verdict::Fail;
        apply(&mut r);
        assert_eq!(r.verdict, Verdict::Fail);
    }
}
