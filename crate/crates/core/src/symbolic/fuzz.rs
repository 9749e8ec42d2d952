use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::expr::{Atom, Factor, TensorExpr, Term};
use super::normalize::{normalize, Rule};
use super::poly::Coefficient;
use crate::model::{frame_structure, seeded_rng, standard_structure, AmbientSpace, FormCoefficients, Vector};

const SLOTS: [&str; 4] = ["X", "Y", "Z", "W"];

fn random_atom(rng: &mut impl Rng) -> Atom {
    let base = if rng.random_bool(0.15) {
        Atom::Xi
    } else {
        Atom::var(SLOTS[rng.random_range(0..SLOTS.len())])
    };
    (0..rng.random_range(0..=3)).fold(base, |a, _| a.phi())
}

fn random_coefficient(rng: &mut impl Rng) -> Coefficient {
    let mut c = Coefficient::zero();
    for _ in 0..rng.random_range(1..=3) {
        let m = [
            rng.random_range(0..=2),
            rng.random_range(0..=1),
            rng.random_range(0..=2),
        ];
        c = c + Coefficient::monomial(m, rng.random_range(-3..=3));
    }
    if c.is_zero() {
        Coefficient::one()
    } else {
        c
    }
}

/// Random raw expression with up to `max_terms` terms over the slots
/// `X, Y, Z, W`, nesting `phi` up to three times.
pub fn random_expr(rng: &mut impl Rng, max_terms: usize) -> TensorExpr {
    let count = rng.random_range(1..=max_terms.max(1));
    let terms = (0..count)
        .map(|_| {
            let factors = (0..rng.random_range(0..=2))
                .map(|_| {
                    if rng.random_bool(0.6) {
                        Factor::G(random_atom(rng), random_atom(rng))
                    } else {
                        Factor::Eta(random_atom(rng))
                    }
                })
                .collect();
            Term::new(random_coefficient(rng), factors, random_atom(rng))
        })
        .collect();
    TensorExpr::from_terms(terms)
}

fn random_assignment(s: &AmbientSpace, rng: &mut impl Rng, names: &[&str]) -> BTreeMap<String, Vector> {
    names
        .iter()
        .map(|n| (n.to_string(), s.gaussian_vector(rng)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleCheck {
    pub rule: String,
    pub lhs: String,
    pub rhs: String,
    pub samples: usize,
    pub max_residual: f64,
    pub passed: bool,
}

/// Numeric check of every rewrite identity on `samples` assignments,
/// alternating the standard structure and seeded frame structures.
pub fn rule_soundness(samples: usize, seed: u64, abs_tol: f64) -> Vec<RuleCheck> {
    let mut rng = seeded_rng(seed);
    let structures: Vec<AmbientSpace> = (2..=4)
        .flat_map(|n| {
            [
                standard_structure(n).expect("n >= 2"),
                frame_structure(n, seed.wrapping_add(n as u64)).expect("n >= 2"),
            ]
        })
        .collect();
    Rule::ALL
        .iter()
        .map(|rule| {
            let (lhs, rhs) = rule.parsed();
            let mut worst: f64 = 0.0;
            for i in 0..samples {
                let s = &structures[i % structures.len()];
                let f = FormCoefficients::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                );
                let vars = random_assignment(s, &mut rng, &["A", "B", "Z"]);
                let l = super::evaluate(&lhs, s, &f, &vars).expect("rule slots bound");
                let r = super::evaluate(&rhs, s, &f, &vars).expect("rule slots bound");
                worst = worst.max((l - r).amax());
            }
            let (l, r) = rule.sides();
            RuleCheck {
                rule: rule.name().to_string(),
                lhs: l.to_string(),
                rhs: r.to_string(),
                samples,
                max_residual: worst,
                passed: worst <= abs_tol,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub expressions: usize,
    pub max_terms: usize,
    pub idempotence_failures: usize,
    /// Expressions whose normal form evaluates differently from the input.
    pub soundness_failures: usize,
    pub soundness_checked: usize,
    pub first_failure: Option<String>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.idempotence_failures == 0 && self.soundness_failures == 0
    }
}

/// Normalizes `count` random expressions, checking idempotence on all of
/// them and numeric agreement with the input on every `sound_every`-th.
pub fn fuzz_normalize(count: usize, max_terms: usize, seed: u64, sound_every: usize) -> FuzzReport {
    let mut rng = seeded_rng(seed);
    let s = frame_structure(3, seed).expect("n >= 2");
    let mut report = FuzzReport {
        expressions: count,
        max_terms,
        idempotence_failures: 0,
        soundness_failures: 0,
        soundness_checked: 0,
        first_failure: None,
    };
    for i in 0..count {
        let e = random_expr(&mut rng, max_terms);
        let once = normalize(&e);
        if normalize(&once) != once {
            report.idempotence_failures += 1;
            report.first_failure.get_or_insert_with(|| e.to_string());
        }
        if sound_every > 0 && i % sound_every == 0 {
            report.soundness_checked += 1;
            let f = FormCoefficients::new(0.7, -1.1, 0.3);
            let vars = random_assignment(&s, &mut rng, &SLOTS);
            let (a, sa) = e.evaluate_scaled(&s, &f, &vars).expect("slots bound");
            let (b, sb) = once.evaluate_scaled(&s, &f, &vars).expect("slots bound");
            if (a - b).norm() > 1e-10 * sa.max(sb).max(1.0) {
                report.soundness_failures += 1;
                report.first_failure.get_or_insert_with(|| e.to_string());
            }
        }
    }
    report
}
