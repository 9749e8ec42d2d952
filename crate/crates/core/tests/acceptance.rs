//! Acceptance battery: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::sync::Arc;

use gss_core::harness::{default_coefficient_sets, emit_report, run_all, OutputFormat, RunConfig};
use gss_core::model::{
    frame_structure, standard_structure, validate_structure, AmbientSpace, ConnectionKind, FormCoefficients,
    Tolerance,
};
use gss_core::submanifold::{
    check_anti_invariant_components, check_normal_action, check_normality_rxyv, check_tangency_rxyz,
    classify_subspace, converse_hypothesis, make_anti_invariant_subspace, make_invariant_subspace,
    make_mixed_subspace, normal_bundle_witness_search, witness_search, SubspaceClass, SuiteParams, SuiteReport,
    CLASS_THRESHOLD, DEFAULT_BUDGET, WITNESS_THRESHOLD,
};
use gss_core::symbolic::{derive_and_compare, fuzz_normalize, rule_soundness};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const DIMS: [usize; 3] = [2, 3, 4];
const SAMPLES: usize = 200;
const STRUCTURE_TOL: f64 = 1e-12;
const RULE_TOL: f64 = 1e-12;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Worst ratio and failure count over a family of suite reports.
#[derive(Default)]
struct Tally {
    suites: usize,
    failing: usize,
    worst: f64,
}

impl Tally {
    fn add(&mut self, r: &SuiteReport) {
        self.record(r.max_ratio);
    }

    fn record(&mut self, ratio: f64) {
        self.suites += 1;
        self.worst = self.worst.max(ratio);
        if ratio > 1.0 {
            self.failing += 1;
        }
    }

    fn ok(&self) -> bool {
        self.failing == 0 && self.suites > 0
    }

    fn summary(&self) -> String {
        format!(
            "{} suites, {} over threshold, worst residual/threshold {:.2e}",
            self.suites, self.failing, self.worst
        )
    }
}

fn params(seed: u64) -> SuiteParams {
    SuiteParams {
        samples: SAMPLES,
        seed,
        tol: Tolerance::DEFAULT,
    }
}

/// Frame structures for every (n, seed) in the battery.
fn spaces() -> Vec<(usize, u64, Arc<AmbientSpace>)> {
    DIMS.iter()
        .flat_map(|&n| SEEDS.iter().map(move |&seed| (n, seed, Arc::new(frame_structure(n, seed).unwrap()))))
        .collect()
}

fn battery() -> Vec<FormCoefficients> {
    default_coefficient_sets()
}

fn structure_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut failed = 0;
    for n in 2..=6 {
        let mut structures = vec![standard_structure(n).unwrap()];
        structures.extend((1..=10).map(|seed| frame_structure(n, seed).unwrap()));
        for s in &structures {
            let v = validate_structure(s, STRUCTURE_TOL);
            cases += 1;
            worst = worst.max(v.max_residual());
            if !v.passed {
                failed += 1;
            }
        }
    }
    Outcome::new(
        failed == 0,
        format!("{cases} structures, max residual {worst:.2e} (bound {STRUCTURE_TOL:.0e})"),
    )
}

fn invariant_tangency() -> Outcome {
    let mut t = Tally::default();
    for (n, seed, s) in spaces() {
        for k in 1..n {
            let w = make_invariant_subspace(&s, k).unwrap();
            for kind in ConnectionKind::ALL {
                for f in battery() {
                    t.add(&check_tangency_rxyz(&f, kind, &w, &params(seed)).unwrap());
                }
            }
        }
    }
    Outcome::new(t.ok(), t.summary())
}

fn semisym_metric_anti_invariant() -> Outcome {
    let kind = ConnectionKind::SemiSymMetric;
    let mut components = Tally::default();
    let mut tangency = Tally::default();
    for (n, seed, s) in spaces() {
        for k in 1..=n {
            let w = make_anti_invariant_subspace(&s, k).unwrap();
            for f in battery() {
                components.add(&check_anti_invariant_components(&f, kind, &w, &params(seed)).unwrap());
                if f.diff13().abs() <= 1e-12 {
                    tangency.add(&check_tangency_rxyz(&f, kind, &w, &params(seed)).unwrap());
                }
            }
        }
    }
    Outcome::new(
        components.ok() && tangency.ok(),
        format!(
            "components: {}; normal part with f1 = f3: {}",
            components.summary(),
            tangency.summary()
        ),
    )
}

fn other_anti_invariant() -> Outcome {
    let mut components = Tally::default();
    let mut tangency = Tally::default();
    for (n, seed, s) in spaces() {
        for k in 1..=n {
            let w = make_anti_invariant_subspace(&s, k).unwrap();
            for kind in [
                ConnectionKind::SemiSymNonMetric,
                ConnectionKind::SchoutenVanKampen,
                ConnectionKind::TanakaWebster,
            ] {
                for f in battery() {
                    components.add(&check_anti_invariant_components(&f, kind, &w, &params(seed)).unwrap());
                    tangency.add(&check_tangency_rxyz(&f, kind, &w, &params(seed)).unwrap());
                }
            }
        }
    }
    Outcome::new(
        components.ok() && tangency.ok(),
        format!("components: {}; normal part: {}", components.summary(), tangency.summary()),
    )
}

fn normality() -> Outcome {
    let mut invariant = Tally::default();
    let mut anti_whole = Tally::default();
    for (n, seed, s) in spaces() {
        for kind in ConnectionKind::MODIFIED {
            for f in battery() {
                for k in 1..n {
                    let w = make_invariant_subspace(&s, k).unwrap();
                    invariant.add(&check_normality_rxyv(&f, kind, &w, &params(seed)).unwrap());
                }
                for k in 1..=n {
                    let w = make_anti_invariant_subspace(&s, k).unwrap();
                    anti_whole.add(&check_normality_rxyv(&f, kind, &w, &params(seed)).unwrap());
                }
            }
        }
    }
    Outcome::new(
        invariant.ok() && anti_whole.ok(),
        format!(
            "invariant tan(R(X,Y)V): {}; anti-invariant R(X,Y)V: {}",
            invariant.summary(),
            anti_whole.summary()
        ),
    )
}

fn normal_action() -> Outcome {
    let mut t = Tally::default();
    for (n, seed, s) in spaces() {
        for k in 1..n {
            let w = make_invariant_subspace(&s, k).unwrap();
            for kind in ConnectionKind::ALL {
                for f in battery() {
                    t.add(&check_normal_action(&f, kind, &w, &params(seed)).unwrap());
                }
            }
        }
    }
    Outcome::new(t.ok(), t.summary())
}

fn converse_witnesses() -> Outcome {
    let mut cases = 0;
    let mut missing = Vec::new();
    let mut weakest = f64::INFINITY;
    for (n, seed, s) in spaces() {
        let w = make_mixed_subspace(&s, seed).unwrap();
        assert_eq!(classify_subspace(&w, CLASS_THRESHOLD), SubspaceClass::Mixed);
        for kind in ConnectionKind::ALL {
            for f in battery() {
                if converse_hypothesis(kind, &f).margin < 0.1 {
                    continue;
                }
                let tangent = witness_search(&f, kind, &w, DEFAULT_BUDGET, seed).unwrap();
                let normal = normal_bundle_witness_search(&f, kind, &w, DEFAULT_BUDGET, seed).unwrap();
                cases += 1;
                weakest = weakest.min(tangent.magnitude.min(normal.magnitude));
                let ok = tangent.found
                    && normal.found
                    && tangent.magnitude >= WITNESS_THRESHOLD
                    && normal.magnitude >= WITNESS_THRESHOLD
                    && tangent.trials.max(normal.trials) <= DEFAULT_BUDGET + 1;
                if !ok {
                    missing.push(format!("{kind} n={n} seed={seed} f={f}"));
                }
            }
        }
    }
    let detail = format!(
        "{cases} (subspace, kind, coefficients) cases, weakest witness {weakest:.2e}, {} without witness{}",
        missing.len(),
        if missing.is_empty() {
            String::new()
        } else {
            format!(": {}", missing.join(", "))
        }
    );
    Outcome::new(missing.is_empty() && cases > 0, detail)
}

fn derivations() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in ConnectionKind::MODIFIED {
        let r = derive_and_compare(kind, 1000, 1, Tolerance::DEFAULT).unwrap();
        let ok = r.cross_check_passed && (r.equal || (r.residual_confirmed == Some(true) && r.erratum.is_some()));
        pass &= ok;
        parts.push(format!(
            "{kind}: equal={}, worst ratio {:.2e}",
            r.equal, r.max_ratio
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn rewrite_system() -> Outcome {
    let rules = rule_soundness(100, 1, RULE_TOL);
    let worst = rules.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let unsound: Vec<&str> = rules.iter().filter(|r| !r.passed).map(|r| r.rule.as_str()).collect();
    let fuzz = fuzz_normalize(10_000, 50, 1, 10);
    Outcome::new(
        unsound.is_empty() && fuzz.passed(),
        format!(
            "{} rules, worst residual {worst:.2e}, unsound {:?}; {} fuzzed expressions, {} not idempotent, {} unsound of {} checked",
            rules.len(),
            unsound,
            fuzz.expressions,
            fuzz.idempotence_failures,
            fuzz.soundness_failures,
            fuzz.soundness_checked
        ),
    )
}

fn determinism() -> Outcome {
    let cfg = RunConfig::default();
    let a = emit_report(&run_all(&cfg).unwrap(), OutputFormat::Json);
    let b = emit_report(&run_all(&cfg).unwrap(), OutputFormat::Json);
    Outcome::new(
        a == b,
        format!("two default runs, {} bytes each, identical: {}", a.len(), a == b),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("structure identities", structure_identities),
        ("invariant tangency", invariant_tangency),
        ("semisymmetric metric anti-invariant components", semisym_metric_anti_invariant),
        ("anti-invariant tangency for the remaining connections", other_anti_invariant),
        ("normality", normality),
        ("normal curvature on invariant subspaces", normal_action),
        ("converse witnesses on mixed subspaces", converse_witnesses),
        ("symbolic derivations", derivations),
        ("rewrite-system soundness", rewrite_system),
        ("determinism", determinism),
    ];
    let outcomes: Vec<Outcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria.iter().map(|(_, f)| scope.spawn(f)).collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut failed = 0;
    for (i, ((title, _), o)) in criteria.iter().zip(&outcomes).enumerate() {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {title}: {}", i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
