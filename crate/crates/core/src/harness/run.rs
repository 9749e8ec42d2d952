use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::errata::{self, Erratum};
use crate::model::{
    frame_structure, standard_structure, validate_structure, ConnectionKind, FormCoefficients,
};
use crate::submanifold::{
    check_anti_invariant_components, check_normal_action, check_normality_rxyv,
    check_tangency_rxyz, make_anti_invariant_subspace, make_invariant_subspace,
    make_mixed_subspace, mixed_with_anti_invariant_normal, theorem_suite, witness_suite, SuiteId,
    SuiteParams, SuiteReport, Verdict, COEFF_EPS,
};
use crate::symbolic::{derive_and_compare, DerivationReport};
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// Absolute bound on structure identity residuals.
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub expected_failures: usize,
    pub errata: usize,
    pub inconclusive: usize,
}

impl Summary {
    fn count(&mut self, v: Verdict) {
        self.total += 1;
        match v {
            Verdict::Pass => self.passed += 1,
            Verdict::Fail => self.failed += 1,
            Verdict::Skipped => self.skipped += 1,
            Verdict::ExpectedFail => self.expected_failures += 1,
            Verdict::Erratum => self.errata += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    /// Seconds since the Unix epoch; excluded from determinism comparisons.
    pub generated_at: u64,
    pub config: RunConfig,
    pub suites: Vec<SuiteReport>,
    pub derivations: Vec<DerivationReport>,
    pub errata: Vec<Erratum>,
    pub notes: Vec<String>,
    pub summary: Summary,
}

impl Report {
    pub fn empty(config: RunConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            generated_at: 0,
            config,
            suites: Vec::new(),
            derivations: Vec::new(),
            errata: Vec::new(),
            notes: Vec::new(),
            summary: Summary::default(),
        }
    }

    /// Recomputes the summary and the list of referenced errata.
    pub fn finalize(&mut self) {
        let mut summary = Summary::default();
        for s in &self.suites {
            summary.count(s.verdict);
        }
        for d in &self.derivations {
            summary.count(d.verdict);
        }
        self.summary = summary;
        let used: Vec<&str> = self
            .suites
            .iter()
            .filter_map(|s| s.erratum.as_deref())
            .chain(self.derivations.iter().filter_map(|d| d.erratum.as_deref()))
            .collect();
        self.errata = errata::registry()
            .into_iter()
            .filter(|e| used.contains(&e.id.as_str()))
            .collect();
    }

    /// Process exit status: 0 when nothing failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed == 0 {
            0
        } else {
            1
        }
    }

    pub fn stamp(&mut self) {
        self.generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
    }
}

/// Which parts of the battery to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sections {
    pub structures: bool,
    pub submanifolds: bool,
    pub theorems: bool,
    pub derivations: bool,
}

impl Sections {
    pub const ALL: Sections = Sections {
        structures: true,
        submanifolds: true,
        theorems: true,
        derivations: true,
    };
}

fn structure_suites(cfg: &RunConfig) -> Vec<SuiteReport> {
    let mut out = Vec::new();
    for &n in &cfg.dims {
        let mut cases: Vec<(Option<u64>, _)> = vec![(None, standard_structure(n))];
        cases.extend(cfg.seeds.iter().map(|&seed| (Some(seed), frame_structure(n, seed))));
        for (seed, s) in cases {
            let s = s.expect("dims validated");
            let v = validate_structure(&s, STRUCTURE_TOL);
            let mut r = SuiteReport::new(
                SuiteId::StructureIdentities,
                ConnectionKind::LeviCivita,
                n,
                FormCoefficients::new(0.0, 0.0, 0.0),
            );
            r.seed = seed;
            r.max_residual = v.max_residual();
            r.max_ratio = v.max_residual() / STRUCTURE_TOL;
            r.verdict = if v.passed { Verdict::Pass } else { Verdict::Fail };
            if seed.is_none() {
                r.note = Some("standard structure".into());
            }
            out.push(r);
        }
    }
    out
}

/// Every submanifold suite for one connection, coefficient set, dimension and seed.
fn submanifold_suites(
    cfg: &RunConfig,
    kind: ConnectionKind,
    f: &FormCoefficients,
    n: usize,
    seed: u64,
) -> Result<Vec<SuiteReport>> {
    let s = Arc::new(frame_structure(n, seed)?);
    let p = SuiteParams {
        samples: cfg.samples,
        seed,
        tol: cfg.tolerance(),
    };
    let mut out = Vec::new();
    for k in 1..=n {
        let w = make_invariant_subspace(&s, k)?;
        out.push(check_tangency_rxyz(f, kind, &w, &p)?);
        if w.codim() > 0 {
            out.push(check_normality_rxyv(f, kind, &w, &p)?);
            out.push(check_normal_action(f, kind, &w, &p)?);
        }
    }
    for k in 1..=n {
        let w = make_anti_invariant_subspace(&s, k)?;
        out.push(check_tangency_rxyz(f, kind, &w, &p)?);
        out.push(check_anti_invariant_components(f, kind, &w, &p)?);
        out.push(check_normality_rxyv(f, kind, &w, &p)?);
    }
    let mixed = make_mixed_subspace(&s, seed)?;
    out.push(witness_suite(SuiteId::TangentWitness, f, kind, &mixed, cfg.budget, seed)?);
    out.push(witness_suite(SuiteId::NormalWitness, f, kind, &mixed, cfg.budget, seed)?);
    if kind == ConnectionKind::SemiSymMetric && f.diff13().abs() > COEFF_EPS {
        out.push(witness_suite(SuiteId::InvariantOnlyWitness, f, kind, &mixed, cfg.budget, seed)?);
        let anti = make_anti_invariant_subspace(&s, n)?;
        out.push(witness_suite(SuiteId::InvariantOnlyWitness, f, kind, &anti, cfg.budget, seed)?);
    }
    if n >= 3 {
        let w = mixed_with_anti_invariant_normal(&s)?;
        out.push(witness_suite(
            SuiteId::NormalWitnessCounterexample,
            f,
            kind,
            &w,
            cfg.budget,
            seed,
        )?);
    }
    Ok(out)
}

/// Runs the selected sections of the battery. Failures are recorded in the
/// report; the error path is reserved for construction failures.
pub fn run_sections(cfg: &RunConfig, sections: Sections) -> Result<Report> {
    let mut report = Report::empty(cfg.clone());
    if sections.structures {
        report.suites.extend(structure_suites(cfg));
    }
    let params = SuiteParams {
        samples: cfg.samples,
        seed: cfg.seeds[0],
        tol: cfg.tolerance(),
    };
    for &kind in &cfg.kinds {
        for f in &cfg.coefficient_sets {
            if sections.submanifolds {
                let jobs: Vec<(usize, u64)> = cfg
                    .dims
                    .iter()
                    .flat_map(|&n| cfg.seeds.iter().map(move |&s| (n, s)))
                    .collect();
                let results: Vec<Result<Vec<SuiteReport>>> = std::thread::scope(|scope| {
                    let handles: Vec<_> = jobs
                        .iter()
                        .map(|&(n, seed)| scope.spawn(move || submanifold_suites(cfg, kind, f, n, seed)))
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("suite worker panicked"))
                        .collect()
                });
                for r in results {
                    report.suites.extend(r?);
                }
            }
            if sections.theorems {
                report.suites.push(theorem_suite(
                    f,
                    kind,
                    &cfg.dims,
                    &cfg.seeds,
                    &params,
                    cfg.budget,
                )?);
            }
        }
    }
    if sections.derivations {
        for &kind in cfg.kinds.iter().filter(|k| **k != ConnectionKind::LeviCivita) {
            report.derivations.push(derive_and_compare(
                kind,
                cfg.cross_check_samples,
                cfg.seeds[0],
                cfg.tolerance(),
            )?);
        }
    }
    for s in &mut report.suites {
        errata::apply(s);
    }
    report.notes = notes();
    report.finalize();
    Ok(report)
}

pub fn run_all(cfg: &RunConfig) -> Result<Report> {
    run_sections(cfg, Sections::ALL)
}

fn notes() -> Vec<String> {
    vec![
        "f1, f2, f3 are constants; no derivative terms of the coefficient functions appear".into(),
        "Schouten-van Kampen converse hypothesis: 3 f2 + (f1 - f3)^2 != 0, the coefficient of g(Y, phi X) phi X in R(X,Y)X".into(),
        "witness expansions evaluate R(X,Y)X, so every third-slot occurrence is X".into(),
        "subspaces model one tangent space with xi tangent; n is the half-dimension of the ambient space".into(),
    ]
}
