//! Randomized checks of the tangency, normality and closed-form statements for
//! submanifolds, and the constructive witness searches behind the converse
//! statements.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{classify_subspace, Subspace, SubspaceClass, CLASS_THRESHOLD};
use crate::error::{Error, Result};
use crate::model::{
    curvature_scaled, frame_structure, seeded_rng, AmbientSpace, ConnectionKind,
    FormCoefficients, TermSum, Tolerance, Vector,
};

/// Coefficient differences at or below this count as equal (`f1 = f3`, `f2 = 0`).
pub const COEFF_EPS: f64 = 1e-12;

/// Smallest component magnitude (unit inputs) accepted as a witness.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

pub const DEFAULT_BUDGET: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The claim is not made for this configuration and the check fails, as
    /// it should.
    ExpectedFail,
    /// Hypothesis of the claim does not hold; nothing was asserted.
    Skipped,
    /// Failure matched and confirmed against a registered erratum.
    Erratum,
    /// Reported without asserting.
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::ExpectedFail => "FAIL-as-expected",
            Verdict::Skipped => "SKIPPED",
            Verdict::Erratum => "ERRATUM",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    pub fn is_failure(self) -> bool {
        self == Verdict::Fail
    }

    fn severity(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Inconclusive => 1,
            Verdict::ExpectedFail => 2,
            Verdict::Skipped => 3,
            Verdict::Erratum => 4,
            Verdict::Fail => 5,
        }
    }

    /// Worst of two verdicts.
    pub fn merge(self, other: Verdict) -> Verdict {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteId {
    StructureIdentities,
    /// `R(X,Y)Z` tangent for `X, Y, Z` in `W`.
    Tangency,
    /// Tangential/normal parts of `R(X,Y)Z` on anti-invariant `W` against closed forms.
    AntiInvariantComponents,
    /// `R(X,Y)V` normal for `V` normal (and zero on anti-invariant `W`).
    Normality,
    /// `R(U,V)X` on invariant `W` against its closed form.
    NormalAction,
    /// Converse through `nor(R(X,Y)X)`.
    TangentWitness,
    /// Converse through `tan(R(U,V)U)`.
    NormalWitness,
    /// Semisymmetric metric connection with `f1 != f3`: only invariant `W` stays closed.
    InvariantOnlyWitness,
    /// Mixed `W` with an anti-invariant normal space.
    NormalWitnessCounterexample,
    /// Both directions of the characterization, aggregated.
    Theorem,
    SymbolicDerivation,
}

impl SuiteId {
    pub fn title(self, class: Option<SubspaceClass>) -> String {
        let prefix = class.map(|c| format!("{} ", c.name())).unwrap_or_default();
        match self {
            SuiteId::StructureIdentities => "structure identities".into(),
            SuiteId::Tangency => format!("{prefix}tangency"),
            SuiteId::AntiInvariantComponents => "anti-invariant components".into(),
            SuiteId::Normality => format!("{prefix}normality"),
            SuiteId::NormalAction => "normal action on invariant".into(),
            SuiteId::TangentWitness => "tangent-bundle converse witness".into(),
            SuiteId::NormalWitness => "normal-bundle converse witness".into(),
            SuiteId::InvariantOnlyWitness => "invariant-only witness (f1 != f3)".into(),
            SuiteId::NormalWitnessCounterexample => {
                "normal-bundle converse, anti-invariant normal space".into()
            }
            SuiteId::Theorem => "characterization (both directions)".into(),
            SuiteId::SymbolicDerivation => "curvature derivation".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub found: bool,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Norm of the off-subspace component of the curvature value (unit inputs).
    pub magnitude: f64,
    pub trials: usize,
    pub guided: bool,
}

impl WitnessReport {
    fn empty() -> Self {
        WitnessReport {
            found: false,
            x: Vec::new(),
            y: Vec::new(),
            magnitude: 0.0,
            trials: 0,
            guided: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteId,
    pub kind: ConnectionKind,
    pub n: usize,
    pub seed: Option<u64>,
    pub coefficients: FormCoefficients,
    pub subspace: Option<SubspaceClass>,
    pub samples: usize,
    pub max_residual: f64,
    /// Largest residual divided by its pass threshold.
    pub max_ratio: f64,
    pub secondary_residual: Option<f64>,
    pub verdict: Verdict,
    pub witness: Option<WitnessReport>,
    pub note: Option<String>,
    pub erratum: Option<String>,
}

impl SuiteReport {
    pub fn new(
        suite: SuiteId,
        kind: ConnectionKind,
        n: usize,
        coefficients: FormCoefficients,
    ) -> Self {
        SuiteReport {
            suite,
            kind,
            n,
            seed: None,
            coefficients,
            subspace: None,
            samples: 0,
            max_residual: 0.0,
            max_ratio: 0.0,
            secondary_residual: None,
            verdict: Verdict::Pass,
            witness: None,
            note: None,
            erratum: None,
        }
    }

    pub fn title(&self) -> String {
        self.suite.title(self.subspace)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Sampling controls shared by the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteParams {
    pub samples: usize,
    pub seed: u64,
    pub tol: Tolerance,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            samples: 200,
            seed: 0,
            tol: Tolerance::DEFAULT,
        }
    }
}

#[derive(Default)]
struct Residuals {
    max: f64,
    ratio: f64,
}

impl Residuals {
    fn record(&mut self, residual: f64, threshold: f64) {
        self.max = self.max.max(residual);
        self.ratio = self.ratio.max(residual / threshold);
    }

    fn ok(&self) -> bool {
        self.ratio <= 1.0
    }
}

fn non_mixed(w: &Subspace) -> Result<SubspaceClass> {
    match classify_subspace(w, CLASS_THRESHOLD) {
        SubspaceClass::Mixed => Err(Error::MixedSubspace),
        c => Ok(c),
    }
}

fn require_class(w: &Subspace, expected: SubspaceClass) -> Result<()> {
    let found = classify_subspace(w, CLASS_THRESHOLD);
    if found == expected {
        Ok(())
    } else {
        Err(Error::WrongSubspaceClass {
            expected: expected.name(),
            found: found.name(),
        })
    }
}

/// Whether `R(X,Y)Z` is claimed tangent for `X, Y, Z` in a subspace of the given class.
pub fn tangency_asserted(kind: ConnectionKind, class: SubspaceClass, f: &FormCoefficients) -> bool {
    match (class, kind) {
        (SubspaceClass::Mixed, _) => false,
        (SubspaceClass::Invariant, _) => true,
        (SubspaceClass::AntiInvariant, ConnectionKind::SemiSymMetric) => f.diff13().abs() <= COEFF_EPS,
        (SubspaceClass::AntiInvariant, _) => true,
    }
}

fn base_report(
    suite: SuiteId,
    kind: ConnectionKind,
    w: &Subspace,
    f: &FormCoefficients,
    params: &SuiteParams,
) -> SuiteReport {
    let mut r = SuiteReport::new(suite, kind, w.ambient().n(), *f);
    r.seed = Some(params.seed);
    r.samples = params.samples;
    r
}

/// Samples `X, Y, Z` in `W` and measures `nor(R(X,Y)Z)`.
pub fn check_tangency_rxyz(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    params: &SuiteParams,
) -> Result<SuiteReport> {
    let class = non_mixed(w)?;
    let s = w.ambient().as_ref();
    let mut rng = seeded_rng(params.seed);
    let mut res = Residuals::default();
    for _ in 0..params.samples {
        let (x, y, z) = (
            w.random_tangent(&mut rng),
            w.random_tangent(&mut rng),
            w.random_tangent(&mut rng),
        );
        let (r, scale) = curvature_scaled(s, f, kind, &x, &y, &z)?;
        res.record(s.norm(&w.normal(&r)), params.tol.threshold(scale));
    }
    let mut report = base_report(SuiteId::Tangency, kind, w, f, params);
    report.subspace = Some(class);
    report.max_residual = res.max;
    report.max_ratio = res.ratio;
    report.verdict = if res.ok() {
        Verdict::Pass
    } else if tangency_asserted(kind, class, f) {
        Verdict::Fail
    } else {
        report.note = Some("tangency is not claimed when f1 != f3 on anti-invariant subspaces".into());
        Verdict::ExpectedFail
    };
    Ok(report)
}

/// Closed forms of `tan(R(X,Y)Z)` and `nor(R(X,Y)Z)` on an anti-invariant `W`.
pub fn anti_invariant_closed_forms(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) -> Result<(Vector, Vector)> {
    require_class(w, SubspaceClass::AntiInvariant)?;
    for v in [x, y, z] {
        w.require_tangent(v)?;
    }
    Ok(anti_invariant_forms_unchecked(w.ambient(), f, kind, x, y, z).0)
}

fn anti_invariant_forms_unchecked(
    s: &AmbientSpace,
    f: &FormCoefficients,
    kind: ConnectionKind,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) -> ((Vector, Vector), f64) {
    let b = f.diff13();
    let (c1, c3) = match kind {
        ConnectionKind::SemiSymMetric => (f.f1 - 1.0, f.f3 - 1.0),
        ConnectionKind::SchoutenVanKampen | ConnectionKind::TanakaWebster => (f.f1, f.f3 + b * b),
        ConnectionKind::LeviCivita | ConnectionKind::SemiSymNonMetric => (f.f1, f.f3),
    };
    let xi = s.xi();
    let (ex, ey, ez) = (s.eta(x), s.eta(y), s.eta(z));
    let mut tan = TermSum::new(s);
    tan.add(c1 * s.g(y, z), x);
    tan.add(-c1 * s.g(x, z), y);
    tan.add(c3 * ex * ez, y);
    tan.add(-c3 * ey * ez, x);
    tan.add(c3 * s.g(x, z) * ey, xi);
    tan.add(-c3 * s.g(y, z) * ex, xi);
    if kind == ConnectionKind::SemiSymNonMetric {
        tan.add(ey * ez, x);
        tan.add(-ex * ez, y);
    }
    let mut nor = TermSum::new(s);
    if kind == ConnectionKind::SemiSymMetric {
        nor.add(b * s.g(y, z), &s.phi(x));
        nor.add(-b * s.g(x, z), &s.phi(y));
    }
    let (t, ts) = tan.finish();
    let (n, ns) = nor.finish();
    ((t, n), ts.max(ns))
}

/// Compares the split of `R(X,Y)Z` on anti-invariant `W` with the closed forms.
pub fn check_anti_invariant_components(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    params: &SuiteParams,
) -> Result<SuiteReport> {
    require_class(w, SubspaceClass::AntiInvariant)?;
    let s = w.ambient().as_ref();
    let mut rng = seeded_rng(params.seed);
    let mut res = Residuals::default();
    for _ in 0..params.samples {
        let (x, y, z) = (
            w.random_tangent(&mut rng),
            w.random_tangent(&mut rng),
            w.random_tangent(&mut rng),
        );
        let (r, scale) = curvature_scaled(s, f, kind, &x, &y, &z)?;
        let (tan, nor) = w.split(&r);
        let ((tf, nf), fscale) = anti_invariant_forms_unchecked(s, f, kind, &x, &y, &z);
        let residual = s.norm(&(tan - tf)).max(s.norm(&(nor - nf)));
        res.record(residual, params.tol.threshold(scale.max(fscale)));
    }
    let mut report = base_report(SuiteId::AntiInvariantComponents, kind, w, f, params);
    report.subspace = Some(SubspaceClass::AntiInvariant);
    report.max_residual = res.max;
    report.max_ratio = res.ratio;
    report.verdict = if res.ok() { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// Samples `X, Y` in `W`, `V` normal, and checks that `R(X,Y)V` is normal; on
/// anti-invariant `W` also that it vanishes (`secondary_residual`).
pub fn check_normality_rxyv(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    params: &SuiteParams,
) -> Result<SuiteReport> {
    let class = non_mixed(w)?;
    let s = w.ambient().as_ref();
    let mut report = base_report(SuiteId::Normality, kind, w, f, params);
    report.subspace = Some(class);
    if w.codim() == 0 {
        report.samples = 0;
        report.note = Some("no normal directions".into());
        return Ok(report);
    }
    let anti = class == SubspaceClass::AntiInvariant;
    let mut rng = seeded_rng(params.seed);
    let mut tangential = Residuals::default();
    let mut whole = Residuals::default();
    for _ in 0..params.samples {
        let x = w.random_tangent(&mut rng);
        let y = w.random_tangent(&mut rng);
        let v = w.random_normal(&mut rng).expect("codim > 0");
        let (r, scale) = curvature_scaled(s, f, kind, &x, &y, &v)?;
        let thr = params.tol.threshold(scale);
        tangential.record(s.norm(&w.tangential(&r)), thr);
        if anti {
            whole.record(s.norm(&r), thr);
        }
    }
    report.max_residual = tangential.max;
    report.max_ratio = tangential.ratio;
    if anti {
        report.secondary_residual = Some(whole.max);
        report.max_ratio = report.max_ratio.max(whole.ratio);
    }
    let mut problems = Vec::new();
    if !tangential.ok() {
        problems.push("tangential component of R(X,Y)V is nonzero");
    }
    if anti && !whole.ok() {
        problems.push("R(X,Y)V does not vanish");
    }
    if !problems.is_empty() {
        report.verdict = Verdict::Fail;
        report.note = Some(problems.join("; "));
    }
    Ok(report)
}

/// Coefficient `c` in `R(U,V)X = c g(U, phi V) phi X` on invariant `W`.
pub fn normal_action_coefficient(kind: ConnectionKind, f: &FormCoefficients) -> f64 {
    match kind {
        ConnectionKind::TanakaWebster => 2.0 * f.f2 + 2.0 * f.diff13(),
        _ => 2.0 * f.f2,
    }
}

/// `R(U,V)X` for `U, V` normal and `X` tangent to an invariant `W`, paired
/// with its closed form `c g(U, phi V) phi X`.
pub fn normal_curvature_on_tangent(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    u: &Vector,
    v: &Vector,
    x: &Vector,
) -> Result<(Vector, Vector)> {
    require_class(w, SubspaceClass::Invariant)?;
    w.require_normal(u)?;
    w.require_normal(v)?;
    w.require_tangent(x)?;
    let s = w.ambient().as_ref();
    let value = curvature_scaled(s, f, kind, u, v, x)?.0;
    let closed = s.phi(x) * (normal_action_coefficient(kind, f) * s.g(u, &s.phi(v)));
    Ok((value, closed))
}

pub fn check_normal_action(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    params: &SuiteParams,
) -> Result<SuiteReport> {
    require_class(w, SubspaceClass::Invariant)?;
    let s = w.ambient().as_ref();
    let mut report = base_report(SuiteId::NormalAction, kind, w, f, params);
    report.subspace = Some(SubspaceClass::Invariant);
    if w.codim() == 0 {
        report.samples = 0;
        report.note = Some("no normal directions".into());
        return Ok(report);
    }
    let coeff = normal_action_coefficient(kind, f);
    let mut rng = seeded_rng(params.seed);
    let mut res = Residuals::default();
    for _ in 0..params.samples {
        let u = w.random_normal(&mut rng).expect("codim > 0");
        let v = w.random_normal(&mut rng).expect("codim > 0");
        let x = w.random_tangent(&mut rng);
        let (value, scale) = curvature_scaled(s, f, kind, &u, &v, &x)?;
        let closed = s.phi(&x) * (coeff * s.g(&u, &s.phi(&v)));
        let residual = s.norm(&(&value - &closed)).max(s.norm(&w.normal(&value)));
        res.record(residual, params.tol.threshold(scale.max(s.norm(&closed))));
    }
    report.max_residual = res.max;
    report.max_ratio = res.ratio;
    report.verdict = if res.ok() { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// Hypothesis of a converse statement, with its distance from failing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    pub holds: bool,
    pub margin: f64,
    pub condition: &'static str,
}

/// Coefficient of `g(Y, phi X) phi X` (up to sign) in `R(X,Y)X`.
pub fn witness_coefficient(kind: ConnectionKind, f: &FormCoefficients) -> f64 {
    let b = f.diff13();
    match kind {
        ConnectionKind::LeviCivita
        | ConnectionKind::SemiSymMetric
        | ConnectionKind::SemiSymNonMetric => 3.0 * f.f2,
        ConnectionKind::SchoutenVanKampen => 3.0 * f.f2 + b * b,
        ConnectionKind::TanakaWebster => 3.0 * f.f2 + 2.0 * b + b * b,
    }
}

/// Coefficient hypothesis under which closure of `TM` (or of the normal
/// bundle) forces invariant or anti-invariant.
pub fn converse_hypothesis(kind: ConnectionKind, f: &FormCoefficients) -> Hypothesis {
    let c = witness_coefficient(kind, f).abs();
    let (margin, condition) = match kind {
        ConnectionKind::LeviCivita | ConnectionKind::SemiSymNonMetric => (c, "f2 != 0"),
        ConnectionKind::SemiSymMetric => {
            if f.diff13().abs() <= COEFF_EPS {
                (c, "f2 != 0 and f1 = f3")
            } else {
                (0.0, "f2 != 0 and f1 = f3")
            }
        }
        ConnectionKind::SchoutenVanKampen => (c, "3 f2 + (f1 - f3)^2 != 0"),
        ConnectionKind::TanakaWebster => (c, "3 f2 + 2 (f1 - f3) + (f1 - f3)^2 != 0"),
    };
    Hypothesis {
        holds: margin > COEFF_EPS,
        margin,
        condition,
    }
}

/// Among the given basis vectors and their normalized pairwise sums and
/// differences, the one whose `phi` image is most evenly split between `W`
/// and its complement.
fn mixed_generator(w: &Subspace, basis: &[Vector]) -> Option<Vector> {
    let s = w.ambient().as_ref();
    let mut candidates: Vec<Vector> = basis.to_vec();
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            for sign in [1.0, -1.0] {
                let c = &basis[i] + &basis[j] * sign;
                let r = s.norm(&c);
                if r > 0.0 {
                    candidates.push(c / r);
                }
            }
        }
    }
    let score = |x: &Vector| {
        let (t, f) = w.split(&s.phi(x));
        s.norm(&t).min(s.norm(&f))
    };
    candidates
        .into_iter()
        .map(|c| (score(&c), c))
        .filter(|(sc, _)| *sc > 0.0)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

fn unit(s: &AmbientSpace, v: Vector) -> Option<Vector> {
    let r = s.norm(&v);
    (r > 1e-12).then(|| v / r)
}

enum Bundle {
    Tangent,
    Normal,
}

fn search(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    budget: usize,
    seed: u64,
    bundle: Bundle,
) -> Result<WitnessReport> {
    let s = w.ambient().as_ref();
    let basis: Vec<Vector> = match bundle {
        Bundle::Tangent => w.horizontal_basis().to_vec(),
        Bundle::Normal => w.normal_basis(),
    };
    let mut best = WitnessReport::empty();
    if basis.is_empty() {
        return Ok(best);
    }
    // off-bundle part of R(a,b)a
    let measure = |a: &Vector, b: &Vector| -> Result<f64> {
        let r = curvature_scaled(s, f, kind, a, b, a)?.0;
        Ok(match bundle {
            Bundle::Tangent => s.norm(&w.normal(&r)),
            Bundle::Normal => s.norm(&w.tangential(&r)),
        })
    };
    let in_bundle = |v: &Vector| match bundle {
        Bundle::Tangent => w.tangential(v),
        Bundle::Normal => w.normal(v),
    };
    let consider = |a: Vector, b: Vector, guided: bool, best: &mut WitnessReport| -> Result<bool> {
        let m = measure(&a, &b)?;
        best.trials += 1;
        if m > best.magnitude {
            best.magnitude = m;
            best.x = a.iter().copied().collect();
            best.y = b.iter().copied().collect();
            best.guided = guided;
        }
        best.found = best.magnitude >= WITNESS_THRESHOLD;
        Ok(best.found)
    };

    if let Some(a) = mixed_generator(w, &basis) {
        if let Some(b) = unit(s, in_bundle(&s.phi(&a))) {
            if consider(a, b, true, &mut best)? {
                return Ok(best);
            }
        }
    }
    let mut rng = seeded_rng(seed);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Option<Vector> {
        let v = match bundle {
            Bundle::Tangent => w.random_tangent(rng),
            Bundle::Normal => w.random_normal(rng)?,
        };
        unit(s, v)
    };
    for _ in 0..budget {
        let (Some(a), Some(b)) = (draw(&mut rng), draw(&mut rng)) else {
            continue;
        };
        if consider(a, b, false, &mut best)? {
            break;
        }
    }
    Ok(best)
}

/// Looks for unit `X, Y` in `W` with `nor(R(X,Y)X) != 0`: first the pair
/// `X` = mixed generator, `Y = TX / |TX|`, then `budget` random pairs.
pub fn witness_search(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    budget: usize,
    seed: u64,
) -> Result<WitnessReport> {
    search(f, kind, w, budget, seed, Bundle::Tangent)
}

/// Looks for unit normal `U, V` with `tan(R(U,V)U) != 0`.
pub fn normal_bundle_witness_search(
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    budget: usize,
    seed: u64,
) -> Result<WitnessReport> {
    search(f, kind, w, budget, seed, Bundle::Normal)
}

/// Wraps a witness search into a suite record, gated on the hypothesis.
pub fn witness_suite(
    suite: SuiteId,
    f: &FormCoefficients,
    kind: ConnectionKind,
    w: &Subspace,
    budget: usize,
    seed: u64,
) -> Result<SuiteReport> {
    let class = classify_subspace(w, CLASS_THRESHOLD);
    let mut report = SuiteReport::new(suite, kind, w.ambient().n(), *f);
    report.seed = Some(seed);
    report.subspace = Some(class);
    let hyp = converse_hypothesis(kind, f);
    let expect_found = match suite {
        SuiteId::InvariantOnlyWitness => {
            kind == ConnectionKind::SemiSymMetric
                && f.diff13().abs() > COEFF_EPS
                && class != SubspaceClass::Invariant
        }
        _ => hyp.holds && class == SubspaceClass::Mixed,
    };
    if suite != SuiteId::InvariantOnlyWitness && !hyp.holds {
        report.verdict = Verdict::Skipped;
        report.note = Some(format!("hypothesis {} fails", hyp.condition));
        return Ok(report);
    }
    let witness = match suite {
        SuiteId::NormalWitness | SuiteId::NormalWitnessCounterexample => {
            normal_bundle_witness_search(f, kind, w, budget, seed)?
        }
        _ => witness_search(f, kind, w, budget, seed)?,
    };
    report.samples = witness.trials;
    report.max_residual = witness.magnitude;
    report.verdict = match (suite, expect_found, witness.found) {
        (SuiteId::InvariantOnlyWitness, _, true) => Verdict::Pass,
        (SuiteId::InvariantOnlyWitness, _, false) => Verdict::Inconclusive,
        (_, true, true) | (_, false, false) => Verdict::Pass,
        (_, true, false) | (_, false, true) => Verdict::Fail,
    };
    report.witness = Some(witness);
    Ok(report)
}

/// Both directions of the characterization for one connection across
/// dimensions and seeds: invariant and anti-invariant subspaces stay closed
/// under `R(X,Y)`, and, when the hypothesis holds, mixed subspaces produce a
/// witness.
pub fn theorem_suite(
    f: &FormCoefficients,
    kind: ConnectionKind,
    dims: &[usize],
    seeds: &[u64],
    params: &SuiteParams,
    budget: usize,
) -> Result<SuiteReport> {
    let hyp = converse_hypothesis(kind, f);
    let mut report = SuiteReport::new(
        SuiteId::Theorem,
        kind,
        dims.iter().copied().max().unwrap_or(0),
        *f,
    );
    let mut forward = Verdict::Pass;
    let mut converse = if hyp.holds { Verdict::Pass } else { Verdict::Skipped };
    let mut weakest: Option<WitnessReport> = None;
    for &n in dims {
        for &seed in seeds {
            let s = Arc::new(frame_structure(n, seed)?);
            let p = SuiteParams { seed, ..*params };
            for k in 1..=n {
                for w in [
                    super::make_invariant_subspace(&s, k)?,
                    super::make_anti_invariant_subspace(&s, k)?,
                ] {
                    let r = check_tangency_rxyz(f, kind, &w, &p)?;
                    report.samples += r.samples;
                    report.max_residual = report.max_residual.max(r.max_residual);
                    if r.verdict != Verdict::ExpectedFail {
                        report.max_ratio = report.max_ratio.max(r.max_ratio);
                    }
                    forward = forward.merge(r.verdict);
                }
            }
            if hyp.holds {
                let w = super::make_mixed_subspace(&s, seed)?;
                let wit = witness_search(f, kind, &w, budget, seed)?;
                if !wit.found {
                    converse = Verdict::Fail;
                }
                if weakest.as_ref().is_none_or(|b| wit.magnitude < b.magnitude) {
                    weakest = Some(wit);
                }
            }
        }
    }
    report.witness = weakest;
    report.verdict = match (forward, converse) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (_, Verdict::Skipped) => Verdict::Skipped,
        _ => Verdict::Pass,
    };
    let mut notes = Vec::new();
    if !hyp.holds {
        notes.push(format!("converse skipped: hypothesis {} fails", hyp.condition));
    }
    if forward == Verdict::ExpectedFail {
        notes.push("anti-invariant tangency not claimed (f1 != f3)".to_string());
    }
    if !notes.is_empty() {
        report.note = Some(notes.join("; "));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::standard_structure;
    use crate::submanifold::{
        make_anti_invariant_subspace, make_invariant_subspace, make_mixed_subspace,
        mixed_with_anti_invariant_normal, slant_subspace,
    };
    use std::f64::consts::PI;

    fn params() -> SuiteParams {
        SuiteParams {
            samples: 50,
            seed: 7,
            tol: Tolerance::DEFAULT,
        }
    }

    fn space(n: usize, seed: u64) -> Arc<AmbientSpace> {
        Arc::new(frame_structure(n, seed).unwrap())
    }

    const GENERIC: FormCoefficients = FormCoefficients {
        f1: 1.0,
        f2: 0.5,
        f3: 0.25,
    };
    const EQUAL13: FormCoefficients = FormCoefficients {
        f1: 1.0,
        f2: 0.5,
        f3: 1.0,
    };

    #[test]
    fn invariant_tangency_for_every_kind() {
        let s = space(3, 2);
        let w = make_invariant_subspace(&s, 2).unwrap();
        for kind in ConnectionKind::ALL {
            let r = check_tangency_rxyz(&GENERIC, kind, &w, &params()).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{kind}: {r:?}");
        }
    }

    #[test]
    fn semisym_metric_anti_invariant_gate() {
        let s = space(2, 4);
        let w = make_anti_invariant_subspace(&s, 2).unwrap();
        let r = check_tangency_rxyz(&GENERIC, ConnectionKind::SemiSymMetric, &w, &params()).unwrap();
        assert_eq!(r.verdict, Verdict::ExpectedFail);
        assert!(r.max_residual > 1e-3);
        let r = check_tangency_rxyz(&EQUAL13, ConnectionKind::SemiSymMetric, &w, &params()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn mixed_subspace_is_rejected_by_closed_checks() {
        let s = space(2, 4);
        let w = make_mixed_subspace(&s, 1).unwrap();
        assert_eq!(
            check_tangency_rxyz(&GENERIC, ConnectionKind::LeviCivita, &w, &params()).unwrap_err(),
            Error::MixedSubspace
        );
        assert!(check_normality_rxyv(&GENERIC, ConnectionKind::LeviCivita, &w, &params()).is_err());
    }

    #[test]
    fn semisym_metric_normal_part_example() {
        // X = Z unit, Y unit orthogonal, all horizontal: nor = -(f1 - f3) phi Y
        let s = Arc::new(standard_structure(2).unwrap());
        let w = make_anti_invariant_subspace(&s, 2).unwrap();
        let x = s.basis_vector(0);
        let y = s.basis_vector(2);
        let (_, nor) =
            anti_invariant_closed_forms(&GENERIC, ConnectionKind::SemiSymMetric, &w, &x, &y, &x)
                .unwrap();
        assert!((nor + s.phi(&y) * GENERIC.diff13()).norm() < 1e-15);
        let (_, nor) =
            anti_invariant_closed_forms(&EQUAL13, ConnectionKind::SemiSymMetric, &w, &x, &y, &x)
                .unwrap();
        assert_eq!(nor.norm(), 0.0);
        let (_, nor) =
            anti_invariant_closed_forms(&GENERIC, ConnectionKind::SchoutenVanKampen, &w, &x, &y, &x)
                .unwrap();
        assert_eq!(nor.norm(), 0.0);
        let inv = make_invariant_subspace(&s, 1).unwrap();
        assert!(anti_invariant_closed_forms(&GENERIC, ConnectionKind::SemiSymMetric, &inv, &x, &x, &x).is_err());
    }

    #[test]
    fn anti_invariant_components_match() {
        let s = space(3, 8);
        for k in 1..=3 {
            let w = make_anti_invariant_subspace(&s, k).unwrap();
            for kind in ConnectionKind::ALL {
                let r = check_anti_invariant_components(&GENERIC, kind, &w, &params()).unwrap();
                assert_eq!(r.verdict, Verdict::Pass, "{kind} k={k}: {r:?}");
            }
        }
    }

    #[test]
    fn normality_on_invariant_and_whole_space() {
        let s = space(3, 1);
        let w = make_invariant_subspace(&s, 1).unwrap();
        for kind in ConnectionKind::ALL {
            let r = check_normality_rxyv(&GENERIC, kind, &w, &params()).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{kind}");
        }
        let whole = make_invariant_subspace(&s, 3).unwrap();
        let r = check_normality_rxyv(&GENERIC, ConnectionKind::TanakaWebster, &whole, &params()).unwrap();
        assert_eq!((r.verdict, r.samples), (Verdict::Pass, 0));
    }

    #[test]
    fn anti_invariant_normal_action_does_not_vanish() {
        // R(X,Y)V picks up f2 [g(X, phi V) phi Y - g(Y, phi V) phi X]
        let s = space(2, 3);
        let w = make_anti_invariant_subspace(&s, 2).unwrap();
        let r = check_normality_rxyv(&EQUAL13, ConnectionKind::SchoutenVanKampen, &w, &params()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.max_ratio > 1e3);
        assert!(r.max_residual < 1e-12, "still normal: {r:?}");
        assert!(r.secondary_residual.unwrap() > 1e-3);

        // a single horizontal direction kills the bracket for the Schouten-van Kampen form
        let w1 = make_anti_invariant_subspace(&s, 1).unwrap();
        let r = check_normality_rxyv(&GENERIC, ConnectionKind::SchoutenVanKampen, &w1, &params()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);

        // semisymmetric kinds lose normality when f1 != f3
        let r = check_normality_rxyv(&GENERIC, ConnectionKind::SemiSymNonMetric, &w1, &params()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.max_residual > 1e-3);
    }

    #[test]
    fn normal_action_closed_forms() {
        let s = space(3, 6);
        let w = make_invariant_subspace(&s, 1).unwrap();
        for kind in ConnectionKind::ALL {
            let r = check_normal_action(&GENERIC, kind, &w, &params()).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{kind}: {r:?}");
        }
        let s2 = Arc::new(standard_structure(2).unwrap());
        let w = make_invariant_subspace(&s2, 1).unwrap();
        let (u, v, x) = (s2.basis_vector(2), s2.basis_vector(3), s2.basis_vector(0));
        let flat = FormCoefficients::new(1.0, 0.0, 0.3);
        let (value, _) =
            normal_curvature_on_tangent(&flat, ConnectionKind::SemiSymMetric, &w, &u, &v, &x).unwrap();
        assert!(value.norm() < 1e-15);
        let tw = FormCoefficients::new(1.0, 0.0, 0.0);
        let (value, closed) =
            normal_curvature_on_tangent(&tw, ConnectionKind::TanakaWebster, &w, &u, &v, &x).unwrap();
        // g(e3, phi e4) = -1, phi e1 = e2
        assert!((&value + s2.basis_vector(1) * 2.0).norm() < 1e-15);
        assert!((&value - &closed).norm() < 1e-15);
        let (value, _) =
            normal_curvature_on_tangent(&GENERIC, ConnectionKind::TanakaWebster, &w, &u, &u, &x).unwrap();
        assert_eq!(value.norm(), 0.0);
        assert!(normal_curvature_on_tangent(&GENERIC, ConnectionKind::LeviCivita, &w, &x, &v, &x).is_err());
    }

    #[test]
    fn witness_on_slant_subspace() {
        let s = Arc::new(standard_structure(2).unwrap());
        let w = slant_subspace(&s, PI / 4.0).unwrap();
        let f = FormCoefficients::new(1.0, 1.0, 1.0);
        let r = witness_search(&f, ConnectionKind::SemiSymNonMetric, &w, 500, 1).unwrap();
        assert!(r.found && r.guided);
        // guided pair: X = e1, Y = TX/|TX|, nor = -3 f2 |TX| FX
        let th = PI / 4.0;
        let expected = 3.0 * th.cos() * (1.0 - th.cos() * th.cos()).sqrt();
        assert!((r.magnitude - expected).abs() < 1e-12, "{} vs {}", r.magnitude, expected);
    }

    #[test]
    fn witness_absent_on_invariant() {
        let s = space(3, 2);
        let w = make_invariant_subspace(&s, 2).unwrap();
        for kind in ConnectionKind::MODIFIED {
            let r = witness_search(&GENERIC, kind, &w, 100, 3).unwrap();
            assert!(!r.found, "{kind}");
        }
    }

    #[test]
    fn witness_absent_on_boundary_coefficients() {
        let s = space(2, 5);
        let w = make_mixed_subspace(&s, 5).unwrap();
        let svk = FormCoefficients::new(2.0, -1.0 / 3.0, 1.0);
        assert!(witness_coefficient(ConnectionKind::SchoutenVanKampen, &svk).abs() < 1e-15);
        let r = witness_search(&svk, ConnectionKind::SchoutenVanKampen, &w, 200, 1).unwrap();
        assert!(!r.found, "{r:?}");
        let tw = FormCoefficients::new(2.0, -1.0, 1.0);
        assert!(!converse_hypothesis(ConnectionKind::TanakaWebster, &tw).holds);
        let r = witness_search(&tw, ConnectionKind::TanakaWebster, &w, 200, 1).unwrap();
        assert!(!r.found);
    }

    #[test]
    fn normal_bundle_witnesses() {
        let s = space(2, 9);
        let mixed = make_mixed_subspace(&s, 2).unwrap();
        let f = FormCoefficients::new(1.0, 1.0, 1.0);
        let r = normal_bundle_witness_search(&f, ConnectionKind::SemiSymMetric, &mixed, 500, 2).unwrap();
        assert!(r.found);
        let inv = make_invariant_subspace(&s, 1).unwrap();
        let r = normal_bundle_witness_search(&f, ConnectionKind::SemiSymMetric, &inv, 200, 2).unwrap();
        assert!(!r.found);
        let anti = make_anti_invariant_subspace(&s, 2).unwrap();
        let r = normal_bundle_witness_search(&EQUAL13, ConnectionKind::SemiSymMetric, &anti, 200, 2).unwrap();
        assert!(!r.found);
    }

    #[test]
    fn normal_bundle_converse_fails_with_anti_invariant_normal_space() {
        let s = space(3, 4);
        let w = mixed_with_anti_invariant_normal(&s).unwrap();
        for kind in ConnectionKind::MODIFIED {
            let f = if kind == ConnectionKind::SemiSymMetric { EQUAL13 } else { GENERIC };
            assert!(converse_hypothesis(kind, &f).holds);
            let r = normal_bundle_witness_search(&f, kind, &w, 300, 1).unwrap();
            assert!(!r.found, "{kind}: {r:?}");
            // the tangent-bundle converse still detects the mixing
            assert!(witness_search(&f, kind, &w, 300, 1).unwrap().found);
        }
    }

    #[test]
    fn hypotheses() {
        let h = converse_hypothesis(ConnectionKind::SemiSymMetric, &GENERIC);
        assert!(!h.holds);
        let h = converse_hypothesis(ConnectionKind::SemiSymMetric, &EQUAL13);
        assert!(h.holds && (h.margin - 1.5).abs() < 1e-15);
        let sas = crate::model::sasakian_coeffs(1.0);
        assert!(!converse_hypothesis(ConnectionKind::SemiSymNonMetric, &sas).holds);
        assert!(converse_hypothesis(ConnectionKind::TanakaWebster, &sas).holds);
    }

    #[test]
    fn theorem_suite_examples() {
        let p = SuiteParams { samples: 20, ..params() };
        let r = theorem_suite(&GENERIC, ConnectionKind::SemiSymNonMetric, &[2, 3], &[1, 2], &p, 500)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        assert!(r.witness.as_ref().unwrap().found);

        let flat = FormCoefficients::new(1.0, 0.0, 1.0);
        let r = theorem_suite(&flat, ConnectionKind::SemiSymMetric, &[2], &[1], &p, 100).unwrap();
        assert_eq!(r.verdict, Verdict::Skipped);
        assert!(r.max_ratio <= 1.0);

        let tw = FormCoefficients::new(2.0, -1.0, 1.0);
        let r = theorem_suite(&tw, ConnectionKind::TanakaWebster, &[2], &[1], &p, 100).unwrap();
        assert_eq!(r.verdict, Verdict::Skipped);
    }
}
