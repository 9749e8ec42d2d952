//! Pointwise model of an almost contact metric structure `(phi, xi, eta, g)` on
//! an odd-dimensional inner-product space, together with the five curvature
//! tensors of a generalized Sasakian-space-form.
//!
//! Everything here is evaluated at a single point: the form functions
//! `f1, f2, f3` are plain numbers, and a "vector field" is a coordinate vector.
//! The curvature operators are evaluated term by term from their closed
//! formulas, so they double as the numeric reference for the symbolic engine.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;

/// Relative/absolute tolerance pair.
///
/// A residual `r` measured against a computation whose largest intermediate
/// term has magnitude `scale` passes when `r <= max(rel * scale, abs)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance {
        rel: 1e-10,
        abs: 1e-12,
    };

    pub fn new(rel: f64) -> Self {
        Tolerance {
            rel,
            abs: Self::DEFAULT.abs.min(rel),
        }
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        (self.rel * scale).max(self.abs)
    }

    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.threshold(scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// The three form functions of a generalized Sasakian-space-form, taken at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormCoefficients {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl FormCoefficients {
    pub fn new(f1: f64, f2: f64, f3: f64) -> Self {
        FormCoefficients { f1, f2, f3 }
    }

    /// `f1 - f3`, the rate in `nabla xi = -(f1 - f3) phi`.
    pub fn diff13(&self) -> f64 {
        self.f1 - self.f3
    }

    pub fn is_finite(&self) -> bool {
        self.f1.is_finite() && self.f2.is_finite() && self.f3.is_finite()
    }
}

impl fmt::Display for FormCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.f1, self.f2, self.f3)
    }
}

/// Coefficients of a Sasakian-space-form of constant phi-sectional curvature `c`.
pub fn sasakian_coeffs(c: f64) -> FormCoefficients {
    FormCoefficients {
        f1: (c + 3.0) / 4.0,
        f2: (c - 1.0) / 4.0,
        f3: (c - 1.0) / 4.0,
    }
}

/// The connection whose curvature is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectionKind {
    LeviCivita,
    #[serde(rename = "semisym-metric")]
    SemiSymMetric,
    #[serde(rename = "semisym-nonmetric")]
    SemiSymNonMetric,
    SchoutenVanKampen,
    TanakaWebster,
}

impl ConnectionKind {
    pub const ALL: [ConnectionKind; 5] = [
        ConnectionKind::LeviCivita,
        ConnectionKind::SemiSymMetric,
        ConnectionKind::SemiSymNonMetric,
        ConnectionKind::SchoutenVanKampen,
        ConnectionKind::TanakaWebster,
    ];

    /// The four connections that differ from Levi-Civita.
    pub const MODIFIED: [ConnectionKind; 4] = [
        ConnectionKind::SemiSymMetric,
        ConnectionKind::SemiSymNonMetric,
        ConnectionKind::SchoutenVanKampen,
        ConnectionKind::TanakaWebster,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConnectionKind::LeviCivita => "levi-civita",
            ConnectionKind::SemiSymMetric => "semisym-metric",
            ConnectionKind::SemiSymNonMetric => "semisym-nonmetric",
            ConnectionKind::SchoutenVanKampen => "schouten-van-kampen",
            ConnectionKind::TanakaWebster => "tanaka-webster",
        }
    }
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConnectionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "levicivita" | "lc" => Ok(ConnectionKind::LeviCivita),
            "semisymmetric" | "semisymmetricmetric" | "ssm" => {
                Ok(ConnectionKind::SemiSymMetric)
            }
            "semisymnonmetric" | "semisymmetricnonmetric" | "ssnm" => {
                Ok(ConnectionKind::SemiSymNonMetric)
            }
            "schoutenvankampen" | "svk" => Ok(ConnectionKind::SchoutenVanKampen),
            "tanakawebster" | "tw" => Ok(ConnectionKind::TanakaWebster),
            _ => Err(format!("unknown connection kind `{}`", s.trim())),
        }
    }
}

/// An almost contact metric structure on `R^(2n+1)`.
///
/// `g` is stored explicitly; inner products, norms and adjoints always go
/// through it, so a non-identity metric works everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientSpace {
    n: usize,
    g: DMatrix<f64>,
    phi: DMatrix<f64>,
    xi: Vector,
    eta: Vector,
}

impl AmbientSpace {
    /// Assemble a structure from raw parts. Only shapes are checked; use
    /// [`validate_structure`] for the structure identities.
    pub fn from_parts(
        n: usize,
        g: DMatrix<f64>,
        phi: DMatrix<f64>,
        xi: Vector,
        eta: Vector,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidHalfDimension(n));
        }
        let d = 2 * n + 1;
        for found in [g.nrows(), g.ncols(), phi.nrows(), phi.ncols(), xi.len(), eta.len()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        Ok(AmbientSpace { n, g, phi, xi, eta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension `2n + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn phi_matrix(&self) -> &DMatrix<f64> {
        &self.phi
    }

    pub fn xi(&self) -> &Vector {
        &self.xi
    }

    /// Coefficients of `eta` as a row covector: `eta(X) = eta . X`.
    pub fn eta_covector(&self) -> &Vector {
        &self.eta
    }

    pub fn g(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.g * y))
    }

    pub fn eta(&self, x: &Vector) -> f64 {
        self.eta.dot(x)
    }

    pub fn phi(&self, x: &Vector) -> Vector {
        &self.phi * x
    }

    pub fn norm(&self, x: &Vector) -> f64 {
        self.g(x, x).max(0.0).sqrt()
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    pub fn zero(&self) -> Vector {
        Vector::zeros(self.dim())
    }

    pub fn check(&self, v: &Vector) -> Result<()> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            })
        }
    }

    /// Same structure with `phi` replaced.
    pub fn with_phi(&self, phi: DMatrix<f64>) -> Result<Self> {
        Self::from_parts(self.n, self.g.clone(), phi, self.xi.clone(), self.eta.clone())
    }

    /// Raw standard-normal sample.
    pub fn gaussian_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        gaussian_vector(rng, self.dim())
    }
}

pub(crate) fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vector {
    Vector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Canonical structure: `g` standard, `xi = e_d`, `phi(e_{2i-1}) = e_{2i}`,
/// `phi(e_{2i}) = -e_{2i-1}`.
pub fn standard_structure(n: usize) -> Result<AmbientSpace> {
    if n < 2 {
        return Err(Error::InvalidHalfDimension(n));
    }
    let d = 2 * n + 1;
    let mut phi = DMatrix::zeros(d, d);
    for i in 0..n {
        let (a, b) = (2 * i, 2 * i + 1);
        // column a is phi(e_a)
        phi[(b, a)] = 1.0;
        phi[(a, b)] = -1.0;
    }
    let mut xi = Vector::zeros(d);
    xi[d - 1] = 1.0;
    let eta = xi.clone();
    AmbientSpace::from_parts(n, DMatrix::identity(d, d), phi, xi, eta)
}

/// The standard structure conjugated by a seeded random orthogonal matrix.
pub fn frame_structure(n: usize, seed: u64) -> Result<AmbientSpace> {
    let base = standard_structure(n)?;
    let d = base.dim();
    let mut rng = seeded_rng(seed);
    let raw = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = raw.qr().q();
    let phi = &q * base.phi_matrix() * q.transpose();
    let xi = &q * base.xi();
    // g stays the identity, so eta(X) = g(X, xi) has the same coefficients as xi
    let eta = xi.clone();
    AmbientSpace::from_parts(n, DMatrix::identity(d, d), phi, xi, eta)
}

/// The four groups of structure identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureIdentity {
    /// `phi^2 X = -X + eta(X) xi`, `phi xi = 0`
    PhiSquare,
    /// `eta(xi) = 1`, `eta(X) = g(X, xi)`, `eta(phi X) = 0`
    EtaXi,
    /// `g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y)`
    PhiIsometry,
    /// `g(phi X, Y) = -g(X, phi Y)`
    PhiSkew,
}

impl StructureIdentity {
    pub const ALL: [StructureIdentity; 4] = [
        StructureIdentity::PhiSquare,
        StructureIdentity::EtaXi,
        StructureIdentity::PhiIsometry,
        StructureIdentity::PhiSkew,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub identity: StructureIdentity,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub tol: f64,
    pub residuals: Vec<IdentityResidual>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn residual(&self, identity: StructureIdentity) -> f64 {
        self.residuals
            .iter()
            .find(|r| r.identity == identity)
            .map(|r| r.max_residual)
            .unwrap_or(f64::NAN)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.max_residual)
            .fold(0.0, f64::max)
    }
}

/// Checks the four structure identities on every basis vector / basis pair.
pub fn validate_structure(s: &AmbientSpace, tol: f64) -> ValidationReport {
    let d = s.dim();
    let basis: Vec<Vector> = (0..d).map(|i| s.basis_vector(i)).collect();
    let phis: Vec<Vector> = basis.iter().map(|e| s.phi(e)).collect();
    let xi = s.xi();

    let mut phi_square = s.norm(&s.phi(xi));
    for (e, pe) in basis.iter().zip(&phis) {
        let r = s.phi(pe) + e - xi * s.eta(e);
        phi_square = phi_square.max(s.norm(&r));
    }

    let mut eta_xi = (s.eta(xi) - 1.0).abs();
    for (e, pe) in basis.iter().zip(&phis) {
        eta_xi = eta_xi
            .max((s.eta(e) - s.g(e, xi)).abs())
            .max(s.eta(pe).abs());
    }

    let mut isometry: f64 = 0.0;
    let mut skew: f64 = 0.0;
    for (i, ei) in basis.iter().enumerate() {
        for (j, ej) in basis.iter().enumerate() {
            let iso = s.g(&phis[i], &phis[j]) - s.g(ei, ej) + s.eta(ei) * s.eta(ej);
            isometry = isometry.max(iso.abs());
            let sk = s.g(&phis[i], ej) + s.g(ei, &phis[j]);
            skew = skew.max(sk.abs());
        }
    }

    let residuals: Vec<IdentityResidual> = [
        (StructureIdentity::PhiSquare, phi_square),
        (StructureIdentity::EtaXi, eta_xi),
        (StructureIdentity::PhiIsometry, isometry),
        (StructureIdentity::PhiSkew, skew),
    ]
    .into_iter()
    .map(|(identity, max_residual)| IdentityResidual {
        identity,
        max_residual,
        passed: max_residual <= tol,
    })
    .collect();
    let passed = residuals.iter().all(|r| r.passed);
    ValidationReport {
        n: s.n(),
        tol,
        residuals,
        passed,
    }
}

/// Running sum of vector terms that remembers the largest term magnitude.
pub(crate) struct TermSum<'a> {
    space: &'a AmbientSpace,
    value: Vector,
    scale: f64,
}

impl<'a> TermSum<'a> {
    pub(crate) fn new(space: &'a AmbientSpace) -> Self {
        TermSum {
            space,
            value: space.zero(),
            scale: 0.0,
        }
    }

    pub(crate) fn add(&mut self, c: f64, v: &Vector) {
        if c == 0.0 {
            return;
        }
        let t = v * c;
        self.scale = self.scale.max(self.space.norm(&t));
        self.value += t;
    }

    pub(crate) fn finish(self) -> (Vector, f64) {
        (self.value, self.scale)
    }
}

/// The three brackets shared by every formula:
/// `c1 {g(Y,Z)X - g(X,Z)Y} + c2 {g(X,phiZ)phiY - g(Y,phiZ)phiX + 2g(X,phiY)phiZ}
///  + c3 {eta(X)eta(Z)Y - eta(Y)eta(Z)X + g(X,Z)eta(Y)xi - g(Y,Z)eta(X)xi}`.
#[allow(clippy::too_many_arguments)]
fn space_form_brackets(
    acc: &mut TermSum<'_>,
    s: &AmbientSpace,
    c1: f64,
    c2: f64,
    c3: f64,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) {
    let (px, py, pz) = (s.phi(x), s.phi(y), s.phi(z));
    let xi = s.xi();
    let (ex, ey, ez) = (s.eta(x), s.eta(y), s.eta(z));

    acc.add(c1 * s.g(y, z), x);
    acc.add(-c1 * s.g(x, z), y);

    acc.add(c2 * s.g(x, &pz), &py);
    acc.add(-c2 * s.g(y, &pz), &px);
    acc.add(2.0 * c2 * s.g(x, &py), &pz);

    acc.add(c3 * ex * ez, y);
    acc.add(-c3 * ey * ez, x);
    acc.add(c3 * s.g(x, z) * ey, xi);
    acc.add(-c3 * s.g(y, z) * ex, xi);
}

/// `R(X,Y)Z` for the chosen connection, plus the magnitude of the largest term
/// in its expansion (the scale residuals are measured against).
pub fn curvature_scaled(
    s: &AmbientSpace,
    f: &FormCoefficients,
    kind: ConnectionKind,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) -> Result<(Vector, f64)> {
    s.check(x)?;
    s.check(y)?;
    s.check(z)?;
    let (f1, f2, f3) = (f.f1, f.f2, f.f3);
    let b = f.diff13();
    let mut acc = TermSum::new(s);
    match kind {
        ConnectionKind::LeviCivita => {
            space_form_brackets(&mut acc, s, f1, f2, f3, x, y, z);
        }
        ConnectionKind::SemiSymMetric => {
            space_form_brackets(&mut acc, s, f1 - 1.0, f2, f3 - 1.0, x, y, z);
            let (px, py, pz) = (s.phi(x), s.phi(y), s.phi(z));
            acc.add(b * s.g(x, &pz), y);
            acc.add(-b * s.g(y, &pz), x);
            acc.add(b * s.g(y, z), &px);
            acc.add(-b * s.g(x, z), &py);
        }
        ConnectionKind::SemiSymNonMetric => {
            space_form_brackets(&mut acc, s, f1, f2, f3, x, y, z);
            let pz = s.phi(z);
            acc.add(b * s.g(x, &pz), y);
            acc.add(-b * s.g(y, &pz), x);
            acc.add(s.eta(y) * s.eta(z), x);
            acc.add(-s.eta(x) * s.eta(z), y);
        }
        ConnectionKind::SchoutenVanKampen | ConnectionKind::TanakaWebster => {
            space_form_brackets(&mut acc, s, f1, f2, f3 + b * b, x, y, z);
            let (px, py, pz) = (s.phi(x), s.phi(y), s.phi(z));
            acc.add(b * b * s.g(x, &pz), &py);
            acc.add(-b * b * s.g(y, &pz), &px);
            if kind == ConnectionKind::TanakaWebster {
                acc.add(2.0 * b * s.g(x, &py), &pz);
            }
        }
    }
    Ok(acc.finish())
}

/// `R(X,Y)Z` for the chosen connection.
pub fn curvature(
    s: &AmbientSpace,
    f: &FormCoefficients,
    kind: ConnectionKind,
    x: &Vector,
    y: &Vector,
    z: &Vector,
) -> Result<Vector> {
    curvature_scaled(s, f, kind, x, y, z).map(|(v, _)| v)
}

/// `(nabla_X phi) Y = (f1 - f3) [g(X,Y) xi - eta(Y) X]`.
pub fn nabla_phi_rhs(
    s: &AmbientSpace,
    f: &FormCoefficients,
    x: &Vector,
    y: &Vector,
) -> Result<Vector> {
    s.check(x)?;
    s.check(y)?;
    let b = f.diff13();
    Ok(s.xi() * (b * s.g(x, y)) - x * (b * s.eta(y)))
}

/// `nabla_X xi = -(f1 - f3) phi X`.
pub fn nabla_xi_rhs(s: &AmbientSpace, f: &FormCoefficients, x: &Vector) -> Result<Vector> {
    s.check(x)?;
    Ok(s.phi(x) * (-f.diff13()))
}
