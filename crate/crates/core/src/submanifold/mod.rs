//! Tangent-space model of a submanifold through a point: a subspace `W` of the
//! ambient space that contains `xi`, split against its `g`-orthogonal
//! complement. `phi X = TX + FX` is read off from that split.

mod suites;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{gaussian_vector, seeded_rng, AmbientSpace, Vector};

pub use suites::*;

/// Component norms at or below this are treated as zero when classifying.
pub const CLASS_THRESHOLD: f64 = 1e-8;

/// Relative size below which a Gram-Schmidt residual is treated as dependent.
const RANK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubspaceClass {
    Invariant,
    AntiInvariant,
    Mixed,
}

impl SubspaceClass {
    pub fn name(self) -> &'static str {
        match self {
            SubspaceClass::Invariant => "invariant",
            SubspaceClass::AntiInvariant => "anti-invariant",
            SubspaceClass::Mixed => "mixed",
        }
    }
}

impl fmt::Display for SubspaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A subspace `W` with `xi` in `W`, stored as a `g`-orthonormal basis whose
/// first vector is the normalized `xi`.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: Arc<AmbientSpace>,
    basis: Vec<Vector>,
}

fn orthogonalize(s: &AmbientSpace, v: &Vector, against: &[Vector]) -> Vector {
    let mut w = v.clone();
    // two passes keep the basis orthonormal to rounding
    for _ in 0..2 {
        for b in against {
            let c = s.g(&w, b);
            w -= b * c;
        }
    }
    w
}

impl Subspace {
    /// `span{xi} + span(vectors)`. Dependent vectors are dropped.
    pub fn spanned_by(ambient: &Arc<AmbientSpace>, vectors: &[Vector]) -> Result<Self> {
        let s = ambient.as_ref();
        let xi_norm = s.norm(s.xi());
        if xi_norm == 0.0 {
            return Err(Error::Degenerate("xi is the zero vector".into()));
        }
        let mut basis = vec![s.xi() / xi_norm];
        for v in vectors {
            s.check(v)?;
            let scale = s.norm(v);
            if scale == 0.0 {
                continue;
            }
            let w = orthogonalize(s, v, &basis);
            let r = s.norm(&w);
            if r > RANK_EPS * scale {
                basis.push(w / r);
            }
        }
        Ok(Subspace {
            ambient: Arc::clone(ambient),
            basis,
        })
    }

    pub fn ambient(&self) -> &Arc<AmbientSpace> {
        &self.ambient
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Basis of `W` intersected with `ker eta`.
    pub fn horizontal_basis(&self) -> &[Vector] {
        &self.basis[1..]
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim() - self.dim()
    }

    pub fn contains_xi(&self) -> bool {
        let (_, nor) = self.split(self.ambient.xi());
        nor.norm() <= CLASS_THRESHOLD
    }

    /// `g`-orthogonal projection: `v = tan + nor`.
    pub fn split(&self, v: &Vector) -> (Vector, Vector) {
        let s = self.ambient.as_ref();
        let mut tan = s.zero();
        for b in &self.basis {
            tan += b * s.g(v, b);
        }
        let nor = v - &tan;
        (tan, nor)
    }

    pub fn tangential(&self, v: &Vector) -> Vector {
        self.split(v).0
    }

    pub fn normal(&self, v: &Vector) -> Vector {
        self.split(v).1
    }

    /// `g`-orthonormal basis of the complement of `W`.
    pub fn normal_basis(&self) -> Vec<Vector> {
        let s = self.ambient.as_ref();
        let mut all = self.basis.clone();
        let mut out = Vec::new();
        for i in 0..s.dim() {
            if all.len() == s.dim() {
                break;
            }
            let e = s.basis_vector(i);
            let w = orthogonalize(s, &e, &all);
            let r = s.norm(&w);
            if r > 1e-6 {
                let w = w / r;
                all.push(w.clone());
                out.push(w);
            }
        }
        out
    }

    /// Raw combination of the basis with standard-normal weights.
    pub fn random_tangent<R: Rng + ?Sized>(&self, rng: &mut R) -> Vector {
        let weights = gaussian_vector(rng, self.basis.len());
        let mut v = self.ambient.zero();
        for (b, w) in self.basis.iter().zip(weights.iter()) {
            v += b * *w;
        }
        v
    }

    /// Normal part of a raw standard-normal sample; `None` when `W` is the
    /// whole space.
    pub fn random_normal<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vector> {
        if self.codim() == 0 {
            return None;
        }
        Some(self.normal(&self.ambient.gaussian_vector(rng)))
    }

    pub(crate) fn tangent_residual(&self, v: &Vector) -> f64 {
        self.ambient.norm(&self.normal(v))
    }

    pub(crate) fn normal_residual(&self, v: &Vector) -> f64 {
        self.ambient.norm(&self.tangential(v))
    }

    pub(crate) fn require_tangent(&self, v: &Vector) -> Result<()> {
        self.ambient.check(v)?;
        let r = self.tangent_residual(v);
        if r <= CLASS_THRESHOLD * self.ambient.norm(v).max(1.0) {
            Ok(())
        } else {
            Err(Error::NotInSubspace(r))
        }
    }

    pub(crate) fn require_normal(&self, v: &Vector) -> Result<()> {
        self.ambient.check(v)?;
        let r = self.normal_residual(v);
        if r <= CLASS_THRESHOLD * self.ambient.norm(v).max(1.0) {
            Ok(())
        } else {
            Err(Error::NotNormal(r))
        }
    }
}

pub fn tangent_normal_split(w: &Subspace, v: &Vector) -> (Vector, Vector) {
    w.split(v)
}

/// `phi X = TX + FX` for `X` in `W`.
pub fn decompose_phi(w: &Subspace, x: &Vector) -> Result<(Vector, Vector)> {
    w.require_tangent(x)?;
    Ok(w.split(&w.ambient.phi(x)))
}

pub fn classify_subspace(w: &Subspace, threshold: f64) -> SubspaceClass {
    let s = w.ambient.as_ref();
    let mut invariant = true;
    let mut anti = true;
    for b in w.horizontal_basis() {
        let (t, f) = w.split(&s.phi(b));
        invariant &= s.norm(&f) <= threshold;
        anti &= s.norm(&t) <= threshold;
    }
    if invariant {
        SubspaceClass::Invariant
    } else if anti {
        SubspaceClass::AntiInvariant
    } else {
        SubspaceClass::Mixed
    }
}

fn unit_horizontal<R: Rng + ?Sized>(
    s: &AmbientSpace,
    rng: &mut R,
    against: &[Vector],
) -> Option<Vector> {
    let xi = s.xi() / s.norm(s.xi());
    let mut avoid = vec![xi];
    avoid.extend(against.iter().cloned());
    for _ in 0..16 {
        let w = orthogonalize(s, &s.gaussian_vector(rng), &avoid);
        let r = s.norm(&w);
        if r > 1e-3 {
            return Some(w / r);
        }
    }
    None
}

/// A `phi`-adapted orthonormal frame `u_1, ..., u_n` of `ker eta`: together
/// with `phi u_1, ..., phi u_n` it is a `g`-orthonormal basis of `ker eta`.
/// Built deterministically from the coordinate basis, so on the standard
/// structure it reproduces `e1, e3, e5, ...`.
pub fn adapted_frame(s: &AmbientSpace) -> Vec<Vector> {
    let xi = s.xi() / s.norm(s.xi());
    let mut span = vec![xi];
    let mut frame = Vec::with_capacity(s.n());
    for i in 0..s.dim() {
        if frame.len() == s.n() {
            break;
        }
        let w = orthogonalize(s, &s.basis_vector(i), &span);
        let r = s.norm(&w);
        if r > 1e-6 {
            let u = w / r;
            let pu = s.phi(&u);
            span.push(u.clone());
            span.push(pu);
            frame.push(u);
        }
    }
    frame
}

/// `span{xi} + span{u_1, phi u_1, ..., u_k, phi u_k}`.
pub fn make_invariant_subspace(s: &Arc<AmbientSpace>, k: usize) -> Result<Subspace> {
    let n = s.n();
    if k == 0 || k > n {
        return Err(Error::InvalidSubspaceRank { k, max: n });
    }
    let frame = adapted_frame(s);
    let mut vectors = Vec::with_capacity(2 * k);
    for u in frame.iter().take(k) {
        vectors.push(u.clone());
        vectors.push(s.phi(u));
    }
    Subspace::spanned_by(s, &vectors)
}

/// Rows of the orthonormal DCT-II matrix of size `n`; a real orthogonal mix of
/// the adapted frame stays totally real.
fn dct_row(n: usize, r: usize) -> Vec<f64> {
    let scale = if r == 0 {
        (1.0 / n as f64).sqrt()
    } else {
        (2.0 / n as f64).sqrt()
    };
    (0..n)
        .map(|j| scale * (PI * r as f64 * (2 * j + 1) as f64 / (2 * n) as f64).cos())
        .collect()
}

/// `span{xi} + D` with `dim D = k` and `phi D` orthogonal to `W`.
pub fn make_anti_invariant_subspace(s: &Arc<AmbientSpace>, k: usize) -> Result<Subspace> {
    let n = s.n();
    if k == 0 || k > n {
        return Err(Error::InvalidSubspaceRank { k, max: n });
    }
    let frame = adapted_frame(s);
    let vectors: Vec<Vector> = (0..k)
        .map(|r| {
            let mut d = s.zero();
            for (u, c) in frame.iter().zip(dct_row(n, r)) {
                d += u * c;
            }
            d
        })
        .collect();
    Subspace::spanned_by(s, &vectors)
}

fn mixed_margin(w: &Subspace, x: &Vector) -> f64 {
    let s = w.ambient.as_ref();
    let (t, f) = w.split(&s.phi(x));
    s.norm(&t).min(s.norm(&f))
}

/// `span{xi, u, cos(theta) phi u + sin(theta) v}` with `u = u_1`, `v = u_2` of
/// the adapted frame. Mixed exactly when `0 < theta < pi/2`.
pub fn slant_subspace(s: &Arc<AmbientSpace>, theta: f64) -> Result<Subspace> {
    let frame = adapted_frame(s);
    let (u, v) = (&frame[0], &frame[1]);
    let w = s.phi(u) * theta.cos() + v * theta.sin();
    let sub = Subspace::spanned_by(s, &[u.clone(), w])?;
    match classify_subspace(&sub, CLASS_THRESHOLD) {
        SubspaceClass::Mixed => Ok(sub),
        other => Err(Error::Degenerate(format!(
            "slant angle {theta} gives an {other} subspace"
        ))),
    }
}

/// Seeded mixed subspace: `span{xi, u, cos(theta) phi u + sin(theta) v}` for
/// random horizontal unit `u`, a unit `v` orthogonal to `u` and `phi u`, and
/// `theta` drawn from `[pi/8, 3pi/8]`; for `n >= 3` a random extra direction
/// is sometimes added. The generator `u` keeps both `T u` and `F u` away from
/// zero.
pub fn make_mixed_subspace(s: &Arc<AmbientSpace>, seed: u64) -> Result<Subspace> {
    let mut rng = seeded_rng(seed ^ 0x6d69_7865_6400);
    for _ in 0..64 {
        let Some(u) = unit_horizontal(s, &mut rng, &[]) else {
            continue;
        };
        let pu = s.phi(&u);
        let Some(v) = unit_horizontal(s, &mut rng, &[u.clone(), pu.clone()]) else {
            continue;
        };
        let theta = rng.random_range(PI / 8.0..=3.0 * PI / 8.0);
        let w = &pu * theta.cos() + &v * theta.sin();
        let mut vectors = vec![u.clone(), w];
        if s.n() >= 3 && rng.random_bool(0.5) {
            let current = Subspace::spanned_by(s, &vectors)?;
            if let Some(extra) = unit_horizontal(s, &mut rng, current.basis()) {
                vectors.push(extra);
            }
        }
        let sub = Subspace::spanned_by(s, &vectors)?;
        if classify_subspace(&sub, CLASS_THRESHOLD) == SubspaceClass::Mixed
            && mixed_margin(&sub, &u) > 1e-3
        {
            return Ok(sub);
        }
    }
    Err(Error::Degenerate(
        "could not draw a mixed subspace for this seed".into(),
    ))
}

/// A mixed `W` whose normal space is anti-invariant (`phi` of every normal
/// vector is tangent): `W = span{xi, phi u_1, phi u_2, u_3, phi u_3, ..., u_n, phi u_n}`.
/// Exists only for `n >= 3`.
pub fn mixed_with_anti_invariant_normal(s: &Arc<AmbientSpace>) -> Result<Subspace> {
    if s.n() < 3 {
        return Err(Error::InvalidSubspaceRank { k: 3, max: s.n() });
    }
    let frame = adapted_frame(s);
    let mut vectors = vec![s.phi(&frame[0]), s.phi(&frame[1])];
    for u in &frame[2..] {
        vectors.push(u.clone());
        vectors.push(s.phi(u));
    }
    Subspace::spanned_by(s, &vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{frame_structure, standard_structure};

    fn std2() -> Arc<AmbientSpace> {
        Arc::new(standard_structure(2).unwrap())
    }

    fn e(s: &AmbientSpace, i: usize) -> Vector {
        s.basis_vector(i - 1)
    }

    #[test]
    fn split_examples() {
        let s = std2();
        let w = Subspace::spanned_by(&s, &[e(&s, 1), e(&s, 2)]).unwrap();
        let (t, n) = w.split(&e(&s, 1));
        assert_eq!((t, n), (e(&s, 1), s.zero()));
        let (t, n) = w.split(&e(&s, 4));
        assert_eq!((t, n), (s.zero(), e(&s, 4)));
        let (t, n) = tangent_normal_split(&w, &(e(&s, 1) + e(&s, 3)));
        assert!((t - e(&s, 1)).norm() < 1e-15);
        assert!((n - e(&s, 3)).norm() < 1e-15);
    }

    #[test]
    fn invariant_constructor() {
        let s = std2();
        let w = make_invariant_subspace(&s, 1).unwrap();
        assert_eq!(w.dim(), 3);
        for v in [e(&s, 5), e(&s, 1), e(&s, 2)] {
            assert!(w.tangent_residual(&v) < 1e-15);
        }
        assert_eq!(classify_subspace(&w, CLASS_THRESHOLD), SubspaceClass::Invariant);
        let whole = make_invariant_subspace(&s, 2).unwrap();
        assert_eq!(whole.dim(), 5);
        assert_eq!(whole.codim(), 0);
        assert!(whole.random_normal(&mut seeded_rng(1)).is_none());

        let f3 = Arc::new(frame_structure(3, 5).unwrap());
        let w = make_invariant_subspace(&f3, 2).unwrap();
        assert_eq!(w.dim(), 5);
        for b in w.horizontal_basis() {
            let (_, fx) = decompose_phi(&w, b).unwrap();
            assert!(fx.norm() < 1e-12);
        }
        assert_eq!(classify_subspace(&w, CLASS_THRESHOLD), SubspaceClass::Invariant);
    }

    #[test]
    fn rank_bounds() {
        let s = std2();
        assert!(make_invariant_subspace(&s, 0).is_err());
        assert_eq!(
            make_anti_invariant_subspace(&s, 3).unwrap_err(),
            Error::InvalidSubspaceRank { k: 3, max: 2 }
        );
    }

    #[test]
    fn anti_invariant_constructor() {
        let s = std2();
        let w = make_anti_invariant_subspace(&s, 1).unwrap();
        let d = (e(&s, 1) + e(&s, 3)) / 2f64.sqrt();
        assert!(w.tangent_residual(&d) < 1e-15);
        let pd = s.phi(&d);
        assert!((&pd - (e(&s, 2) + e(&s, 4)) / 2f64.sqrt()).norm() < 1e-15);
        for b in w.basis() {
            assert!(s.g(&pd, b).abs() < 1e-15);
        }
        assert_eq!(classify_subspace(&w, CLASS_THRESHOLD), SubspaceClass::AntiInvariant);

        let w2 = make_anti_invariant_subspace(&s, 2).unwrap();
        assert_eq!(w2.dim(), 3);
        assert!(w2.tangent_residual(&e(&s, 1)) < 1e-14);
        assert!(w2.tangent_residual(&e(&s, 3)) < 1e-14);
        assert_eq!(classify_subspace(&w2, CLASS_THRESHOLD), SubspaceClass::AntiInvariant);
        let (t, f) = decompose_phi(&w2, s.xi()).unwrap();
        assert_eq!((t.norm(), f.norm()), (0.0, 0.0));
    }

    #[test]
    fn two_dimensional_subspaces_through_xi_are_anti_invariant() {
        let s = std2();
        let th = PI / 4.0;
        let v = e(&s, 1) * th.cos() + e(&s, 3) * th.sin();
        let w = Subspace::spanned_by(&s, &[v]).unwrap();
        assert_eq!(classify_subspace(&w, CLASS_THRESHOLD), SubspaceClass::AntiInvariant);
    }

    #[test]
    fn slant_examples() {
        let s = std2();
        let w = slant_subspace(&s, PI / 4.0).unwrap();
        assert_eq!(classify_subspace(&w, CLASS_THRESHOLD), SubspaceClass::Mixed);
        let (t, f) = decompose_phi(&w, &e(&s, 1)).unwrap();
        assert!((t.norm() - (PI / 4.0).cos()).abs() < 1e-14);
        assert!(f.norm() > 0.5);
        assert!(slant_subspace(&s, 0.0).is_err());
        assert!(slant_subspace(&s, PI / 2.0).is_err());
    }

    #[test]
    fn mixed_constructor_is_deterministic() {
        for n in 2..=4 {
            let s = Arc::new(frame_structure(n, 3).unwrap());
            for seed in 0..8 {
                let a = make_mixed_subspace(&s, seed).unwrap();
                let b = make_mixed_subspace(&s, seed).unwrap();
                assert_eq!(a.basis(), b.basis());
                assert_eq!(classify_subspace(&a, CLASS_THRESHOLD), SubspaceClass::Mixed);
            }
        }
    }

    #[test]
    fn decompose_phi_rejects_outside_vectors() {
        let s = std2();
        let w = make_invariant_subspace(&s, 1).unwrap();
        assert!(matches!(
            decompose_phi(&w, &e(&s, 3)),
            Err(Error::NotInSubspace(_))
        ));
    }

    #[test]
    fn counterexample_subspace_shape() {
        let s = Arc::new(standard_structure(3).unwrap());
        let w = mixed_with_anti_invariant_normal(&s).unwrap();
        assert_eq!(classify_subspace(&w, CLASS_THRESHOLD), SubspaceClass::Mixed);
        for u in w.normal_basis() {
            assert!(w.normal_residual(&s.phi(&u)) > 0.99);
        }
        assert!(mixed_with_anti_invariant_normal(&std2()).is_err());
    }
}
