//! Cone of 3×3 symmetric positive definite matrices with the
//! affine-invariant metric `g_X(U, V) = tr(X⁻¹ U X⁻¹ V)`.
//!
//! Exponential map, its inverse and the distance all have closed forms, so
//! the SPD sampler moves along exact geodesics.

use crate::error::Result;
use crate::symmat::{
    hvec, mat_exp, mat_inv_sqrt, mat_sqrt, sym_eig, HalfVec, Spd3, SpdMatrix, Sym3, Sym6,
    SymEigen, SymMatrix,
};

/// State of a chain on the SPD cone.
pub type SpdPoint = Spd3;

/// Spectral data of a point computed from a single eigendecomposition.
#[derive(Clone, Copy, Debug)]
pub struct SpdFactors {
    pub sqrt: Sym3,
    pub inv_sqrt: Sym3,
    pub log: Sym3,
    /// Affine-invariant distance to the identity.
    pub dist_to_identity: f64,
}

impl SpdFactors {
    pub fn new(x: &SpdPoint) -> Result<Self> {
        let e = sym_eig(x.as_sym())?;
        Self::from_eigen(&e)
    }

    pub fn from_eigen(e: &SymEigen<3>) -> Result<Self> {
        e.check_positive()?;
        let root = e.values.map(f64::sqrt);
        let logs = e.values.map(f64::ln);
        Ok(Self {
            sqrt: e.map_values(&root),
            inv_sqrt: e.map_values(&root.map(|r| 1.0 / r)),
            log: e.map_values(&logs),
            dist_to_identity: logs.iter().map(|l| l * l).sum::<f64>().sqrt(),
        })
    }

    /// `X^{1/2} Exp(M) X^{1/2}`: the exponential map at `X` applied to the
    /// tangent vector `X^{1/2} M X^{1/2}`.
    pub fn exp_inner(&self, m: &Sym3) -> Result<SpdPoint> {
        let e = mat_exp(m)?;
        Ok(SpdMatrix::new_unchecked(e.as_sym().congruence(&self.sqrt)))
    }
}

/// `exp_X(S) = X^{1/2} Exp(X^{-1/2} S X^{-1/2}) X^{1/2}`.
pub fn spd_exp(x: &SpdPoint, s: &Sym3) -> Result<SpdPoint> {
    let f = SpdFactors::new(x)?;
    f.exp_inner(&s.congruence(&f.inv_sqrt))
}

/// `exp_X^{-1}(Y) = X^{1/2} Log(X^{-1/2} Y X^{-1/2}) X^{1/2}`.
pub fn spd_log(x: &SpdPoint, y: &SpdPoint) -> Result<Sym3> {
    let f = SpdFactors::new(x)?;
    let inner = SpdMatrix::new_unchecked(y.as_sym().congruence(&f.inv_sqrt));
    let l = crate::symmat::mat_log(&inner)?;
    Ok(l.congruence(&f.sqrt))
}

/// Affine-invariant distance `sqrt(Σ log² rᵢ)`, `rᵢ` the eigenvalues of `X⁻¹Y`.
pub fn spd_dist(x: &SpdPoint, y: &SpdPoint) -> Result<f64> {
    let is = mat_inv_sqrt(x)?;
    let inner = y.as_sym().congruence(is.as_sym());
    let e = sym_eig(&inner)?;
    e.check_positive()?;
    Ok(e.values.iter().map(|r| r.ln().powi(2)).sum::<f64>().sqrt())
}

/// Riemannian norm `sqrt(tr(X⁻¹ S X⁻¹ S))` of a tangent vector at `X`.
pub fn spd_tangent_norm(x: &SpdPoint, s: &Sym3) -> Result<f64> {
    let is = mat_inv_sqrt(x)?;
    Ok(s.congruence(is.as_sym()).frobenius_norm())
}

/// Inverse metric tensor in half-vectorization coordinates.
pub fn spd_metric_inv(x: &SpdPoint) -> Sym6 {
    let [x1, x2, x3, x4, x5, x6] = hvec(x.as_sym()).0;
    let rows = [
        [x1 * x1, x4 * x4, x6 * x6, x1 * x4, x4 * x6, x1 * x6],
        [x4 * x4, x2 * x2, x5 * x5, x2 * x4, x2 * x5, x4 * x5],
        [x6 * x6, x5 * x5, x3 * x3, x5 * x6, x3 * x5, x3 * x6],
        [
            x1 * x4,
            x2 * x4,
            x5 * x6,
            0.5 * (x1 * x2 + x4 * x4),
            0.5 * (x2 * x6 + x4 * x5),
            0.5 * (x1 * x5 + x4 * x6),
        ],
        [
            x4 * x6,
            x2 * x5,
            x3 * x5,
            0.5 * (x2 * x6 + x4 * x5),
            0.5 * (x2 * x3 + x5 * x5),
            0.5 * (x3 * x4 + x5 * x6),
        ],
        [
            x1 * x6,
            x4 * x5,
            x3 * x6,
            0.5 * (x1 * x5 + x4 * x6),
            0.5 * (x3 * x4 + x5 * x6),
            0.5 * (x1 * x3 + x6 * x6),
        ],
    ];
    SymMatrix::symmetrize(&rows)
}

/// Symmetric square root of the inverse metric, via a 6×6 eigendecomposition.
pub fn spd_metric_inv_sqrt(x: &SpdPoint) -> Result<Sym6> {
    Ok(mat_sqrt(&SpdMatrix::new_unchecked(spd_metric_inv(x)))?.into_sym())
}

/// Half-vectorization coordinates of a point.
pub fn spd_coords(x: &SpdPoint) -> HalfVec {
    hvec(x.as_sym())
}
