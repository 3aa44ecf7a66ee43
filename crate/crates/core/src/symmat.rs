//! Small dense symmetric matrices.
//!
//! Everything on the SPD cone reduces to spectral calculus on 3×3 matrices
//! (exp, log, square roots) plus one 6×6 eigendecomposition for the square
//! root of the inverse metric. Both sizes are handled by a cyclic Jacobi
//! solver, which is accurate to a few ulps at these dimensions.

use crate::error::{Error, Result};

/// Square array storage used for intermediate (not necessarily symmetric) products.
pub type Mat<const N: usize> = [[f64; N]; N];

/// A real symmetric `N×N` matrix with finite entries.
///
/// Symmetry is exact: every constructor averages the input with its
/// transpose, so `get(i, j) == get(j, i)` bit for bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymMatrix<const N: usize> {
    m: Mat<N>,
}

pub type Sym3 = SymMatrix<3>;
pub type Sym6 = SymMatrix<6>;

impl<const N: usize> SymMatrix<N> {
    pub fn zeros() -> Self {
        Self { m: [[0.0; N]; N] }
    }

    pub fn identity() -> Self {
        Self::from_diag([1.0; N])
    }

    pub fn from_diag(d: [f64; N]) -> Self {
        let mut m = [[0.0; N]; N];
        for i in 0..N {
            m[i][i] = d[i];
        }
        Self { m }
    }

    /// Builds `(A + Aᵀ)/2`, rejecting non-finite entries.
    pub fn from_rows(rows: Mat<N>) -> Result<Self> {
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::symmetrize(&rows))
    }

    /// `(A + Aᵀ)/2` without a finiteness check. Used after product chains
    /// whose inputs are already known to be finite.
    pub(crate) fn symmetrize(a: &Mat<N>) -> Self {
        let mut m = *a;
        for i in 0..N {
            for j in (i + 1)..N {
                let v = 0.5 * (a[i][j] + a[j][i]);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Self { m }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    #[inline]
    pub fn rows(&self) -> &Mat<N> {
        &self.m
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..N).map(|i| self.m[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut m = self.m;
        m.iter_mut().flatten().for_each(|v| *v *= k);
        Self { m }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.m;
        for (row, orow) in m.iter_mut().zip(other.m.iter()) {
            for (v, o) in row.iter_mut().zip(orow.iter()) {
                *v += o;
            }
        }
        Self { m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Plain matrix product `self · other` (not symmetric in general).
    pub fn matmul(&self, other: &Self) -> Mat<N> {
        matmul(&self.m, &other.m)
    }

    /// `A · self · A` for symmetric `A`, re-symmetrized.
    pub fn congruence(&self, a: &Self) -> Self {
        Self::symmetrize(&matmul(&matmul(&a.m, &self.m), &a.m))
    }

    pub fn matvec(&self, v: &[f64; N]) -> [f64; N] {
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = (0..N).map(|j| self.m[i][j] * v[j]).sum();
        }
        out
    }
}

impl Sym3 {
    pub fn det(&self) -> f64 {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }
}

pub(crate) fn matmul<const N: usize>(a: &Mat<N>, b: &Mat<N>) -> Mat<N> {
    let mut c = [[0.0; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

/// Symmetric positive definite matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdMatrix<const N: usize>(SymMatrix<N>);

pub type Spd3 = SpdMatrix<3>;

impl<const N: usize> SpdMatrix<N> {
    /// Validates positive definiteness with a Cholesky factorization.
    pub fn new(s: SymMatrix<N>) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut l = [[0.0; N]; N];
        for j in 0..N {
            let mut d = s.get(j, j);
            for k in 0..j {
                d -= l[j][k] * l[j][k];
            }
            if d <= 0.0 {
                let min_eig = sym_eig(&s).map(|e| e.values[N - 1]).unwrap_or(d);
                return Err(Error::NotPositiveDefinite {
                    min_eig,
                    floor: 0.0,
                });
            }
            let d = d.sqrt();
            l[j][j] = d;
            for i in (j + 1)..N {
                let mut v = s.get(i, j);
                for k in 0..j {
                    v -= l[i][k] * l[j][k];
                }
                l[i][j] = v / d;
            }
        }
        Ok(Self(s))
    }

    /// Wraps a matrix that is SPD by construction (congruence of an exponential).
    pub(crate) fn new_unchecked(s: SymMatrix<N>) -> Self {
        Self(s)
    }

    pub fn identity() -> Self {
        Self(SymMatrix::identity())
    }

    #[inline]
    pub fn as_sym(&self) -> &SymMatrix<N> {
        &self.0
    }

    pub fn into_sym(self) -> SymMatrix<N> {
        self.0
    }
}

/// Eigendecomposition `S = Q · diag(values) · Qᵀ`.
#[derive(Clone, Copy, Debug)]
pub struct SymEigen<const N: usize> {
    /// Eigenvalues in descending order.
    pub values: [f64; N],
    /// Eigenvectors stored as columns: `vectors[i][k]` is component `i` of vector `k`.
    pub vectors: Mat<N>,
}

impl<const N: usize> SymEigen<N> {
    /// Spectral calculus: `Q · diag(f(λ)) · Qᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> SymMatrix<N> {
        let fv: [f64; N] = std::array::from_fn(|k| f(self.values[k]));
        self.map_values(&fv)
    }

    pub fn map_values(&self, fv: &[f64; N]) -> SymMatrix<N> {
        let q = &self.vectors;
        let mut m = [[0.0; N]; N];
        for i in 0..N {
            for j in i..N {
                let v: f64 = (0..N).map(|k| q[i][k] * fv[k] * q[j][k]).sum();
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        SymMatrix { m }
    }

    pub fn min(&self) -> f64 {
        self.values[N - 1]
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    /// Positivity threshold below which log and inverse roots are refused.
    pub fn floor(&self) -> f64 {
        EIG_FLOOR_REL * self.max().max(1.0)
    }

    pub(crate) fn check_positive(&self) -> Result<()> {
        let floor = self.floor();
        if self.min() <= floor {
            return Err(Error::NotPositiveDefinite {
                min_eig: self.min(),
                floor,
            });
        }
        Ok(())
    }
}

const EIG_FLOOR_REL: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn sym_eig<const N: usize>(s: &SymMatrix<N>) -> Result<SymEigen<N>> {
    if !s.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut a = s.m;
    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if s.frobenius_norm() > 0.0 {
        for sweep in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for i in 0..N {
                for j in (i + 1)..N {
                    off += a[i][j].abs();
                }
            }
            if off == 0.0 {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    let apq = a[p][q];
                    let g = 100.0 * apq.abs();
                    // negligible against both diagonal entries: zero it outright
                    if sweep > 3 && a[p][p].abs() + g == a[p][p].abs() && a[q][q].abs() + g == a[q][q].abs() {
                        a[p][q] = 0.0;
                        a[q][p] = 0.0;
                        continue;
                    }
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * c;
                    for row in a.iter_mut() {
                        let akp = row[p];
                        let akq = row[q];
                        row[p] = c * akp - sn * akq;
                        row[q] = sn * akp + c * akq;
                    }
                    for k in 0..N {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - sn * aqk;
                        a[q][k] = sn * apk + c * aqk;
                    }
                    a[p][q] = 0.0;
                    a[q][p] = 0.0;
                    for row in v.iter_mut() {
                        let vkp = row[p];
                        let vkq = row[q];
                        row[p] = c * vkp - sn * vkq;
                        row[q] = sn * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = std::array::from_fn(|k| a[order[k]][order[k]]);
    let mut vectors = [[0.0; N]; N];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..N {
            vectors[i][k] = v[i][src];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Matrix exponential of a symmetric matrix.
pub fn mat_exp<const N: usize>(s: &SymMatrix<N>) -> Result<SpdMatrix<N>> {
    let e = sym_eig(s)?;
    Ok(SpdMatrix(e.map(f64::exp)))
}

/// Principal matrix logarithm of an SPD matrix.
pub fn mat_log<const N: usize>(x: &SpdMatrix<N>) -> Result<SymMatrix<N>> {
    let e = sym_eig(x.as_sym())?;
    e.check_positive()?;
    Ok(e.map(f64::ln))
}

/// Principal square root of an SPD matrix.
pub fn mat_sqrt<const N: usize>(x: &SpdMatrix<N>) -> Result<SpdMatrix<N>> {
    let e = sym_eig(x.as_sym())?;
    e.check_positive()?;
    Ok(SpdMatrix(e.map(f64::sqrt)))
}

/// Inverse of the principal square root.
pub fn mat_inv_sqrt<const N: usize>(x: &SpdMatrix<N>) -> Result<SpdMatrix<N>> {
    let e = sym_eig(x.as_sym())?;
    e.check_positive()?;
    Ok(SpdMatrix(e.map(|l| 1.0 / l.sqrt())))
}

/// Half-vectorization coordinates `(x1, …, x6)` of a symmetric 3×3 matrix,
/// laid out as
///
/// ```text
/// [ x1 x4 x6 ]
/// [ x4 x2 x5 ]
/// [ x6 x5 x3 ]
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfVec(pub [f64; 6]);

/// (row, col) of each half-vectorization coordinate.
pub const HVEC_INDEX: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

pub fn hvec(s: &Sym3) -> HalfVec {
    HalfVec(HVEC_INDEX.map(|(i, j)| s.get(i, j)))
}

pub fn hvec_inv(v: &HalfVec) -> Sym3 {
    let mut m = [[0.0; 3]; 3];
    for (k, &(i, j)) in HVEC_INDEX.iter().enumerate() {
        m[i][j] = v.0[k];
        m[j][i] = v.0[k];
    }
    SymMatrix { m }
}
