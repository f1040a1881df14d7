//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Everything here is sized for dimensions 2 through 8: matrices are stored
//! row-major in a flat `Vec`, and the Hermitian eigensolver is a cyclic
//! Jacobi sweep.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative Hermiticity tolerance applied to matrices handed to the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

#[derive(Clone, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self {
            dim,
            data: entries.to_vec(),
        })
    }

    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_rows(dim, &c)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (k, &v) in values.iter().enumerate() {
            m[(k, k)] = C64::new(v, 0.0);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[CVector]) -> Result<Self> {
        let dim = columns.len();
        let mut m = Self::zeros(dim);
        for (j, col) in columns.iter().enumerate() {
            if col.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: col.dim(),
                });
            }
            for i in 0..dim {
                m[(i, j)] = col[i];
            }
        }
        Ok(m)
    }

    /// `|a><b|`
    pub fn outer(a: &CVector, b: &CVector) -> Self {
        let dim = a.dim();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = a[i] * b[j].conj();
            }
        }
        m
    }

    pub fn projector(v: &CVector) -> Self {
        Self::outer(v, v)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius (Hilbert-Schmidt) norm, `sqrt(Tr[M^dagger M])`.
    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let mut err: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_error() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// `(M + M^dagger) / 2`
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    pub fn matvec(&self, v: &CVector) -> CVector {
        debug_assert_eq!(self.dim, v.dim());
        let mut out = vec![ZERO; self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            *o = row.iter().zip(v.data.iter()).map(|(a, b)| a * b).sum();
        }
        CVector::new(out)
    }

    /// `<a|M|b>`
    pub fn expectation(&self, a: &CVector, b: &CVector) -> C64 {
        a.inner(&self.matvec(b))
    }

    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        Ok(self * rhs)
    }

    /// Accumulates `self += factor * other` in place.
    pub fn add_scaled(&mut self, other: &CMatrix, factor: C64) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b * factor;
        }
    }

    pub fn distance(&self, other: &CMatrix) -> f64 {
        (self - other).hs_norm()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ZERO; dim])
    }

    /// Computational basis state `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = ONE;
        v
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> CVector {
        let n = self.norm();
        self.scale(C64::new(1.0 / n, 0.0))
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-12
    }

    pub fn scale(&self, factor: C64) -> CVector {
        CVector::new(self.data.iter().map(|z| z * factor).collect())
    }

    pub fn axpy(&self, factor: C64, other: &CVector) -> CVector {
        CVector::new(self.data.iter().zip(&other.data).map(|(a, b)| a + factor * b).collect())
    }

    pub fn tensor(&self, other: &CVector) -> CVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                out.push(a * b);
            }
        }
        CVector::new(out)
    }

    pub fn distance(&self, other: &CVector) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Index<usize> for CVector {
    type Output = C64;
    #[inline]
    fn index(&self, k: usize) -> &C64 {
        &self.data[k]
    }
}

impl IndexMut<usize> for CVector {
    #[inline]
    fn index_mut(&mut self, k: usize) -> &mut C64 {
        &mut self.data[k]
    }
}

impl fmt::Debug for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CVector[")?;
        for z in &self.data {
            write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, " ]")
    }
}

/// `|<a|b>|^2`
pub fn state_fidelity(a: &CVector, b: &CVector) -> f64 {
    a.inner(b).norm_sqr()
}

pub mod pauli {
    use super::*;

    pub fn x() -> CMatrix {
        CMatrix::from_rows(2, &[ZERO, ONE, ONE, ZERO]).unwrap()
    }

    pub fn y() -> CMatrix {
        CMatrix::from_rows(2, &[ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn z() -> CMatrix {
        CMatrix::from_rows(2, &[ONE, ZERO, ZERO, -ONE]).unwrap()
    }

    /// `(sigma_x - i sigma_y) / 2 = |1><0|`
    pub fn plus() -> CMatrix {
        CMatrix::from_rows(2, &[ZERO, ZERO, ONE, ZERO]).unwrap()
    }

    /// `(sigma_x + i sigma_y) / 2 = |0><1|`
    pub fn minus() -> CMatrix {
        CMatrix::from_rows(2, &[ZERO, ONE, ZERO, ZERO]).unwrap()
    }
}

/// Kronecker product `A (x) B`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (da, db) = (a.dim(), b.dim());
    let n = da * db;
    let mut out = CMatrix::zeros(n);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn tensor_all(factors: &[CMatrix]) -> CMatrix {
    let mut iter = factors.iter();
    let first = iter.next().cloned().unwrap_or_else(|| CMatrix::identity(1));
    iter.fold(first, |acc, f| tensor(&acc, f))
}

/// `[A, B] = AB - BA`
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(&(a * b) - &(b * a))
}

/// `{A, B} = AB + BA`
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    &(a * b) + &(b * a)
}

/// Traces out every subsystem except `keep`. `dims` lists the subsystem
/// dimensions in tensor order.
pub fn partial_trace(rho: &CMatrix, keep: usize, dims: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: rho.dim(),
        });
    }
    if keep >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "subsystem {keep} out of range for {} subsystems",
            dims.len()
        )));
    }
    let d_keep = dims[keep];
    let d_left: usize = dims[..keep].iter().product();
    let d_right: usize = dims[keep + 1..].iter().product();
    let mut out = CMatrix::zeros(d_keep);
    for i in 0..d_keep {
        for j in 0..d_keep {
            let mut acc = ZERO;
            for l in 0..d_left {
                for r in 0..d_right {
                    let row = (l * d_keep + i) * d_right + r;
                    let col = (l * d_keep + j) * d_right + r;
                    acc += rho[(row, col)];
                }
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Traces out subsystem `drop`, keeping the joint state of everything else.
pub fn trace_out(rho: &CMatrix, drop: usize, dims: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: rho.dim(),
        });
    }
    if drop >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "subsystem {drop} out of range for {} subsystems",
            dims.len()
        )));
    }
    let d_drop = dims[drop];
    let d_left: usize = dims[..drop].iter().product();
    let d_right: usize = dims[drop + 1..].iter().product();
    let kept = d_left * d_right;
    let mut out = CMatrix::zeros(kept);
    for l1 in 0..d_left {
        for r1 in 0..d_right {
            for l2 in 0..d_left {
                for r2 in 0..d_right {
                    let mut acc = ZERO;
                    for k in 0..d_drop {
                        let row = (l1 * d_drop + k) * d_right + r1;
                        let col = (l2 * d_drop + k) * d_right + r2;
                        acc += rho[(row, col)];
                    }
                    out[(l1 * d_right + r1, l2 * d_right + r2)] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal, `vectors[k]` pairs with `values[k]`. Phases are arbitrary.
    pub vectors: Vec<CVector>,
}

impl HermEigen {
    /// Unitary whose columns are the eigenvectors.
    pub fn unitary(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors).expect("square by construction")
    }

    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.values.len();
        let mut m = CMatrix::zeros(dim);
        for (v, e) in self.vectors.iter().zip(&self.values) {
            m.add_scaled(&CMatrix::projector(v), C64::new(*e, 0.0));
        }
        m
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;
const JACOBI_OFF_TOL: f64 = 1e-14;

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn herm_eigen(m: &CMatrix) -> Result<HermEigen> {
    let scale = m.max_abs();
    let herm_err = m.hermiticity_error();
    if herm_err > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian {
            deviation: herm_err,
            scale,
        });
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let norm = a.hs_norm();
    let target = JACOBI_OFF_TOL * norm;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Rotate the phase of a_pq onto the real axis, then apply a real rotation.
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let eph = phase.conj();
                // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on the (p, q) plane.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * eph * s;
                    a[(k, q)] = akp * s + akq * eph * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * eph * s;
                    v[(k, q)] = vkp * s + vkq * eph * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    Ok(HermEigen {
        values: order.iter().map(|&k| a[(k, k)].re).collect(),
        vectors: order.iter().map(|&k| v.column(k)).collect(),
    })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(herm_eigen(m)?.values[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..dim {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
        herm_eigen(&random_hermitian(rng, dim)).unwrap().unitary()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn pauli_z_spectrum() {
        let e = herm_eigen(&pauli::z()).unwrap();
        assert_close(e.values[0], -1.0, 1e-15);
        assert_close(e.values[1], 1.0, 1e-15);
        assert_close(state_fidelity(&e.vectors[0], &CVector::basis(2, 1)), 1.0, 1e-15);
        assert_close(state_fidelity(&e.vectors[1], &CVector::basis(2, 0)), 1.0, 1e-15);
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = herm_eigen(&pauli::x()).unwrap();
        assert_close(e.values[0], -1.0, 1e-14);
        assert_close(e.values[1], 1.0, 1e-14);
        let minus = CVector::from_real(&[1.0 / SQRT_2, -1.0 / SQRT_2]);
        let plus = CVector::from_real(&[1.0 / SQRT_2, 1.0 / SQRT_2]);
        assert_close(state_fidelity(&e.vectors[0], &minus), 1.0, 1e-14);
        assert_close(state_fidelity(&e.vectors[1], &plus), 1.0, 1e-14);
    }

    #[test]
    fn landau_zener_at_unit_tangent() {
        // -omega (sigma_z + tan(theta) sigma_x) with tan(theta) = 1, omega = 1
        let h = (&pauli::z() + &pauli::x()).scale_real(-1.0);
        let e = herm_eigen(&h).unwrap();
        assert_close(e.values[0], -SQRT_2, 1e-14);
        assert_close(e.values[1], SQRT_2, 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_rows(2, &[ONE, ONE, ZERO, ONE]).unwrap();
        assert!(matches!(herm_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn reconstruction_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let dim = 2 + trial % 7;
            let m = random_hermitian(&mut rng, dim);
            let e = herm_eigen(&m).unwrap();
            let scale = m.hs_norm();
            assert!(e.reconstruct().distance(&m) <= 1e-10 * scale);
            for w in e.values.windows(2) {
                assert!(w[0] <= w[1]);
            }
            for (k, vk) in e.vectors.iter().enumerate() {
                let mv = m.matvec(vk);
                assert!(mv.distance(&vk.scale(C64::new(e.values[k], 0.0))) <= 1e-10 * scale);
                for (l, vl) in e.vectors.iter().enumerate() {
                    let expected = if k == l { ONE } else { ZERO };
                    assert!((vk.inner(vl) - expected).norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn hs_norm_values() {
        assert_close(pauli::y().hs_norm(), SQRT_2, 1e-15);
        assert_eq!(CMatrix::zeros(3).hs_norm(), 0.0);
    }

    #[test]
    fn hs_norm_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 2..=8 {
            let m = random_hermitian(&mut rng, dim);
            let u = random_unitary(&mut rng, dim);
            let rotated = &(&u.adjoint() * &m) * &u;
            assert_close(rotated.hs_norm(), m.hs_norm(), 1e-12);
        }
    }

    #[test]
    fn tensor_identity_z_spectrum() {
        let m = tensor(&CMatrix::identity(2), &pauli::z());
        let e = herm_eigen(&m).unwrap();
        for (v, want) in e.values.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert_close(*v, want, 1e-15);
        }
    }

    #[test]
    fn tensor_trace_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 4);
        let t = tensor(&a, &b).trace();
        assert!((t - a.trace() * b.trace()).norm() < 1e-13);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let psi = CVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let rho = tensor(&CMatrix::projector(&psi), &CMatrix::projector(&CVector::basis(2, 0)));
        let reduced = partial_trace(&rho, 0, &[2, 2]).unwrap();
        assert!(reduced.distance(&CMatrix::projector(&psi)) < 1e-15);
    }

    #[test]
    fn partial_trace_scales_by_other_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 4);
        let reduced = partial_trace(&tensor(&a, &b), 0, &[2, 4]).unwrap();
        assert!(reduced.distance(&a.scale(b.trace())) < 1e-12);
        let reduced_b = partial_trace(&tensor(&a, &b), 1, &[2, 4]).unwrap();
        assert!(reduced_b.distance(&b.scale(a.trace())) < 1e-12);
    }

    #[test]
    fn trace_out_middle_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_hermitian(&mut rng, 2);
        let b = random_hermitian(&mut rng, 2);
        let c = random_hermitian(&mut rng, 2);
        let rho = tensor_all(&[a.clone(), b.clone(), c.clone()]);
        let kept = trace_out(&rho, 1, &[2, 2, 2]).unwrap();
        assert!(kept.distance(&tensor(&a, &c).scale(b.trace())) < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = CMatrix::identity(4);
        assert!(partial_trace(&rho, 0, &[2, 3]).is_err());
        assert!(partial_trace(&rho, 2, &[2, 2]).is_err());
    }

    #[test]
    fn pauli_commutator() {
        let c = commutator(&pauli::x(), &pauli::y()).unwrap();
        assert!(c.distance(&pauli::z().scale(C64::new(0.0, 2.0))) < 1e-15);
        assert!(commutator(&pauli::x(), &CMatrix::identity(4)).is_err());
    }

    #[test]
    fn ladder_operators_match_pauli_combinations() {
        let half_i = C64::new(0.0, 0.5);
        let plus = &pauli::x().scale_real(0.5) - &pauli::y().scale(half_i);
        let minus = &pauli::x().scale_real(0.5) + &pauli::y().scale(half_i);
        assert!(plus.distance(&pauli::plus()) < 1e-15);
        assert!(minus.distance(&pauli::minus()) < 1e-15);
    }
}
