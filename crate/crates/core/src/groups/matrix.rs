use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{structural, Result};

/// Pivot magnitude below which a column counts as dependent when computing rank.
pub const RANK_PIVOT_TOLERANCE: f64 = 1e-9;
/// Tolerance on `‖g*g − I‖_max` for a matrix to count as unitary.
pub const UNITARY_TOLERANCE: f64 = 1e-9;
const SINGULAR_PIVOT: f64 = 1e-12;

/// Dense square complex matrix, row-major.
///
/// Equality, ordering and hashing are bitwise on the entries (with `-0.0`
/// folded into `0.0`) so matrices can be used as keys in extensional maps.
/// Numeric closeness is a separate question answered by [`Matrix::approx_eq`].
#[derive(Clone)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Matrix> {
        if n == 0 || data.len() != n * n {
            return Err(structural(format!(
                "matrix needs {}x{} entries, got {}",
                n,
                n,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(structural("matrix entries must be finite"));
        }
        Ok(Matrix { n, data })
    }

    pub fn from_real(n: usize, entries: &[f64]) -> Result<Matrix> {
        Matrix::new(n, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix::scalar(n, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(n: usize, lambda: Complex64) -> Matrix {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = lambda;
        }
        Matrix { n, data }
    }

    pub fn diagonal(values: &[Complex64]) -> Matrix {
        let n = values.len();
        let mut m = Matrix::scalar(n, Complex64::new(0.0, 0.0));
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    fn check_dim(&self, other: &Matrix) -> Result<()> {
        if self.n != other.n {
            return Err(structural(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other)?;
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(Matrix { n, data })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other)?;
        Ok(Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dim(other)?;
        Ok(Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Matrix { n, data }
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n).data;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() < SINGULAR_PIVOT {
                return Err(structural("matrix is singular"));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= p;
                inv[col * n + j] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[col * n + j], inv[col * n + j]);
                    a[r * n + j] -= f * ac;
                    inv[r * n + j] -= f * ic;
                }
            }
        }
        Ok(Matrix { n, data: inv })
    }

    /// Numeric rank by row elimination with full column scan; a pivot counts
    /// when its magnitude exceeds [`RANK_PIVOT_TOLERANCE`].
    pub fn rank(&self) -> usize {
        let n = self.n;
        let mut a = self.data.clone();
        let mut rank = 0;
        for col in 0..n {
            if rank == n {
                break;
            }
            let pivot = (rank..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[pivot * n + col].norm() <= RANK_PIVOT_TOLERANCE {
                continue;
            }
            for j in 0..n {
                a.swap(pivot * n + j, rank * n + j);
            }
            let p = a[rank * n + col];
            for r in rank + 1..n {
                let f = a[r * n + col] / p;
                for j in col..n {
                    let v = a[rank * n + j];
                    a[r * n + j] -= f * v;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Normalised Hilbert–Schmidt norm `sqrt(Tr(A*A) / n)`.
    pub fn hs_norm(&self) -> f64 {
        self.hs_norm_sq().sqrt()
    }

    pub fn hs_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.n as f64
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.n == other.n && self.max_abs_diff(other) <= tol
    }

    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.adjoint().mul(self).expect("same dimension");
        prod.max_abs_diff(&Matrix::identity(self.n))
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() <= UNITARY_TOLERANCE
    }

    pub fn is_identity_within(&self, tol: f64) -> bool {
        self.approx_eq(&Matrix::identity(self.n), tol)
    }

    /// Haar-ish random unitary: Gram–Schmidt on a complex Gaussian matrix.
    pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
        loop {
            let mut cols: Vec<Vec<Complex64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            Complex64::new(
                                rng.sample::<f64, _>(StandardNormal),
                                rng.sample::<f64, _>(StandardNormal),
                            )
                        })
                        .collect()
                })
                .collect();
            let mut ok = true;
            for k in 0..n {
                for j in 0..k {
                    let proj: Complex64 = (0..n).map(|i| cols[j][i].conj() * cols[k][i]).sum();
                    for i in 0..n {
                        let v = cols[j][i];
                        cols[k][i] -= proj * v;
                    }
                }
                let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-8 {
                    ok = false;
                    break;
                }
                for z in cols[k].iter_mut() {
                    *z /= norm;
                }
            }
            if !ok {
                continue;
            }
            let mut data = vec![Complex64::new(0.0, 0.0); n * n];
            for (j, col) in cols.iter().enumerate() {
                for (i, z) in col.iter().enumerate() {
                    data[i * n + j] = *z;
                }
            }
            return Matrix { n, data };
        }
    }

    fn key(&self) -> impl Iterator<Item = u64> + '_ {
        std::iter::once(self.n as u64).chain(
            self.data
                .iter()
                .flat_map(|z| [canonical_bits(z.re), canonical_bits(z.im)]),
        )
    }
}

fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0.0f64.to_bits()
    } else {
        x.to_bits()
    }
}

fn total_key(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.key().eq(other.key())
    }
}

impl Eq for Matrix {}

impl Hash for Matrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for k in self.key() {
            k.hash(state);
        }
    }
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Matrix {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| {
            for (a, b) in self.data.iter().zip(&other.data) {
                let c = total_key(a.re)
                    .total_cmp(&total_key(b.re))
                    .then_with(|| total_key(a.im).total_cmp(&total_key(b.im)));
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}[", self.n, self.n)?;
        for (i, z) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}
