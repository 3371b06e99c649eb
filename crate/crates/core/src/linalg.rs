//! Dense linear algebra for the small symmetric systems that describe
//! coupled oscillators.
//!
//! Everything here works on square matrices of dimension `1..=MAX_DIM`,
//! stored row-major. [`SymMatrix`] stores both triangles but only ever
//! writes them in mirrored pairs, so `get(i, j) == get(j, i)` holds bit for
//! bit.

use crate::error::{Error, Result};

/// Largest supported matrix dimension.
pub const MAX_DIM: usize = 16;

/// Default convergence tolerance for [`jacobi_eigh`].
pub const JACOBI_TOL: f64 = 1e-12;

/// Default sweep budget for [`jacobi_eigh`].
pub const JACOBI_MAX_SWEEPS: usize = 50;

/// Relative width inside which two eigenvalues are treated as degenerate
/// when ordering them.
const TIE_TOL: f64 = 1e-12;

fn check_dim(n: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfRange(n))
    }
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize> {
    let n = rows.len();
    check_dim(n)?;
    for row in rows {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
    }
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(n)
}

/// Dense real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a symmetric matrix by evaluating `f(i, j)` on the upper
    /// triangle (`i <= j`) and mirroring.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dim(n)?;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x = f(i, j);
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data[i * n + j] = x;
                data[j * n + i] = x;
            }
        }
        Ok(Self { n, data })
    }

    /// Builds from explicit rows, which must already be exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = check_rows(rows)?;
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| ((i + 1)..self.n).all(|j| self.get(i, j) == 0.0))
    }

    /// Top-left `k x k` block.
    pub fn leading(&self, k: usize) -> Result<Self> {
        if k > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: k,
            });
        }
        Self::from_fn(k, |i, j| self.get(i, j))
    }

    /// Returns a copy with every entry multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::from_fn(self.n, |i, j| alpha * self.get(i, j))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn to_gen(&self) -> GenMatrix {
        GenMatrix {
            n: self.n,
            data: self.data.clone(),
        }
    }
}

/// Dense real square matrix with no symmetry assumption.
#[derive(Debug, Clone, PartialEq)]
pub struct GenMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GenMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dim(n)?;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let x = f(i, j);
                if !x.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data.push(x);
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = check_rows(rows)?;
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn max_skew(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    /// `max |a - b|` over all entries.
    pub fn max_abs_diff(&self, other: &GenMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diag(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(self.get(i, j).abs());
                }
            }
        }
        m
    }

    /// Averages the matrix with its transpose.
    pub fn symmetrize(&self) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
            .expect("dimension and finiteness already checked")
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::from_fn(self.n, |i, j| alpha * self.get(i, j))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }
}

impl From<&SymMatrix> for GenMatrix {
    fn from(s: &SymMatrix) -> Self {
        s.to_gen()
    }
}

/// Eigenvalues (ascending) and unit eigenvectors (as columns) of a
/// symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    pub values: Vec<f64>,
    pub vectors: GenMatrix,
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps over the strict upper triangle in row order, annihilating each
/// off-diagonal entry with a plane rotation, until the off-diagonal
/// Frobenius norm drops below `tol * (1 + ||diag||_F)`.
///
/// Eigenvalues come back ascending. Eigenvalues that agree to a relative
/// `1e-12` keep the order of their diagonal position. Each eigenvector is
/// signed so that its entry of largest magnitude is non-negative.
pub fn jacobi_eigh(s: &SymMatrix, tol: f64, max_sweeps: usize) -> Result<EigDecomposition> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be > 0, got {tol}")));
    }
    if max_sweeps == 0 {
        return Err(Error::InvalidArgument("max_sweeps must be >= 1".into()));
    }
    let n = s.n;
    let mut a = s.data.clone();
    let mut v = GenMatrix::identity(n)?.data;

    let norms = |a: &[f64]| {
        let mut off = 0.0;
        let mut dia = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = a[i * n + j];
                if i == j {
                    dia += x * x;
                } else {
                    off += x * x;
                }
            }
        }
        (off.sqrt(), dia.sqrt())
    };

    let mut sweeps = 0;
    loop {
        let (off, dia) = norms(&a);
        if off <= tol * (1.0 + dia) {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NonConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - sn * akq;
                    a[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sn * aqk;
                    a[q * n + k] = sn * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - sn * vkq;
                    v[k * n + q] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let raw: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let order = tie_stable_order(&raw);

    let mut values = Vec::with_capacity(n);
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        values.push(raw[src]);
        let col: Vec<f64> = (0..n).map(|i| v[i * n + src]).collect();
        let sign = sign_of_dominant(&col);
        for (i, x) in col.into_iter().enumerate() {
            vectors[i * n + dst] = sign * x;
        }
    }
    Ok(EigDecomposition {
        values,
        vectors: GenMatrix { n, data: vectors },
    })
}

/// Ascending order of `values`; runs of near-equal values are reordered
/// by original index.
fn tie_stable_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() {
            let prev = values[idx[end - 1]];
            if (values[idx[end]] - prev).abs() <= TIE_TOL * (1.0 + prev.abs()) {
                end += 1;
            } else {
                break;
            }
        }
        idx[start..end].sort_unstable();
        start = end;
    }
    idx
}

/// `+1` or `-1`, chosen so the largest-magnitude entry becomes
/// non-negative. Entries within `1e-12` of the maximum count as tied and
/// the first one wins.
fn sign_of_dominant(col: &[f64]) -> f64 {
    let max = col.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let lead = col
        .iter()
        .find(|x| x.abs() >= max - 1e-12 * max.max(1.0))
        .copied()
        .unwrap_or(0.0);
    if lead < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Symmetric positive definite square root.
///
/// Diagonal input takes the entrywise square root directly; anything else
/// goes through the eigendecomposition `R = Q sqrt(L) Q^t`.
pub fn spd_sqrt(s: &SymMatrix) -> Result<SymMatrix> {
    if s.is_diagonal() {
        let d = s.diag();
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min > 0.0) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min,
            });
        }
        return SymMatrix::diagonal(&d.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
    }
    let eig = jacobi_eigh(s, JACOBI_TOL, JACOBI_MAX_SWEEPS)?;
    let min = eig.values[0];
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    let roots: Vec<f64> = eig.values.iter().map(|x| x.sqrt()).collect();
    let q = &eig.vectors;
    SymMatrix::from_fn(s.n, |i, j| {
        (0..s.n).map(|k| q.get(i, k) * roots[k] * q.get(j, k)).sum()
    })
}

/// Determinant by LU with partial pivoting. Consumes a scratch copy.
fn lu_det(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        let p = a[piv * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            det = -det;
        }
        det *= p;
        for r in (col + 1)..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for k in (col + 1)..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
            }
        }
    }
    det
}

/// Determinants of the top-left `k x k` blocks for `k = 1..=n`, each from a
/// fresh LU factorisation.
pub fn leading_principal_minors(s: &SymMatrix) -> Vec<f64> {
    let n = s.n;
    (1..=n)
        .map(|k| {
            let block: Vec<f64> = (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .map(|(i, j)| s.get(i, j))
                .collect();
            lu_det(block, k)
        })
        .collect()
}

pub fn det(a: &GenMatrix) -> f64 {
    lu_det(a.data.clone(), a.n)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(a: &GenMatrix) -> Result<GenMatrix> {
    let n = a.n;
    let d = det(a);
    let threshold = 1e-14 * (1.0 + a.max_abs().powi(n as i32));
    if !(d.abs() > threshold) {
        return Err(Error::SingularMatrix { det: d });
    }
    let mut m = a.data.clone();
    let mut inv = GenMatrix::identity(n)?.data;
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
                inv.swap(col * n + k, piv * n + k);
            }
        }
        let p = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r * n + col];
            if f != 0.0 {
                for k in 0..n {
                    m[r * n + k] -= f * m[col * n + k];
                    inv[r * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    GenMatrix::from_fn(n, |i, j| inv[i * n + j])
}

pub fn matmul(a: &GenMatrix, b: &GenMatrix) -> Result<GenMatrix> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    let n = a.n;
    GenMatrix::from_fn(n, |i, j| (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum())
}

pub fn transpose(a: &GenMatrix) -> GenMatrix {
    GenMatrix::from_fn(a.n, |i, j| a.get(j, i)).expect("transpose preserves shape")
}

/// Coefficients of `det(xI - a)` in descending powers of `x`, leading `1`,
/// by the Faddeev-LeVerrier recurrence.
pub fn char_poly_coeffs(a: &GenMatrix) -> Vec<f64> {
    let n = a.n;
    let mut coeffs = vec![1.0];
    // m holds M_k; starts at M_0 = 0.
    let mut m = vec![0.0; n * n];
    for k in 1..=n {
        let prev = *coeffs.last().unwrap();
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += a.get(i, l) * m[l * n + j];
                }
                next[i * n + j] = acc;
            }
            next[i * n + i] += prev;
        }
        m = next;
        // c_{n-k} = -tr(A M_k) / k
        let mut tr = 0.0;
        for i in 0..n {
            for l in 0..n {
                tr += a.get(i, l) * m[l * n + i];
            }
        }
        coeffs.push(-tr / k as f64);
    }
    coeffs
}
