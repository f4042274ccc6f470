//! Compressed sparse row matrices over `Complex64` and a cyclic tridiagonal
//! solver (banded LU with partial pivoting plus a Sherman-Morrison corner fix).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub data: Vec<C64>,
}

impl Csr {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Csr { nrows, ncols, indptr: vec![0; nrows + 1], indices: vec![], data: vec![] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let n = d.len();
        Csr {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: d.to_vec(),
        }
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        Self::from_diag(&d.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>())
    }

    /// Duplicate entries are summed; exact zeros are kept out.
    pub fn from_triplets(nrows: usize, ncols: usize, trips: &[(usize, usize, C64)]) -> Self {
        let mut rows: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nrows];
        for &(i, j, v) in trips {
            assert!(i < nrows && j < ncols, "triplet out of bounds");
            rows[i].push((j, v));
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut acc = C64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == j {
                    acc += row[k].1;
                    k += 1;
                }
                if acc != C64::new(0.0, 0.0) {
                    indices.push(j);
                    data.push(acc);
                }
            }
            indptr.push(indices.len());
        }
        Csr { nrows, ncols, indptr, indices, data }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                out.push((i, self.indices[k], self.data[k]));
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.indptr[i + 1] - self.indptr[i]
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        for k in self.indptr[i]..self.indptr[i + 1] {
            if self.indices[k] == j {
                return self.data[k];
            }
        }
        C64::new(0.0, 0.0)
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            y[i] = acc;
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// Product with a real vector, real part of the result.
    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        let xc: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
        self.apply(&xc).into_iter().map(|z| z.re).collect()
    }

    pub fn adjoint(&self) -> Csr {
        let trips: Vec<_> = self.triplets().into_iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        Csr::from_triplets(self.ncols, self.nrows, &trips)
    }

    pub fn transpose(&self) -> Csr {
        let trips: Vec<_> = self.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect();
        Csr::from_triplets(self.ncols, self.nrows, &trips)
    }

    pub fn scale(&self, s: C64) -> Csr {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `alpha*self + beta*other`.
    pub fn axpby(&self, alpha: C64, other: &Csr, beta: C64) -> Csr {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut trips: Vec<_> = self.triplets().into_iter().map(|(i, j, v)| (i, j, alpha * v)).collect();
        trips.extend(other.triplets().into_iter().map(|(i, j, v)| (i, j, beta * v)));
        Csr::from_triplets(self.nrows, self.ncols, &trips)
    }

    pub fn add(&self, other: &Csr) -> Csr {
        self.axpby(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &Csr) -> Csr {
        self.axpby(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    pub fn matmul(&self, other: &Csr) -> Csr {
        assert_eq!(self.ncols, other.nrows);
        let mut trips = Vec::new();
        for i in 0..self.nrows {
            for k in self.indptr[i]..self.indptr[i + 1] {
                let m = self.indices[k];
                for l in other.indptr[m]..other.indptr[m + 1] {
                    trips.push((i, other.indices[l], self.data[k] * other.data[l]));
                }
            }
        }
        Csr::from_triplets(self.nrows, other.ncols, &trips)
    }

    /// diag(d) * self
    pub fn left_diag(&self, d: &[C64]) -> Csr {
        let mut out = self.clone();
        for i in 0..self.nrows {
            for k in out.indptr[i]..out.indptr[i + 1] {
                out.data[k] *= d[i];
            }
        }
        out
    }

    /// self * diag(d)
    pub fn right_diag(&self, d: &[C64]) -> Csr {
        let mut out = self.clone();
        for k in 0..out.data.len() {
            out.data[k] *= d[out.indices[k]];
        }
        out
    }

    pub fn kron(a: &Csr, b: &Csr) -> Csr {
        let mut trips = Vec::with_capacity(a.nnz() * b.nnz());
        for (i, j, v) in a.triplets() {
            for (k, l, w) in b.triplets() {
                trips.push((i * b.nrows + k, j * b.ncols + l, v * w));
            }
        }
        Csr::from_triplets(a.nrows * b.nrows, a.ncols * b.ncols, &trips)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// max |M - M^dagger|
    pub fn hermitian_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    pub fn column_sums(&self) -> Vec<C64> {
        let mut s = vec![C64::new(0.0, 0.0); self.ncols];
        for k in 0..self.data.len() {
            s[self.indices[k]] += self.data[k];
        }
        s
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<C64>, drop_tol: f64) -> Csr {
        let mut trips = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)].norm() > drop_tol {
                    trips.push((i, j, m[(i, j)]));
                }
            }
        }
        Csr::from_triplets(m.nrows(), m.ncols(), &trips)
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }
}

/// Square matrix whose nonzeros lie on the main diagonal and the two
/// neighbouring diagonals, with periodic corners.
/// Row i reads `lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1]`, indices mod n.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiag {
    pub lower: Vec<C64>,
    pub diag: Vec<C64>,
    pub upper: Vec<C64>,
}

impl CyclicTridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn from_csr(m: &Csr) -> Result<Self> {
        let n = m.nrows;
        if !m.is_square() || n < 3 {
            return Err(Error::Dimension(format!("cyclic tridiagonal needs square n >= 3, got {}x{}", m.nrows, m.ncols)));
        }
        let z = C64::new(0.0, 0.0);
        let (mut lower, mut diag, mut upper) = (vec![z; n], vec![z; n], vec![z; n]);
        for (i, j, v) in m.triplets() {
            if j == i {
                diag[i] += v;
            } else if j == (i + n - 1) % n {
                lower[i] += v;
            } else if j == (i + 1) % n {
                upper[i] += v;
            } else {
                return Err(Error::Dimension(format!("entry ({i},{j}) outside the cyclic band")));
            }
        }
        Ok(CyclicTridiag { lower, diag, upper })
    }

    pub fn to_csr(&self) -> Csr {
        let n = self.len();
        let mut trips = Vec::with_capacity(3 * n);
        for i in 0..n {
            trips.push((i, (i + n - 1) % n, self.lower[i]));
            trips.push((i, i, self.diag[i]));
            trips.push((i, (i + 1) % n, self.upper[i]));
        }
        Csr::from_triplets(n, n, &trips)
    }

    /// `alpha*I + beta*self`
    pub fn shifted(&self, alpha: C64, beta: C64) -> Self {
        CyclicTridiag {
            lower: self.lower.iter().map(|&v| beta * v).collect(),
            diag: self.diag.iter().map(|&v| alpha + beta * v).collect(),
            upper: self.upper.iter().map(|&v| beta * v).collect(),
        }
    }

    /// `alpha*self + beta*other`
    pub fn combine(&self, alpha: C64, other: &Self, beta: C64) -> Self {
        let f = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(&x, &y)| alpha * x + beta * y).collect();
        CyclicTridiag {
            lower: f(&self.lower, &other.lower),
            diag: f(&self.diag, &other.diag),
            upper: f(&self.upper, &other.upper),
        }
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        let n = self.len();
        y[0] = self.lower[0] * x[n - 1] + self.diag[0] * x[0] + self.upper[0] * x[1];
        for i in 1..n - 1 {
            y[i] = self.lower[i] * x[i - 1] + self.diag[i] * x[i] + self.upper[i] * x[i + 1];
        }
        y[n - 1] = self.lower[n - 1] * x[n - 2] + self.diag[n - 1] * x[n - 1] + self.upper[n - 1] * x[0];
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.len()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.lower.iter().chain(&self.diag).chain(&self.upper).map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// LU factors of a (non-cyclic) tridiagonal matrix with partial pivoting,
/// following the LAPACK gttrf layout (a second superdiagonal appears).
#[derive(Debug, Clone)]
struct TridiagLu {
    dl: Vec<C64>,
    /// Inverted pivots.
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    ipiv: Vec<bool>, // true when rows i and i+1 were swapped
}

impl TridiagLu {
    fn factor(mut dl: Vec<C64>, mut d: Vec<C64>, mut du: Vec<C64>) -> Result<Self> {
        let n = d.len();
        let z = C64::new(0.0, 0.0);
        let mut du2 = vec![z; n.saturating_sub(2)];
        let mut ipiv = vec![false; n];
        for i in 0..n - 1 {
            if d[i].norm() >= dl[i].norm() {
                if d[i] == z {
                    return Err(Error::Singular(format!("zero pivot at row {i}")));
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i < n - 2 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du[i + 1];
                }
                ipiv[i] = true;
            }
        }
        if d[n - 1] == z {
            return Err(Error::Singular("zero pivot at last row".into()));
        }
        // reciprocals: back substitution multiplies instead of dividing
        for di in d.iter_mut() {
            *di = di.inv();
        }
        Ok(TridiagLu { dl, d, du, du2, ipiv })
    }

    fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.ipiv[i] {
                b.swap(i, i + 1);
            }
            let t = b[i];
            b[i + 1] -= self.dl[i] * t;
        }
        b[n - 1] *= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) * self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) * self.d[i];
        }
    }
}

/// Factored cyclic tridiagonal system, reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct CyclicSolver {
    lu: TridiagLu,
    z: Vec<C64>,
    gamma: C64,
    beta: C64,
    denom: C64,
}

impl CyclicSolver {
    pub fn new(m: &CyclicTridiag) -> Result<Self> {
        let n = m.len();
        if n < 3 {
            return Err(Error::Dimension("cyclic solver needs n >= 3".into()));
        }
        // corners: beta = M[0][n-1], alpha = M[n-1][0]
        let beta = m.lower[0];
        let alpha = m.upper[n - 1];
        let gamma = if m.diag[0].norm() > 0.0 { -m.diag[0] } else { C64::new(-1.0, 0.0) };
        let mut d = m.diag.clone();
        d[0] -= gamma;
        d[n - 1] -= alpha * beta / gamma;
        let dl: Vec<C64> = m.lower[1..].to_vec();
        let du: Vec<C64> = m.upper[..n - 1].to_vec();
        let lu = TridiagLu::factor(dl, d, du)?;
        let mut z = vec![C64::new(0.0, 0.0); n];
        z[0] = gamma;
        z[n - 1] = alpha;
        lu.solve_in_place(&mut z);
        let denom = C64::new(1.0, 0.0) + z[0] + beta / gamma * z[n - 1];
        if denom.norm() < 1e-300 {
            return Err(Error::Singular("Sherman-Morrison denominator vanished".into()));
        }
        Ok(CyclicSolver { lu, z, gamma, beta, denom })
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = b.len();
        self.lu.solve_in_place(b);
        let fact = (b[0] + self.beta / self.gamma * b[n - 1]) / self.denom;
        for (bi, zi) in b.iter_mut().zip(&self.z) {
            *bi -= fact * zi;
        }
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn to_complex(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn cyclic_solver_matches_dense() {
        let n = 7;
        let mut m = CyclicTridiag { lower: vec![], diag: vec![], upper: vec![] };
        for i in 0..n {
            let t = i as f64;
            m.lower.push(c(0.3 + 0.1 * t, -2.0));
            m.diag.push(c(0.05 * t, 0.7));
            m.upper.push(c(-1.5, 0.2 * t));
        }
        let b: Vec<C64> = (0..n).map(|i| c(i as f64, 1.0 - i as f64)).collect();
        let x = CyclicSolver::new(&m).unwrap().solve(&b);
        let r = m.apply(&x);
        for i in 0..n {
            assert!((r[i] - b[i]).norm() < 1e-11, "row {i}");
        }
    }

    #[test]
    fn csr_roundtrip_and_adjoint() {
        let m = Csr::from_triplets(3, 3, &[(0, 1, c(1.0, 2.0)), (2, 0, c(-1.0, 0.0)), (0, 1, c(1.0, 0.0))]);
        assert_eq!(m.get(0, 1), c(2.0, 2.0));
        assert_eq!(m.adjoint().get(1, 0), c(2.0, -2.0));
        let t = CyclicTridiag::from_csr(&m).unwrap();
        assert_eq!(t.to_csr(), m);
    }
}
