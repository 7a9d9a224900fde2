//! Dense complex matrices sized for joint qubit-qudit spaces.
//!
//! Everything here is row-major and allocation-light; the largest matrices
//! the engines touch are `2 mu x 2 mu` with `mu <= 64`, and the hot loop only
//! ever sees 2x2 states.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Hermiticity, trace and positivity tolerance for density operators.
pub const STATE_TOL: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty shape {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for shape {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { rows: N, cols: N, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Outer product `|v><w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for (i, vi) in v.iter().enumerate() {
            for (j, wj) in w.iter().enumerate() {
                m[(i, j)] = vi * wj.conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `U X U^dagger`.
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// `[self, rhs] = self rhs - rhs self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        Ok(&self.matmul(rhs)? - &rhs.matmul(self)?)
    }

    /// Largest entrywise modulus of `self - rhs`; `inf` on shape mismatch.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entrywise max of `M - M^dagger`.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut err: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                err = err.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        err
    }

    /// Entrywise max of `U^dagger U - I`.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut s = ZERO;
                for k in 0..n {
                    s += self[(k, i)].conj() * self[(k, j)];
                }
                let target = if i == j { ONE } else { ZERO };
                err = err.max((s - target).norm());
            }
        }
        err
    }

    fn hermitian_part(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in r..self.cols {
                let v = 0.5 * (self[(r, c)] + self[(c, r)].conj());
                out[(r, c)] = v;
                out[(c, r)] = v.conj();
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: f64) -> ComplexMatrix {
        self.scale(C64::new(rhs, 0.0))
    }
}

/// Kronecker product, `(a ⊗ b)[(i p + k), (j q + l)] = a[i, j] b[k, l]` for
/// `b` of shape `p x q`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(a.rows * p, a.cols * q);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Traces out every tensor factor except `dims[keep]`.
pub fn partial_trace(joint: &ComplexMatrix, dims: &[usize], keep: usize) -> Result<ComplexMatrix> {
    if !joint.is_square() {
        return Err(Error::Dimension(format!(
            "partial trace of non-square {}x{} matrix",
            joint.rows, joint.cols
        )));
    }
    if keep >= dims.len() {
        return Err(Error::Index(format!("keep = {keep} with {} factors", dims.len())));
    }
    if dims.contains(&0) {
        return Err(Error::Dimension("zero-dimensional factor".into()));
    }
    let total: usize = dims.iter().product();
    if total != joint.rows {
        return Err(Error::Dimension(format!(
            "factor dimensions {dims:?} multiply to {total}, joint dimension is {}",
            joint.rows
        )));
    }
    let d = dims[keep];
    let left: usize = dims[..keep].iter().product();
    let right: usize = dims[keep + 1..].iter().product();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        for kp in 0..d {
            let mut s = ZERO;
            for l in 0..left {
                for r in 0..right {
                    s += joint[((l * d + k) * right + r, (l * d + kp) * right + r)];
                }
            }
            out[(k, kp)] = s;
        }
    }
    Ok(out)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    ComplexMatrix::from_rows([[ZERO, -i], [i, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]])
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `values` are sorted descending; column `n` of `vectors` is the
/// eigenvector of `values[n]`. Equal eigenvalues keep the order in which the
/// solver produced them (input basis order for diagonal input).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            for i in 0..n {
                let vik = self.vectors[(i, k)] * lam;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
pub fn eigen_hermitian_2x2(m: &ComplexMatrix) -> Result<Eigen> {
    if m.rows != 2 || m.cols != 2 {
        return Err(Error::Dimension(format!("expected 2x2, got {}x{}", m.rows, m.cols)));
    }
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    if b == ZERO {
        let (values, vectors) = if a >= d {
            (vec![a, d], ComplexMatrix::identity(2))
        } else {
            (vec![d, a], ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]))
        };
        return Ok(Eigen { values, vectors });
    }
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let nb2 = b.norm_sqr();
    let s = half_gap.hypot(b.norm());
    // lambda_+ - a, without cancellation.
    let t = if half_gap >= 0.0 { nb2 / (s + half_gap) } else { s - half_gap };
    let norm = (nb2 + t * t).sqrt();
    let p = b / norm;
    let q = C64::new(t / norm, 0.0);
    let vectors = ComplexMatrix::from_rows([[p, q.conj()], [q, -p.conj()]]);
    Ok(Eigen { values: vec![mean + s, mean - s], vectors })
}

/// Cyclic Jacobi eigensolver for Hermitian matrices of any (small) size.
pub fn eigen_hermitian(m: &ComplexMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("expected square, got {}x{}", m.rows, m.cols)));
    }
    if m.rows == 2 {
        return eigen_hermitian_2x2(m);
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = [[c, s], [-s e^{-i theta}, c e^{-i theta}]] on (p, q).
                let ph_c = phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * ph_c * s;
                    a[(k, q)] = akp * s + akq * ph_c * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ph_c * s;
                    v[(k, q)] = vkp * s + vkq * ph_c * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(Eigen { values, vectors })
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.rows < 2 {
            return Err(Error::Dimension(format!(
                "density operator must be square with dimension >= 2, got {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (error {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let eig = eigen_hermitian(&matrix)?;
        let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix })
    }

    /// Projects a numerically drifted state back onto Hermitian unit-trace
    /// matrices before validating it.
    pub fn new_normalized(matrix: ComplexMatrix) -> Result<Self> {
        let h = matrix.hermitian_part();
        let tr = h.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} cannot be normalized")));
        }
        Self::new(&h * (1.0 / tr))
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2.is_finite() && norm2 > 0.0) {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let inv = 1.0 / norm2.sqrt();
        let v: Vec<C64> = psi.iter().map(|z| z * inv).collect();
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    /// Computational basis projector `|k><k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Index(format!("basis state {k} in dimension {dim}")));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Self::new(m)
    }

    /// Qubit excited state `|up><up|`.
    pub fn up() -> Self {
        Self { matrix: ComplexMatrix::from_real_diagonal(&[1.0, 0.0]) }
    }

    /// Qubit ground state `|down><down|`.
    pub fn down() -> Self {
        Self { matrix: ComplexMatrix::from_real_diagonal(&[0.0, 1.0]) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::from_real_diagonal(&vec![1.0 / dim as f64; dim]) }
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self.matrix[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        s
    }

    /// `Tr(rho A)` for Hermitian `A`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        if op.rows != self.dim() || op.cols != self.dim() {
            return Err(Error::Dimension(format!(
                "operator {}x{} against state of dimension {}",
                op.rows,
                op.cols,
                self.dim()
            )));
        }
        let n = self.dim();
        let mut s = ZERO;
        for i in 0..n {
            for j in 0..n {
                s += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        Ok(s.re)
    }

    pub fn eigen(&self) -> Eigen {
        // The matrix is square and Hermitian by construction.
        eigen_hermitian(&self.matrix).expect("density operator is square")
    }
}

/// Bloch vector `(x, y, z)` of a qubit, `rho = (I + r . sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = Self { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("Bloch component".into()));
        }
        if b.length() > 1.0 + STATE_TOL {
            return Err(Error::BlochLength(b.length()));
        }
        Ok(b)
    }

    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn from_density(rho: &DensityOperator) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::Dimension(format!("Bloch vector of a {}-level state", rho.dim())));
        }
        let m = rho.matrix();
        // rho_10 = (x + i y) / 2
        Ok(Self {
            x: 2.0 * m[(1, 0)].re,
            y: 2.0 * m[(1, 0)].im,
            z: (m[(0, 0)] - m[(1, 1)]).re,
        })
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        let b = Self::new(self.x, self.y, self.z)?;
        let m = ComplexMatrix::from_rows([
            [C64::new(0.5 * (1.0 + b.z), 0.0), C64::new(0.5 * b.x, -0.5 * b.y)],
            [C64::new(0.5 * b.x, 0.5 * b.y), C64::new(0.5 * (1.0 - b.z), 0.0)],
        ]);
        DensityOperator::new(m)
    }
}
