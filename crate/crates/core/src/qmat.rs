//! Dense complex linear algebra for the small registers used throughout the
//! crate: at most two physical qubits plus four ancilla qubits (dimension 64).
//!
//! Storage is row-major. Every routine is a pure function of its inputs.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance used for Hermiticity, unitarity and normalization checks.
pub const EPS: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
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

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParams("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(rows, cols, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn sigma_x() -> Self {
        Self::from_fn(2, 2, |r, c| if r != c { ONE } else { ZERO })
    }

    pub fn sigma_y() -> Self {
        Self::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => -I,
            (1, 0) => I,
            _ => ZERO,
        })
    }

    pub fn sigma_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    /// Pauli matrices in the order (σx, σy, σz).
    pub fn paulis() -> [Self; 3] {
        [Self::sigma_x(), Self::sigma_y(), Self::sigma_z()]
    }

    /// `t·𝕀 + v·σ` on a qubit.
    pub fn from_bloch(t: f64, v: [f64; 3]) -> Self {
        let [x, y, z] = v;
        Self {
            rows: 2,
            cols: 2,
            data: vec![
                C64::new(t + z, 0.0),
                C64::new(x, -y),
                C64::new(x, y),
                C64::new(t - z, 0.0),
            ],
        }
    }

    /// Inverse of [`CMatrix::from_bloch`] for a Hermitian 2×2 matrix.
    pub fn bloch_decomposition(&self) -> Result<(f64, [f64; 3])> {
        if self.rows != 2 || self.cols != 2 {
            return Err(Error::DimensionMismatch("Bloch decomposition needs 2x2".into()));
        }
        let dev = self.hermitian_deviation();
        if dev > EPS {
            return Err(Error::NotHermitian(dev));
        }
        let a = self[(0, 0)].re;
        let d = self[(1, 1)].re;
        let off = self[(1, 0)];
        Ok(((a + d) / 2.0, [off.re, off.im, (a - d) / 2.0]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_real(&self, k: f64) -> Self {
        self.scale(C64::new(k, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of |M − M†|; zero for Hermitian matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Largest entry of |U†U − 𝕀|.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self - Self::identity(self.rows)).max_abs()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs.data[k * rhs.cols + c];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `⟨u|M|v⟩`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> Result<C64> {
        Ok(inner(u, &self.apply(v)?))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

// Operator impls panic on shape mismatch; use `matmul` for a fallible product.
impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Add for CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: CMatrix) -> CMatrix {
        &self + &rhs
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: CMatrix) -> CMatrix {
        &self - &rhs
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    CMatrix::from_fn(rows, cols, |r, c| {
        a[(r / b.rows, c / b.cols)] * b[(r % b.rows, c % b.cols)]
    })
}

/// Kronecker product of a list of matrices, left to right.
pub fn tensor_all(parts: &[&CMatrix]) -> CMatrix {
    parts
        .iter()
        .skip(1)
        .fold(parts[0].clone(), |acc, m| tensor(&acc, m))
}

/// Traces out every subsystem not listed in `keep`.
///
/// `dims` lists the subsystem dimensions in tensor order; `keep` is a set of
/// subsystem indices whose relative order is preserved in the result.
pub fn partial_trace(rho: &CMatrix, keep: &[usize], dims: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if !rho.is_square() || rho.rows != total {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} density matrix for subsystem dims {dims:?}",
            rho.rows, rho.cols
        )));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "kept subsystem out of range for dims {dims:?}"
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&i| dims[i]).collect();
    let trace_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let out_dim: usize = keep_dims.iter().product();
    let env_dim: usize = trace_dims.iter().product();

    // Assemble a full multi-index from the kept and traced digits.
    let compose = |kept: usize, env: usize| -> usize {
        let mut digits = vec![0usize; dims.len()];
        let mut k = kept;
        for (pos, &d) in keep_sorted.iter().zip(&keep_dims).rev() {
            digits[*pos] = k % d;
            k /= d;
        }
        let mut e = env;
        for (pos, &d) in traced.iter().zip(&trace_dims).rev() {
            digits[*pos] = e % d;
            e /= d;
        }
        digits.iter().zip(dims).fold(0, |acc, (&dig, &d)| acc * d + dig)
    };

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        for c in 0..out_dim {
            let mut s = ZERO;
            for e in 0..env_dim {
                s += rho[(compose(r, e), compose(c, e))];
            }
            out[(r, c)] = s;
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix: `m = V·diag(values)·V†`.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, aligned with `values`.
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    /// Eigenvector of the largest eigenvalue.
    pub fn top(&self) -> (f64, Vec<C64>) {
        let last = self.values.len() - 1;
        (self.values[last], self.vector(last))
    }
}

/// Hermitian eigensolver: closed-form Bloch formula for 2×2, cyclic complex
/// Jacobi rotations otherwise.
pub fn eig_hermitian(m: &CMatrix) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("eigendecomposition needs a square matrix".into()));
    }
    let scale = m.max_abs().max(1.0);
    let dev = m.hermitian_deviation();
    if dev > EPS * scale {
        return Err(Error::NotHermitian(dev));
    }
    if m.rows == 2 {
        Ok(eig_qubit(m))
    } else {
        Ok(eig_jacobi(m))
    }
}

fn eig_qubit(m: &CMatrix) -> Eigen {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let off = (m[(1, 0)] + m[(0, 1)].conj()) * 0.5;
    let t = (a + d) / 2.0;
    let v = [off.re, off.im, (a - d) / 2.0];
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r == 0.0 {
        return Eigen {
            values: vec![t, t],
            vectors: CMatrix::identity(2),
        };
    }
    let [x, y, z] = v.map(|c| c / r);
    // Spin-up along the unit Bloch direction; spin-down is its orthogonal partner.
    let (up, down) = if z >= 0.0 {
        let c = ((1.0 + z) / 2.0).sqrt();
        let e = C64::new(x, y) / (2.0 * c);
        ([C64::new(c, 0.0), e], [-e.conj(), C64::new(c, 0.0)])
    } else {
        let s = ((1.0 - z) / 2.0).sqrt();
        let e = C64::new(x, -y) / (2.0 * s);
        ([e, C64::new(s, 0.0)], [C64::new(s, 0.0), -e.conj()])
    };
    let vectors = CMatrix {
        rows: 2,
        cols: 2,
        data: vec![down[0], up[0], down[1], up[1]],
    };
    Eigen {
        values: vec![t - r, t + r],
        vectors,
    }
}

fn eig_jacobi(m: &CMatrix) -> Eigen {
    let n = m.rows;
    let mut a = m.clone();
    // Symmetrize to remove round-off asymmetry.
    for r in 0..n {
        a[(r, r)] = C64::new(a[(r, r)].re, 0.0);
        for c in r + 1..n {
            let z = (a[(r, c)] + a[(c, r)].conj()) * 0.5;
            a[(r, c)] = z;
            a[(c, r)] = z.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();
                // Columns: A ← A·U with U = diag-phase · real rotation.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * ph_conj * s;
                    a[(k, q)] = akp * s + akq * ph_conj * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * ph_conj * s;
                    v[(k, q)] = vkp * s + vkq * ph_conj * c;
                }
                // Rows: A ← U†·A.
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
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Eigen { values, vectors }
}

/// Largest singular value, via the spectrum of `M†M`.
pub fn operator_norm(m: &CMatrix) -> f64 {
    let g = &m.adjoint() * m;
    eig_hermitian(&g)
        .map(|e| e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
        .unwrap_or(f64::NAN)
}

/// `⟨u|v⟩` (conjugate-linear in the first argument).
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn outer(u: &[C64], v: &[C64]) -> CMatrix {
    CMatrix::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
}

pub fn vsub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vadd(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vscale(a: &[C64], k: C64) -> Vec<C64> {
    a.iter().map(|x| x * k).collect()
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that must already be normalized within [`EPS`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if amps.is_empty() || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        if (n - 1.0).abs() > EPS {
            return Err(Error::InvalidParams(format!("state norm {n} is not 1")));
        }
        Ok(Self { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n = norm(&amps);
        if amps.is_empty() || n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            amps: amps.into_iter().map(|z| z / n).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Self { amps }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn phi_plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            amps: vec![C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn density(&self) -> CMatrix {
        outer(&self.amps, &self.amps)
    }

    pub fn expectation(&self, op: &CMatrix) -> Result<C64> {
        op.sandwich(&self.amps, &self.amps)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amps: kron_vec(&self.amps, &other.amps),
        }
    }

    pub fn with_global_phase(&self, theta: f64) -> Self {
        let ph = C64::from_polar(1.0, theta);
        Self {
            amps: self.amps.iter().map(|z| z * ph).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    fn random_matrix(rows: usize, cols: usize, seed: &mut u64) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| c(lcg(seed), lcg(seed)))
    }

    fn random_hermitian(n: usize, seed: &mut u64) -> CMatrix {
        let m = random_matrix(n, n, seed);
        (&m + &m.adjoint()).scale_real(0.5)
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let i4 = tensor(&CMatrix::identity(2), &CMatrix::identity(2));
        assert_eq!(i4, CMatrix::identity(4));
    }

    #[test]
    fn zz_and_xx_correlations_on_phi_plus() {
        let phi = StateVector::phi_plus();
        let zi = tensor(&CMatrix::sigma_z(), &CMatrix::identity(2));
        let iz = tensor(&CMatrix::identity(2), &CMatrix::sigma_z());
        let lhs = zi.apply(phi.amps()).unwrap();
        let rhs = iz.apply(phi.amps()).unwrap();
        assert!((inner(&lhs, &rhs) - ONE).norm() < 1e-15);

        let xx = tensor(&CMatrix::sigma_x(), &CMatrix::sigma_x());
        assert!((phi.expectation(&xx).unwrap() - ONE).norm() < 1e-15);
    }

    #[test]
    fn marginal_of_phi_plus_is_maximally_mixed() {
        let rho = StateVector::phi_plus().density();
        let b = partial_trace(&rho, &[1], &[2, 2]).unwrap();
        assert!((&b - &CMatrix::identity(2).scale_real(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn steered_projector_on_phi_plus() {
        // Tr_A[(Π⊗𝕀)|φ⁺⟩⟨φ⁺|(Π⊗𝕀)] / p with Π = (𝕀+σz)/2 gives (𝕀+σz)/2.
        let proj = (&CMatrix::identity(2) + &CMatrix::sigma_z()).scale_real(0.5);
        let p_full = tensor(&proj, &CMatrix::identity(2));
        let rho = StateVector::phi_plus().density();
        let post = &(&p_full * &rho) * &p_full;
        let prob = post.trace().re;
        let steered = partial_trace(&post, &[1], &[2, 2]).unwrap().scale_real(1.0 / prob);
        assert!((prob - 0.5).abs() < 1e-15);
        assert!((&steered - &proj).max_abs() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = CMatrix::identity(4);
        assert!(partial_trace(&rho, &[0], &[2, 3]).is_err());
        assert!(partial_trace(&rho, &[2], &[2, 2]).is_err());
    }

    #[test]
    fn sigma_z_spectrum() {
        let e = eig_hermitian(&CMatrix::sigma_z()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn qubit_eigenvectors_reconstruct() {
        let mut seed = 7;
        for _ in 0..50 {
            let m = random_hermitian(2, &mut seed);
            let e = eig_hermitian(&m).unwrap();
            let back = &(&e.vectors * &CMatrix::diag(&e.values)) * &e.vectors.adjoint();
            assert!((&back - &m).frobenius_norm() < 1e-12);
            assert!(e.vectors.unitarity_deviation() < 1e-12);
        }
    }

    #[test]
    fn jacobi_reconstructs_large_hermitian() {
        let mut seed = 11;
        for dim in [3, 4, 8, 16, 64] {
            let m = random_hermitian(dim, &mut seed);
            let e = eig_hermitian(&m).unwrap();
            let back = &(&e.vectors * &CMatrix::diag(&e.values)) * &e.vectors.adjoint();
            assert!((&back - &m).frobenius_norm() <= 1e-10, "dim {dim}");
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn jacobi_handles_degenerate_spectrum() {
        let m = CMatrix::diag(&[2.0, 2.0, -1.0, 2.0]);
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn bloch_roundtrip() {
        let m = CMatrix::from_bloch(0.3, [0.1, -0.4, 0.7]);
        let (t, v) = m.bloch_decomposition().unwrap();
        assert!((t - 0.3).abs() < 1e-15);
        assert!((v[0] - 0.1).abs() < 1e-15 && (v[1] + 0.4).abs() < 1e-15 && (v[2] - 0.7).abs() < 1e-15);
        assert_eq!(CMatrix::from_bloch(0.0, [0.0, 1.0, 0.0]), CMatrix::sigma_y());
    }

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![ONE, ONE]).is_err());
        assert!(StateVector::normalized(vec![ZERO, ZERO]).is_err());
        let s = StateVector::normalized(vec![ONE, ONE]).unwrap();
        assert!((norm(s.amps()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn operator_norm_of_scaled_pauli() {
        let m = CMatrix::sigma_x().scale_real(3.0);
        assert!((operator_norm(&m) - 3.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn mat(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols)
                .prop_map(move |v| CMatrix::from_fn(rows, cols, |r, c| {
                    let (re, im) = v[r * cols + c];
                    C64::new(re, im)
                }))
        }

        proptest! {
            #[test]
            fn tensor_is_associative(a in mat(2, 2), b in mat(2, 3), c in mat(3, 2)) {
                let left = tensor(&tensor(&a, &b), &c);
                let right = tensor(&a, &tensor(&b, &c));
                prop_assert!((&left - &right).max_abs() < 1e-12);
            }

            #[test]
            fn tensor_is_bilinear(a in mat(2, 2), a2 in mat(2, 2), b in mat(2, 2), k in -2.0f64..2.0) {
                let lhs = tensor(&(&a + &a2.scale_real(k)), &b);
                let rhs = &tensor(&a, &b) + &tensor(&a2, &b).scale_real(k);
                prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
            }

            #[test]
            fn trace_is_cyclic(a in mat(4, 4), b in mat(4, 4)) {
                let ab = (&a * &b).trace();
                let ba = (&b * &a).trace();
                prop_assert!((ab - ba).norm() < 1e-12);
            }

            #[test]
            fn partial_trace_factorizes(rho in mat(2, 2), sigma in mat(3, 3)) {
                let full = tensor(&rho, &sigma);
                let kept = partial_trace(&full, &[0], &[2, 3]).unwrap();
                let expect = rho.scale(sigma.trace());
                prop_assert!((&kept - &expect).max_abs() < 1e-12);
                let kept_b = partial_trace(&full, &[1], &[2, 3]).unwrap();
                let expect_b = sigma.scale(rho.trace());
                prop_assert!((&kept_b - &expect_b).max_abs() < 1e-12);
            }

            #[test]
            fn partial_trace_preserves_trace(m in mat(8, 8)) {
                let kept = partial_trace(&m, &[0, 2], &[2, 2, 2]).unwrap();
                prop_assert!((kept.trace() - m.trace()).norm() < 1e-12);
            }

            #[test]
            fn hermitian_reconstruction(m in mat(6, 6)) {
                let h = (&m + &m.adjoint()).scale_real(0.5);
                let e = eig_hermitian(&h).unwrap();
                let back = &(&e.vectors * &CMatrix::diag(&e.values)) * &e.vectors.adjoint();
                prop_assert!((&back - &h).frobenius_norm() <= 1e-10);
            }
        }
    }
}
