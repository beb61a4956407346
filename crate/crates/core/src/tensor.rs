//! Dense complex linear algebra over labeled tensor products of qudit modes.
//!
//! Everything downstream (probe states, hypothesis pairs, decision operators,
//! POVM projectors) lives in a [`ComplexMatrix`]: a row-major dense matrix
//! carrying the ordered list of subsystem dimensions it acts on. The first
//! subsystem is the most significant digit of the basis index, so for equal
//! dims `d` the basis ket |abc⟩ sits at index `a·d² + b·d + c`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance for the hermiticity check in [`ComplexMatrix::eigh`].
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("matrix is not Hermitian: max asymmetry {asymmetry:.3e} exceeds {tol:.3e}")]
    NotHermitian { asymmetry: f64, tol: f64 },
    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadSubsystem { index: usize, count: usize },
    #[error("not a density operator: trace {trace:.12} deviates from 1")]
    BadTrace { trace: f64 },
    #[error("data length {got} does not match dims product squared {want}")]
    BadShape { got: usize, want: usize },
}

/// Dense complex matrix on an ordered tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dims: Vec<usize>, data: Vec<Complex64>) -> Result<Self, TensorError> {
        let n: usize = dims.iter().product();
        if data.len() != n * n {
            return Err(TensorError::BadShape {
                got: data.len(),
                want: n * n,
            });
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self {
            dims,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        let mut m = Self::zeros(dims);
        for i in 0..n {
            m.data[i * n + i] = Complex64::ONE;
        }
        m
    }

    /// Diagonal matrix on a single subsystem of dimension `entries.len()`.
    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(vec![n]);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = Complex64::new(e, 0.0);
        }
        m
    }

    /// Projector |v⟩⟨v| on the given subsystem layout.
    pub fn outer(dims: Vec<usize>, v: &[Complex64]) -> Self {
        let n = v.len();
        debug_assert_eq!(n, dims.iter().product::<usize>());
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                data.push(v[r] * v[c].conj());
            }
        }
        Self { dims, data }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension (matrix side length).
    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.size() + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        let n = self.size();
        self.data[r * n + c] = v;
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.size();
        (0..n).map(|i| self.data[i * n + i]).sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dims: self.dims.clone(),
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dims, other.dims);
        Self {
            dims: self.dims.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-Complex64::ONE))
    }

    /// In-place `self += c * other`, the accumulation primitive for mixtures.
    pub fn axpy(&mut self, c: f64, other: &Self) {
        debug_assert_eq!(self.dims, other.dims);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.size();
        debug_assert_eq!(n, other.size());
        let mut out = Self::zeros(self.dims.clone());
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.size();
        let mut out = Self::zeros(self.dims.clone());
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise deviation from hermiticity, max |A_rc − conj(A_cr)|.
    pub fn asymmetry(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        worst
    }

    /// Kronecker product; resulting dims are `self.dims ++ other.dims`.
    pub fn kron(&self, other: &Self) -> Self {
        let na = self.size();
        let nb = other.size();
        let n = na * nb;
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut data = vec![Complex64::ZERO; n * n];
        for ra in 0..na {
            for ca in 0..na {
                let a = self.data[ra * na + ca];
                if a == Complex64::ZERO {
                    continue;
                }
                for rb in 0..nb {
                    for cb in 0..nb {
                        data[(ra * nb + rb) * n + (ca * nb + cb)] = a * other.data[rb * nb + cb];
                    }
                }
            }
        }
        Self { dims, data }
    }

    /// Partial trace keeping the subsystems in `keep` (original order preserved).
    /// An empty keep-set reduces to the scalar trace as a 1×1 matrix.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self, TensorError> {
        let nsub = self.dims.len();
        for &k in keep {
            if k >= nsub {
                return Err(TensorError::BadSubsystem {
                    index: k,
                    count: nsub,
                });
            }
        }
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            let mut out = Self::zeros(vec![1]);
            out.data[0] = self.trace();
            return Ok(out);
        }
        let traced: Vec<usize> = (0..nsub).filter(|i| !keep.contains(i)).collect();
        let kd: Vec<usize> = keep.iter().map(|&i| self.dims[i]).collect();
        let td: Vec<usize> = traced.iter().map(|&i| self.dims[i]).collect();
        let nk: usize = kd.iter().product();
        let nt: usize = td.iter().product();
        let n = self.size();

        // strides of each subsystem in the flat basis index
        let mut strides = vec![1usize; nsub];
        for i in (0..nsub.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }

        let flat = |subsys: &[usize], digits: &[usize]| -> usize {
            subsys
                .iter()
                .zip(digits)
                .map(|(&s, &d)| d * strides[s])
                .sum()
        };
        let unrank = |mut x: usize, dims: &[usize]| -> Vec<usize> {
            let mut out = vec![0usize; dims.len()];
            for i in (0..dims.len()).rev() {
                out[i] = x % dims[i];
                x /= dims[i];
            }
            out
        };

        let mut out = Self::zeros(kd.clone());
        for rk in 0..nk {
            let rkd = unrank(rk, &kd);
            let rbase = flat(&keep, &rkd);
            for ck in 0..nk {
                let ckd = unrank(ck, &kd);
                let cbase = flat(&keep, &ckd);
                let mut acc = Complex64::ZERO;
                for t in 0..nt {
                    let tdg = unrank(t, &td);
                    let off = flat(&traced, &tdg);
                    acc += self.data[(rbase + off) * n + (cbase + off)];
                }
                out.data[rk * nk + ck] = acc;
            }
        }
        Ok(out)
    }

    /// Hermitian eigendecomposition. The input is symmetrized as (A + A†)/2
    /// when its asymmetry is within tolerance, and rejected beyond.
    pub fn eigh(&self) -> Result<Spectrum, TensorError> {
        let scale = self.frobenius_norm().max(1.0);
        let asym = self.asymmetry();
        if asym > HERMITICITY_TOL * scale {
            return Err(TensorError::NotHermitian {
                asymmetry: asym,
                tol: HERMITICITY_TOL * scale,
            });
        }
        let n = self.size();
        let m = DMatrix::from_fn(n, n, |r, c| {
            0.5 * (self.data[r * n + c] + self.data[c * n + r].conj())
        });
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = Vec::with_capacity(n);
        for &i in &order {
            eigenvectors.push(eig.eigenvectors.column(i).iter().copied().collect());
        }
        Ok(Spectrum {
            eigenvalues,
            eigenvectors,
        })
    }

    /// Eigenvalues only (descending), skipping eigenvector accumulation.
    pub fn eigvalsh(&self) -> Result<Vec<f64>, TensorError> {
        let scale = self.frobenius_norm().max(1.0);
        let asym = self.asymmetry();
        if asym > HERMITICITY_TOL * scale {
            return Err(TensorError::NotHermitian {
                asymmetry: asym,
                tol: HERMITICITY_TOL * scale,
            });
        }
        let n = self.size();
        let m = DMatrix::from_fn(n, n, |r, c| {
            0.5 * (self.data[r * n + c] + self.data[c * n + r].conj())
        });
        let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(vals)
    }

    /// Trace norm Σ|λᵢ| via the Hermitian spectrum.
    pub fn trace_norm(&self) -> Result<f64, TensorError> {
        Ok(self.eigvalsh()?.iter().map(|l| l.abs()).sum())
    }

    /// Von Neumann entropy −Σ λ log λ of a density operator, in the given base.
    pub fn vn_entropy(&self, log_base: f64) -> Result<f64, TensorError> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(TensorError::BadTrace { trace: tr.re });
        }
        let eigs = self.eigvalsh()?;
        Ok(entropy_of_eigenvalues(&eigs, log_base))
    }
}

/// Shannon entropy of an eigenvalue list, clamping numerical noise so that
/// 0·log 0 contributes exactly 0.
pub fn entropy_of_eigenvalues(eigs: &[f64], log_base: f64) -> f64 {
    let ln_base = log_base.ln();
    eigs.iter()
        .map(|&l| {
            let l = l.clamp(0.0, 1.0);
            if l < 1e-14 {
                0.0
            } else {
                -l * l.ln() / ln_base
            }
        })
        .sum()
}

/// Eigenvalues (descending) paired with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl Spectrum {
    /// Sum of eigenprojectors for eigenvalues selected by `pred`, grouping
    /// degenerate clusters so the result is basis-independent.
    pub fn projector_where<F: Fn(f64) -> bool>(&self, dims: Vec<usize>, pred: F) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut proj = ComplexMatrix::zeros(dims);
        for i in 0..n {
            if pred(self.eigenvalues[i]) {
                let v = &self.eigenvectors[i];
                for r in 0..n {
                    for c in 0..n {
                        let add = v[r] * v[c].conj();
                        proj.data[r * n + c] += add;
                    }
                }
            }
        }
        proj
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> ComplexMatrix {
        let s = 1.0 / 2f64.sqrt();
        ComplexMatrix::outer(vec![2, 2], &[cr(s), cr(0.0), cr(0.0), cr(s)])
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(vec![2]);
        let i4 = i2.kron(&i2);
        assert_eq!(i4.dims(), &[2, 2]);
        assert_eq!(i4, ComplexMatrix::identity(vec![2, 2]));
    }

    #[test]
    fn kron_projectors() {
        let p = ComplexMatrix::diag(&[1.0, 0.0]);
        let pp = p.kron(&p);
        let want = [1.0, 0.0, 0.0, 0.0];
        for (i, &w) in want.iter().enumerate() {
            assert_eq!(pp.get(i, i), cr(w));
        }
    }

    #[test]
    fn kron_white_noise() {
        let e = ComplexMatrix::diag(&[0.5, 0.5]);
        let ee = e.kron(&e);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 0.25 } else { 0.0 };
                assert!((ee.get(i, j) - cr(want)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let v00 = [cr(1.0), cr(0.0), cr(0.0), cr(0.0)];
        let rho = ComplexMatrix::outer(vec![2, 2], &v00);
        let red = rho.partial_trace(&[0]).unwrap();
        assert_eq!(red.dims(), &[2]);
        assert!((red.get(0, 0) - cr(1.0)).norm() < 1e-15);
        assert!(red.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_bell_maximally_mixed() {
        let red = bell().partial_trace(&[0]).unwrap();
        assert!((red.get(0, 0) - cr(0.5)).norm() < 1e-12);
        assert!((red.get(1, 1) - cr(0.5)).norm() < 1e-12);
        assert!(red.get(0, 1).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let rho = bell();
        let full = rho.partial_trace(&[0, 1]).unwrap();
        let red = rho.partial_trace(&[1]).unwrap();
        assert!((full.trace() - red.trace()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_empty_keep_is_scalar_trace() {
        let rho = bell();
        let s = rho.partial_trace(&[]).unwrap();
        assert_eq!(s.dims(), &[1]);
        assert!((s.get(0, 0) - cr(1.0)).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_bad_index_is_error() {
        assert!(bell().partial_trace(&[2]).is_err());
    }

    #[test]
    fn partial_trace_of_kron_factors() {
        // Tr_B(A ⊗ B) = A · Tr(B)
        let a = ComplexMatrix::new(
            vec![2],
            vec![cr(0.3), c(0.1, 0.2), c(0.1, -0.2), cr(0.7)],
        )
        .unwrap();
        let b = ComplexMatrix::diag(&[0.9, 0.4]);
        let ab = a.kron(&b);
        let back = ab.partial_trace(&[0]).unwrap();
        let scaled = a.scale(b.trace());
        for i in 0..4 {
            assert!((back.data[i] - scaled.data[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn eigh_diagonal() {
        let m = ComplexMatrix::diag(&[3.0, 1.0]);
        let s = m.eigh().unwrap();
        assert!((s.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_white_noise_d4() {
        let m = ComplexMatrix::diag(&[0.25; 4]);
        let s = m.eigh().unwrap();
        for l in s.eigenvalues {
            assert!((l - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::new(vec![2], vec![cr(0.0), cr(1.0), cr(0.0), cr(0.0)]).unwrap();
        assert!(m.eigh().is_err());
    }

    #[test]
    fn eigh_reconstructs() {
        // deterministic pseudo-random Hermitian matrix
        let n = 16;
        let mut data = vec![Complex64::ZERO; n * n];
        let mut s = 1u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 33) as f64) / (u32::MAX as f64) - 0.5
        };
        for r in 0..n {
            for cidx in r..n {
                let v = if r == cidx {
                    cr(next())
                } else {
                    c(next(), next())
                };
                data[r * n + cidx] = v;
                data[cidx * n + r] = v.conj();
            }
        }
        let m = ComplexMatrix::new(vec![n], data).unwrap();
        let sp = m.eigh().unwrap();
        // rebuild VΛV† and compare
        let mut rec = ComplexMatrix::zeros(vec![n]);
        for i in 0..n {
            let v = &sp.eigenvectors[i];
            for r in 0..n {
                for cidx in 0..n {
                    rec.data[r * n + cidx] += cr(sp.eigenvalues[i]) * v[r] * v[cidx].conj();
                }
            }
        }
        assert!(rec.sub(&m).frobenius_norm() < 1e-10 * m.frobenius_norm().max(1.0));
        // orthonormality
        for i in 0..n {
            for j in 0..n {
                let dot: Complex64 = sp.eigenvectors[i]
                    .iter()
                    .zip(&sp.eigenvectors[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - cr(want)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn trace_norm_basics() {
        let z = ComplexMatrix::zeros(vec![2]);
        assert!(z.trace_norm().unwrap() < 1e-15);
        let rho = bell();
        assert!((rho.trace_norm().unwrap() - 1.0).abs() < 1e-10);
        // scalar multiple of a density operator
        let m = rho.scale(cr(-0.2));
        assert!((m.trace_norm().unwrap() - 0.2).abs() < 1e-10);
    }

    #[test]
    fn vn_entropy_pure_and_mixed() {
        assert!(bell().vn_entropy(2.0).unwrap().abs() < 1e-10);
        let mix = ComplexMatrix::diag(&[0.25; 4]);
        assert!((mix.vn_entropy(2.0).unwrap() - 2.0).abs() < 1e-10);
        // ½|0⟩⟨0| + ½·I/2 has eigenvalues {3/4, 1/4}
        let rho = ComplexMatrix::diag(&[0.75, 0.25]);
        let want = -(0.75f64.log2() * 0.75 + 0.25f64.log2() * 0.25);
        assert!((rho.vn_entropy(2.0).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn vn_entropy_rejects_bad_trace() {
        let m = ComplexMatrix::diag(&[0.9, 0.3]);
        assert!(m.vn_entropy(2.0).is_err());
    }
}
