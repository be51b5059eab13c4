//! Dense complex vectors and matrices for small Hilbert spaces (dim ≤ 16).
//!
//! Everything is a plain heap-allocated value; operations are pure functions
//! that return fresh values. The eigensolver is a cyclic Jacobi iteration on
//! Hermitian matrices, which is exact enough at these dimensions that no
//! external linear-algebra backend is needed.

use num_complex::Complex64;

use crate::{Error, Result, EIG_CLAMP_FLOOR, STRUCTURAL_TOL};

/// Complex amplitude vector over a tensor product of labeled registers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec {
    amps: Vec<Complex64>,
}

impl ComplexVec {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Dimension("vector dimension must be positive".into()));
        }
        Ok(Self { amps })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amps: vec![Complex64::ZERO; dim.max(1)],
        }
    }

    /// Computational basis ket `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Dimension(format!(
                "basis index {k} out of range for dim {dim}"
            )));
        }
        let mut v = Self::zeros(dim);
        v.amps[k] = Complex64::ONE;
        Ok(v)
    }

    pub fn from_reals(xs: &[f64]) -> Result<Self> {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, k: usize) -> Complex64 {
        self.amps[k]
    }

    pub fn set(&mut self, k: usize, z: Complex64) {
        self.amps[k] = z;
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `⟨self|other⟩` with conjugation on `self`.
    pub fn inner(&self, other: &ComplexVec) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "inner product of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            amps: self.amps.iter().map(|a| a * z).collect(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Contract("cannot normalize the zero vector".into()));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let err = (self.norm_sq() - 1.0).abs();
        if err > tol {
            return Err(Error::Contract(format!(
                "vector not normalized: |Σ|a|² − 1| = {err:.3e}"
            )));
        }
        Ok(())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &ComplexVec) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self { amps }
    }

    /// Projector `|self⟩⟨self|`.
    pub fn projector(&self) -> ComplexMat {
        let d = self.dim();
        let mut m = ComplexMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, self.amps[i] * self.amps[j].conj());
            }
        }
        m
    }

    /// Largest entrywise deviation from `other`, minimized over a global
    /// phase aligning the two vectors.
    pub fn max_diff_up_to_phase(&self, other: &ComplexVec) -> f64 {
        assert_eq!(self.dim(), other.dim());
        // Align via the phase of the overlap; for equal-up-to-phase vectors
        // this recovers the relative phase exactly.
        let ov: Complex64 = other.inner(self).unwrap_or(Complex64::ZERO);
        let phase = if ov.norm() == 0.0 {
            Complex64::ONE
        } else {
            ov / ov.norm()
        };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ComplexVec {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.amps[k]
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMat {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::Dimension(
                "matrix dimensions must be positive".into(),
            ));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows in matrix literal".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.entries[i * self.cols + j] = z;
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conjugate(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn add(&self, other: &ComplexMat) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("matrix addition shape mismatch".into()));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * z).collect(),
        }
    }

    pub fn mul(&self, other: &ComplexMat) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "matrix product {}×{} · {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &ComplexVec) -> Result<ComplexVec> {
        if self.cols != v.dim() {
            return Err(Error::Dimension(format!(
                "matrix-vector product {}×{} · {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let mut out = ComplexVec::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self.get(i, j) * v.amp(j);
            }
            out.set(i, acc);
        }
        Ok(out)
    }

    pub fn trace(&self) -> Result<Complex64> {
        if self.rows != self.cols {
            return Err(Error::Dimension("trace of a non-square matrix".into()));
        }
        Ok((0..self.rows).map(|i| self.get(i, i)).sum())
    }

    /// `Tr(ρ²)` as a real number; input must be square.
    pub fn purity(&self) -> Result<f64> {
        Ok(self.mul(self)?.trace()?.re)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &ComplexMat) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::Dimension(
                "Hermitian check on a non-square matrix".into(),
            ));
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                let err = (self.get(i, j) - self.get(j, i).conj()).norm();
                if err > tol {
                    return Err(Error::Contract(format!(
                        "matrix not Hermitian: |a[{i}][{j}] − conj(a[{j}][{i}])| = {err:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::Dimension(
                "unitarity check on a non-square matrix".into(),
            ));
        }
        let prod = self.dagger().mul(self)?;
        let err = prod.max_abs_diff(&Self::identity(self.rows));
        if err > tol {
            return Err(Error::Contract(format!(
                "matrix not unitary: max|U†U − I| = {err:.3e}"
            )));
        }
        Ok(())
    }

    /// Density-matrix contract: Hermitian within `tol`, unit trace within
    /// `tol`, eigenvalues ≥ [`EIG_CLAMP_FLOOR`].
    pub fn check_density(&self, tol: f64) -> Result<()> {
        self.check_hermitian(tol)?;
        let tr = self.trace()?;
        let err = (tr - Complex64::ONE).norm();
        if err > tol {
            return Err(Error::Contract(format!(
                "density trace off unity by {err:.3e}"
            )));
        }
        for lambda in self.herm_eigvals()? {
            clamp_eigenvalue(lambda)?;
        }
        Ok(())
    }

    /// Partial trace over the registers *not* listed in `keep`.
    ///
    /// `dims` are the per-register dimensions (their product must equal the
    /// matrix dimension); `keep` is a strictly increasing list of register
    /// indices. The result is ordered as the kept registers.
    pub fn partial_trace(&self, dims: &[usize], keep: &[usize]) -> Result<ComplexMat> {
        if self.rows != self.cols {
            return Err(Error::Dimension(
                "partial trace of a non-square matrix".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if total != self.rows || dims.contains(&0) {
            return Err(Error::Dimension(format!(
                "register dims {dims:?} do not factor dimension {}",
                self.rows
            )));
        }
        if keep.is_empty() {
            return Err(Error::Dimension(
                "partial trace must keep at least one register".into(),
            ));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || *keep.last().unwrap() >= dims.len() {
            return Err(Error::Dimension(format!(
                "kept registers {keep:?} invalid for {} registers",
                dims.len()
            )));
        }

        let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
        let mut out = ComplexMat::zeros(kept_dim, kept_dim);

        // Row-major register strides.
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }

        let decompose = |mut idx: usize| -> Vec<usize> {
            strides
                .iter()
                .zip(dims)
                .map(|(&s, &d)| {
                    let c = (idx / s) % d;
                    idx %= s;
                    c
                })
                .collect()
        };

        for i in 0..total {
            let ci = decompose(i);
            for j in 0..total {
                let cj = decompose(j);
                // Traced-out registers must agree between bra and ket.
                let diagonal_elsewhere = (0..dims.len())
                    .filter(|k| !keep.contains(k))
                    .all(|k| ci[k] == cj[k]);
                if !diagonal_elsewhere {
                    continue;
                }
                let fold = |c: &[usize]| keep.iter().fold(0usize, |acc, &k| acc * dims[k] + c[k]);
                let (oi, oj) = (fold(&ci), fold(&cj));
                let v = out.get(oi, oj) + self.get(i, j);
                out.set(oi, oj, v);
            }
        }
        Ok(out)
    }

    /// Eigenvalues and eigenvectors of a Hermitian matrix via cyclic Jacobi
    /// rotations. Eigenvalues come back nonincreasing; the i-th column of
    /// the returned matrix is the eigenvector for the i-th eigenvalue.
    pub fn herm_eig(&self) -> Result<(Vec<f64>, ComplexMat)> {
        self.check_hermitian(STRUCTURAL_TOL.max(1e-12 * self.max_abs()))?;
        let n = self.rows;

        // Work on the exactly-Hermitian average to kill sub-tolerance drift.
        let mut a = self.add(&self.dagger())?.scale(Complex64::new(0.5, 0.0));
        let mut v = ComplexMat::identity(n);

        let fro: f64 = a.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let stop = (fro * 1e-15).max(f64::MIN_POSITIVE);

        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a.get(p, q).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= stop {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    let h = apq.norm();
                    if h == 0.0 {
                        continue;
                    }
                    let u = apq / h; // e^{iφ} of the off-diagonal entry
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    // Rotation angle for the phase-stripped real 2×2 block
                    // [[app, h], [h, aqq]].
                    let tau = (app - aqq) / (2.0 * h);
                    let t = if tau >= 0.0 {
                        -1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (tau - (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    // J differs from identity only in rows/cols p and q:
                    // J[p][p] = c, J[p][q] = s, J[q][p] = −s·ū, J[q][q] = c·ū.
                    let jpp = Complex64::new(c, 0.0);
                    let jpq = Complex64::new(s, 0.0);
                    let jqp = -Complex64::new(s, 0.0) * u.conj();
                    let jqq = Complex64::new(c, 0.0) * u.conj();

                    // A ← J† A J: columns first, then rows.
                    for r in 0..n {
                        let (arp, arq) = (a.get(r, p), a.get(r, q));
                        a.set(r, p, arp * jpp + arq * jqp);
                        a.set(r, q, arp * jpq + arq * jqq);
                    }
                    for r in 0..n {
                        let (apr, aqr) = (a.get(p, r), a.get(q, r));
                        a.set(p, r, jpp.conj() * apr + jqp.conj() * aqr);
                        a.set(q, r, jpq.conj() * apr + jqq.conj() * aqr);
                    }
                    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
                    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));

                    // V ← V J accumulates the eigenbasis.
                    for r in 0..n {
                        let (vrp, vrq) = (v.get(r, p), v.get(r, q));
                        v.set(r, p, vrp * jpp + vrq * jqp);
                        v.set(r, q, vrp * jpq + vrq * jqq);
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a.get(j, j).re.partial_cmp(&a.get(i, i).re).unwrap());
        let vals: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
        let mut vecs = ComplexMat::zeros(n, n);
        for (newcol, &oldcol) in order.iter().enumerate() {
            for r in 0..n {
                vecs.set(r, newcol, v.get(r, oldcol));
            }
        }
        Ok((vals, vecs))
    }

    /// Real eigenvalues of a Hermitian matrix, nonincreasing.
    pub fn herm_eigvals(&self) -> Result<Vec<f64>> {
        Ok(self.herm_eig()?.0)
    }

    /// Principal square root of a positive semidefinite Hermitian matrix.
    pub fn sqrt_psd(&self) -> Result<ComplexMat> {
        let (vals, vecs) = self.herm_eig()?;
        let n = self.rows;
        let mut out = ComplexMat::zeros(n, n);
        let roots: Vec<f64> = vals
            .into_iter()
            .map(|l| clamp_eigenvalue(l).map(f64::sqrt))
            .collect::<Result<_>>()?;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::ZERO;
                for (k, &root) in roots.iter().enumerate() {
                    acc += vecs.get(i, k) * Complex64::new(root, 0.0) * vecs.get(j, k).conj();
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }
}

/// Roundoff-aware clamp: values in `[EIG_CLAMP_FLOOR, 0)` become 0, anything
/// more negative is an error.
pub fn clamp_eigenvalue(lambda: f64) -> Result<f64> {
    if lambda >= 0.0 {
        Ok(lambda)
    } else if lambda >= EIG_CLAMP_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::Contract(format!(
            "eigenvalue {lambda:.3e} below the roundoff floor {EIG_CLAMP_FLOOR:.1e}"
        )))
    }
}

/// Nonincreasing square roots of the eigenvalues of `ρ·ρ̃`.
///
/// `ρ̃` must be Hermitian positive semidefinite (the spin-flipped density
/// matrix is). Writing `ρ = WW†` and `ρ̃ = W̃W̃†`, the spectrum of `ρ·ρ̃`
/// equals that of `(W†W̃)†(W†W̃)`, so the λᵢ are the singular values of
/// `W†W̃`. Eigenvalue directions below the relative noise floor are dropped
/// from the factors outright; rank-deficient inputs then keep their zero
/// eigenvalues exact instead of regaining rank through roundoff, which would
/// cost √ε accuracy after the square root.
pub fn prod_spectrum_sqrt(rho: &ComplexMat, rho_tilde: &ComplexMat) -> Result<Vec<f64>> {
    if rho.rows() != 4 || rho.cols() != 4 || rho_tilde.rows() != 4 || rho_tilde.cols() != 4 {
        return Err(Error::Dimension(
            "product spectrum requires 4×4 matrices".into(),
        ));
    }
    rho.check_density(STRUCTURAL_TOL)?;
    rho_tilde.check_hermitian(STRUCTURAL_TOL)?;

    let w = psd_factor(rho)?;
    let w_tilde = psd_factor(rho_tilde)?;
    let m = w.dagger().mul(&w_tilde)?;
    let h = m.dagger().mul(&m)?;
    let h = h.add(&h.dagger())?.scale(Complex64::new(0.5, 0.0));
    h.herm_eigvals()?
        .into_iter()
        .map(|l| clamp_eigenvalue(l).map(f64::sqrt))
        .collect()
}

/// Factor `W` of a PSD matrix `A = WW†`, with noise-floor eigenvalues
/// zeroed exactly.
fn psd_factor(a: &ComplexMat) -> Result<ComplexMat> {
    let (vals, vecs) = a.herm_eig()?;
    let floor = vals[0].max(0.0) * 64.0 * f64::EPSILON;
    let n = a.rows();
    let mut w = ComplexMat::zeros(n, n);
    for (k, &lambda) in vals.iter().enumerate() {
        clamp_eigenvalue(lambda)?;
        if lambda <= floor {
            continue;
        }
        let root = Complex64::new(lambda.sqrt(), 0.0);
        for i in 0..n {
            w.set(i, k, vecs.get(i, k) * root);
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!(
            (a - b).abs() <= tol,
            "{what}: {a} vs {b} (|Δ| = {:.3e})",
            (a - b).abs()
        );
    }

    fn random_vec(rng: &mut ChaCha12Rng, dim: usize) -> ComplexVec {
        let amps = (0..dim)
            .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        ComplexVec::new(amps).unwrap()
    }

    fn random_density(rng: &mut ChaCha12Rng, dim: usize) -> ComplexMat {
        // A·A†, normalized to unit trace: Hermitian PSD by construction.
        let mut a = ComplexMat::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                a.set(
                    i,
                    j,
                    c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                );
            }
        }
        let m = a.mul(&a.dagger()).unwrap();
        let tr = m.trace().unwrap().re;
        m.scale(c(1.0 / tr, 0.0))
    }

    fn random_unitary(rng: &mut ChaCha12Rng, dim: usize) -> ComplexMat {
        // Eigenbasis of a random Hermitian matrix is unitary.
        let h = random_density(rng, dim);
        h.herm_eig().unwrap().1
    }

    #[test]
    fn tensor_basis_products() {
        let zero = ComplexVec::from_reals(&[1.0, 0.0]).unwrap();
        let one = ComplexVec::from_reals(&[0.0, 1.0]).unwrap();
        assert_eq!(
            zero.tensor(&zero).amps(),
            ComplexVec::from_reals(&[1.0, 0.0, 0.0, 0.0])
                .unwrap()
                .amps()
        );
        assert_eq!(
            zero.tensor(&one).amps(),
            ComplexVec::from_reals(&[0.0, 1.0, 0.0, 0.0])
                .unwrap()
                .amps()
        );

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexVec::from_reals(&[s, s]).unwrap();
        let prod = plus.tensor(&zero);
        let expected = ComplexVec::from_reals(&[s, 0.0, s, 0.0]).unwrap();
        for k in 0..4 {
            assert!((prod.amp(k) - expected.amp(k)).norm() < 1e-15);
        }
        prod.check_normalized(1e-12).unwrap();
    }

    #[test]
    fn tensor_associativity() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = random_vec(&mut rng, 2);
            let b = random_vec(&mut rng, 3);
            let d = random_vec(&mut rng, 2);
            let left = a.tensor(&b).tensor(&d);
            let right = a.tensor(&b.tensor(&d));
            for k in 0..left.dim() {
                assert!((left.amp(k) - right.amp(k)).norm() <= 1e-14);
            }
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let ket00 = ComplexVec::basis(4, 0).unwrap();
        let rho = ket00.projector();
        let reduced = rho.partial_trace(&[2, 2], &[0]).unwrap();
        let expected = ComplexVec::basis(2, 0).unwrap().projector();
        assert!(reduced.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn partial_trace_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexVec::from_reals(&[s, 0.0, 0.0, s]).unwrap();
        let rho = bell.projector();
        for keep in [[0usize], [1usize]] {
            let reduced = rho.partial_trace(&[2, 2], &keep).unwrap();
            let half = ComplexMat::identity(2).scale(c(0.5, 0.0));
            assert!(reduced.max_abs_diff(&half) < 1e-15);
        }
    }

    // Source state with orthogonal tags and symmetric amplitudes: tracing
    // the tag register leaves the fully dephased two-path mixture.
    #[test]
    fn partial_trace_orthogonal_tags() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Registers (path₁=2, path₂=2, tag=2): amplitude s on |0,0,tag₀⟩ and |1,1,tag₁⟩.
        let mut psi = ComplexVec::zeros(8);
        psi.set(0, c(s, 0.0)); // (0,0,0)
        psi.set(7, c(s, 0.0)); // (1,1,1)
        let reduced = psi.projector().partial_trace(&[2, 2, 2], &[0, 1]).unwrap();
        let mut expected = ComplexMat::zeros(4, 4);
        expected.set(0, 0, c(0.5, 0.0));
        expected.set(3, 3, c(0.5, 0.0));
        assert!(reduced.max_abs_diff(&expected) < 1e-15);
        assert_close(reduced.trace().unwrap().re, 1.0, 1e-12, "trace preserved");
    }

    #[test]
    fn partial_trace_composition() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..25 {
            let rho = random_density(&mut rng, 8);
            let joint = rho.partial_trace(&[2, 2, 2], &[0]).unwrap();
            let step = rho
                .partial_trace(&[2, 2, 2], &[0, 1])
                .unwrap()
                .partial_trace(&[2, 2], &[0])
                .unwrap();
            assert!(joint.max_abs_diff(&step) <= 1e-12);
        }
    }

    #[test]
    fn herm_eigvals_known_spectra() {
        let half = ComplexMat::identity(2).scale(c(0.5, 0.0));
        let vals = half.herm_eigvals().unwrap();
        assert_close(vals[0], 0.5, 1e-14, "I/2 λ0");
        assert_close(vals[1], 0.5, 1e-14, "I/2 λ1");

        let diag = ComplexMat::from_rows(&[
            vec![c(0.7, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.3, 0.0)],
        ])
        .unwrap();
        let vals = diag.herm_eigvals().unwrap();
        assert_close(vals[0], 0.7, 1e-14, "diag λ0");
        assert_close(vals[1], 0.3, 1e-14, "diag λ1");

        // Complex Hermitian [[1, i], [−i, 1]] has spectrum {2, 0}.
        let m = ComplexMat::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let vals = m.herm_eigvals().unwrap();
        assert_close(vals[0], 2.0, 1e-13, "complex λ0");
        assert_close(vals[1], 0.0, 1e-13, "complex λ1");
    }

    // Oracle: roots of the characteristic polynomial of the 2×2 conditional
    // path state at the spot parameters (diag 0.1/0.9, coherence 0.18).
    #[test]
    fn herm_eigvals_spot_matrix_matches_characteristic_polynomial() {
        let m = ComplexMat::from_rows(&[
            vec![c(0.1, 0.0), c(0.18, 0.0)],
            vec![c(0.18, 0.0), c(0.9, 0.0)],
        ])
        .unwrap();
        let disc = ((0.1f64 - 0.9).powi(2) + 4.0 * 0.18 * 0.18).sqrt();
        let oracle = [(1.0 + disc) / 2.0, (1.0 - disc) / 2.0];
        let vals = m.herm_eigvals().unwrap();
        assert_close(vals[0], oracle[0], 1e-14, "spot λ0");
        assert_close(vals[1], oracle[1], 1e-14, "spot λ1");
        // Decohered variant (no coherence term) is exactly diag(0.9, 0.1).
        let d = ComplexMat::from_rows(&[
            vec![c(0.1, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.9, 0.0)],
        ])
        .unwrap();
        let vals = d.herm_eigvals().unwrap();
        assert_close(vals[0], 0.9, 1e-14, "decohered λ0");
        assert_close(vals[1], 0.1, 1e-14, "decohered λ1");
    }

    #[test]
    fn herm_eigvals_trace_and_unitary_invariance() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for dim in [2usize, 4, 8] {
            for _ in 0..10 {
                let rho = random_density(&mut rng, dim);
                let vals = rho.herm_eigvals().unwrap();
                let sum: f64 = vals.iter().sum();
                assert_close(sum, rho.trace().unwrap().re, 1e-10, "Σλ = trace");

                let u = random_unitary(&mut rng, dim);
                u.check_unitary(1e-12).unwrap();
                let conj = u.mul(&rho).unwrap().mul(&u.dagger()).unwrap();
                let vals2 = conj.herm_eigvals().unwrap();
                for (a, b) in vals.iter().zip(&vals2) {
                    assert_close(*a, *b, 1e-10, "spectrum under conjugation");
                }
            }
        }
    }

    #[test]
    fn herm_eigvals_rejects_non_hermitian() {
        let m = ComplexMat::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(m.herm_eigvals(), Err(Error::Contract(_))));
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 4);
            let s = rho.sqrt_psd().unwrap();
            assert!(s.mul(&s).unwrap().max_abs_diff(&rho) <= 1e-12);
        }
    }

    #[test]
    fn clamp_distinguishes_roundoff_from_bugs() {
        assert_eq!(clamp_eigenvalue(-5e-11).unwrap(), 0.0);
        assert!(clamp_eigenvalue(-1e-3).is_err());
        assert_eq!(clamp_eigenvalue(0.25).unwrap(), 0.25);
    }

    fn sigma_y_pair() -> ComplexMat {
        let sy = ComplexMat::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        sy.tensor(&sy)
    }

    fn spin_flipped(rho: &ComplexMat) -> ComplexMat {
        let yy = sigma_y_pair();
        yy.mul(&rho.conjugate()).unwrap().mul(&yy).unwrap()
    }

    #[test]
    fn prod_spectrum_product_and_bell() {
        let rho = ComplexVec::basis(4, 0).unwrap().projector();
        let lambdas = prod_spectrum_sqrt(&rho, &spin_flipped(&rho)).unwrap();
        for l in lambdas {
            assert!(l.abs() < 1e-12, "product state spectrum should vanish");
        }

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexVec::from_reals(&[s, 0.0, 0.0, s])
            .unwrap()
            .projector();
        let lambdas = prod_spectrum_sqrt(&bell, &spin_flipped(&bell)).unwrap();
        assert_close(lambdas[0], 1.0, 1e-12, "Bell λ0");
        for l in &lambdas[1..] {
            assert!(l.abs() < 1e-10);
        }
    }

    // Oracle: ρ = ½|00⟩⟨00| + ½|11⟩⟨11| satisfies ρ̃ = ρ, so ρ·ρ̃ = ρ² with
    // eigenvalues {¼, ¼, 0, 0} and square roots {½, ½, 0, 0}.
    #[test]
    fn prod_spectrum_classical_mixture() {
        let mut rho = ComplexMat::zeros(4, 4);
        rho.set(0, 0, c(0.5, 0.0));
        rho.set(3, 3, c(0.5, 0.0));
        let lambdas = prod_spectrum_sqrt(&rho, &spin_flipped(&rho)).unwrap();
        assert_close(lambdas[0], 0.5, 1e-12, "mixture λ0");
        assert_close(lambdas[1], 0.5, 1e-12, "mixture λ1");
        assert!(lambdas[2].abs() < 1e-10 && lambdas[3].abs() < 1e-10);
    }

    #[test]
    fn prod_spectrum_local_unitary_invariance() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 4);
            let base = prod_spectrum_sqrt(&rho, &spin_flipped(&rho)).unwrap();
            let u = random_unitary(&mut rng, 2).tensor(&random_unitary(&mut rng, 2));
            let moved = u.mul(&rho).unwrap().mul(&u.dagger()).unwrap();
            let spun = prod_spectrum_sqrt(&moved, &spin_flipped(&moved)).unwrap();
            for (a, b) in base.iter().zip(&spun) {
                assert_close(*a, *b, 1e-9, "λ under local unitaries");
            }
        }
    }

    proptest! {
        #[test]
        fn tensor_preserves_normalization(seed in 0u64..500) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let a = random_vec(&mut rng, 3).normalized().unwrap();
            let b = random_vec(&mut rng, 4).normalized().unwrap();
            a.tensor(&b).check_normalized(1e-12).unwrap();
        }

        #[test]
        fn partial_trace_preserves_trace(seed in 0u64..200) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let rho = random_density(&mut rng, 8);
            let reduced = rho.partial_trace(&[2, 4], &[1]).unwrap();
            prop_assert!((reduced.trace().unwrap().re - 1.0).abs() <= 1e-12);
        }
    }
}
