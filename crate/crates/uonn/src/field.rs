//! Complex field vectors, complex matrices, unitarity checks, and seeded
//! Haar-random unitary generation.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// A length-N vector of complex optical field amplitudes.
///
/// Length is fixed at construction and all entries are finite.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldVec {
    amps: Array1<Complex64>,
}

impl FieldVec {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidArgument("field vector must have length >= 1".into()));
        }
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("field vector"));
        }
        Ok(Self { amps: Array1::from(amps) })
    }

    /// Basis field: unit amplitude on `mode`, zero elsewhere.
    pub fn basis(n: usize, mode: usize) -> Result<Self> {
        if mode >= n {
            return Err(Error::InvalidArgument(format!("mode {mode} out of range for {n} modes")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[mode] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub(crate) fn from_array(amps: Array1<Complex64>) -> Self {
        Self { amps }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amps(&self) -> &Array1<Complex64> {
        &self.amps
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.amps[k]
    }

    pub fn to_vec(&self) -> Vec<Complex64> {
        self.amps.to_vec()
    }

    /// Total optical power sum_k |amps_k|^2.
    pub fn power(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// self + c * other, elementwise.
    pub fn add_scaled(&self, other: &FieldVec, c: Complex64) -> Result<FieldVec> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                context: "field add",
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(FieldVec::from_array(&self.amps + &other.amps.mapv(|z| z * c)))
    }

    /// Largest elementwise |self_k - other_k|.
    pub fn max_abs_diff(&self, other: &FieldVec) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// A dense rectangular complex matrix, row-major semantics.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    data: Array2<Complex64>,
}

impl CMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidArgument("matrix must be non-empty".into()));
        }
        let ncols = rows[0].len();
        if !rows.iter().all(|r| r.len() == ncols) {
            return Err(Error::InvalidArgument("matrix rows have unequal lengths".into()));
        }
        let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
        if !flat.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        let nrows = flat.len() / ncols;
        Ok(Self {
            data: Array2::from_shape_vec((nrows, ncols), flat).expect("shape checked"),
        })
    }

    pub(crate) fn from_array(data: Array2<Complex64>) -> Self {
        Self { data }
    }

    pub fn identity(n: usize) -> Self {
        Self { data: Array2::eye(n) }
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[[r, c]]
    }

    pub fn data(&self) -> &Array2<Complex64> {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_array(self.data.t().mapv(|z| z.conj()))
    }

    /// Matrix product self * rhs.
    pub fn mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.ncols() != rhs.nrows() {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: self.ncols(),
                got: rhs.nrows(),
            });
        }
        Ok(CMatrix::from_array(self.data.dot(&rhs.data)))
    }

    /// Frobenius norm of self - other.
    pub fn frobenius_distance(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ||M^dag M - I||_F for a square matrix.
    pub fn unitarity_residual(&self) -> Result<f64> {
        if self.nrows() != self.ncols() {
            return Err(Error::NotSquare { rows: self.nrows(), cols: self.ncols() });
        }
        let prod = self.adjoint().data.dot(&self.data);
        let n = self.nrows();
        let mut acc = 0.0;
        for r in 0..n {
            for c in 0..n {
                let expected = if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                acc += (prod[[r, c]] - expected).norm_sqr();
            }
        }
        Ok(acc.sqrt())
    }

    /// True iff ||M^dag M - I||_F <= tol. Errors on non-square input.
    pub fn is_unitary(&self, tol: f64) -> Result<bool> {
        Ok(self.unitarity_residual()? <= tol)
    }
}

/// Apply a matrix to a field: result_k = sum_j U_kj v_j.
pub fn mat_apply(u: &CMatrix, v: &FieldVec) -> Result<FieldVec> {
    if u.ncols() != v.len() {
        return Err(Error::DimensionMismatch {
            context: "mat_apply",
            expected: u.ncols(),
            got: v.len(),
        });
    }
    Ok(FieldVec::from_array(u.data.dot(v.amps())))
}

/// A square matrix validated as unitary at construction.
#[derive(Clone, Debug)]
pub struct UnitaryMatrix {
    inner: CMatrix,
    tol: f64,
}

/// Default unitarity tolerance used by validated constructors.
pub const UNITARY_TOL: f64 = 1e-10;

impl UnitaryMatrix {
    /// Validate `m` against `tol` and wrap it.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        let residual = m.unitarity_residual()?;
        if residual > tol {
            return Err(Error::NotUnitary { residual, tol });
        }
        Ok(Self { inner: m, tol })
    }

    /// Wrap without the unitarity check. Caller guarantees the invariant.
    pub fn new_unchecked(m: CMatrix, tol: f64) -> Self {
        debug_assert!(m.unitarity_residual().map(|r| r <= tol).unwrap_or(false));
        Self { inner: m, tol }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }
}

impl std::ops::Deref for UnitaryMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.inner
    }
}

/// Haar-distributed random unitary, a pure function of (n, seed).
///
/// QR of a standard complex Gaussian matrix via modified Gram-Schmidt with a
/// re-orthogonalization pass; the R diagonal comes out real positive, which
/// fixes the phase gauge and makes Q Haar-distributed.
pub fn random_unitary(n: usize, seed: u64) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("random_unitary requires n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norm = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * norm, im * norm)
                })
                .collect()
        })
        .collect();

    for k in 0..n {
        // two orthogonalization passes keep the residual near machine precision
        for _pass in 0..2 {
            let (done, rest) = cols.split_at_mut(k);
            let col_k = &mut rest[0];
            for qj in done.iter() {
                let proj: Complex64 =
                    qj.iter().zip(col_k.iter()).map(|(q, a)| q.conj() * a).sum();
                for (x, q) in col_k.iter_mut().zip(qj.iter()) {
                    *x -= proj * q;
                }
            }
        }
        let nrm: f64 = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return Err(Error::NonFinite("degenerate Gaussian sample"));
        }
        for z in cols[k].iter_mut() {
            *z /= nrm;
        }
    }

    let mut data = Array2::zeros((n, n));
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            data[[r, c]] = *z;
        }
    }
    UnitaryMatrix::new(CMatrix::from_array(data), UNITARY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mat_apply_identity() {
        let v = FieldVec::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let out = mat_apply(&CMatrix::identity(2), &v).unwrap();
        assert_eq!(out.to_vec(), v.to_vec());
    }

    #[test]
    fn mat_apply_phase_swap() {
        // [[0,i],[i,0]] * [1,0] = [0,i]
        let m = CMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let v = FieldVec::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let out = mat_apply(&m, &v).unwrap();
        assert!((out.get(0) - c(0.0, 0.0)).norm() < 1e-15);
        assert!((out.get(1) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn mat_apply_beam_splitter_column() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bs = CMatrix::from_rows(vec![
            vec![c(s, 0.0), c(0.0, s)],
            vec![c(0.0, s), c(s, 0.0)],
        ])
        .unwrap();
        let v = FieldVec::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let out = mat_apply(&bs, &v).unwrap();
        assert!((out.get(0) - c(s, 0.0)).norm() < 1e-15);
        assert!((out.get(1) - c(0.0, s)).norm() < 1e-15);
    }

    #[test]
    fn mat_apply_dimension_mismatch() {
        let v = FieldVec::new(vec![c(1.0, 0.0); 3]).unwrap();
        let err = mat_apply(&CMatrix::identity(2), &v).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("expected 2") && msg.contains("got 3"), "{msg}");
    }

    #[test]
    fn is_unitary_cases() {
        assert!(CMatrix::identity(4).is_unitary(1e-10).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bs = CMatrix::from_rows(vec![
            vec![c(s, 0.0), c(0.0, s)],
            vec![c(0.0, s), c(s, 0.0)],
        ])
        .unwrap();
        assert!(bs.is_unitary(1e-10).unwrap());
        let stretch = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(!stretch.is_unitary(1e-10).unwrap());
    }

    #[test]
    fn is_unitary_rejects_non_square() {
        let m = CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(m.is_unitary(1e-10).is_err());
    }

    #[test]
    fn field_vec_rejects_non_finite() {
        assert!(FieldVec::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(FieldVec::new(vec![]).is_err());
    }

    #[test]
    fn random_unitary_scalar_has_unit_modulus() {
        let u = random_unitary(1, 123).unwrap();
        assert!((u.get(0, 0).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_deterministic() {
        let a = random_unitary(4, 7).unwrap();
        let b = random_unitary(4, 7).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn random_unitary_residual() {
        let u = random_unitary(8, 3).unwrap();
        assert!(u.unitarity_residual().unwrap() < 1e-10);
    }

    #[test]
    fn random_unitary_rejects_zero_dim() {
        assert!(random_unitary(0, 1).is_err());
    }

    proptest! {
        #[test]
        fn unitary_preserves_power(n in 1usize..8, seed in any::<u64>(), vseed in any::<u64>()) {
            let u = random_unitary(n, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(vseed);
            let amps: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let v = FieldVec::new(amps).unwrap();
            let out = mat_apply(&u, &v).unwrap();
            let rel = (out.power() - v.power()).abs() / v.power().max(1e-30);
            prop_assert!(rel < 1e-10);
        }

        #[test]
        fn adjoint_inverts_application(n in 1usize..8, seed in any::<u64>()) {
            let u = random_unitary(n, seed).unwrap();
            let v = FieldVec::basis(n, 0).unwrap();
            let fwd = mat_apply(&u, &v).unwrap();
            let back = mat_apply(&u.adjoint(), &fwd).unwrap();
            prop_assert!(back.max_abs_diff(&v) < 1e-10);
        }
    }
}
