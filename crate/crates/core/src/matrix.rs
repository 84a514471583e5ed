//! Dense complex matrices of dimension 2 (one qubit) and 4 (two qubits).
//!
//! Everything in this crate lives on two qubits, so [`ComplexMatrix`] stores
//! its entries inline in a fixed 16-slot array and is `Copy`. Only the leading
//! `dim * dim` slots are meaningful.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as round-off and set to zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// Eigenvalues below `-PSD_TOL` are a hard error.
pub const PSD_TOL: f64 = 1e-9;
/// Hermiticity tolerance for the 2x2 eigensolver, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [C64; 16],
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: [ZERO; 16],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: (entries.len() as f64).sqrt() as usize,
            });
        }
        let mut m = Self::zeros(dim)?;
        m.data[..dim * dim].copy_from_slice(entries);
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::from_fn(values.len(), |r, c| {
            if r == c {
                C64::new(values[r], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub(crate) fn identity2() -> Self {
        let mut data = [ZERO; 16];
        data[0] = ONE;
        data[3] = ONE;
        Self { dim: 2, data }
    }

    pub(crate) fn identity4() -> Self {
        let mut data = [ZERO; 16];
        for i in 0..4 {
            data[i * 4 + i] = ONE;
        }
        Self { dim: 4, data }
    }

    fn from_2x2(a: C64, b: C64, c: C64, d: C64) -> Self {
        let mut data = [ZERO; 16];
        data[0] = a;
        data[1] = b;
        data[2] = c;
        data[3] = d;
        Self { dim: 2, data }
    }

    pub fn pauli_x() -> Self {
        Self::from_2x2(ZERO, ONE, ONE, ZERO)
    }

    pub fn pauli_y() -> Self {
        Self::from_2x2(ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO)
    }

    pub fn pauli_z() -> Self {
        Self::from_2x2(ONE, ZERO, ZERO, -ONE)
    }

    /// `x σx + y σy + z σz`.
    pub fn pauli_dot(x: f64, y: f64, z: f64) -> Self {
        Self::from_2x2(
            C64::new(z, 0.0),
            C64::new(x, -y),
            C64::new(x, y),
            C64::new(-z, 0.0),
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        assert!(row < self.dim && col < self.dim, "index out of bounds");
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: C64) {
        assert!(row < self.dim && col < self.dim, "index out of bounds");
        self.data[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[C64]> {
        self.entries().chunks(self.dim)
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = *self;
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= factor);
        out
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        same_dim(self, rhs)?;
        let n = self.dim;
        let mut out = Self {
            dim: n,
            data: [ZERO; 16],
        };
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        same_dim(self, rhs)?;
        let mut out = *self;
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += r;
        }
        Ok(out)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        same_dim(self, rhs)?;
        let mut out = *self;
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o -= r;
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_dim(self, other)?;
        Ok(self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                let d = (self.data[r * n + c] - self.data[c * n + r].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    /// Positive-definiteness test of `self + shift * I` via a Hermitian
    /// Cholesky factorisation. With `shift = PSD_TOL` this accepts every
    /// Hermitian matrix whose eigenvalues are all `>= -PSD_TOL`.
    pub fn is_positive_with_shift(&self, shift: f64) -> bool {
        let n = self.dim;
        let mut l = [ZERO; 16];
        for j in 0..n {
            let mut d = self.data[j * n + j].re + shift;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            // NaN pivots fail as well.
            if d.is_nan() || d <= 0.0 {
                return false;
            }
            let djj = d.sqrt();
            l[j * n + j] = C64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = self.data[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }
}

/// Kronecker product of two 2x2 matrices, `(a ⊗ b)[2i+k, 2j+l] = a[i,j] b[k,l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    for m in [a, b] {
        if m.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: m.dim,
            });
        }
    }
    let mut out = ComplexMatrix {
        dim: 4,
        data: [ZERO; 16],
    };
    for i in 0..2 {
        for j in 0..2 {
            let aij = a.data[i * 2 + j];
            for k in 0..2 {
                for l in 0..2 {
                    out.data[(2 * i + k) * 4 + (2 * j + l)] = aij * b.data[k * 2 + l];
                }
            }
        }
    }
    Ok(out)
}

/// Spectral decomposition of a 2x2 Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigen2 {
    /// Eigenvalues, largest first.
    pub values: [f64; 2],
    /// Orthogonal projectors matching `values`.
    pub projectors: [ComplexMatrix; 2],
}

/// Closed-form eigensolve for `h = a I + r·σ`: eigenvalues `a ± |r|` with
/// projectors `(I ± r̂·σ)/2`. At degeneracy the split defaults to `r̂ = ẑ`.
pub fn eig_hermitian_2x2(h: &ComplexMatrix) -> Result<Eigen2> {
    if h.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: h.dim,
        });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let dev = h.hermiticity_deviation();
    if dev > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(dev));
    }
    let h00 = h.data[0].re;
    let h11 = h.data[3].re;
    // Average the two off-diagonal entries so a tiny anti-Hermitian part cannot
    // leak into the projectors.
    let off = (h.data[1] + h.data[2].conj()) * 0.5;
    let a = 0.5 * (h00 + h11);
    let (rx, ry, rz) = (off.re, -off.im, 0.5 * (h00 - h11));
    let r = (rx * rx + ry * ry + rz * rz).sqrt();
    let (ux, uy, uz) = if r > 0.0 {
        (rx / r, ry / r, rz / r)
    } else {
        (0.0, 0.0, 1.0)
    };
    let half_axis = ComplexMatrix::pauli_dot(ux, uy, uz).scale_real(0.5);
    let half_id = ComplexMatrix::identity2().scale_real(0.5);
    Ok(Eigen2 {
        values: [a + r, a - r],
        projectors: [half_id + half_axis, half_id - half_axis],
    })
}

/// The unique Hermitian positive square root of a 2x2 PSD matrix.
pub fn positive_sqrt_2x2(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian_2x2(p)?;
    let mut roots = [0.0; 2];
    for (root, &v) in roots.iter_mut().zip(eig.values.iter()) {
        if v < -PSD_TOL {
            return Err(Error::NotPositive(v));
        }
        // Values in [-PSD_TOL, -CLAMP_TOL) are also clamped: they are below the
        // hard-error threshold and the root of a negative number is undefined.
        *root = v.max(0.0).sqrt();
    }
    Ok(eig.projectors[0].scale_real(roots[0]) + eig.projectors[1].scale_real(roots[1]))
}

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 => Ok(()),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

fn same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.dim == b.dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        })
    }
}

// Operator impls panic on a dimension mismatch; the `try_*` methods report it.

impl Add for ComplexMatrix {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.try_add(&rhs).expect("matrix dimensions must agree")
    }
}

impl Sub for ComplexMatrix {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.try_sub(&rhs).expect("matrix dimensions must agree")
    }
}

impl Mul for ComplexMatrix {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.try_mul(&rhs).expect("matrix dimensions must agree")
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl Neg for ComplexMatrix {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.rows() {
            write!(f, " ")?;
            for z in row {
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mat2(e: [(f64, f64); 4]) -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, &e.map(|(r, i)| c(r, i))).unwrap()
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let id2 = ComplexMatrix::identity(2).unwrap();
        let got = tensor(&id2, &id2).unwrap();
        assert_eq!(got, ComplexMatrix::identity(4).unwrap());
    }

    #[test]
    fn tensor_sigma_z_identity() {
        let got = tensor(&ComplexMatrix::pauli_z(), &ComplexMatrix::identity2()).unwrap();
        assert_eq!(got, ComplexMatrix::diag(&[1.0, 1.0, -1.0, -1.0]).unwrap());
    }

    #[test]
    fn singlet_xx_correlation_is_minus_one() {
        // |ψ⟩ = (|01⟩ - |10⟩)/√2, worked out by hand: ⟨ψ|σx⊗σx|ψ⟩ = -1.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [0.0, s, -s, 0.0];
        let proj = ComplexMatrix::from_fn(4, |r, col| c(psi[r] * psi[col], 0.0)).unwrap();
        let xx = tensor(&ComplexMatrix::pauli_x(), &ComplexMatrix::pauli_x()).unwrap();
        let corr = (proj * xx).trace();
        assert!((corr.re + 1.0).abs() < 1e-15 && corr.im.abs() < 1e-15);
    }

    #[test]
    fn tensor_rejects_4x4_operand() {
        let id4 = ComplexMatrix::identity(4).unwrap();
        let id2 = ComplexMatrix::identity(2).unwrap();
        assert_eq!(
            tensor(&id4, &id2),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 4
            })
        );
    }

    #[test]
    fn unsupported_dimension() {
        assert_eq!(ComplexMatrix::zeros(3), Err(Error::UnsupportedDimension(3)));
    }

    #[test]
    fn mismatched_product_is_an_error() {
        let a = ComplexMatrix::identity(2).unwrap();
        let b = ComplexMatrix::identity(4).unwrap();
        assert!(matches!(
            a.try_mul(&b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_entries_rejected() {
        let e = [c(f64::NAN, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(ComplexMatrix::from_row_major(2, &e), Err(Error::NonFinite));
    }

    #[test]
    fn sqrt_of_identity_and_scalar() {
        let id = ComplexMatrix::identity2();
        assert!(positive_sqrt_2x2(&id).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
        let half = id.scale_real(0.5);
        let want = id.scale_real(std::f64::consts::FRAC_1_SQRT_2);
        assert!(
            positive_sqrt_2x2(&half)
                .unwrap()
                .max_abs_diff(&want)
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn sqrt_of_diagonal() {
        let p = ComplexMatrix::diag(&[0.9, 0.1]).unwrap();
        let want = ComplexMatrix::diag(&[0.9f64.sqrt(), 0.1f64.sqrt()]).unwrap();
        assert!(positive_sqrt_2x2(&p).unwrap().max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn sqrt_clamps_round_off_but_rejects_negative() {
        let p = ComplexMatrix::diag(&[1.0, -1e-13]).unwrap();
        let k = positive_sqrt_2x2(&p).unwrap();
        assert_eq!(k.get(1, 1), c(0.0, 0.0));
        let bad = ComplexMatrix::diag(&[1.0, -1e-6]).unwrap();
        assert!(matches!(
            positive_sqrt_2x2(&bad),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn sqrt_rejects_non_hermitian() {
        let m = mat2([(1.0, 0.0), (0.5, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(positive_sqrt_2x2(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_sigma_z() {
        let e = eig_hermitian_2x2(&ComplexMatrix::pauli_z()).unwrap();
        assert_eq!(e.values, [1.0, -1.0]);
        assert_eq!(e.projectors[0], ComplexMatrix::diag(&[1.0, 0.0]).unwrap());
        assert_eq!(e.projectors[1], ComplexMatrix::diag(&[0.0, 1.0]).unwrap());
    }

    #[test]
    fn eig_sigma_x() {
        let e = eig_hermitian_2x2(&ComplexMatrix::pauli_x()).unwrap();
        assert_eq!(e.values, [1.0, -1.0]);
        let id = ComplexMatrix::identity2();
        let x = ComplexMatrix::pauli_x();
        let plus = (id + x).scale_real(0.5);
        let minus = (id - x).scale_real(0.5);
        assert!(e.projectors[0].max_abs_diff(&plus).unwrap() < 1e-15);
        assert!(e.projectors[1].max_abs_diff(&minus).unwrap() < 1e-15);
    }

    #[test]
    fn eig_degenerate_splits_along_z() {
        let h = ComplexMatrix::identity2().scale_real(0.3);
        let e = eig_hermitian_2x2(&h).unwrap();
        assert_eq!(e.values, [0.3, 0.3]);
        let sum = e.projectors[0] + e.projectors[1];
        assert_eq!(sum, ComplexMatrix::identity2());
    }

    #[test]
    fn cholesky_positivity_test() {
        let psd = ComplexMatrix::diag(&[0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!(psd.is_positive_with_shift(PSD_TOL));
        assert!(!psd.is_positive_with_shift(0.0));
        let neg = ComplexMatrix::diag(&[0.5, 0.5, 0.1, -1e-6]).unwrap();
        assert!(!neg.is_positive_with_shift(PSD_TOL));
    }

    fn arb_c64() -> impl Strategy<Value = C64> {
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| c(r, i))
    }

    fn arb_mat2() -> impl Strategy<Value = ComplexMatrix> {
        proptest::array::uniform4(arb_c64())
            .prop_map(|e| ComplexMatrix::from_row_major(2, &e).unwrap())
    }

    fn arb_hermitian_psd() -> impl Strategy<Value = ComplexMatrix> {
        arb_mat2().prop_map(|a| a.adjoint() * a)
    }

    fn unit_vector() -> impl Strategy<Value = (f64, f64, f64)> {
        (-1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(z, phi)| {
            let s = (1.0 - z * z).sqrt();
            (s * phi.cos(), s * phi.sin(), z)
        })
    }

    proptest! {
        #[test]
        fn tensor_is_bilinear(a in arb_mat2(), b in arb_mat2(), alpha in arb_c64()) {
            let lhs = tensor(&a.scale(alpha), &b).unwrap();
            let rhs = tensor(&a, &b).unwrap().scale(alpha);
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
            let lhs = tensor(&a, &b.scale(alpha)).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        }

        #[test]
        fn trace_of_tensor_factorises(a in arb_mat2(), b in arb_mat2()) {
            let t = tensor(&a, &b).unwrap().trace();
            prop_assert!((t - a.trace() * b.trace()).norm() < 1e-12);
        }

        #[test]
        fn sqrt_squares_back(p in arb_hermitian_psd()) {
            let k = positive_sqrt_2x2(&p).unwrap();
            prop_assert!(k.hermiticity_deviation() < 1e-12);
            prop_assert!((k * k).max_abs_diff(&p).unwrap() < 1e-12);
            let eig = eig_hermitian_2x2(&k).unwrap();
            prop_assert!(eig.values[1] >= -1e-12);
        }

        #[test]
        fn eigen_projectors_resolve_h(a in arb_mat2()) {
            let h = (a + a.adjoint()).scale_real(0.5);
            let e = eig_hermitian_2x2(&h).unwrap();
            let [p, m] = e.projectors;
            let id = ComplexMatrix::identity2();
            prop_assert!((p + m).max_abs_diff(&id).unwrap() < 1e-12);
            prop_assert!((p * m).max_abs() < 1e-12);
            prop_assert!((p * p).max_abs_diff(&p).unwrap() < 1e-12);
            let rebuilt = p.scale_real(e.values[0]) + m.scale_real(e.values[1]);
            prop_assert!(rebuilt.max_abs_diff(&h).unwrap() < 1e-12);
        }

        #[test]
        fn eig_of_unit_axis((x, y, z) in unit_vector()) {
            let e = eig_hermitian_2x2(&ComplexMatrix::pauli_dot(x, y, z)).unwrap();
            prop_assert!((e.values[0] - 1.0).abs() < 1e-12);
            prop_assert!((e.values[1] + 1.0).abs() < 1e-12);
            for p in e.projectors {
                prop_assert!((p * p).max_abs_diff(&p).unwrap() < 1e-12);
            }
        }
    }
}
