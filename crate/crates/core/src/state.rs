//! Two-qubit density matrices and the Werner family.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` throughout; the first tensor
//! factor belongs to the Alices, the second to the Bobs.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{tensor, ComplexMatrix, C64, PSD_TOL};
use crate::measurement::BlochVector;

/// Hermiticity and trace tolerance for [`DensityMatrix::new`].
pub const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (eigenvalues `>= -1e-9`).
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: mat.dim(),
            });
        }
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = mat.hermiticity_deviation();
        if dev > STATE_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Trace(tr.re));
        }
        if !mat.is_positive_with_shift(PSD_TOL) {
            return Err(Error::NotPositive(min_diagonal_pivot(&mat)));
        }
        Ok(Self { mat })
    }

    /// Wraps the output of a trace-preserving completely positive map.
    pub(crate) fn from_channel_output(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.dim() == 4);
        Self { mat }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            mat: ComplexMatrix::identity4().scale_real(0.25),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// `Tr[ρ (a ⊗ b)]` for single-qubit operators `a` and `b`.
    pub fn expectation(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
        let op = tensor(a, b)?;
        Ok((self.mat * op).trace())
    }

    /// The correlation tensor `T[j][k] = Tr[ρ (σ_j ⊗ σ_k)]`.
    pub fn correlation_tensor(&self) -> [[f64; 3]; 3] {
        let paulis = [
            ComplexMatrix::pauli_x(),
            ComplexMatrix::pauli_y(),
            ComplexMatrix::pauli_z(),
        ];
        let mut t = [[0.0; 3]; 3];
        for (j, a) in paulis.iter().enumerate() {
            for (k, b) in paulis.iter().enumerate() {
                t[j][k] = self.expectation(a, b).expect("Pauli operators are 2x2").re;
            }
        }
        t
    }
}

fn min_diagonal_pivot(mat: &ComplexMatrix) -> f64 {
    (0..4)
        .map(|i| mat.get(i, i).re)
        .fold(f64::INFINITY, f64::min)
}

/// Mixing weight `μ` of a Werner state.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct WernerParams {
    mu: f64,
}

impl WernerParams {
    pub fn new(mu: f64) -> Result<Self> {
        Error::check_unit_interval("mu", mu).map(|mu| Self { mu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

impl TryFrom<f64> for WernerParams {
    type Error = Error;
    fn try_from(mu: f64) -> Result<Self> {
        Self::new(mu)
    }
}

impl From<WernerParams> for f64 {
    fn from(p: WernerParams) -> f64 {
        p.mu
    }
}

/// `|ψ⟩⟨ψ|` for the singlet `|ψ⟩ = (|01⟩ - |10⟩)/√2`.
pub fn singlet_projector() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4).expect("4 is a supported dimension");
    m.set(1, 1, C64::new(0.5, 0.0));
    m.set(2, 2, C64::new(0.5, 0.0));
    m.set(1, 2, C64::new(-0.5, 0.0));
    m.set(2, 1, C64::new(-0.5, 0.0));
    m
}

/// `ρ(μ) = μ |ψ⟩⟨ψ| + (1 - μ) I/4`.
pub fn werner_state(mu: f64) -> Result<DensityMatrix> {
    let mu = WernerParams::new(mu)?.mu();
    let mat = singlet_projector().scale_real(mu)
        + ComplexMatrix::identity4().scale_real((1.0 - mu) / 4.0);
    Ok(DensityMatrix { mat })
}

/// Projects onto the Werner family by singlet fidelity,
/// `μ̂ = (4⟨ψ|ρ|ψ⟩ - 1)/3` clamped to `[0, 1]`, and reports the max-entry
/// distance between `ρ` and `ρ(μ̂)`.
pub fn nearest_werner(rho: &DensityMatrix) -> (WernerParams, f64) {
    let m = rho.matrix();
    let fidelity = 0.5 * (m.get(1, 1) + m.get(2, 2) - m.get(1, 2) - m.get(2, 1)).re;
    let mu = ((4.0 * fidelity - 1.0) / 3.0).clamp(0.0, 1.0);
    let fitted = werner_state(mu).expect("clamped into [0, 1]");
    let dist = m
        .max_abs_diff(fitted.matrix())
        .expect("both operands are 4x4");
    (WernerParams { mu }, dist)
}

/// `Tr[ρ (m·σ ⊗ n·σ)]`.
pub fn two_qubit_correlation(rho: &DensityMatrix, m: &BlochVector, n: &BlochVector) -> f64 {
    rho.expectation(&m.sigma(), &n.sigma())
        .expect("Pauli combinations are 2x2")
        .re
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .mat
            .rows()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(D::Error::custom(
                "density matrix must be 4 rows of 4 [re, im] pairs",
            ));
        }
        let entries: Vec<C64> = rows
            .iter()
            .flatten()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        let mat = ComplexMatrix::from_row_major(4, &entries).map_err(D::Error::custom)?;
        DensityMatrix::new(mat).map_err(D::Error::custom)
    }
}
