//! Measurement directions, unsharp two-outcome measurements and the Lüders
//! channels that hand the post-measurement state to the next observer.
//!
//! An unsharp measurement along `m` with sharpness `λ` has effects
//! `Π_a = (I + (-1)^a λ m·σ)/2`. Its Kraus operators are the positive roots
//! `K_a = √Π_a`, so the averaged channel `ρ ↦ Σ_a K_a ρ K_a` keeps the
//! component of the Bloch vector along `m` and shrinks the orthogonal part by
//! the quality factor `F = √(1 - λ²)`.
//!
//! The setting `k` is chosen uniformly at random, so every channel here carries
//! a `1/N` weight and is trace preserving.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{tensor, ComplexMatrix};
use crate::state::DensityMatrix;

/// Unit-norm tolerance for [`BlochVector`].
pub const UNIT_TOL: f64 = 1e-12;

/// Setting counts with a polyhedral axis set and a tabulated classical bound.
pub const SUPPORTED_SETTINGS: [usize; 6] = [2, 3, 4, 6, 10, 16];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(norm));
        }
        Ok(Self { x, y, z })
    }

    /// Rescales a non-zero vector onto the unit sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotUnit(norm));
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub const fn x() -> Self {
        Self {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        }
    }

    pub const fn y() -> Self {
        Self {
            x: 0.0,
            y: 1.0,
            z: 0.0,
        }
    }

    pub const fn z() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// `m·σ`.
    pub fn sigma(&self) -> ComplexMatrix {
        ComplexMatrix::pauli_dot(self.x, self.y, self.z)
    }

    /// Applies a 3x3 (rotation) matrix and renormalises.
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Result<Self> {
        let v = self.components();
        let w: Vec<f64> = r
            .iter()
            .map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
            .collect();
        Self::normalized(w[0], w[1], w[2])
    }
}

impl std::ops::Neg for BlochVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

impl TryFrom<[f64; 3]> for BlochVector {
    type Error = Error;
    fn try_from([x, y, z]: [f64; 3]) -> Result<Self> {
        Self::new(x, y, z)
    }
}

impl From<BlochVector> for [f64; 3] {
    fn from(v: BlochVector) -> Self {
        v.components()
    }
}

/// Which qubit a one-sided channel acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alice,
    Bob,
}

/// Outcome `a ∈ {0, 1}` of a two-outcome measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Zero, Outcome::One];

    /// `(-1)^a`.
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Zero => 1.0,
            Outcome::One => -1.0,
        }
    }
}

/// `N` measurement axes for the Alices, paired with the anti-aligned axes
/// `n_k = -m_k` used by the matched Bobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSettingSet")]
pub struct SettingSet {
    n: usize,
    alice_dirs: Vec<BlochVector>,
    bob_dirs: Vec<BlochVector>,
}

#[derive(Deserialize)]
struct RawSettingSet {
    n: usize,
    alice_dirs: Vec<BlochVector>,
    bob_dirs: Vec<BlochVector>,
}

impl TryFrom<RawSettingSet> for SettingSet {
    type Error = Error;
    fn try_from(raw: RawSettingSet) -> Result<Self> {
        if raw.alice_dirs.len() != raw.n {
            return Err(Error::SettingCount {
                expected: raw.n,
                found: raw.alice_dirs.len(),
            });
        }
        let set = SettingSet::from_alice_dirs(raw.alice_dirs)?;
        let bob_ok = raw.bob_dirs.len() == set.n
            && raw
                .bob_dirs
                .iter()
                .zip(&set.bob_dirs)
                .all(|(a, b)| a.dot(b) > 1.0 - UNIT_TOL);
        if !bob_ok {
            return Err(Error::Unsupported(
                "bob_dirs must be the negated alice_dirs".into(),
            ));
        }
        Ok(set)
    }
}

impl SettingSet {
    /// Builds a matched set from arbitrary Alice axes; Bob's axes are negated.
    pub fn from_alice_dirs(alice_dirs: Vec<BlochVector>) -> Result<Self> {
        let n = alice_dirs.len();
        if !SUPPORTED_SETTINGS.contains(&n) {
            return Err(Error::UnsupportedSettings(n));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if alice_dirs[i].dot(&alice_dirs[j]).abs() > 1.0 - 1e-9 {
                    return Err(Error::ParallelDirections(i, j));
                }
            }
        }
        let bob_dirs = alice_dirs.iter().map(|&m| -m).collect();
        Ok(Self {
            n,
            alice_dirs,
            bob_dirs,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn alice_dirs(&self) -> &[BlochVector] {
        &self.alice_dirs
    }

    pub fn bob_dirs(&self) -> &[BlochVector] {
        &self.bob_dirs
    }

    pub fn dirs(&self, side: Side) -> &[BlochVector] {
        match side {
            Side::Alice => &self.alice_dirs,
            Side::Bob => &self.bob_dirs,
        }
    }

    /// Rotates every Alice axis by `r`; Bob's axes follow as `-r m`.
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Result<Self> {
        let dirs = self
            .alice_dirs
            .iter()
            .map(|m| m.rotated(r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_alice_dirs(dirs)
    }
}

/// Golden ratio.
const PHI: f64 = 1.618_033_988_749_895;

fn axes(raw: &[[f64; 3]]) -> Vec<BlochVector> {
    raw.iter()
        .map(|&[x, y, z]| BlochVector::normalized(x, y, z).expect("non-zero axis"))
        .collect()
}

fn icosahedron_axes() -> Vec<BlochVector> {
    // Vertices (0, ±1, ±φ) and cyclic permutations, one per antipodal pair.
    axes(&[
        [0.0, 1.0, PHI],
        [0.0, 1.0, -PHI],
        [1.0, PHI, 0.0],
        [1.0, -PHI, 0.0],
        [PHI, 0.0, 1.0],
        [-PHI, 0.0, 1.0],
    ])
}

fn dodecahedron_axes() -> Vec<BlochVector> {
    // Cube vertices (±1, ±1, ±1) plus (0, ±1/φ, ±φ) and cyclic permutations.
    let inv = 1.0 / PHI;
    axes(&[
        [1.0, 1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0],
        [1.0, 1.0, -1.0],
        [0.0, inv, PHI],
        [0.0, inv, -PHI],
        [inv, PHI, 0.0],
        [inv, -PHI, 0.0],
        [PHI, 0.0, inv],
        [-PHI, 0.0, inv],
    ])
}

/// Canonical axes through antipodal vertex pairs of a regular polyhedron:
/// square (2), octahedron (3), cube (4), icosahedron (6), dodecahedron (10),
/// and the union of the last two (16).
pub fn polyhedron_settings(n: usize) -> Result<SettingSet> {
    let dirs = match n {
        2 => vec![BlochVector::x(), BlochVector::z()],
        3 => vec![BlochVector::x(), BlochVector::y(), BlochVector::z()],
        4 => axes(&[
            [1.0, 1.0, 1.0],
            [-1.0, 1.0, 1.0],
            [1.0, -1.0, 1.0],
            [1.0, 1.0, -1.0],
        ]),
        6 => icosahedron_axes(),
        10 => dodecahedron_axes(),
        16 => {
            let mut d = icosahedron_axes();
            d.extend(dodecahedron_axes());
            d
        }
        other => return Err(Error::UnsupportedSettings(other)),
    };
    SettingSet::from_alice_dirs(dirs)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnsharpMeasurement {
    dir: BlochVector,
    sharpness: f64,
}

impl UnsharpMeasurement {
    pub fn new(dir: BlochVector, sharpness: f64) -> Result<Self> {
        let sharpness = Error::check_unit_interval("sharpness", sharpness)?;
        Ok(Self { dir, sharpness })
    }

    pub fn dir(&self) -> BlochVector {
        self.dir
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    /// Information gain `G = λ`.
    pub fn precision(&self) -> f64 {
        self.sharpness
    }

    /// `F = √(1 - λ²)`, so that `F² + G² = 1`.
    pub fn quality_factor(&self) -> f64 {
        quality_factor(self.sharpness)
    }

    /// `(I + (-1)^a λ m·σ)/2`.
    pub fn effect(&self, outcome: Outcome) -> ComplexMatrix {
        let s = outcome.sign() * self.sharpness;
        (ComplexMatrix::identity2() + self.dir.sigma().scale_real(s)).scale_real(0.5)
    }

    /// The positive root of [`effect`](Self::effect):
    /// `√((1 + s)/2) P₊ + √((1 - s)/2) P₋` with `s = (-1)^a λ` and
    /// `P± = (I ± m·σ)/2`.
    pub fn kraus(&self, outcome: Outcome) -> ComplexMatrix {
        let s = outcome.sign() * self.sharpness;
        let id = ComplexMatrix::identity2();
        let axis = self.dir.sigma();
        let plus = (id + axis).scale_real(0.5);
        let minus = (id - axis).scale_real(0.5);
        plus.scale_real((0.5 * (1.0 + s)).sqrt()) + minus.scale_real((0.5 * (1.0 - s)).sqrt())
    }
}

/// `√(1 - λ²)`, clamped at zero for round-off above `λ = 1`.
pub fn quality_factor(sharpness: f64) -> f64 {
    (1.0 - sharpness * sharpness).max(0.0).sqrt()
}

fn conjugate_sum(rho: &ComplexMatrix, ops: &[ComplexMatrix], weight: f64) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(4).expect("4 is a supported dimension");
    for op in ops {
        acc = acc + op * &(rho * &op.adjoint());
    }
    acc.scale_real(weight)
}

/// One observer measures each of the `N` settings with probability `1/N` and
/// the outcome is discarded:
/// `ρ ↦ (1/N) Σ_k Σ_a (K_{a|k} ⊗ I) ρ (K_{a|k} ⊗ I)†` for Alice,
/// and the same on the second factor for Bob.
pub fn luders_one_side(
    rho: &DensityMatrix,
    sharpness: f64,
    settings: &SettingSet,
    side: Side,
) -> Result<DensityMatrix> {
    Error::check_unit_interval("sharpness", sharpness)?;
    let id = ComplexMatrix::identity2();
    let mut ops = Vec::with_capacity(2 * settings.len());
    for &dir in settings.dirs(side) {
        let meas = UnsharpMeasurement::new(dir, sharpness)?;
        for outcome in Outcome::BOTH {
            let k = meas.kraus(outcome);
            ops.push(match side {
                Side::Alice => tensor(&k, &id)?,
                Side::Bob => tensor(&id, &k)?,
            });
        }
    }
    let out = conjugate_sum(rho.matrix(), &ops, 1.0 / settings.len() as f64);
    Ok(DensityMatrix::from_channel_output(out))
}

/// An Alice and a Bob measure matched axes `(m_k, n_k)` in the same round,
/// with sharpness `lam` and `eta` respectively.
pub fn luders_matched_pair(
    rho: &DensityMatrix,
    lam: f64,
    eta: f64,
    settings: &SettingSet,
) -> Result<DensityMatrix> {
    Error::check_unit_interval("lambda", lam)?;
    Error::check_unit_interval("eta", eta)?;
    let mut ops = Vec::with_capacity(4 * settings.len());
    for (&m, &n) in settings.alice_dirs().iter().zip(settings.bob_dirs()) {
        let alice = UnsharpMeasurement::new(m, lam)?;
        let bob = UnsharpMeasurement::new(n, eta)?;
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                ops.push(tensor(&alice.kraus(a), &bob.kraus(b))?);
            }
        }
    }
    let out = conjugate_sum(rho.matrix(), &ops, 1.0 / settings.len() as f64);
    Ok(DensityMatrix::from_channel_output(out))
}
