#![allow(dead_code)]

use nalgebra::{Matrix4, UnitQuaternion, Vector3};
use num_complex::Complex64;
use rand::Rng;
use steerseq::{ComplexMatrix, DensityMatrix, Scenario, SUPPORTED_SETTINGS};

pub fn random_scenario<R: Rng>(rng: &mut R, max_alices: usize, max_bobs: usize) -> Scenario {
    let n = SUPPORTED_SETTINGS[rng.gen_range(0..SUPPORTED_SETTINGS.len())];
    let a = rng.gen_range(1..=max_alices);
    let b = rng.gen_range(1..=max_bobs);
    let mu = rng.gen_range(0.0..=1.0);
    let lam = (0..a).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let eta = (0..b).map(|_| rng.gen_range(0.0..=1.0)).collect();
    Scenario::new(mu, n, lam, eta).unwrap()
}

/// Haar-random rotation as a row-major 3x3 array.
pub fn random_rotation<R: Rng>(rng: &mut R) -> [[f64; 3]; 3] {
    let q = loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let norm2: f64 = v.iter().map(|x| x * x).sum();
        if norm2 > 1e-6 && norm2 <= 1.0 {
            break nalgebra::Quaternion::new(v[0], v[1], v[2], v[3]);
        }
    };
    let r = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
    let m = r.matrix();
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

pub fn random_axis<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Eigenvalues of a Hermitian 4x4, computed independently of the crate via
/// the real 8x8 embedding `[[Re, -Im], [Im, Re]]` (each eigenvalue twice).
pub fn eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.dim();
    let big = nalgebra::DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        let z: Complex64 = m.get(r % d, c % d);
        match (r < d, c < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = big.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.into_iter().step_by(2).collect()
}

/// A random mixed two-qubit state `G G† / Tr`.
pub fn random_state<R: Rng>(rng: &mut R) -> DensityMatrix {
    let g = Matrix4::<Complex64>::from_fn(|_, _| {
        Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
    });
    let p = g * g.adjoint();
    let tr = p.trace().re;
    let mat = ComplexMatrix::from_fn(4, |r, c| p[(r, c)] / tr).unwrap();
    DensityMatrix::new(mat).unwrap()
}
