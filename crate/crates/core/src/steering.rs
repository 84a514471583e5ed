//! Steering parameters `S^{i,p}` for the `i`-th Alice and `p`-th Bob, computed
//! two ways: by the closed-form products and by explicit density-matrix
//! simulation of every earlier observer.
//!
//! The parameter is the average matched correlation
//! `S = (1/N) Σ_k λ_i η_p Tr[ρ^{i,p} (m_k·σ ⊗ n_k·σ)]`, where `ρ^{i,p}` is
//! the state after all earlier Alices and Bobs have measured and forgotten
//! their outcomes. Observer numbers are 1-based: `(1, 1)` is the first Alice
//! with the first Bob.
//!
//! For `i >= p` the closed form reads
//!
//! ```text
//! S = μ λ_i η_p d^{-(i-1)} Π_{j<p} (1 + w F(λ_{j+i-p}) F(η_j)) Π_{l<=i-p} (1 + w F(λ_l))
//! ```
//!
//! with `(w, d) = (1, 2)` for two settings, `(2, 3)` otherwise, and
//! `F(x) = √(1 - x²)`. The `p > i` case swaps the roles of the two sides.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{
    luders_matched_pair, luders_one_side, polyhedron_settings, quality_factor, SettingSet, Side,
    SUPPORTED_SETTINGS,
};
use crate::state::{two_qubit_correlation, werner_state, DensityMatrix};

const FRAC_1_SQRT_3: f64 = 0.577_350_269_189_625_8;

/// `C_N` for the supported setting counts. The `N ∈ {6, 10, 16}` entries are
/// published four-digit decimals, not derived here.
#[allow(clippy::approx_constant)] // 0.5236 is a tabulated bound, not π/6
const CLASSICAL_BOUNDS: [(usize, f64); 6] = [
    (2, std::f64::consts::FRAC_1_SQRT_2),
    (3, FRAC_1_SQRT_3),
    (4, FRAC_1_SQRT_3),
    (6, 0.5393),
    (10, 0.5236),
    (16, 0.503),
];

/// Largest `S_N` any local-hidden-state model reaches with the polyhedral axes.
pub fn classical_bound(n: usize) -> Result<f64> {
    CLASSICAL_BOUNDS
        .iter()
        .find(|(k, _)| *k == n)
        .map(|(_, c)| *c)
        .ok_or(Error::UnsupportedSettings(n))
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClassicalBoundTable;

impl ClassicalBoundTable {
    pub fn get(&self, n: usize) -> Result<f64> {
        classical_bound(n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> {
        CLASSICAL_BOUNDS.iter().copied()
    }
}

impl Serialize for ClassicalBoundTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<usize, f64> = self.iter().collect();
        map.serialize(s)
    }
}

/// An initial Werner state measured by ordered chains of Alices and Bobs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario")]
pub struct Scenario {
    mu: f64,
    n_settings: usize,
    alice_sharpness: Vec<f64>,
    bob_sharpness: Vec<f64>,
}

#[derive(Deserialize)]
struct RawScenario {
    mu: f64,
    n_settings: usize,
    alice_sharpness: Vec<f64>,
    bob_sharpness: Vec<f64>,
}

impl TryFrom<RawScenario> for Scenario {
    type Error = Error;
    fn try_from(r: RawScenario) -> Result<Self> {
        Scenario::new(r.mu, r.n_settings, r.alice_sharpness, r.bob_sharpness)
    }
}

impl Scenario {
    pub fn new(
        mu: f64,
        n_settings: usize,
        alice_sharpness: Vec<f64>,
        bob_sharpness: Vec<f64>,
    ) -> Result<Self> {
        Error::check_unit_interval("mu", mu)?;
        if !SUPPORTED_SETTINGS.contains(&n_settings) {
            return Err(Error::UnsupportedSettings(n_settings));
        }
        if alice_sharpness.is_empty() || bob_sharpness.is_empty() {
            return Err(Error::NoObservers);
        }
        for &s in &alice_sharpness {
            Error::check_unit_interval("lambda", s)?;
        }
        for &s in &bob_sharpness {
            Error::check_unit_interval("eta", s)?;
        }
        Ok(Self {
            mu,
            n_settings,
            alice_sharpness,
            bob_sharpness,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn n_settings(&self) -> usize {
        self.n_settings
    }

    pub fn alice_sharpness(&self) -> &[f64] {
        &self.alice_sharpness
    }

    pub fn bob_sharpness(&self) -> &[f64] {
        &self.bob_sharpness
    }

    pub fn n_alices(&self) -> usize {
        self.alice_sharpness.len()
    }

    pub fn n_bobs(&self) -> usize {
        self.bob_sharpness.len()
    }

    /// The same scenario seen from the other side.
    pub fn swapped(&self) -> Self {
        Self {
            mu: self.mu,
            n_settings: self.n_settings,
            alice_sharpness: self.bob_sharpness.clone(),
            bob_sharpness: self.alice_sharpness.clone(),
        }
    }

    fn check_pair(&self, i: usize, p: usize) -> Result<()> {
        if i == 0 || p == 0 || i > self.n_alices() || p > self.n_bobs() {
            return Err(Error::ObserverOutOfRange {
                i,
                p,
                alices: self.n_alices(),
                bobs: self.n_bobs(),
            });
        }
        Ok(())
    }
}

/// Per-observer shrink factors of the shared correlation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Decay {
    weight: f64,
    denom: f64,
}

impl Decay {
    pub(crate) fn for_settings(n: usize) -> Self {
        if n == 2 {
            Self {
                weight: 1.0,
                denom: 2.0,
            }
        } else {
            Self {
                weight: 2.0,
                denom: 3.0,
            }
        }
    }

    /// Factor left behind by one unpaired observer.
    #[inline]
    pub(crate) fn single(&self, sharpness: f64) -> f64 {
        (1.0 + self.weight * quality_factor(sharpness)) / self.denom
    }

    /// Factor left behind by a matched Alice/Bob round.
    #[inline]
    pub(crate) fn paired(&self, lam: f64, eta: f64) -> f64 {
        (1.0 + self.weight * quality_factor(lam) * quality_factor(eta)) / self.denom
    }
}

/// Closed-form `S^{i,p}` on raw slices, without validation. `i` and `p` are
/// 1-based and must be in range.
#[inline]
pub(crate) fn closed_form_value(
    decay: Decay,
    mu: f64,
    alices: &[f64],
    bobs: &[f64],
    i: usize,
    p: usize,
) -> f64 {
    if p > i {
        return closed_form_value(decay, mu, bobs, alices, p, i);
    }
    let lead = i - p;
    let mut prod = 1.0;
    for &lam in &alices[..lead] {
        prod *= decay.single(lam);
    }
    for j in 0..p - 1 {
        prod *= decay.paired(alices[j + lead], bobs[j]);
    }
    mu * alices[i - 1] * bobs[p - 1] * prod
}

pub fn steering_parameter_closed(scenario: &Scenario, i: usize, p: usize) -> Result<f64> {
    scenario.check_pair(i, p)?;
    Ok(closed_form_value(
        Decay::for_settings(scenario.n_settings),
        scenario.mu,
        &scenario.alice_sharpness,
        &scenario.bob_sharpness,
        i,
        p,
    ))
}

/// One earlier measurement round seen by the pair `(i, p)`. Observer numbers
/// are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Round {
    Alice(usize),
    Bob(usize),
    Pair { alice: usize, bob: usize },
}

/// The earlier observers of the pair `(i, p)`, in application order.
///
/// With `i >= p` the first `i - p` Alices measure alone and the remaining
/// `p - 1` earlier Alices are matched with Bobs `1..p`, Alice `j + i - p` with
/// Bob `j`. Pairing the sharper, later Alices with the Bobs is the assignment
/// that keeps the most correlation for the pair `(i, p)`.
pub fn predecessor_schedule(i: usize, p: usize) -> Vec<Round> {
    if p > i {
        return predecessor_schedule(p, i)
            .into_iter()
            .map(|r| match r {
                Round::Alice(a) => Round::Bob(a),
                Round::Bob(b) => Round::Alice(b),
                Round::Pair { alice, bob } => Round::Pair {
                    alice: bob,
                    bob: alice,
                },
            })
            .collect();
    }
    let lead = i - p;
    let mut rounds: Vec<Round> = (1..=lead).map(Round::Alice).collect();
    rounds.extend((1..p).map(|j| Round::Pair {
        alice: j + lead,
        bob: j,
    }));
    rounds
}

/// The state `ρ^{i,p}` built by running every earlier observer's Lüders
/// channel on the initial Werner state.
pub fn shared_state(
    scenario: &Scenario,
    settings: &SettingSet,
    i: usize,
    p: usize,
) -> Result<DensityMatrix> {
    scenario.check_pair(i, p)?;
    let mut rho = werner_state(scenario.mu)?;
    let lam = |a: usize| scenario.alice_sharpness[a - 1];
    let eta = |b: usize| scenario.bob_sharpness[b - 1];
    for round in predecessor_schedule(i, p) {
        rho = match round {
            Round::Alice(a) => luders_one_side(&rho, lam(a), settings, Side::Alice)?,
            Round::Bob(b) => luders_one_side(&rho, eta(b), settings, Side::Bob)?,
            Round::Pair { alice, bob } => {
                luders_matched_pair(&rho, lam(alice), eta(bob), settings)?
            }
        };
    }
    Ok(rho)
}

/// Density-matrix evaluation of `S^{i,p}` on the canonical polyhedral axes.
pub fn steering_parameter_oracle(scenario: &Scenario, i: usize, p: usize) -> Result<f64> {
    let settings = polyhedron_settings(scenario.n_settings)?;
    steering_parameter_oracle_with(scenario, &settings, i, p)
}

/// As [`steering_parameter_oracle`], on an arbitrary matched axis set.
pub fn steering_parameter_oracle_with(
    scenario: &Scenario,
    settings: &SettingSet,
    i: usize,
    p: usize,
) -> Result<f64> {
    if settings.len() != scenario.n_settings {
        return Err(Error::SettingCount {
            expected: scenario.n_settings,
            found: settings.len(),
        });
    }
    let rho = shared_state(scenario, settings, i, p)?;
    let lam = scenario.alice_sharpness[i - 1];
    let eta = scenario.bob_sharpness[p - 1];
    let total: f64 = settings
        .alice_dirs()
        .iter()
        .zip(settings.bob_dirs())
        .map(|(m, n)| two_qubit_correlation(&rho, m, n))
        .sum();
    Ok(lam * eta * total / settings.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteeringReport {
    /// `values[i-1][p-1] = S^{i,p}`.
    pub values: Vec<Vec<f64>>,
    pub bound: f64,
    /// `S >= C_N`, boundary included.
    pub violated: Vec<Vec<bool>>,
    pub margin: Vec<Vec<f64>>,
}

impl SteeringReport {
    fn from_values(values: Vec<Vec<f64>>, bound: f64) -> Self {
        let violated = values
            .iter()
            .map(|row| row.iter().map(|&s| s >= bound).collect())
            .collect();
        let margin = values
            .iter()
            .map(|row| row.iter().map(|&s| s - bound).collect())
            .collect();
        Self {
            values,
            bound,
            violated,
            margin,
        }
    }

    pub fn violation_count(&self) -> usize {
        self.violated.iter().flatten().filter(|&&v| v).count()
    }

    pub fn all_violated(&self) -> bool {
        self.violated.iter().flatten().all(|&v| v)
    }

    /// One row per `(i, p)`, six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alice,bob,value,bound,margin,violated\n");
        for (i, row) in self.values.iter().enumerate() {
            for (p, s) in row.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{:.6},{:.6},{:.6},{}",
                    i + 1,
                    p + 1,
                    s,
                    self.bound,
                    self.margin[i][p],
                    self.violated[i][p]
                );
            }
        }
        out
    }
}

/// Closed-form report for every `(Alice, Bob)` pair.
pub fn evaluate(scenario: &Scenario) -> Result<SteeringReport> {
    let bound = classical_bound(scenario.n_settings)?;
    let decay = Decay::for_settings(scenario.n_settings);
    let values = (1..=scenario.n_alices())
        .map(|i| {
            (1..=scenario.n_bobs())
                .map(|p| {
                    closed_form_value(
                        decay,
                        scenario.mu,
                        &scenario.alice_sharpness,
                        &scenario.bob_sharpness,
                        i,
                        p,
                    )
                })
                .collect()
        })
        .collect();
    Ok(SteeringReport::from_values(values, bound))
}

/// [`evaluate`], plus the largest deviation between each closed-form entry and
/// its density-matrix recomputation.
pub fn evaluate_verified(scenario: &Scenario) -> Result<(SteeringReport, f64)> {
    let report = evaluate(scenario)?;
    let settings = polyhedron_settings(scenario.n_settings)?;
    let cells: Vec<(usize, usize)> = (1..=scenario.n_alices())
        .flat_map(|i| (1..=scenario.n_bobs()).map(move |p| (i, p)))
        .collect();
    let deviations = cells
        .par_iter()
        .map(|&(i, p)| {
            steering_parameter_oracle_with(scenario, &settings, i, p)
                .map(|s| (s - report.values[i - 1][p - 1]).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = deviations.into_iter().fold(0.0, f64::max);
    Ok((report, worst))
}
