//! Searches over sharpness assignments: how many Alices can steer one Bob,
//! which sharpness values keep a whole chain violating, how much white noise
//! the initial state tolerates, and where two Alices and two Bobs (or three
//! and two) can all violate at once.
//!
//! Every search runs on the closed-form steering parameters, which are cheap
//! enough to evaluate millions of times. Each `S^{i,p}` grows with the current
//! sharpness and shrinks as any earlier observer measures more sharply, so the
//! best strategy for a single Bob is greedy: every Alice uses the smallest
//! sharpness that still violates, leaving the most correlation to later ones.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::SUPPORTED_SETTINGS;
use crate::steering::{classical_bound, closed_form_value, Decay};

/// Relative slack on `S >= C_N` for sharpness values that sit exactly on a
/// boundary, so round-off in the greedy inversion cannot flip a stage.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Bisection iterations; 60 halvings of `[0, 1]` reach double precision.
const BISECTION_STEPS: usize = 60;

/// Guard on chain length; the greedy chain stops far earlier for any `μ <= 1`.
const MAX_CHAIN: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observer {
    Alice(usize),
    Bob(usize),
}

impl fmt::Display for Observer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observer::Alice(i) => write!(f, "A{i}"),
            Observer::Bob(p) => write!(f, "B{p}"),
        }
    }
}

impl FromStr for Observer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Unsupported(format!("observer label {s:?}"));
        let (side, num) = s.split_at_checked(1).ok_or_else(bad)?;
        let num: usize = num.parse().map_err(|_| bad())?;
        if num == 0 {
            return Err(bad());
        }
        match side {
            "A" => Ok(Observer::Alice(num)),
            "B" => Ok(Observer::Bob(num)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Observer {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Observer {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sharpness values of one observer that are compatible with the whole chain
/// violating, `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessInterval {
    pub observer: Observer,
    pub lo: f64,
    pub hi: f64,
}

impl SharpnessInterval {
    fn fixed(observer: Observer, value: f64) -> Self {
        Self {
            observer,
            lo: value,
            hi: value,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, other: &SharpnessInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

fn check_settings(n: usize) -> Result<()> {
    if SUPPORTED_SETTINGS.contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedSettings(n))
    }
}

fn violates(value: f64, bound: f64) -> bool {
    value >= bound * (1.0 - BOUNDARY_SLACK)
}

/// Several Alices against one Bob of fixed sharpness `eta`.
#[derive(Clone, Copy, Debug)]
struct SingleBobChain {
    decay: Decay,
    bound: f64,
    mu: f64,
    eta: f64,
}

impl SingleBobChain {
    fn new(n: usize, mu: f64, eta: f64) -> Result<Self> {
        Ok(Self {
            decay: Decay::for_settings(n),
            bound: classical_bound(n)?,
            mu,
            eta,
        })
    }

    /// `S` of the Alice following `predecessors` at full sharpness.
    fn headroom(&self, predecessors: &[f64]) -> f64 {
        let prod: f64 = predecessors.iter().map(|&l| self.decay.single(l)).product();
        self.mu * self.eta * prod
    }

    /// Smallest sharpness that violates after `predecessors`, if any.
    fn min_sharpness(&self, predecessors: &[f64]) -> Option<f64> {
        let room = self.headroom(predecessors);
        if room <= 0.0 {
            return None;
        }
        let lam = self.bound / room;
        if lam > 1.0 + BOUNDARY_SLACK {
            None
        } else {
            Some(lam.min(1.0))
        }
    }

    /// Runs `n_alices` Alices: the pinned one (if any) takes its value, the
    /// last is sharp when there are at least two, the others are greedy.
    /// Returns the sharpness list if every Alice violates.
    fn run(&self, n_alices: usize, pinned: Option<(usize, f64)>) -> Option<Vec<f64>> {
        let mut lams = Vec::with_capacity(n_alices);
        for k in 0..n_alices {
            let lam = match pinned {
                Some((idx, v)) if idx == k => v,
                _ if n_alices >= 2 && k == n_alices - 1 => 1.0,
                _ => self.min_sharpness(&lams)?,
            };
            if !violates(lam * self.headroom(&lams), self.bound) {
                return None;
            }
            lams.push(lam);
        }
        Some(lams)
    }
}

/// Shrinks `[good, bad]` onto the feasibility boundary and returns the
/// feasible end.
fn bisect(mut good: f64, mut bad: f64, feasible: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (good + bad);
        if feasible(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Smallest `λ` with which the next Alice violates against a sharp Bob, given
/// the sharpness of the Alices before her. `None` if even `λ = 1` fails.
pub fn min_sharpness_for_violation(n: usize, mu: f64, predecessors: &[f64]) -> Result<Option<f64>> {
    Error::check_unit_interval("mu", mu)?;
    for &l in predecessors {
        Error::check_unit_interval("lambda", l)?;
    }
    Ok(SingleBobChain::new(n, mu, 1.0)?.min_sharpness(predecessors))
}

/// The greedy chain of Alices against a sharp Bob: each takes the smallest
/// violating sharpness. Its length is the maximum number of Alices.
pub fn greedy_chain(n: usize, mu: f64) -> Result<Vec<f64>> {
    Error::check_unit_interval("mu", mu)?;
    let chain = SingleBobChain::new(n, mu, 1.0)?;
    let mut lams = Vec::new();
    while lams.len() < MAX_CHAIN {
        match chain.min_sharpness(&lams) {
            Some(l) => lams.push(l),
            None => break,
        }
    }
    Ok(lams)
}

pub fn max_alices(n: usize, mu: f64) -> Result<usize> {
    greedy_chain(n, mu).map(|c| c.len())
}

/// `(N, max Alices)` for every supported setting count.
pub fn max_alices_map(mu: f64) -> Result<Vec<(usize, usize)>> {
    SUPPORTED_SETTINGS
        .iter()
        .map(|&n| max_alices(n, mu).map(|k| (n, k)))
        .collect()
}

/// Sharpness intervals for `n_alices` Alices sharing steering with one Bob.
///
/// With two or more Alices the last one is sharp; with three or more the Bob
/// is sharp too, otherwise his sharpness gets its own interval. Each interval
/// collects the values for which the other free observers can still be chosen
/// so that every Alice violates.
pub fn sharpness_ranges(n: usize, n_alices: usize, mu: f64) -> Result<Vec<SharpnessInterval>> {
    check_settings(n)?;
    Error::check_unit_interval("mu", mu)?;
    if n_alices == 0 {
        return Err(Error::NoObservers);
    }
    let chain = SingleBobChain::new(n, mu, 1.0)?;
    let greedy = chain.run(n_alices, None).ok_or_else(|| {
        Error::Infeasible(format!(
            "{n_alices} Alices cannot share steering with one Bob at N = {n}, mu = {mu}"
        ))
    })?;

    let mut out = Vec::with_capacity(n_alices + 1);
    for (k, &lo) in greedy.iter().enumerate() {
        let who = Observer::Alice(k + 1);
        if n_alices >= 2 && k == n_alices - 1 {
            out.push(SharpnessInterval::fixed(who, 1.0));
            continue;
        }
        let feasible = |v: f64| chain.run(n_alices, Some((k, v))).is_some();
        let hi = if feasible(1.0) {
            1.0
        } else {
            bisect(lo, 1.0, feasible)
        };
        out.push(SharpnessInterval {
            observer: who,
            lo,
            hi,
        });
    }

    let bob = Observer::Bob(1);
    if n_alices >= 3 {
        out.push(SharpnessInterval::fixed(bob, 1.0));
    } else {
        let feasible = |eta: f64| {
            SingleBobChain::new(n, mu, eta)
                .map(|c| c.run(n_alices, None).is_some())
                .unwrap_or(false)
        };
        let lo = bisect(1.0, 0.0, feasible);
        out.push(SharpnessInterval {
            observer: bob,
            lo,
            hi: 1.0,
        });
    }
    Ok(out)
}

/// Infimum of the initial purity `μ` for which `n_alices` Alices and `n_bobs`
/// Bobs (one or two) can all violate with some choice of sharpness.
pub fn min_purity(n: usize, n_alices: usize, n_bobs: usize) -> Result<f64> {
    check_settings(n)?;
    if n_alices == 0 || n_bobs == 0 {
        return Err(Error::NoObservers);
    }
    if n_bobs > n_alices {
        return min_purity(n, n_bobs, n_alices);
    }
    let feasible: Box<dyn Fn(f64) -> bool> = match n_bobs {
        1 => Box::new(move |mu: f64| {
            SingleBobChain::new(n, mu, 1.0)
                .map(|c| c.run(n_alices, None).is_some())
                .unwrap_or(false)
        }),
        2 => Box::new(move |mu: f64| {
            two_bob_best(n, mu, n_alices)
                .map(|b| b.margin >= -BOUNDARY_SLACK)
                .unwrap_or(false)
        }),
        _ => {
            return Err(Error::Unsupported(format!(
                "purity threshold for {n_bobs} Bobs"
            )))
        }
    };
    if !feasible(1.0) {
        return Err(Error::Infeasible(format!(
            "{n_alices} Alices and {n_bobs} Bobs cannot all violate at N = {n}, even for a pure state"
        )));
    }
    Ok(bisect(1.0, 0.0, feasible))
}

/// Best sharpness assignment found for `n_alices` Alices and two Bobs, with
/// the last observer on each side sharp.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoBobOptimum {
    pub alice_sharpness: Vec<f64>,
    pub bob_sharpness: Vec<f64>,
    /// `min_{i,p} S^{i,p} - C_N` at that assignment.
    pub margin: f64,
}

struct TwoBobProblem {
    decay: Decay,
    bound: f64,
    mu: f64,
    n_alices: usize,
}

impl TwoBobProblem {
    fn min_margin(&self, alices: &[f64], eta1: f64) -> (f64, f64) {
        let bobs = [eta1, 1.0];
        let mut first = f64::INFINITY;
        let mut second = f64::INFINITY;
        for i in 1..=self.n_alices {
            first = first.min(closed_form_value(self.decay, self.mu, alices, &bobs, i, 1));
            second = second.min(closed_form_value(self.decay, self.mu, alices, &bobs, i, 2));
        }
        (first - self.bound, second - self.bound)
    }

    /// Maximises the smallest margin over `η₁` for fixed Alices. Margins with
    /// the first Bob grow with `η₁`, those with the second Bob shrink, so the
    /// optimum is their crossing or an end point.
    fn best_eta(&self, alices: &[f64]) -> (f64, f64) {
        let gap = |eta: f64| {
            let (a, b) = self.min_margin(alices, eta);
            a - b
        };
        let eta = if gap(1.0) <= 0.0 {
            1.0
        } else if gap(0.0) >= 0.0 {
            0.0
        } else {
            bisect(0.0, 1.0, |e| gap(e) <= 0.0)
        };
        let (a, b) = self.min_margin(alices, eta);
        (eta, a.min(b))
    }

    fn objective(&self, free: &[f64]) -> f64 {
        let mut alices = free.to_vec();
        alices.push(1.0);
        self.best_eta(&alices).1
    }
}

/// Searches the free sharpness values (`λ₁..λ_{m-1}`, `η₁`) for the assignment
/// that maximises the smallest margin over all `n_alices × 2` pairs.
pub fn two_bob_best(n: usize, mu: f64, n_alices: usize) -> Result<TwoBobOptimum> {
    Error::check_unit_interval("mu", mu)?;
    if n_alices == 0 {
        return Err(Error::NoObservers);
    }
    let problem = TwoBobProblem {
        decay: Decay::for_settings(n),
        bound: classical_bound(n)?,
        mu,
        n_alices,
    };
    let dims = n_alices - 1;
    let mut best = vec![0.0; dims];
    if dims > 0 {
        // Coarse grid of at most ~2e5 points, then coordinate-wise golden
        // section refinement around the best grid point.
        let per_axis = ((200_000f64).powf(1.0 / dims as f64).floor() as usize).clamp(3, 401);
        let step = 1.0 / (per_axis - 1) as f64;
        let total = per_axis.pow(dims as u32);
        let (idx, _) = (0..total)
            .into_par_iter()
            .map(|flat| {
                let point = unflatten(flat, per_axis, dims, step);
                (flat, problem.objective(&point))
            })
            .reduce(
                || (usize::MAX, f64::NEG_INFINITY),
                |a, b| {
                    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                        b
                    } else {
                        a
                    }
                },
            );
        best = unflatten(idx, per_axis, dims, step);
        let mut radius = step;
        for _ in 0..6 {
            for d in 0..dims {
                let lo = (best[d] - radius).max(0.0);
                let hi = (best[d] + radius).min(1.0);
                let mut probe = best.clone();
                best[d] = golden_max(lo, hi, |v| {
                    probe[d] = v;
                    problem.objective(&probe)
                });
            }
            radius *= 0.5;
        }
    }
    let mut alices = best;
    alices.push(1.0);
    let (eta1, margin) = problem.best_eta(&alices);
    Ok(TwoBobOptimum {
        alice_sharpness: alices,
        bob_sharpness: vec![eta1, 1.0],
        margin,
    })
}

fn unflatten(mut flat: usize, per_axis: usize, dims: usize, step: f64) -> Vec<f64> {
    let mut p = vec![0.0; dims];
    for slot in p.iter_mut() {
        *slot = (flat % per_axis) as f64 * step;
        flat /= per_axis;
    }
    p
}

fn golden_max(mut a: f64, mut b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Grid points `0, h, 2h, …` up to and including 1.
pub fn grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::GridStep(step));
    }
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=count).map(|k| (k as f64 * step).min(1.0)).collect();
    if *pts.last().expect("count >= 2") < 1.0 - 1e-12 {
        pts.push(1.0);
    }
    Ok(pts)
}

pub const DEFAULT_REGION_STEP: f64 = 0.002;
pub const DEFAULT_OVERLAP_STEP: f64 = 0.005;

/// The four monitored pairs of the two-Alice/two-Bob scan, in the order of
/// [`RegionSample::values`].
pub const PAIRS_2X2: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub lambda1: f64,
    pub eta1: f64,
    /// `S^{1,1}, S^{1,2}, S^{2,1}, S^{2,2}`.
    pub values: [f64; 4],
    pub in_region: bool,
}

/// Points `(λ₁, η₁)` on one iso-line `S^{i,p} = C_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoCurve {
    pub pair: (usize, usize),
    pub points: Vec<[f64; 2]>,
}

/// Two Alices and two Bobs with sharp second observers, scanned over
/// `(λ₁, η₁)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionScan {
    pub n_settings: usize,
    pub mu: f64,
    pub grid_step: f64,
    pub bound: f64,
    /// Every grid point, `λ₁`-major.
    pub samples: Vec<RegionSample>,
    pub boundary_curves: Vec<IsoCurve>,
}

/// Extent of a set of grid values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub lo: f64,
    pub hi: f64,
}

impl Extent {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn of(values: impl Iterator<Item = f64>) -> Option<Self> {
        values.fold(None, |acc, v| match acc {
            None => Some(Extent { lo: v, hi: v }),
            Some(e) => Some(Extent {
                lo: e.lo.min(v),
                hi: e.hi.max(v),
            }),
        })
    }
}

impl RegionScan {
    pub fn cells(&self) -> impl Iterator<Item = &RegionSample> {
        self.samples.iter().filter(|s| s.in_region)
    }

    pub fn is_empty(&self) -> bool {
        self.cells().next().is_none()
    }

    /// Range of `λ₁` over the region.
    pub fn lambda_extent(&self) -> Option<Extent> {
        Extent::of(self.cells().map(|s| s.lambda1))
    }

    /// Range of `η₁` over the region.
    pub fn eta_extent(&self) -> Option<Extent> {
        Extent::of(self.cells().map(|s| s.eta1))
    }

    /// Range of `t` over region points with `λ₁ = η₁ = t`.
    pub fn diagonal_extent(&self) -> Option<Extent> {
        let tol = 0.25 * self.grid_step;
        Extent::of(
            self.cells()
                .filter(|s| (s.lambda1 - s.eta1).abs() < tol)
                .map(|s| s.lambda1),
        )
    }

    /// Number of region cells times the cell area.
    pub fn area(&self) -> f64 {
        self.cells().count() as f64 * self.grid_step * self.grid_step
    }

    pub fn summary(&self) -> RegionSummary {
        RegionSummary {
            n_settings: self.n_settings,
            mu: self.mu,
            grid_step: self.grid_step,
            bound: self.bound,
            lambda_extent: self.lambda_extent(),
            eta_extent: self.eta_extent(),
            diagonal_extent: self.diagonal_extent(),
            area: self.area(),
            cells: self.cells().map(|s| [s.lambda1, s.eta1]).collect(),
            boundary_curves: self.boundary_curves.clone(),
        }
    }
}

/// The region without the out-of-region samples; this is what gets written
/// as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub n_settings: usize,
    pub mu: f64,
    pub grid_step: f64,
    pub bound: f64,
    pub lambda_extent: Option<Extent>,
    pub eta_extent: Option<Extent>,
    pub diagonal_extent: Option<Extent>,
    pub area: f64,
    pub cells: Vec<[f64; 2]>,
    pub boundary_curves: Vec<IsoCurve>,
}

pub fn region_scan_2x2(n: usize, mu: f64, grid_step: f64) -> Result<RegionScan> {
    Error::check_unit_interval("mu", mu)?;
    let bound = classical_bound(n)?;
    let decay = Decay::for_settings(n);
    let pts = grid(grid_step)?;
    let pair_values = |l: f64, e: f64| {
        let (a, b) = ([l, 1.0], [e, 1.0]);
        PAIRS_2X2.map(|(i, p)| closed_form_value(decay, mu, &a, &b, i, p))
    };
    let samples: Vec<RegionSample> = pts
        .par_iter()
        .flat_map_iter(|&l| {
            pts.iter().map(move |&e| {
                let values = pair_values(l, e);
                RegionSample {
                    lambda1: l,
                    eta1: e,
                    values,
                    in_region: values.iter().all(|&s| s >= bound),
                }
            })
        })
        .collect();

    let boundary_curves = PAIRS_2X2
        .iter()
        .enumerate()
        .map(|(slot, &pair)| {
            let points = pts
                .par_iter()
                .filter_map(|&l| {
                    let f = |e: f64| pair_values(l, e)[slot] - bound;
                    let (f0, f1) = (f(0.0), f(1.0));
                    if f0.signum() == f1.signum() || f0 == 0.0 && f1 == 0.0 {
                        return None;
                    }
                    // Each S^{i,p} is monotone in η₁, so the crossing is unique.
                    let e = bisect(
                        if f0 >= 0.0 { 0.0 } else { 1.0 },
                        if f0 >= 0.0 { 1.0 } else { 0.0 },
                        |e| f(e) >= 0.0,
                    );
                    Some([l, e])
                })
                .collect();
            IsoCurve { pair, points }
        })
        .collect();

    Ok(RegionScan {
        n_settings: n,
        mu,
        grid_step,
        bound,
        samples,
        boundary_curves,
    })
}

/// All six pairs of three Alices and two Bobs.
pub const PAIRS_3X2: [(usize, usize); 6] = [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2), (3, 2)];

/// Whether some grid point `(λ₁, λ₂, η₁)`, with `λ₃ = η₂ = 1`, makes all six
/// pairs of three Alices and two Bobs violate.
pub fn check_3x2_overlap(n: usize, mu: f64, grid_step: f64) -> Result<bool> {
    check_3x2_overlap_pairs(n, mu, grid_step, &PAIRS_3X2)
}

/// As [`check_3x2_overlap`], monitoring only `pairs`.
pub fn check_3x2_overlap_pairs(
    n: usize,
    mu: f64,
    grid_step: f64,
    pairs: &[(usize, usize)],
) -> Result<bool> {
    Error::check_unit_interval("mu", mu)?;
    if let Some(&(i, p)) = pairs
        .iter()
        .find(|&&(i, p)| !(1..=3).contains(&i) || !(1..=2).contains(&p))
    {
        return Err(Error::ObserverOutOfRange {
            i,
            p,
            alices: 3,
            bobs: 2,
        });
    }
    let bound = classical_bound(n)?;
    let decay = Decay::for_settings(n);
    let pts = grid(grid_step)?;
    Ok(pts.par_iter().any(|&l1| {
        pts.iter().any(|&l2| {
            pts.iter().any(|&e1| {
                let alices = [l1, l2, 1.0];
                let bobs = [e1, 1.0];
                pairs
                    .iter()
                    .all(|&(i, p)| closed_form_value(decay, mu, &alices, &bobs, i, p) >= bound)
            })
        })
    }))
}
