//! Acceptance run: one line per criterion, exit status 1 if any fails.
//!
//! `cargo test --release -p steerseq-cli --test acceptance`

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steerseq::steering::steering_parameter_oracle_with;
use steerseq::{
    check_3x2_overlap, check_3x2_overlap_pairs, classical_bound, luders_matched_pair,
    luders_one_side, min_purity, nearest_werner, polyhedron_settings, region_scan_2x2,
    werner_state, BlochVector, ComplexMatrix, DensityMatrix, Outcome, Side, UnsharpMeasurement,
    SUPPORTED_SETTINGS,
};
use steerseq_cli::{random_scenario, reproduce_table1, verify_sweep, MaxAlicesOutput};

const TABLE_TOL: f64 = 5e-4;

struct Verdict {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
            notes: Vec::new(),
        }
    }
}

fn criterion(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let mut v = f();
    let took = start.elapsed();
    if took > limit {
        v.pass = false;
        v.detail = format!("{} (over the {:.0?} budget)", v.detail, limit);
    }
    println!(
        "{} [{id}] {name}: {} ({:.2?})",
        if v.pass { "PASS" } else { "FAIL" },
        v.detail,
        took
    );
    for n in &v.notes {
        println!("       {n}");
    }
    v.pass
}

fn cli(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_steerseq"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "steerseq {args:?} failed");
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[allow(clippy::approx_constant)]
fn classical_bounds() -> Verdict {
    let stored: BTreeMap<usize, f64> = [
        (2, std::f64::consts::FRAC_1_SQRT_2),
        (3, 0.577_350_269_189_625_8),
        (4, 0.577_350_269_189_625_8),
        (6, 0.5393),
        (10, 0.5236),
        (16, 0.503),
    ]
    .into();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.json");
    cli(&[
        "bounds",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let got: BTreeMap<usize, f64> = v["bounds"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, x)| (k.parse().unwrap(), x.as_f64().unwrap()))
        .collect();
    let printed = cli(&["bounds"]);
    let six = [
        "0.707107", "0.577350", "0.577350", "0.539300", "0.523600", "0.503000",
    ];
    let shown = six.iter().all(|s| printed.contains(s));
    Verdict::new(got == stored && shown, format!("{got:?}"))
}

fn oracle_equivalence() -> Verdict {
    let samples = 1000;
    let worst = verify_sweep(samples, 2024).unwrap();
    Verdict::new(
        worst <= 1e-10,
        format!("{samples} random scenarios, max deviation {worst:.2e} (tolerance 1e-10)"),
    )
}

fn table1() -> Verdict {
    let rows = reproduce_table1().unwrap();
    let mut misses = Vec::new();
    let mut checked = 0;
    for r in &rows {
        for c in &r.intervals {
            for (end, cmp) in [("lo", c.lo), ("hi", c.hi)] {
                checked += 1;
                if cmp.deviation > TABLE_TOL {
                    misses.push(format!(
                        "N={} N_A={} {} {end}: {:.4} vs {:.4}",
                        r.label, r.n_alices, c.observer, cmp.computed, cmp.published
                    ));
                }
            }
        }
        checked += 1;
        if r.mu_min.deviation > TABLE_TOL {
            misses.push(format!(
                "N={} N_A={} mu_min: {:.4} vs {:.4}",
                r.label, r.n_alices, r.mu_min.computed, r.mu_min.published
            ));
        }
    }
    // Settings 3 and 4 share a published row; check that they really agree.
    let twin = (1..=3).all(|k| {
        let a = steerseq::sharpness_ranges(3, k, 1.0).unwrap();
        let b = steerseq::sharpness_ranges(4, k, 1.0).unwrap();
        a.iter()
            .zip(&b)
            .all(|(x, y)| (x.lo - y.lo).abs() < 1e-12 && (x.hi - y.hi).abs() < 1e-12)
    });
    let mut v = Verdict::new(
        misses.is_empty() && twin,
        format!(
            "{} rows, {} of {checked} values outside ±5e-4{}",
            rows.len(),
            misses.len(),
            if twin { "" } else { "; N=3 and N=4 disagree" }
        ),
    );
    v.notes = misses;
    v
}

fn max_alices_map() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("max.json");
    cli(&[
        "maxalices",
        "--mu",
        "1",
        "--all",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    let out: MaxAlicesOutput =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let want: BTreeMap<usize, usize> = [(2, 2), (3, 3), (4, 3), (6, 4), (10, 4), (16, 5)].into();
    let got = out.map();
    Verdict::new(got == want, format!("{got:?}"))
}

fn region() -> Verdict {
    let step = 0.002;
    let three = region_scan_2x2(3, 1.0, step).unwrap();
    let sixteen = region_scan_2x2(16, 1.0, step).unwrap();
    let Some(d3) = three.diagonal_extent() else {
        return Verdict::new(false, "N=3 region is empty");
    };
    let Some(d16) = sixteen.diagonal_extent() else {
        return Verdict::new(false, "N=16 region is empty");
    };
    let (lo, hi) = (0.7561, 0.8025);
    let bracket = (d3.lo - lo).abs() <= step && (d3.hi - hi).abs() <= step;
    let ratio = d16.width() / d3.width();
    let mut v = Verdict::new(
        bracket && ratio > 10.0,
        format!(
            "N=3 diagonal [{:.4}, {:.4}] vs [{lo}, {hi}] ± {step}; N=16/N=3 diagonal ratio {ratio:.2} (needs > 10)",
            d3.lo, d3.hi
        ),
    );
    let (l3, l16) = (
        three.lambda_extent().unwrap(),
        sixteen.lambda_extent().unwrap(),
    );
    v.notes.push(format!(
        "projection onto lambda1: N=3 [{:.4}, {:.4}], N=16 [{:.4}, {:.4}], ratio {:.2}",
        l3.lo,
        l3.hi,
        l16.lo,
        l16.hi,
        l16.width() / l3.width()
    ));
    v.notes.push(format!(
        "area: N=3 {:.6}, N=16 {:.6}, ratio {:.1}",
        three.area(),
        sixteen.area(),
        sixteen.area() / three.area()
    ));
    v
}

fn three_by_two() -> Verdict {
    let all = check_3x2_overlap(16, 1.0, 0.005).unwrap();
    let relaxed = check_3x2_overlap_pairs(16, 1.0, 0.005, &[(1, 1), (2, 1), (3, 1)]).unwrap();
    Verdict::new(
        !all && relaxed,
        format!("all six pairs: {all}; three Alices with the first Bob: {relaxed}"),
    )
}

/// Eigenvalues via the real symmetric embedding, independent of the crate.
fn eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.dim();
    let big = nalgebra::DMatrix::from_fn(2 * d, 2 * d, |r, c| {
        let z = m.get(r % d, c % d);
        match (r < d, c < d) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut ev: Vec<f64> = big.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn random_dir(rng: &mut ChaCha8Rng) -> BlochVector {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            return BlochVector::normalized(v[0], v[1], v[2]).unwrap();
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g: Vec<steerseq::C64> = (0..16)
        .map(|_| steerseq::C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    let g = ComplexMatrix::from_row_major(4, &g).unwrap();
    let p = g * g.adjoint();
    DensityMatrix::new(p.scale_real(1.0 / p.trace().re)).unwrap()
}

fn random_rotation(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    let q = loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            break nalgebra::Quaternion::new(v[0], v[1], v[2], v[3]);
        }
    };
    let r = nalgebra::UnitQuaternion::from_quaternion(q).to_rotation_matrix();
    std::array::from_fn(|i| std::array::from_fn(|j| r.matrix()[(i, j)]))
}

fn channel_invariants() -> Verdict {
    let instances = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let id2 = ComplexMatrix::identity(2).unwrap();
    let (mut trace, mut psd, mut complete, mut root, mut closure, mut rotation) =
        (0.0f64, f64::INFINITY, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..instances {
        let meas = UnsharpMeasurement::new(random_dir(&mut rng), rng.gen_range(0.0..=1.0)).unwrap();
        let [e0, e1] = Outcome::BOTH.map(|o| meas.effect(o));
        complete = complete.max((e0 + e1).max_abs_diff(&id2).unwrap());
        for o in Outcome::BOTH {
            let k = meas.kraus(o);
            root = root.max((k * k).max_abs_diff(&meas.effect(o)).unwrap());
            psd = psd.min(eigenvalues(&k)[0]);
        }

        let n = SUPPORTED_SETTINGS[rng.gen_range(0..SUPPORTED_SETTINGS.len())];
        let settings = polyhedron_settings(n).unwrap();
        let rho = random_state(&mut rng);
        let (lam, eta) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
        for out in [
            luders_one_side(&rho, lam, &settings, Side::Alice).unwrap(),
            luders_one_side(&rho, eta, &settings, Side::Bob).unwrap(),
            luders_matched_pair(&rho, lam, eta, &settings).unwrap(),
        ] {
            trace = trace.max((out.trace() - 1.0).norm());
            psd = psd.min(eigenvalues(out.matrix())[0]);
        }

        let iso =
            polyhedron_settings(SUPPORTED_SETTINGS[rng.gen_range(1..SUPPORTED_SETTINGS.len())])
                .unwrap();
        let w = werner_state(rng.gen_range(0.0..=1.0)).unwrap();
        let w = luders_one_side(&w, lam, &iso, Side::Alice).unwrap();
        let w = luders_matched_pair(&w, lam, eta, &iso).unwrap();
        closure = closure.max(nearest_werner(&w).1);

        let s = random_scenario(&mut rng);
        let set = polyhedron_settings(s.n_settings()).unwrap();
        let turned = set.rotated(&random_rotation(&mut rng)).unwrap();
        let (i, p) = (
            rng.gen_range(1..=s.n_alices()),
            rng.gen_range(1..=s.n_bobs()),
        );
        let a = steering_parameter_oracle_with(&s, &set, i, p).unwrap();
        let b = steering_parameter_oracle_with(&s, &turned, i, p).unwrap();
        rotation = rotation.max((a - b).abs());
    }
    let pass = trace < 1e-12
        && psd >= -1e-9
        && complete < 1e-12
        && root < 1e-12
        && closure < 1e-10
        && rotation < 1e-10;
    Verdict::new(
        pass,
        format!(
            "{instances} instances: trace {trace:.1e}, min eigenvalue {psd:.1e}, completeness {complete:.1e}, \
             root {root:.1e}, Werner closure {closure:.1e}, rotation {rotation:.1e}"
        ),
    )
}

fn single_pair_purity() -> Verdict {
    let mut worst: f64 = 0.0;
    for n in SUPPORTED_SETTINGS {
        worst = worst.max((min_purity(n, 1, 1).unwrap() - classical_bound(n).unwrap()).abs());
    }
    Verdict::new(worst < 1e-4, format!("max |mu_min - C_N| = {worst:.1e}"))
}

fn main() {
    // libtest passes flags such as --nocapture through; nothing to parse.
    let s = Duration::from_secs;
    let results = [
        criterion(1, "classical bounds", s(1), classical_bounds),
        criterion(2, "oracle equivalence", s(60), oracle_equivalence),
        criterion(3, "sharpness table", s(300), table1),
        criterion(4, "max-Alices map", s(30), max_alices_map),
        criterion(5, "two-by-two region", s(300), region),
        criterion(6, "three-by-two impossibility", s(900), three_by_two),
        criterion(7, "channel invariants", s(60), channel_invariants),
        criterion(8, "single-pair purity threshold", s(60), single_pair_purity),
    ];
    let failed = results.iter().filter(|&&ok| !ok).count();
    println!(
        "{} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
