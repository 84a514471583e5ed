//! Sharpness ranges and purity thresholds for a chain of Alices and one Bob,
//! side by side with the published four-decimal values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use steerseq::{min_purity, sharpness_ranges, Observer, Result, SharpnessInterval};

/// One published row. Settings 3 and 4 share a row since their bounds and
/// frame factors coincide.
#[derive(Clone, Copy, Debug)]
pub struct PublishedRow {
    pub label: &'static str,
    pub n_settings: usize,
    pub n_alices: usize,
    /// `λ₁..λ₄` as printed; a lone number is stored as a point interval.
    pub lambdas: &'static [(f64, f64)],
    pub eta: (f64, f64),
    pub mu_min: f64,
}

const fn row(
    label: &'static str,
    n_settings: usize,
    n_alices: usize,
    lambdas: &'static [(f64, f64)],
    eta: (f64, f64),
    mu_min: f64,
) -> PublishedRow {
    PublishedRow {
        label,
        n_settings,
        n_alices,
        lambdas,
        eta,
        mu_min,
    }
}

pub const PUBLISHED: [PublishedRow; 18] = [
    row("2", 2, 1, &[(0.7072, 1.0)], (0.7072, 1.0), 0.7072),
    row(
        "2",
        2,
        2,
        &[(0.7072, 0.9101), (1.0, 1.0)],
        (0.8841, 1.0),
        0.8919,
    ),
    row("3/4", 3, 1, &[(0.5774, 1.0)], (0.5774, 1.0), 0.5774),
    row(
        "3/4",
        3,
        2,
        &[(0.5774, 0.9306), (1.0, 1.0)],
        (0.7560, 1.0),
        0.7598,
    ),
    row(
        "3/4",
        3,
        3,
        &[(0.5774, 0.7733), (0.6579, 0.8735), (1.0, 1.0)],
        (1.0, 1.0),
        0.9094,
    ),
    row("6", 6, 1, &[(0.5394, 1.0)], (0.5394, 1.0), 0.5394),
    row(
        "6",
        6,
        2,
        &[(0.5394, 0.9510), (1.0, 1.0)],
        (0.7062, 1.0),
        0.7067,
    ),
    row(
        "6",
        6,
        3,
        &[(0.5394, 0.8289), (0.6028, 0.9147), (1.0, 1.0)],
        (1.0, 1.0),
        0.8464,
    ),
    row(
        "6",
        6,
        4,
        &[
            (0.5394, 0.6437),
            (0.6028, 0.7102),
            (0.7075, 0.8291),
            (1.0, 1.0),
        ],
        (1.0, 1.0),
        0.9655,
    ),
    row("10", 10, 1, &[(0.5237, 1.0)], (0.5237, 1.0), 0.5237),
    row(
        "10",
        10,
        2,
        &[(0.5237, 0.9584), (1.0, 1.0)],
        (0.6857, 1.0),
        0.6861,
    ),
    row(
        "10",
        10,
        3,
        &[(0.5237, 0.8489), (0.5810, 0.9284), (1.0, 1.0)],
        (1.0, 1.0),
        0.8160,
    ),
    row(
        "10",
        10,
        4,
        &[
            (0.5237, 0.6775),
            (0.5810, 0.7496),
            (0.6743, 0.8593),
            (1.0, 1.0),
        ],
        (1.0, 1.0),
        0.9302,
    ),
    row("16", 16, 1, &[(0.5031, 1.0)], (0.5031, 1.0), 0.5031),
    row(
        "16",
        16,
        2,
        &[(0.5031, 0.9670), (1.0, 1.0)],
        (0.6587, 1.0),
        0.6587,
    ),
    row(
        "16",
        16,
        3,
        &[(0.5031, 0.8728), (0.5531, 0.9441), (1.0, 1.0)],
        (1.0, 1.0),
        0.7833,
    ),
    row(
        "16",
        16,
        4,
        &[
            (0.5031, 0.7270),
            (0.5531, 0.7954),
            (0.6263, 0.8983),
            (1.0, 1.0),
        ],
        (1.0, 1.0),
        0.8889,
    ),
    row(
        "16",
        16,
        5,
        &[
            (0.5031, 0.5454),
            (0.5531, 0.6125),
            (0.6266, 0.6796),
            (0.766, 0.766),
        ],
        (1.0, 1.0),
        0.9795,
    ),
];

/// Endpoint with its published counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Compared {
    pub computed: f64,
    pub published: f64,
    pub deviation: f64,
}

impl Compared {
    fn new(computed: f64, published: f64) -> Self {
        Self {
            computed,
            published,
            deviation: (computed - published).abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalComparison {
    pub observer: Observer,
    pub lo: Compared,
    pub hi: Compared,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub label: String,
    pub n_settings: usize,
    pub n_alices: usize,
    pub n_bobs: usize,
    /// Published observers only: `λ₁..λ₄` then `η₁`.
    pub intervals: Vec<IntervalComparison>,
    pub mu_min: Compared,
    pub max_deviation: f64,
}

impl Table1Row {
    pub fn interval(&self, observer: Observer) -> Option<&IntervalComparison> {
        self.intervals.iter().find(|c| c.observer == observer)
    }
}

pub fn compute_row(published: &PublishedRow) -> Result<Table1Row> {
    let ranges = sharpness_ranges(published.n_settings, published.n_alices, 1.0)?;
    let find = |who: Observer| -> &SharpnessInterval {
        ranges
            .iter()
            .find(|r| r.observer == who)
            .expect("every published observer is ranged")
    };
    let mut intervals: Vec<IntervalComparison> = published
        .lambdas
        .iter()
        .enumerate()
        .map(|(k, &(lo, hi))| {
            let got = find(Observer::Alice(k + 1));
            IntervalComparison {
                observer: got.observer,
                lo: Compared::new(got.lo, lo),
                hi: Compared::new(got.hi, hi),
            }
        })
        .collect();
    let bob = find(Observer::Bob(1));
    intervals.push(IntervalComparison {
        observer: bob.observer,
        lo: Compared::new(bob.lo, published.eta.0),
        hi: Compared::new(bob.hi, published.eta.1),
    });
    let mu_min = Compared::new(
        min_purity(published.n_settings, published.n_alices, 1)?,
        published.mu_min,
    );
    let max_deviation = intervals
        .iter()
        .flat_map(|c| [c.lo.deviation, c.hi.deviation])
        .fold(mu_min.deviation, f64::max);
    Ok(Table1Row {
        label: published.label.to_string(),
        n_settings: published.n_settings,
        n_alices: published.n_alices,
        n_bobs: 1,
        intervals,
        mu_min,
        max_deviation,
    })
}

pub fn reproduce_table1() -> Result<Vec<Table1Row>> {
    PUBLISHED.iter().map(compute_row).collect()
}

const CSV_SLOTS: [Observer; 5] = [
    Observer::Alice(1),
    Observer::Alice(2),
    Observer::Alice(3),
    Observer::Alice(4),
    Observer::Bob(1),
];

/// Wide layout, one row per configuration; absent observers leave empty
/// fields.
pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from("N,N_A,N_B");
    for who in CSV_SLOTS {
        let name = match who {
            Observer::Alice(i) => format!("lambda{i}"),
            Observer::Bob(p) => format!("eta{p}"),
        };
        let _ = write!(out, ",{name}_lo,{name}_hi");
    }
    out.push_str(",mu_min,mu_min_published,max_deviation\n");
    for r in rows {
        let _ = write!(out, "{},{},{}", r.label, r.n_alices, r.n_bobs);
        for who in CSV_SLOTS {
            match r.interval(who) {
                Some(c) => {
                    let _ = write!(out, ",{:.6},{:.6}", c.lo.computed, c.hi.computed);
                }
                None => out.push_str(",,"),
            }
        }
        let _ = writeln!(
            out,
            ",{:.6},{:.6},{:.6}",
            r.mu_min.computed, r.mu_min.published, r.max_deviation
        );
    }
    out
}
