//! Diversity and evenness indices over contributor frequency tables.
//!
//! All logarithms are natural. Indices defined on proportions (Shannon H′,
//! Shannon J′, Simpson λ) take a [`ProportionView`], so a truncated
//! subsample keeps its parent's total as denominator. Count-defined indices
//! (Brillouin H, McIntosh E, E_var) read raw counts of the table they are
//! given.
//!
//! Floating point reductions run over fixed-size chunks combined in order,
//! so results do not depend on [`Execution`] or on the thread count.

use std::f64::consts::FRAC_2_PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{Execution, CHUNK};
use crate::freqtable::{FrequencyTable, ProportionView, Subsample, SubsampleSpec};
use crate::sum::NeumaierSum;

/// Every index for one (table, subsample) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSuite {
    pub shannon_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shannon_j: Option<f64>,
    pub brillouin_h: f64,
    pub simpson_lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcintosh_e: Option<f64>,
    pub e_var: f64,
}

/// Names a single field of [`MetricSuite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    ShannonH,
    ShannonJ,
    BrillouinH,
    SimpsonLambda,
    McintoshE,
    EVar,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::ShannonH,
        MetricKind::ShannonJ,
        MetricKind::BrillouinH,
        MetricKind::SimpsonLambda,
        MetricKind::McintoshE,
        MetricKind::EVar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::ShannonH => "shannon_h",
            MetricKind::ShannonJ => "shannon_j",
            MetricKind::BrillouinH => "brillouin_h",
            MetricKind::SimpsonLambda => "simpson_lambda",
            MetricKind::McintoshE => "mcintosh_e",
            MetricKind::EVar => "e_var",
        }
    }

    /// `None` for indices undefined on a single contributor.
    pub fn value(self, suite: &MetricSuite) -> Option<f64> {
        match self {
            MetricKind::ShannonH => Some(suite.shannon_h),
            MetricKind::ShannonJ => suite.shannon_j,
            MetricKind::BrillouinH => Some(suite.brillouin_h),
            MetricKind::SimpsonLambda => Some(suite.simpson_lambda),
            MetricKind::McintoshE => suite.mcintosh_e,
            MetricKind::EVar => Some(suite.e_var),
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        MetricKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Shannon's H′ = −Σ p ln p.
pub fn shannon_h(view: ProportionView<'_>) -> f64 {
    shannon_h_with(view, Execution::default())
}

fn shannon_h_with(view: ProportionView<'_>, exec: Execution) -> f64 {
    let denom = view.denominator() as f64;
    let parts = exec.map_chunks(view.table().entries(), CHUNK, |chunk| {
        chunk
            .iter()
            .map(|(_, c)| {
                let p = *c as f64 / denom;
                p * p.ln()
            })
            .sum::<NeumaierSum>()
    });
    // p ln p <= 0 for every term, so the negated sum is never negative.
    0.0 - parts.iter().sum::<NeumaierSum>().value()
}

/// Shannon evenness J′ = H′ / ln R.
pub fn shannon_j(view: ProportionView<'_>) -> Result<f64> {
    shannon_j_from(shannon_h(view), view.table().richness())
}

fn shannon_j_from(h: f64, richness: usize) -> Result<f64> {
    if richness < 2 {
        return Err(Error::UndefinedForSingleton {
            metric: "shannon_j",
        });
    }
    Ok(h / (richness as f64).ln())
}

/// Brillouin's H = (ln N! − Σ ln t_j!) / N, via log-gamma.
pub fn brillouin_h(table: &FrequencyTable) -> f64 {
    brillouin_h_with(table, Execution::default())
}

fn brillouin_h_with(table: &FrequencyTable, exec: Execution) -> f64 {
    if table.richness() == 1 {
        return 0.0;
    }
    let n = table.total() as f64;
    let parts = exec.map_chunks(table.entries(), CHUNK, |chunk| {
        chunk
            .iter()
            .map(|(_, c)| ln_factorial(*c))
            .sum::<NeumaierSum>()
    });
    let mut acc = NeumaierSum::new();
    acc.add(ln_factorial(table.total()));
    for part in &parts {
        acc.add(-part.value());
    }
    (acc.value() / n).max(0.0)
}

fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        libm::lgamma(k as f64 + 1.0)
    }
}

/// Simpson's λ = Σ p², the with-replacement collision probability
/// (the Herfindahl-Hirschman index on a [0, 1] share scale).
pub fn simpson_lambda(view: ProportionView<'_>) -> f64 {
    simpson_lambda_with(view, Execution::default())
}

fn simpson_lambda_with(view: ProportionView<'_>, exec: Execution) -> f64 {
    let sum_sq = sum_squared_counts(view.table(), exec);
    let d = view.denominator() as u128;
    sum_sq as f64 / (d * d) as f64
}

fn sum_squared_counts(table: &FrequencyTable, exec: Execution) -> u128 {
    exec.map_chunks(table.entries(), CHUNK, |chunk| {
        chunk
            .iter()
            .map(|(_, c)| *c as u128 * *c as u128)
            .sum::<u128>()
    })
    .into_iter()
    .sum()
}

/// McIntosh evenness (N − √Σt²) / (N − N/√R).
pub fn mcintosh_e(table: &FrequencyTable) -> Result<f64> {
    mcintosh_e_with(table, Execution::default())
}

fn mcintosh_e_with(table: &FrequencyTable, exec: Execution) -> Result<f64> {
    let r = table.richness();
    if r < 2 {
        return Err(Error::UndefinedForSingleton {
            metric: "mcintosh_e",
        });
    }
    let n = table.total() as f64;
    let u = (sum_squared_counts(table, exec) as f64).sqrt();
    Ok((n - u) / (n - n / (r as f64).sqrt()))
}

/// Smith and Wilson's E_var = 1 − (2/π)·arctan(Var(ln t)).
///
/// Log counts are taken relative to the largest count. The variance of logs
/// is shift invariant, and ratios of integers are exact under common
/// scaling, so multiplying every count by k returns a bit-identical result.
pub fn e_var(table: &FrequencyTable) -> f64 {
    e_var_with(table, Execution::default())
}

fn e_var_with(table: &FrequencyTable, exec: Execution) -> f64 {
    let r = table.richness() as f64;
    let reference = table.max_count() as f64;
    let entries = table.entries();
    let log_ratio = |c: u64| (c as f64 / reference).ln();

    let mean = exec
        .map_chunks(entries, CHUNK, |chunk| {
            chunk
                .iter()
                .map(|(_, c)| log_ratio(*c))
                .sum::<NeumaierSum>()
        })
        .iter()
        .sum::<NeumaierSum>()
        .value()
        / r;
    let variance = exec
        .map_chunks(entries, CHUNK, |chunk| {
            chunk
                .iter()
                .map(|(_, c)| {
                    let d = log_ratio(*c) - mean;
                    d * d
                })
                .sum::<NeumaierSum>()
        })
        .iter()
        .sum::<NeumaierSum>()
        .value()
        / r;
    1.0 - FRAC_2_PI * variance.atan()
}

/// All indices for the top-fraction subsample of `table` described by `spec`.
pub fn suite(table: &FrequencyTable, spec: SubsampleSpec) -> MetricSuite {
    suite_with(table, spec, Execution::default())
}

pub fn suite_with(table: &FrequencyTable, spec: SubsampleSpec, exec: Execution) -> MetricSuite {
    suite_of(&table.top_fraction(spec), exec)
}

/// All indices for an already extracted subsample.
pub fn suite_of(sub: &Subsample, exec: Execution) -> MetricSuite {
    let view = sub.proportions();
    let table = sub.table();
    let shannon_h = shannon_h_with(view, exec);
    MetricSuite {
        shannon_h,
        shannon_j: shannon_j_from(shannon_h, table.richness()).ok(),
        brillouin_h: brillouin_h_with(table, exec),
        simpson_lambda: simpson_lambda_with(view, exec),
        mcintosh_e: mcintosh_e_with(table, exec).ok(),
        e_var: e_var_with(table, exec),
    }
}
