//! Seeded synthetic contributor populations.
//!
//! Contributor `i` (1-based) gets an expected abundance weight from the
//! chosen model, and the requested number of contributions is apportioned by
//! largest remainder with every contributor floored at one.
//!
//! Reproducibility is pinned to two algorithms: the generator is
//! `rand_chacha::ChaCha8Rng` seeded with `seed_from_u64(seed)`, and normal
//! variates come from `rand_distr::StandardNormal` (ziggurat), drawn once per
//! contributor in index order. Only the lognormal model consumes randomness.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::freqtable::{FrequencyTable, SubsampleSpec};
use crate::metrics::{suite_with, MetricSuite};
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum AbundanceModel {
    Uniform,
    /// Weight `ratio^i`, ratio in (0, 1).
    Geometric {
        ratio: f64,
    },
    /// Weight `i^-exponent`, exponent > 0.
    Zipf {
        exponent: f64,
    },
    /// Weight `exp(sigma * z_i)` with standard-normal `z_i`, sigma > 0.
    Lognormal {
        sigma: f64,
    },
}

impl AbundanceModel {
    /// Builds a model from its name and single shape parameter.
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |what: &str| {
            param
                .ok_or_else(|| Error::InvalidSpec(format!("{name} model needs a {what} parameter")))
        };
        let model = match name {
            "uniform" => AbundanceModel::Uniform,
            "geometric" => AbundanceModel::Geometric {
                ratio: need("ratio")?,
            },
            "zipf" => AbundanceModel::Zipf {
                exponent: need("exponent")?,
            },
            "lognormal" => AbundanceModel::Lognormal {
                sigma: need("sigma")?,
            },
            other => return Err(Error::InvalidSpec(format!("unknown model {other:?}"))),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AbundanceModel::Uniform => "uniform",
            AbundanceModel::Geometric { .. } => "geometric",
            AbundanceModel::Zipf { .. } => "zipf",
            AbundanceModel::Lognormal { .. } => "lognormal",
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            AbundanceModel::Uniform => true,
            AbundanceModel::Geometric { ratio } => ratio > 0.0 && ratio < 1.0,
            AbundanceModel::Zipf { exponent } => exponent > 0.0 && exponent.is_finite(),
            AbundanceModel::Lognormal { sigma } => sigma > 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "parameter out of domain for {self}"
            )))
        }
    }

    fn weights(&self, richness: usize, seed: u64) -> Vec<f64> {
        match *self {
            AbundanceModel::Uniform => vec![1.0; richness],
            // ratio^(i-1): the common factor cancels and delays underflow.
            AbundanceModel::Geometric { ratio } => {
                (0..richness).map(|i| ratio.powi(i as i32)).collect()
            }
            AbundanceModel::Zipf { exponent } => {
                (1..=richness).map(|i| (i as f64).powf(-exponent)).collect()
            }
            AbundanceModel::Lognormal { sigma } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..richness)
                    .map(|_| {
                        let z: f64 = rng.sample(StandardNormal);
                        (sigma * z).exp()
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for AbundanceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbundanceModel::Uniform => f.write_str("uniform"),
            AbundanceModel::Geometric { ratio } => write!(f, "geometric(ratio={ratio})"),
            AbundanceModel::Zipf { exponent } => write!(f, "zipf(s={exponent})"),
            AbundanceModel::Lognormal { sigma } => write!(f, "lognormal(sigma={sigma})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub model: AbundanceModel,
    pub richness: usize,
    pub individuals: u64,
    pub seed: u64,
}

impl PopulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.richness == 0 {
            return Err(Error::InvalidSpec("richness must be at least 1".into()));
        }
        if self.individuals == 0 {
            return Err(Error::InvalidSpec("individuals must be at least 1".into()));
        }
        self.model.validate()
    }

    /// Contributors actually generated: `min(R, N)`.
    pub fn effective_richness(&self) -> usize {
        self.richness
            .min(usize::try_from(self.individuals).unwrap_or(usize::MAX))
    }
}

/// Generates a table with `min(R, N)` contributors and exactly N contributions.
pub fn generate(spec: &PopulationSpec) -> Result<FrequencyTable> {
    spec.validate()?;
    let richness = spec.effective_richness();
    let weights = spec.model.weights(richness, spec.seed);
    let counts = apportion(&weights, spec.individuals);
    let width = richness.to_string().len();
    FrequencyTable::from_counts(
        counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (format!("c{:0width$}", i + 1), c)),
    )
}

/// Splits `total` units over `weights` by largest remainder, at least one each.
///
/// Requires `total >= weights.len()`.
pub fn apportion(weights: &[f64], total: u64) -> Vec<u64> {
    debug_assert!(total as usize >= weights.len());
    let sum = weights.iter().copied().sum::<NeumaierSum>().value();
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut alloc: Vec<u64> = quotas.iter().map(|q| (q.floor() as u64).max(1)).collect();
    let assigned: u64 = alloc.iter().sum();

    let gap = |i: usize, alloc: &[u64]| quotas[i] - alloc[i] as f64;
    match assigned.cmp(&total) {
        Ordering::Equal => {}
        Ordering::Less => {
            let mut order: Vec<usize> = (0..alloc.len()).collect();
            order.sort_by(|&a, &b| gap(b, &alloc).total_cmp(&gap(a, &alloc)).then(a.cmp(&b)));
            let mut remaining = total - assigned;
            for &i in order.iter().cycle() {
                if remaining == 0 {
                    break;
                }
                alloc[i] += 1;
                remaining -= 1;
            }
        }
        Ordering::Greater => {
            // Floors of one overshot the total; take units back from the
            // most over-allocated contributors that can spare one.
            let mut heap: BinaryHeap<Reverse<(OrdF64, usize)>> = (0..alloc.len())
                .filter(|&i| alloc[i] > 1)
                .map(|i| Reverse((OrdF64(gap(i, &alloc)), i)))
                .collect();
            let mut excess = assigned - total;
            while excess > 0 {
                let Reverse((_, i)) = heap.pop().expect("total >= contributors");
                alloc[i] -= 1;
                excess -= 1;
                if alloc[i] > 1 {
                    heap.push(Reverse((OrdF64(gap(i, &alloc)), i)));
                }
            }
        }
    }
    alloc
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// How many contributions a sweep population receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Individuals {
    Fixed(u64),
    /// N = ratio · R.
    PerContributor(u64),
}

impl Individuals {
    fn for_richness(self, richness: usize) -> u64 {
        match self {
            Individuals::Fixed(n) => n,
            Individuals::PerContributor(k) => k * richness as u64,
        }
    }
}

impl FromStr for Individuals {
    type Err = String;

    /// `50000` for a fixed total, `20x` for twenty per contributor.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |v: &str| v.parse::<u64>().map_err(|e| format!("{s:?}: {e}"));
        match s.strip_suffix('x') {
            Some(k) => Ok(Individuals::PerContributor(parse(k)?)),
            None => Ok(Individuals::Fixed(parse(s)?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub richness: usize,
    pub seed: u64,
    pub suite: MetricSuite,
}

/// Full-sample metric suites for every (richness, seed) pair, in
/// richness-major order.
pub fn richness_sweep(
    model: AbundanceModel,
    individuals: Individuals,
    richness: &[usize],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    richness_sweep_with(model, individuals, richness, seeds, Execution::default())
}

pub fn richness_sweep_with(
    model: AbundanceModel,
    individuals: Individuals,
    richness: &[usize],
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    if richness.is_empty() {
        return Err(Error::InvalidSpec("richness list is empty".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidSpec("seed list is empty".into()));
    }
    let tasks: Vec<PopulationSpec> = richness
        .iter()
        .flat_map(|&r| {
            seeds.iter().map(move |&seed| PopulationSpec {
                model,
                richness: r,
                individuals: individuals.for_richness(r),
                seed,
            })
        })
        .collect();
    exec.map(&tasks, |spec| {
        let table = generate(spec)?;
        Ok(SweepRow {
            richness: table.richness(),
            seed: spec.seed,
            suite: suite_with(&table, SubsampleSpec::FULL, Execution::Sequential),
        })
    })
    .into_iter()
    .collect()
}
