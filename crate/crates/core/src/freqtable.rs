//! Contributor frequency tables and top-fraction subpopulations.
//!
//! A [`FrequencyTable`] maps opaque contributor ids to contribution counts.
//! It is immutable once built, always holds at least one contributor, and
//! iterates in ascending id order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrequencyTable {
    /// Sorted ascending by id, ids unique, counts >= 1.
    entries: Vec<(String, u64)>,
    total: u64,
}

impl FrequencyTable {
    /// Builds a table from `(id, count)` pairs given in any order.
    pub fn from_counts<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut entries: Vec<(String, u64)> = pairs
            .into_iter()
            .map(|(id, count)| (id.into(), count))
            .collect();
        if entries.is_empty() {
            return Err(Error::EmptyTable);
        }
        if let Some((id, _)) = entries.iter().find(|(_, c)| *c == 0) {
            return Err(Error::InvalidCount {
                id: id.clone(),
                count: 0,
                row: None,
            });
        }
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateId {
                id: w[0].0.clone(),
                row: None,
            });
        }
        Ok(Self::from_sorted(entries))
    }

    /// Builds a table from an accumulated id -> count map.
    pub(crate) fn from_tally(tally: HashMap<String, u64>) -> Result<Self> {
        Self::from_counts(tally)
    }

    fn from_sorted(entries: Vec<(String, u64)>) -> Self {
        let total = entries.iter().map(|(_, c)| *c).sum();
        Self { entries, total }
    }

    /// Total number of contributions, N.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct contributors, R.
    pub fn richness(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, id: &str) -> Option<u64> {
        self.entries
            .binary_search_by(|(k, _)| k.as_str().cmp(id))
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// `t_j / N` for one contributor.
    pub fn proportion(&self, id: &str) -> Option<f64> {
        self.get(id).map(|c| c as f64 / self.total as f64)
    }

    /// Entries in ascending id order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, u64)> + '_ {
        self.entries.iter().map(|(k, c)| (k.as_str(), *c))
    }

    pub fn counts(&self) -> impl ExactSizeIterator<Item = u64> + '_ {
        self.entries.iter().map(|(_, c)| *c)
    }

    pub(crate) fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn max_count(&self) -> u64 {
        self.counts().max().expect("table is never empty")
    }

    /// Entries ordered by descending count, ties by ascending id.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut ranked: Vec<(&str, u64)> = self.iter().collect();
        // Stable sort keeps the ascending-id order among equal counts.
        ranked.sort_by_key(|e| std::cmp::Reverse(e.1));
        ranked
    }

    /// Key-wise sum of two tables.
    pub fn merge(&self, other: &FrequencyTable) -> FrequencyTable {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len().max(b.len()));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        FrequencyTable {
            entries: out,
            total: self.total + other.total,
        }
    }

    /// Proportions over this table's own total.
    pub fn proportions(&self) -> ProportionView<'_> {
        ProportionView {
            table: self,
            denominator: self.total,
        }
    }

    /// The top `ceil(fraction * R)` contributors by count.
    ///
    /// Every retained count is >= every excluded count; ties at the boundary
    /// go to the smaller id.
    pub fn top_fraction(&self, spec: SubsampleSpec) -> Subsample {
        let keep = spec.fraction.retained(self.richness());
        let table = if keep == self.richness() {
            self.clone()
        } else {
            let mut kept: Vec<(String, u64)> = self
                .ranked()
                .into_iter()
                .take(keep)
                .map(|(id, c)| (id.to_owned(), c))
                .collect();
            kept.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            FrequencyTable::from_sorted(kept)
        };
        Subsample {
            table,
            parent_total: self.total,
            spec,
        }
    }

    /// N, R and the mean / population standard deviation of the proportions.
    pub fn summary(&self) -> TableSummary {
        let r = self.richness() as f64;
        let n = self.total as f64;
        let mean = 1.0 / r;
        let ss: NeumaierSum = self
            .counts()
            .map(|c| {
                let d = c as f64 / n - mean;
                d * d
            })
            .sum();
        TableSummary {
            total: self.total,
            richness: self.richness(),
            mean_proportion: mean,
            sd_proportion: (ss.value() / r).sqrt(),
        }
    }
}

/// Table 1 style description of a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableSummary {
    #[serde(rename = "n")]
    pub total: u64,
    pub richness: usize,
    #[serde(rename = "mean_p")]
    pub mean_proportion: f64,
    #[serde(rename = "sd_p")]
    pub sd_proportion: f64,
}

/// A table paired with the denominator its proportions are taken against.
#[derive(Debug, Clone, Copy)]
pub struct ProportionView<'a> {
    table: &'a FrequencyTable,
    denominator: u64,
}

impl<'a> ProportionView<'a> {
    pub fn table(&self) -> &'a FrequencyTable {
        self.table
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Sum of the proportions; 1 unless the view is a truncated subsample.
    pub fn coverage(&self) -> f64 {
        self.table.total as f64 / self.denominator as f64
    }
}

/// Share of contributors to retain, kept as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };
    pub const QUINTILE: Fraction = Fraction { num: 1, den: 5 };
    pub const DECILE: Fraction = Fraction { num: 1, den: 10 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidFraction(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Fraction {
            num: num / g,
            den: den / g,
        })
    }

    /// Converts through the shortest decimal representation of `value`,
    /// so `0.1` becomes exactly 1/10.
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidFraction(value.to_string()));
        }
        value.to_string().parse()
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `ceil(self * richness)`, never less than one.
    pub fn retained(&self, richness: usize) -> usize {
        let scaled = self.num as u128 * richness as u128;
        let keep = scaled.div_ceil(self.den as u128) as usize;
        keep.max(1)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl FromStr for Fraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFraction(s.to_owned());
        let trimmed = s.trim();
        let (int_part, frac_part) = match trimmed.split_once('.') {
            Some((i, f)) => (i, f),
            None => (trimmed, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) || frac_part.len() > 18 {
            return Err(bad());
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let int_val: u64 = if int_part.is_empty() {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        let frac_val: u64 = if frac_part.is_empty() {
            0
        } else {
            frac_part.parse().map_err(|_| bad())?
        };
        let num = int_val
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        Fraction::new(num, den).map_err(|_| bad())
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}.0", self.num)
        } else {
            write!(f, "{}", self.as_f64())
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(deserializer)?;
        Fraction::from_f64(v).map_err(serde::de::Error::custom)
    }
}

/// Which total a subsample's proportions are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProportionMode {
    /// Keep the parent table's N as denominator.
    #[default]
    Truncated,
    /// Recompute proportions against the subsample's own total.
    Renormalized,
}

impl FromStr for ProportionMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "truncated" => Ok(ProportionMode::Truncated),
            "renormalized" => Ok(ProportionMode::Renormalized),
            other => Err(format!("unknown proportion mode {other:?}")),
        }
    }
}

impl fmt::Display for ProportionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProportionMode::Truncated => "truncated",
            ProportionMode::Renormalized => "renormalized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsampleSpec {
    pub fraction: Fraction,
    pub mode: ProportionMode,
}

impl SubsampleSpec {
    pub const FULL: SubsampleSpec = SubsampleSpec::truncated(Fraction::ONE);
    pub const QUINTILE: SubsampleSpec = SubsampleSpec::truncated(Fraction::QUINTILE);
    pub const DECILE: SubsampleSpec = SubsampleSpec::truncated(Fraction::DECILE);

    pub const fn new(fraction: Fraction, mode: ProportionMode) -> Self {
        Self { fraction, mode }
    }

    pub const fn truncated(fraction: Fraction) -> Self {
        Self::new(fraction, ProportionMode::Truncated)
    }

    pub const fn renormalized(fraction: Fraction) -> Self {
        Self::new(fraction, ProportionMode::Renormalized)
    }
}

/// Result of [`FrequencyTable::top_fraction`].
#[derive(Debug, Clone, PartialEq)]
pub struct Subsample {
    table: FrequencyTable,
    parent_total: u64,
    spec: SubsampleSpec,
}

impl Subsample {
    pub fn table(&self) -> &FrequencyTable {
        &self.table
    }

    pub fn into_table(self) -> FrequencyTable {
        self.table
    }

    pub fn spec(&self) -> SubsampleSpec {
        self.spec
    }

    /// N of the table this subsample was drawn from.
    pub fn parent_total(&self) -> u64 {
        self.parent_total
    }

    pub fn proportions(&self) -> ProportionView<'_> {
        let denominator = match self.spec.mode {
            ProportionMode::Truncated => self.parent_total,
            ProportionMode::Renormalized => self.table.total,
        };
        ProportionView {
            table: &self.table,
            denominator,
        }
    }
}
