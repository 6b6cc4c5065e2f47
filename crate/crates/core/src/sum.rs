//! Neumaier-compensated floating point accumulation.

use std::iter::Sum;
use std::ops::AddAssign;

/// Running sum with a Neumaier correction term.
///
/// Error stays bounded independently of the number of terms, which matters
/// once a table holds hundreds of thousands of contributors.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator in, keeping both correction terms.
    pub fn combine(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

impl<'a> Sum<&'a NeumaierSum> for NeumaierSum {
    fn sum<I: Iterator<Item = &'a NeumaierSum>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for part in iter {
            acc.combine(part);
        }
        acc
    }
}

/// Compensated sum of a slice of values.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().sum::<NeumaierSum>().value()
}
