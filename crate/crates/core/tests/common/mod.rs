//! Brute-force reference implementations used only by tests.
//!
//! These transcribe the index definitions directly and avoid the library's
//! code paths: exact big-integer factorials for Brillouin, exhaustive draw
//! enumeration for Simpson, double-double accumulation for sums of logs.

#![allow(dead_code)]

use num_bigint::BigUint;
use rand::Rng;

use tdn_diversity::FrequencyTable;

/// Error-free `a + b` split into rounded sum and exact residual.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Double-double accumulator (about 32 significant digits).
#[derive(Default, Clone, Copy)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, e + self.lo);
        self.hi = hi;
        self.lo = lo;
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn dd_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Dd::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

pub fn counts_of(t: &FrequencyTable) -> Vec<u64> {
    t.counts().collect()
}

/// H′ via the algebraically distinct form ln N − (1/N) Σ t ln t.
pub fn shannon_h(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    let s = dd_sum(counts.iter().map(|&t| t as f64 * (t as f64).ln()));
    n.ln() - s / n
}

/// H′ with proportions taken against an arbitrary denominator.
pub fn shannon_h_over(counts: &[u64], denominator: u64) -> f64 {
    let d = denominator as f64;
    -dd_sum(counts.iter().map(|&t| {
        let p = t as f64 / d;
        p * p.ln()
    }))
}

pub fn shannon_j(counts: &[u64]) -> Option<f64> {
    (counts.len() >= 2).then(|| shannon_h(counts) / (counts.len() as f64).ln())
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
}

/// Natural log of a big integer, from its top 64 bits and the bit shift.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).ln();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    let top = top.iter_u64_digits().next().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Brillouin H = ln(N! / Π t_j!) / N with exact integer factorials.
pub fn brillouin_h(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let denom = counts
        .iter()
        .fold(BigUint::from(1u32), |acc, &t| acc * factorial(t));
    let multinomial = factorial(n) / denom;
    ln_big(&multinomial) / n as f64
}

/// Ordered with-replacement draw pairs landing on the same contributor,
/// together with the total number of ordered pairs.
pub fn collision_pairs(counts: &[u64]) -> (u128, u128) {
    let owners: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(i, &t)| std::iter::repeat_n(i, t as usize))
        .collect();
    let mut same = 0u128;
    for a in &owners {
        for b in &owners {
            if a == b {
                same += 1;
            }
        }
    }
    let n = owners.len() as u128;
    (same, n * n)
}

pub fn simpson_lambda(counts: &[u64]) -> f64 {
    let (same, total) = collision_pairs(counts);
    same as f64 / total as f64
}

pub fn mcintosh_e(counts: &[u64]) -> Option<f64> {
    if counts.len() < 2 {
        return None;
    }
    let n: u64 = counts.iter().sum();
    let n = n as f64;
    let u = dd_sum(counts.iter().map(|&t| (t * t) as f64)).sqrt();
    let r = counts.len() as f64;
    Some((n - u) / (n - n / r.sqrt()))
}

/// E_var transcribed with ln p_i and the mean of ln p_j.
pub fn e_var(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let r = counts.len() as f64;
    let logs: Vec<f64> = counts.iter().map(|&t| (t as f64 / n as f64).ln()).collect();
    let mean = dd_sum(logs.iter().copied()) / r;
    let var = dd_sum(logs.iter().map(|l| (l - mean) * (l - mean))) / r;
    1.0 - 2.0 / std::f64::consts::PI * var.atan()
}

/// Relative comparison with an absolute floor for values at zero.
pub fn close(actual: f64, expected: f64, rel: f64) -> bool {
    let diff = (actual - expected).abs();
    diff <= rel * actual.abs().max(expected.abs()) || diff <= 1e-15
}

pub fn random_table<R: Rng>(rng: &mut R, max_richness: usize, max_count: u64) -> FrequencyTable {
    let r = rng.gen_range(1..=max_richness);
    FrequencyTable::from_counts((0..r).map(|i| (format!("id{i}"), rng.gen_range(1..=max_count))))
        .unwrap()
}

pub fn uniform_table(richness: usize, count: u64) -> FrequencyTable {
    FrequencyTable::from_counts((0..richness).map(|i| (format!("u{i:06}"), count))).unwrap()
}

/// Two-tailed Student-t p-value by Simpson quadrature of the density.
pub fn t_two_tailed_quadrature(t: f64, df: f64) -> f64 {
    let ln_norm = ln_gamma_lanczos((df + 1.0) / 2.0)
        - ln_gamma_lanczos(df / 2.0)
        - 0.5 * (df * std::f64::consts::PI).ln();
    let density = |x: f64| (ln_norm - (df + 1.0) / 2.0 * (1.0 + x * x / df).ln()).exp();
    let t = t.abs();
    let steps = 20_000;
    let h = t / steps as f64;
    let mut acc = Dd::default();
    for i in 0..=steps {
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc.add(w * density(i as f64 * h));
    }
    let central = 2.0 * acc.value() * h / 3.0;
    (1.0 - central).clamp(0.0, 1.0)
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7, n = 9).
fn ln_gamma_lanczos(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma_lanczos(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Naive two-pass Pearson r.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}
