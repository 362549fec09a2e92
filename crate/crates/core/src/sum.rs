//! Compensated (Kahan-Babuska-Neumaier) summation.
//!
//! The quartic coefficient and lifted-variable formulas add dozens of terms
//! of alternating sign whose magnitudes dwarf the result; plain left-to-right
//! accumulation loses several digits on large frames.

use std::iter::Sum;
use std::ops::AddAssign;

#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
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

/// Compensated sum of a slice of terms, accumulated in slice order.
#[inline]
pub fn csum(terms: &[f64]) -> f64 {
    terms.iter().copied().sum::<NeumaierSum>().value()
}

/// Compensated dot product of two equally long slices.
pub fn cdot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .sum::<NeumaierSum>()
        .value()
}
