//! Compensated summation used by every j≠k accumulation in the crate.

/// Neumaier (improved Kahan) accumulator. The running compensation keeps the
/// partial sums accurate to a couple of ulps regardless of term count, which
/// is what keeps the 1e-12 tolerances meaningful for n up to 64.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of terms.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = KahanSum::new();
    for x in terms {
        acc.add(x);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        // 1 + 1e100 - 1e100 loses the 1 in naive summation
        assert_eq!(kahan_sum([1.0, 1e100, 1.0, -1e100]), 2.0);
    }

    #[test]
    fn two_equal_terms_are_exact() {
        let x = 0.1f64;
        assert_eq!(kahan_sum([x, x]), 2.0 * x);
    }
}
