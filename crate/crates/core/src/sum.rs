//! Compensated summation and deterministic chunked reductions.
//!
//! Every long sum in the crate goes through [`CompensatedSum`]. Parallel
//! reductions split the index range into chunks whose boundaries depend only
//! on the range length, never on the worker count, and the per-chunk partials
//! are merged in chunk order. Results are therefore bit-identical for any
//! thread pool size.

use std::ops::Range;

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum into this one.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Real and imaginary parts accumulated separately.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub const fn new() -> Self {
        Self {
            re: CompensatedSum::new(),
            im: CompensatedSum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Default chunk length for range reductions.
pub const CHUNK: usize = 1 << 16;

/// Applies `f` to consecutive chunks of `range` and returns the results in
/// chunk order. Chunks run in parallel when the `parallel` feature is on.
pub fn map_chunks<T, F>(range: Range<usize>, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let len = range.end.saturating_sub(range.start);
    let n_chunks = len.div_ceil(chunk);
    let bounds = move |i: usize| {
        let lo = range.start + i * chunk;
        lo..(lo + chunk).min(range.end)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n_chunks).into_par_iter().map(|i| f(bounds(i))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_chunks).map(|i| f(bounds(i))).collect()
    }
}

/// Sums `term(i)` over `range` with a deterministic chunked reduction.
pub fn sum_range<F>(range: Range<usize>, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let parts = map_chunks(range, CHUNK, |r| r.map(&term).collect::<CompensatedSum>());
    let mut acc = CompensatedSum::new();
    for p in &parts {
        acc.merge(p);
    }
    acc.value()
}
