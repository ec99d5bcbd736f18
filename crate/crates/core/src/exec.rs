//! Execution policy for the data-parallel inner loops.
//!
//! Every helper here produces bit-identical results under both policies:
//! reductions are split into fixed-size blocks whose partial results are
//! combined in index order, so thread scheduling never changes the
//! floating-point summation order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Block length for deterministic reductions.
const BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Rayon worker pool. Falls back to sequential execution when the crate
    /// is built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this policy actually runs on more than one thread.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    /// `(0..n).map(f).collect()`.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Applies `f(index, &mut item)` to every element.
    pub fn for_each_mut<T, F>(self, data: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize, &mut T) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            data.par_iter_mut().enumerate().for_each(|(i, x)| f(i, x));
            return;
        }
        data.iter_mut().enumerate().for_each(|(i, x)| f(i, x));
    }

    /// Applies `f(chunk_index, chunk)` to consecutive chunks of `len` items.
    pub fn for_each_chunk_mut<T, F>(self, data: &mut [T], len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            data.par_chunks_mut(len)
                .enumerate()
                .for_each(|(i, c)| f(i, c));
            return;
        }
        data.chunks_mut(len).enumerate().for_each(|(i, c)| f(i, c));
    }

    /// Deterministic `sum_{i<n} f(i)`.
    pub fn sum<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let blocks = n.div_ceil(BLOCK);
        self.map(blocks, |b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n);
            (lo..hi).map(&f).sum::<f64>()
        })
        .into_iter()
        .sum()
    }

    /// Deterministic maximum of `f(i)` (NaN-propagating); `-inf` when `n == 0`.
    pub fn max<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let blocks = n.div_ceil(BLOCK);
        self.map(blocks, |b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n);
            (lo..hi).map(&f).fold(f64::NEG_INFINITY, nan_max)
        })
        .into_iter()
        .fold(f64::NEG_INFINITY, nan_max)
    }

    /// `ln sum_{i<n} exp(f(i))` without overflow. Entries equal to `-inf`
    /// contribute nothing; the result is `-inf` when every entry is.
    pub fn log_sum_exp<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let peak = self.max(n, &f);
        if !peak.is_finite() {
            return peak;
        }
        let s = self.sum(n, |i| (f(i) - peak).exp());
        peak + s.ln()
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
