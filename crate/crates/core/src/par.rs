//! Data-parallel helpers with a sequential fallback.
//!
//! Results never depend on the execution mode: maps keep index order and
//! sums are taken over fixed chunks that are then added in order.

/// How independent work items are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled, otherwise
    /// behaves like [`Mode::Sequential`].
    Parallel,
}

impl Default for Mode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

/// `(0..n).map(f)` collected in index order.
pub fn map_indexed<T, F>(mode: Mode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

const CHUNK: usize = 1024;

/// `Σ_{i<n} f(i)` summed chunk by chunk, so the rounding is identical in
/// both modes.
pub fn sum_indexed<F>(mode: Mode, n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let partial = map_indexed(mode, chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        (lo..hi).map(&f).sum::<f64>()
    });
    partial.into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / (1.0 + i as f64);
        let s = sum_indexed(Mode::Sequential, 100_000, f);
        let p = sum_indexed(Mode::Parallel, 100_000, f);
        assert_eq!(s.to_bits(), p.to_bits());
        assert_eq!(map_indexed(Mode::Parallel, 5, |i| i * i), vec![0, 1, 4, 9, 16]);
    }
}
