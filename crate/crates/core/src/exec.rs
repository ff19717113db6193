//! Deterministic chunked execution of independent trials.
//!
//! Work is cut into fixed-size chunks whose boundaries depend only on the
//! trial count. Each chunk produces its own accumulator and the
//! accumulators are merged in chunk order, so the floating-point result is
//! identical for every worker count and for the sequential build.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Trials per chunk.
pub const CHUNK_TRIALS: u64 = 1024;

/// Accumulators that can absorb the result of a later chunk.
pub trait Merge {
    fn merge(&mut self, later: Self);
}

/// Random stream owned by trial `index`: a pure function of `(master_seed, index)`.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

fn chunk_ranges(total: u64, chunk: u64) -> impl Iterator<Item = Range<u64>> + Clone {
    let chunk = chunk.max(1);
    (0..total.div_ceil(chunk)).map(move |c| c * chunk..((c + 1) * chunk).min(total))
}

/// Runs `body` on every chunk of `0..total` and merges the results in order.
///
/// `workers == 1` always runs on the calling thread. With the `parallel`
/// feature, `workers == 0` uses the ambient rayon pool and `workers > 1` a
/// dedicated pool of that size.
pub fn run_chunks<A, F>(total: u64, chunk: u64, workers: usize, body: F) -> Option<A>
where
    A: Merge + Send,
    F: Fn(Range<u64>) -> A + Sync + Send,
{
    let ranges = chunk_ranges(total, chunk);
    let parts: Vec<A> = if workers == 1 {
        ranges.map(&body).collect()
    } else {
        parallel_map(ranges.collect(), workers, &body)
    };
    let mut parts = parts.into_iter();
    let mut acc = parts.next()?;
    for part in parts {
        acc.merge(part);
    }
    Some(acc)
}

#[cfg(feature = "parallel")]
fn parallel_map<A, F>(ranges: Vec<Range<u64>>, workers: usize, body: &F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<u64>) -> A + Sync + Send,
{
    use rayon::prelude::*;
    let run = || ranges.into_par_iter().map(body).collect();
    if workers == 0 {
        return run();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(run),
        Err(err) => {
            log::warn!("could not build a {workers}-thread pool ({err}); using the global pool");
            run()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<A, F>(ranges: Vec<Range<u64>>, _workers: usize, body: &F) -> Vec<A>
where
    A: Send,
    F: Fn(Range<u64>) -> A + Sync + Send,
{
    ranges.into_iter().map(body).collect()
}

/// Maps `f` over `items`, keeping input order. Parallel under the same
/// rules as [`run_chunks`].
pub fn map_ordered<T, U, F>(items: &[T], workers: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    if workers == 1 || items.len() < 2 {
        return items.iter().map(f).collect();
    }
    let ranges: Vec<Range<u64>> = (0..items.len() as u64).map(|i| i..i + 1).collect();
    parallel_map(
        ranges,
        workers,
        &|r: Range<u64>| f(&items[r.start as usize]),
    )
}

/// Running sums for a sample mean and its standard error.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MeanAccumulator {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Sample standard deviation over `sqrt(count)`.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

impl Merge for MeanAccumulator {
    fn merge(&mut self, later: Self) {
        self.count += later.count;
        self.sum += later.sum;
        self.sum_sq += later.sum_sq;
    }
}

impl<T: Merge> Merge for Vec<T> {
    fn merge(&mut self, later: Self) {
        debug_assert_eq!(self.len(), later.len());
        for (a, b) in self.iter_mut().zip(later) {
            a.merge(b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn uniform_mean(total: u64, workers: usize) -> MeanAccumulator {
        run_chunks(total, 100, workers, |range| {
            let mut acc = MeanAccumulator::default();
            for i in range {
                acc.push(trial_rng(11, i).random::<f64>());
            }
            acc
        })
        .unwrap()
    }

    #[test]
    fn chunks_cover_the_range_once() {
        let v: Vec<_> = chunk_ranges(10, 4).collect();
        assert_eq!(v, vec![0..4, 4..8, 8..10]);
        assert_eq!(chunk_ranges(0, 4).count(), 0);
        assert!(run_chunks(0, 4, 1, |_| MeanAccumulator::default()).is_none());
    }

    #[test]
    fn results_do_not_depend_on_workers() {
        let seq = uniform_mean(5_000, 1);
        for workers in [0, 2, 3, 8] {
            assert_eq!(uniform_mean(5_000, workers), seq);
        }
        assert!((seq.mean() - 0.5).abs() < 4.0 * seq.stderr());
    }

    #[test]
    fn trial_streams_are_distinct_and_reproducible() {
        let a: u64 = trial_rng(3, 17).random();
        let b: u64 = trial_rng(3, 17).random();
        let c: u64 = trial_rng(3, 18).random();
        let d: u64 = trial_rng(4, 17).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }
}
