//! Deterministic chunked scans with resumable progress.
//!
//! A scan partitions `0..total` into fixed-size chunks and processes chunks
//! in parallel. Results are stored per chunk and merged in chunk order, so
//! the outcome is independent of the worker count; the completed-chunk table
//! doubles as checkpoint state for multi-hour exhaustive runs.

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use std::ops::Range;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChunkedScan<R> {
    pub total: u64,
    pub chunk_size: u64,
    /// One slot per chunk; `Some` once the chunk has been processed.
    pub results: Vec<Option<R>>,
}

impl<R: Send + Sync + Clone + Serialize + DeserializeOwned> ChunkedScan<R> {
    pub fn new(total: u64, chunk_size: u64) -> Self {
        assert!(chunk_size > 0, "chunk size must be positive");
        let chunks = if total == 0 {
            0
        } else {
            (total + chunk_size - 1) / chunk_size
        };
        ChunkedScan {
            total,
            chunk_size,
            results: vec![None; chunks as usize],
        }
    }

    pub fn num_chunks(&self) -> u64 {
        self.results.len() as u64
    }

    pub fn chunk_range(&self, idx: u64) -> Range<u64> {
        let lo = idx * self.chunk_size;
        let hi = (lo + self.chunk_size).min(self.total);
        lo..hi
    }

    pub fn completed_chunks(&self) -> u64 {
        self.results.iter().filter(|r| r.is_some()).count() as u64
    }

    pub fn is_complete(&self) -> bool {
        self.results.iter().all(|r| r.is_some())
    }

    /// Checks that a deserialized checkpoint matches this scan's geometry.
    pub fn compatible_with(&self, other: &ChunkedScan<R>) -> bool {
        self.total == other.total
            && self.chunk_size == other.chunk_size
            && self.results.len() == other.results.len()
    }

    /// Processes all missing chunks. `work` maps a chunk's rank range to its
    /// result and must be pure; chunks are dispatched in parallel batches and
    /// `on_batch` is invoked after each batch (checkpoint hook).
    pub fn run<F, C>(&mut self, batch_chunks: usize, work: F, mut on_batch: C)
    where
        F: Fn(u64, Range<u64>) -> R + Sync + Send,
        C: FnMut(&Self),
    {
        let pending: Vec<u64> = (0..self.num_chunks())
            .filter(|&i| self.results[i as usize].is_none())
            .collect();
        for batch in pending.chunks(batch_chunks.max(1)) {
            let outputs: Vec<(u64, R)> = batch
                .par_iter()
                .map(|&idx| (idx, work(idx, self.chunk_range(idx))))
                .collect();
            for (idx, r) in outputs {
                self.results[idx as usize] = Some(r);
            }
            on_batch(self);
        }
    }

    /// Completed results in chunk order (all chunks must be done).
    pub fn into_results(self) -> Vec<R> {
        self.results
            .into_iter()
            .map(|r| r.expect("scan complete"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_range_exactly_once() {
        let mut scan: ChunkedScan<Vec<u64>> = ChunkedScan::new(103, 10);
        assert_eq!(scan.num_chunks(), 11);
        scan.run(4, |_, range| range.collect(), |_| {});
        let merged: Vec<u64> = scan.into_results().into_iter().flatten().collect();
        assert_eq!(merged, (0..103).collect::<Vec<_>>());
    }

    #[test]
    fn resume_skips_completed_chunks() {
        let mut scan: ChunkedScan<u64> = ChunkedScan::new(100, 10);
        scan.results[3] = Some(999); // pretend chunk 3 was done in an earlier run
        scan.run(2, |_, range| range.sum(), |_| {});
        assert_eq!(scan.results[3], Some(999));
        assert!(scan.is_complete());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let mut scan: ChunkedScan<u64> = ChunkedScan::new(1000, 7);
                scan.run(5, |idx, range| range.sum::<u64>() ^ idx, |_| {});
                scan.into_results()
            })
        };
        assert_eq!(run_with(1), run_with(2));
    }

    #[test]
    fn empty_scan() {
        let mut scan: ChunkedScan<u64> = ChunkedScan::new(0, 10);
        assert!(scan.is_complete());
        scan.run(1, |_, range| range.sum(), |_| {});
        assert_eq!(scan.into_results(), Vec::<u64>::new());
    }
}
