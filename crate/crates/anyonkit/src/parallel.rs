//! Threaded braid-word search.

use std::thread;

use anyonkit_core::braid_rep::BraidRep;
use anyonkit_core::gate_search::{search_partition, search_with, Partition, SearchError, SearchResult};
use anyonkit_core::linalg::CMatrix;

/// `gate_search::search` split over `workers` first-letter partitions,
/// one scoped thread each. The result does not depend on `workers`.
pub fn search_parallel(
    rep: &BraidRep,
    target: &CMatrix,
    max_len: usize,
    prune_tol: f64,
    workers: usize,
) -> Result<SearchResult, SearchError> {
    let parts = Partition::split(workers.max(1));
    search_with(rep, target, max_len, prune_tol, |lo, hi| {
        thread::scope(|s| {
            let handles: Vec<_> = parts
                .iter()
                .map(|&p| s.spawn(move || search_partition(rep, target, lo, hi, p)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .collect()
        })
    })
}

/// Worker count used when none is requested.
pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get()).min(8)
}
