//! Multi-threaded batch execution.
//!
//! Each worker scores a contiguous slice of the batch into its own gradient
//! buffer; buffers are merged in worker order, so a run is reproducible for a
//! fixed worker count. One worker is exactly the sequential mode.

use std::num::NonZeroUsize;
use std::thread;

use hyperkge_core::eval::{filtered_rank, queries_of, QueryRecord};
use hyperkge_core::model::SparseGrad;
use hyperkge_core::train::{data_term, BatchExecutor, LabeledTriple};
use hyperkge_core::{EmbeddingTable, EvalOptions, RankReport, Result, Split, TripleStore};

#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    workers: NonZeroUsize,
}

impl Threaded {
    pub fn new(workers: NonZeroUsize) -> Self {
        Self { workers }
    }

    pub fn workers(&self) -> usize {
        self.workers.get()
    }

    fn chunk_len(&self, len: usize) -> usize {
        len.div_ceil(self.workers()).max(1)
    }
}

impl BatchExecutor for Threaded {
    fn data_term(&self, table: &EmbeddingTable, items: &[LabeledTriple]) -> Result<(f64, SparseGrad)> {
        if self.workers() == 1 {
            return data_term(table, items);
        }
        let parts: Vec<Result<(f64, SparseGrad)>> = thread::scope(|s| {
            let handles: Vec<_> = items
                .chunks(self.chunk_len(items.len()))
                .map(|chunk| s.spawn(move || data_term(table, chunk)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut loss = 0.0;
        let mut grads = SparseGrad::default();
        for part in parts {
            let (l, g) = part?;
            loss += l;
            grads.merge(&g);
        }
        Ok((loss, grads))
    }

    fn evaluate(&self, table: &EmbeddingTable, store: &TripleStore, split: Split, options: EvalOptions) -> Result<RankReport> {
        if self.workers() == 1 {
            return hyperkge_core::evaluate(table, store, split, options);
        }
        let triples = store.split(split);
        if triples.is_empty() {
            return Err(hyperkge_core::Error::EmptySplit(split));
        }
        let queries: Vec<_> = queries_of(triples).collect();
        let parts: Vec<Result<Vec<QueryRecord>>> = thread::scope(|s| {
            let handles: Vec<_> = queries
                .chunks(self.chunk_len(queries.len()))
                .map(|chunk| {
                    s.spawn(move || {
                        chunk
                            .iter()
                            .map(|&(triple, direction)| {
                                filtered_rank(table, store, triple, direction, options).map(|rank| QueryRecord {
                                    triple,
                                    direction,
                                    rank,
                                })
                            })
                            .collect()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut records = Vec::with_capacity(queries.len());
        for part in parts {
            records.extend(part?);
        }
        Ok(RankReport::from_records(records))
    }
}
