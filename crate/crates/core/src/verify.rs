//! Checking an archive against the graph it was built from.

use rand::Rng;

use crate::archive::LabelArchive;
use crate::error::{DecodeError, Error, Result};
use crate::gen::rng;
use crate::graph::Graph;

/// Up to this many vertices every pair is checked.
pub const ALL_PAIRS_LIMIT: usize = 5000;
/// Random pairs checked above the limit, in addition to every edge.
pub const SAMPLED_PAIRS: usize = 1_000_000;
/// Mismatches and errors kept in full in a report.
const KEPT: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub u: usize,
    pub v: usize,
    pub expected: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub pairs_checked: u64,
    pub sampled: bool,
    pub mismatch_count: u64,
    pub mismatches: Vec<Mismatch>,
    pub error_count: u64,
    pub errors: Vec<(usize, usize, DecodeError)>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.mismatch_count == 0 && self.error_count == 0
    }

    fn record(&mut self, u: usize, v: usize, expected: bool, got: Result<bool, DecodeError>) {
        self.pairs_checked += 1;
        match got {
            Ok(b) if b == expected => {}
            Ok(_) => {
                self.mismatch_count += 1;
                if self.mismatches.len() < KEPT {
                    self.mismatches.push(Mismatch { u, v, expected });
                }
            }
            Err(e) => {
                self.error_count += 1;
                if self.errors.len() < KEPT {
                    self.errors.push((u, v, e));
                }
            }
        }
    }
}

/// Compares decoded adjacency with `g`: all unordered pairs for small
/// graphs, otherwise every edge plus seeded random pairs.
pub fn verify_archive(archive: &LabelArchive, g: &Graph, seed: u64) -> Result<VerifyReport> {
    if archive.n != g.n() || archive.labels.len() != g.n() {
        return Err(Error::Archive(format!(
            "archive has {} vertices, graph has {}",
            archive.n,
            g.n()
        )));
    }
    let decoder = archive.decoder()?;
    let labels = &archive.labels;
    let n = g.n();
    let mut report = VerifyReport::default();
    if n <= ALL_PAIRS_LIMIT {
        for u in 0..n {
            for v in u + 1..n {
                report.record(
                    u,
                    v,
                    g.has_edge(u, v),
                    decoder.adjacent(&labels[u], &labels[v]),
                );
            }
        }
        return Ok(report);
    }
    report.sampled = true;
    for (u, v) in g.edges() {
        report.record(u, v, true, decoder.adjacent(&labels[u], &labels[v]));
    }
    let mut rng = rng(seed);
    for _ in 0..SAMPLED_PAIRS {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n - 1);
        let v = if v >= u { v + 1 } else { v };
        report.record(
            u,
            v,
            g.has_edge(u, v),
            decoder.adjacent(&labels[u], &labels[v]),
        );
    }
    Ok(report)
}
