//! Plain-text workloads: one `<op> <key>` record per line, `#` comments.

use std::fmt::Write;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Insert,
    Delete,
    Query,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Record {
    pub op: Op,
    pub key: i64,
}

impl Record {
    fn code(&self) -> char {
        match self.op {
            Op::Insert => 'i',
            Op::Delete => 'd',
            Op::Query => 'q',
        }
    }
}

pub fn parse(text: &str) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |why: &str| CliError::Parse(format!("line {}: {why}: {raw:?}", i + 1));
        let mut parts = line.split_whitespace();
        let op = match parts.next() {
            Some("i") => Op::Insert,
            Some("d") => Op::Delete,
            Some("q") => Op::Query,
            _ => return Err(bad("expected op i, d or q")),
        };
        let key = parts
            .next()
            .ok_or_else(|| bad("missing key"))?
            .parse::<i64>()
            .map_err(|_| bad("key is not a 64-bit integer"))?;
        if parts.next().is_some() {
            return Err(bad("trailing fields"));
        }
        out.push(Record { op, key });
    }
    Ok(out)
}

pub fn render(records: &[Record], header: &str) -> String {
    let mut out = String::with_capacity(records.len() * 10 + header.len() + 2);
    let _ = writeln!(out, "# {header}");
    for r in records {
        let _ = writeln!(out, "{} {}", r.code(), r.key);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Random,
    Ascending,
    Descending,
    InterleavedDelete,
}

pub const RNG_NAME: &str = "splitmix64";

/// Deterministic workload for a fixed seed. Random keys are drawn from
/// `[0, 4n)`.
pub fn generate(kind: GenKind, n: u64, seed: u64) -> Vec<Record> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let range = (4 * n).max(1) as i64;
    let insert = |key| Record { op: Op::Insert, key };
    match kind {
        GenKind::Random => (0..n).map(|_| insert(rng.random_range(0..range))).collect(),
        GenKind::Ascending => (1..=n as i64).map(insert).collect(),
        GenKind::Descending => (1..=n as i64).rev().map(insert).collect(),
        GenKind::InterleavedDelete => {
            let mut live: Vec<i64> = (0..n).map(|_| rng.random_range(0..range)).collect();
            let mut out: Vec<Record> = live.iter().map(|&k| insert(k)).collect();
            for _ in 0..n / 2 {
                let victim = live.swap_remove(rng.random_range(0..live.len()));
                out.push(Record { op: Op::Delete, key: victim });
                let fresh = rng.random_range(0..range);
                live.push(fresh);
                out.push(insert(fresh));
            }
            out
        }
    }
}
