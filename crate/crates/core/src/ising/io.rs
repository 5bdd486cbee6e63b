//! Line-oriented instance text format.
//!
//! ```text
//! # topology: square2d side=3 periodic=true
//! 9
//! 0.1
//! 0 1 -0.4371
//! ...
//! ```
//!
//! Line one is `N`, line two is `h`, then one `i j J_ij` triple per line
//! with 0-based indices. Lines starting with `#` are comments; the optional
//! `# topology:` comment restores the storage layout. Floats are written in
//! shortest round-trip form, so write-then-read is bit-exact.

use std::io::{BufRead, Write};

use sha2::{Digest, Sha256};

use super::{IsingInstance, Topology};
use crate::error::{Error, Result};

pub fn write_instance<W: Write>(instance: &IsingInstance, mut out: W) -> Result<()> {
    let topo = match instance.topology() {
        Topology::Complete => "complete".to_string(),
        Topology::Square2D { side, periodic } => format!("square2d side={side} periodic={periodic}"),
        Topology::Custom => "custom".to_string(),
    };
    writeln!(out, "# topology: {topo}")?;
    writeln!(out, "{}", instance.n_spins())?;
    writeln!(out, "{:?}", instance.field())?;
    for (i, j, v) in instance.pairs() {
        writeln!(out, "{i} {j} {v:?}")?;
    }
    Ok(())
}

pub fn read_instance<R: BufRead>(input: R) -> Result<IsingInstance> {
    let mut topology = Topology::Custom;
    let mut n: Option<usize> = None;
    let mut h: Option<f64> = None;
    let mut pairs = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = lineno + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(t) = comment.trim().strip_prefix("topology:") {
                topology = parse_topology(t.trim()).map_err(err)?;
            }
            continue;
        }
        if n.is_none() {
            n = Some(trimmed.parse().map_err(|e| err(format!("spin count: {e}")))?);
        } else if h.is_none() {
            h = Some(trimmed.parse().map_err(|e| err(format!("field: {e}")))?);
        } else {
            let mut it = trimmed.split_whitespace();
            let (Some(i), Some(j), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
                return Err(err(format!("expected `i j J`, got `{trimmed}`")));
            };
            let i: usize = i.parse().map_err(|e| err(format!("index: {e}")))?;
            let j: usize = j.parse().map_err(|e| err(format!("index: {e}")))?;
            let v: f64 = v.parse().map_err(|e| err(format!("coupling: {e}")))?;
            pairs.push((i, j, v));
        }
    }
    let (Some(n), Some(h)) = (n, h) else {
        return Err(Error::Parse { line: 0, msg: "missing spin count or field".into() });
    };
    IsingInstance::from_pairs(n, pairs, h, topology)
}

fn parse_topology(s: &str) -> std::result::Result<Topology, String> {
    let mut words = s.split_whitespace();
    match words.next() {
        Some("complete") => Ok(Topology::Complete),
        Some("custom") => Ok(Topology::Custom),
        Some("square2d") => {
            let mut side = None;
            let mut periodic = None;
            for w in words {
                match w.split_once('=') {
                    Some(("side", v)) => side = v.parse().ok(),
                    Some(("periodic", v)) => periodic = v.parse().ok(),
                    _ => return Err(format!("unknown topology field `{w}`")),
                }
            }
            match (side, periodic) {
                (Some(side), Some(periodic)) => Ok(Topology::Square2D { side, periodic }),
                _ => Err("square2d needs side= and periodic=".into()),
            }
        }
        other => Err(format!("unknown topology {other:?}")),
    }
}

impl IsingInstance {
    /// SHA-256 of the text serialization, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut buf = Vec::new();
        write_instance(self, &mut buf).expect("writing to a Vec cannot fail");
        let digest = Sha256::digest(&buf);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
