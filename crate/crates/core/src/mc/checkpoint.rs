//! Binary snapshot of a [`QmcRun`].
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes       | field                                   |
//! |-------------|-----------------------------------------|
//! | 4           | magic `QAMC`                            |
//! | 4           | format version (`u32`, currently 1)     |
//! | 8 × 4       | `N`, `M`, completed steps, run seed     |
//! | 8 × 2       | `β_eff`, current `Γ` (`f64`)            |
//! | 32          | ChaCha8 key                             |
//! | 8           | ChaCha8 stream (`u64`)                  |
//! | 16          | ChaCha8 word position (`u128`)          |
//! | `N·M`       | spins as `i8`, slice-major              |
//!
//! Restoring a checkpoint and continuing gives bit-identical results to
//! an uninterrupted run.

use std::io::{Read, Write};

use rand::SeedableRng;

use super::{QmcRun, TrotterLattice};
use crate::error::{Error, Result};
use crate::ising::IsingInstance;
use crate::rng::Rng;

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"QAMC";
pub const CHECKPOINT_VERSION: u32 = 1;

/// Full state of a quantum-annealing run.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub n: u64,
    pub m: u64,
    pub step: u64,
    pub run_seed: u64,
    pub beta_eff: f64,
    pub gamma: f64,
    pub rng_key: [u8; 32],
    pub rng_stream: u64,
    pub rng_word_pos: u128,
    pub spins: Vec<i8>,
}

impl Checkpoint {
    pub fn capture(run: &QmcRun) -> Self {
        let lat = &run.lattice;
        Self {
            n: lat.n_spins() as u64,
            m: lat.m_trotter() as u64,
            step: run.step,
            run_seed: run.run_seed,
            beta_eff: lat.beta_eff(),
            gamma: lat.gamma(),
            rng_key: run.rng.get_seed(),
            rng_stream: run.rng.get_stream(),
            rng_word_pos: run.rng.get_word_pos(),
            spins: lat.spins().to_vec(),
        }
    }

    /// Rebuild the run; `instance` must have `N` spins.
    pub fn restore(&self, instance: &IsingInstance) -> Result<QmcRun> {
        if instance.n_spins() as u64 != self.n {
            return Err(Error::Checkpoint(format!(
                "checkpoint holds {} spins per slice but the instance has {}",
                self.n,
                instance.n_spins()
            )));
        }
        let lattice = TrotterLattice::from_spins(self.n as usize, self.m as usize, self.beta_eff, self.gamma, self.spins.clone())
            .map_err(|e| Error::Checkpoint(e.to_string()))?;
        let mut rng = Rng::from_seed(self.rng_key);
        rng.set_stream(self.rng_stream);
        rng.set_word_pos(self.rng_word_pos);
        Ok(QmcRun { lattice, rng, step: self.step, run_seed: self.run_seed })
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&CHECKPOINT_MAGIC)?;
        out.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        for v in [self.n, self.m, self.step, self.run_seed] {
            out.write_all(&v.to_le_bytes())?;
        }
        out.write_all(&self.beta_eff.to_le_bytes())?;
        out.write_all(&self.gamma.to_le_bytes())?;
        out.write_all(&self.rng_key)?;
        out.write_all(&self.rng_stream.to_le_bytes())?;
        out.write_all(&self.rng_word_pos.to_le_bytes())?;
        let bytes: Vec<u8> = self.spins.iter().map(|&s| s as u8).collect();
        out.write_all(&bytes)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if magic != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("not a checkpoint file (bad magic)".into()));
        }
        let version = u32::from_le_bytes(read_array(&mut input)?);
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported checkpoint version {version}")));
        }
        let n = u64::from_le_bytes(read_array(&mut input)?);
        let m = u64::from_le_bytes(read_array(&mut input)?);
        let step = u64::from_le_bytes(read_array(&mut input)?);
        let run_seed = u64::from_le_bytes(read_array(&mut input)?);
        let beta_eff = f64::from_le_bytes(read_array(&mut input)?);
        let gamma = f64::from_le_bytes(read_array(&mut input)?);
        let rng_key = read_array(&mut input)?;
        let rng_stream = u64::from_le_bytes(read_array(&mut input)?);
        let rng_word_pos = u128::from_le_bytes(read_array(&mut input)?);
        let len = n
            .checked_mul(m)
            .filter(|&l| l <= 1 << 32)
            .ok_or_else(|| Error::Checkpoint("implausible lattice size".into()))?;
        let mut bytes = vec![0u8; len as usize];
        input.read_exact(&mut bytes)?;
        let spins = bytes.into_iter().map(|b| b as i8).collect();
        Ok(Self { n, m, step, run_seed, beta_eff, gamma, rng_key, rng_stream, rng_word_pos, spins })
    }
}

fn read_array<const K: usize, R: Read>(input: &mut R) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    input.read_exact(&mut buf)?;
    Ok(buf)
}
