use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::tsplib::parse_tsplib;
use super::TspInstance;
use crate::error::{Error, Result};
use crate::rng;

/// Number of cities of every built-in family.
pub const FAMILY_CITIES: usize = 16;

/// Mean off-diagonal distance after rescaling the ulysses16 instance.
pub const ULYSSES_MEAN_DISTANCE: f64 = 2.2;

const ULYSSES16: &str = include_str!("../../data/ulysses16.tsp");

/// Built-in instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TspKind {
    /// Uniform points on the `√N × √N` square.
    Random,
    /// Two Gaussian clusters (σ = 0.5) of six points plus four uniform points.
    SemiRandom,
    /// Fixed layout whose optimal tour traces an `H`.
    HCharacter,
    /// TSPLIB `ulysses16`, GEO distances rescaled to mean 2.2.
    Ulysses16,
}

impl fmt::Display for TspKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TspKind::Random => "random",
            TspKind::SemiRandom => "semi_random",
            TspKind::HCharacter => "h_character",
            TspKind::Ulysses16 => "ulysses16",
        })
    }
}

impl FromStr for TspKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "random" => TspKind::Random,
            "semi_random" => TspKind::SemiRandom,
            "h_character" => TspKind::HCharacter,
            "ulysses16" => TspKind::Ulysses16,
            other => return Err(Error::InvalidParameter(format!("unknown TSP family `{other}`"))),
        })
    }
}

/// A 16-city instance of the given family; `seed` matters only for the
/// random families.
pub fn generate_instance(kind: TspKind, seed: u64) -> Result<TspInstance> {
    let side = (FAMILY_CITIES as f64).sqrt();
    match kind {
        TspKind::Random => random_instance(FAMILY_CITIES, seed),
        TspKind::SemiRandom => {
            let mut r = rng::stream(seed, 0, 0);
            let noise = Normal::new(0.0, 0.5).expect("valid sigma");
            let mut pts = Vec::with_capacity(FAMILY_CITIES);
            for _ in 0..2 {
                let centre = (r.gen_range(1.0..side - 1.0), r.gen_range(1.0..side - 1.0));
                for _ in 0..6 {
                    let x = (centre.0 + noise.sample(&mut r)).clamp(0.0, side);
                    let y = (centre.1 + noise.sample(&mut r)).clamp(0.0, side);
                    pts.push((x, y));
                }
            }
            for _ in 0..4 {
                pts.push((r.gen_range(0.0..side), r.gen_range(0.0..side)));
            }
            TspInstance::from_points(&pts, format!("semi_random_{seed}"))
        }
        TspKind::HCharacter => {
            let mut pts = Vec::with_capacity(FAMILY_CITIES);
            for x in [1.0, 3.0] {
                for k in 0..6 {
                    pts.push((x, 0.8 * k as f64));
                }
            }
            for x in [1.4, 1.8, 2.2, 2.6] {
                pts.push((x, 2.0));
            }
            TspInstance::from_points(&pts, "h_character")
        }
        TspKind::Ulysses16 => Ok(parse_tsplib(ULYSSES16)?.to_instance()?.rescaled_to_mean(ULYSSES_MEAN_DISTANCE)),
    }
}

/// `n` uniform points on the `√n × √n` square.
pub fn random_instance(n: usize, seed: u64) -> Result<TspInstance> {
    TspInstance::from_points(&random_points(n, seed), format!("random_{n}_{seed}"))
}

fn random_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let side = (n as f64).sqrt();
    let mut r = rng::stream(seed, 0, 0);
    (0..n).map(|_| (r.gen_range(0.0..side), r.gen_range(0.0..side))).collect()
}
