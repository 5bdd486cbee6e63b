//! Reader for the coordinate subset of TSPLIB: `TYPE: TSP`,
//! `EDGE_WEIGHT_TYPE: EUC_2D | GEO`, `NODE_COORD_SECTION`.
//!
//! Distances follow the TSPLIB conventions: `EUC_2D` rounds the
//! Euclidean distance to the nearest integer, `GEO` converts
//! `DDD.MM` degree-minute coordinates to radians and truncates the
//! geodesic distance on a sphere of radius 6378.388 km.

use std::path::Path;

use super::TspInstance;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWeightType {
    Euc2d,
    Geo,
}

/// Parsed problem before distances are computed.
#[derive(Debug, Clone, PartialEq)]
pub struct TsplibProblem {
    pub name: String,
    pub weight_type: EdgeWeightType,
    pub coords: Vec<(f64, f64)>,
}

impl TsplibProblem {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coords[i], self.coords[j]);
        match self.weight_type {
            EdgeWeightType::Euc2d => ((a.0 - b.0).hypot(a.1 - b.1) + 0.5).floor(),
            EdgeWeightType::Geo => geo_distance(a, b),
        }
    }

    pub fn to_instance(&self) -> Result<TspInstance> {
        let n = self.coords.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d[i * n + j] = self.distance(i, j);
                }
            }
        }
        TspInstance::from_matrix(n, d, self.name.clone())
    }
}

fn geo_radians(x: f64) -> f64 {
    const PI: f64 = 3.141592;
    let deg = x.trunc();
    let min = x - deg;
    PI * (deg + 5.0 * min / 3.0) / 180.0
}

fn geo_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    const RRR: f64 = 6378.388;
    let (lat_a, lon_a) = (geo_radians(a.0), geo_radians(a.1));
    let (lat_b, lon_b) = (geo_radians(b.0), geo_radians(b.1));
    let q1 = (lon_a - lon_b).cos();
    let q2 = (lat_a - lat_b).cos();
    let q3 = (lat_a + lat_b).cos();
    (RRR * (0.5 * ((1.0 + q1) * q2 - (1.0 - q1) * q3)).acos() + 1.0).trunc()
}

pub fn parse_tsplib(text: &str) -> Result<TsplibProblem> {
    let mut name = String::new();
    let mut dimension = None;
    let mut weight_type = None;
    let mut coords: Vec<Option<(f64, f64)>> = Vec::new();
    let mut in_coords = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_coords && !line.contains(':') && line != "NODE_COORD_SECTION" {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |msg: &str| Error::Parse { line: line_no, msg: msg.to_string() };
            if fields.len() != 3 {
                return Err(parse_err("expected `index x y`"));
            }
            let index: usize = fields[0].parse().map_err(|_| parse_err("bad node index"))?;
            let x: f64 = fields[1].parse().map_err(|_| parse_err("bad x coordinate"))?;
            let y: f64 = fields[2].parse().map_err(|_| parse_err("bad y coordinate"))?;
            let dim = dimension.ok_or_else(|| parse_err("coordinates before DIMENSION"))?;
            if index == 0 || index > dim {
                return Err(parse_err("node index out of range"));
            }
            if coords[index - 1].replace((x, y)).is_some() {
                return Err(parse_err("duplicate node index"));
            }
            continue;
        }
        if line == "NODE_COORD_SECTION" {
            in_coords = true;
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Parse { line: line_no, msg: format!("unexpected line `{line}`") })?;
        match key {
            "NAME" => name = value.to_string(),
            "TYPE" if value != "TSP" => {
                return Err(Error::Parse { line: line_no, msg: format!("unsupported problem type `{value}`") });
            }
            "DIMENSION" => {
                let d: usize = value
                    .parse()
                    .map_err(|_| Error::Parse { line: line_no, msg: "bad DIMENSION".into() })?;
                dimension = Some(d);
                coords = vec![None; d];
            }
            "EDGE_WEIGHT_TYPE" => {
                weight_type = Some(match value {
                    "EUC_2D" => EdgeWeightType::Euc2d,
                    "GEO" => EdgeWeightType::Geo,
                    other => return Err(Error::UnsupportedEdgeWeight(other.to_string())),
                });
            }
            _ => {}
        }
    }
    let weight_type = weight_type.ok_or(Error::Parse { line: 0, msg: "missing EDGE_WEIGHT_TYPE".into() })?;
    let dim = dimension.ok_or(Error::Parse { line: 0, msg: "missing DIMENSION".into() })?;
    let coords = coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| Error::Parse { line: 0, msg: format!("node {} has no coordinates", i + 1) }))
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(coords.len(), dim);
    Ok(TsplibProblem { name, weight_type, coords })
}

pub fn read_tsplib(path: &Path) -> Result<TsplibProblem> {
    parse_tsplib(&std::fs::read_to_string(path)?)
}
