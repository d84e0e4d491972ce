//! Precomputed energy landscapes serving low-cost objective evaluations.
//!
//! A grid stores the exact energy mean and standard deviation of the QAOA
//! state on a regular lattice over a parameter box. Subsequent queries are
//! answered by multilinear interpolation; finite-shot evaluations add
//! Gaussian noise `N(0, std²/shots)`, the large-shot limit of sampling the
//! circuit. This replaces per-query circuit simulation when benchmarking
//! optimizers over many configurations.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dfo::ObjectiveOracle;
use crate::error::{Error, Result};
use crate::problems::ProblemInstance;
use crate::simulator::{MixerKind, PreparedQaoa, QaoaParams};

/// Cap on `resolution^dims` grid cells.
pub const DEFAULT_CELL_CAP: u64 = 10_000_000;

/// Magic bytes of the grid container format.
const GRID_MAGIC: &[u8; 4] = b"QGRD";
const GRID_VERSION: u32 = 1;
/// dims > 4 grids are out of scope; the cap also bounds what import will
/// allocate from untrusted files.
const MAX_DIMS: usize = 4;

/// Mean and std energy grids over a `dims`-dimensional parameter box.
///
/// Node ordering is row-major with dimension 0 slowest: for `p = 1`,
/// dimension 0 is `γ` and dimension 1 is `β`. Node `i` along a dimension
/// with bounds `(lo, hi)` sits at `lo + i·(hi − lo)/(resolution − 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    dims: usize,
    bounds: Vec<(f64, f64)>,
    resolution: usize,
    center: Vec<f64>,
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl LandscapeGrid {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn nodes(&self) -> usize {
        self.mean.len()
    }

    fn step(&self, dim: usize) -> f64 {
        let (lo, hi) = self.bounds[dim];
        (hi - lo) / (self.resolution - 1) as f64
    }

    /// Coordinates of the node with flat index `flat`.
    pub fn node_coord(&self, flat: usize) -> Vec<f64> {
        let mut rest = flat;
        let mut coord = vec![0.0; self.dims];
        for dim in (0..self.dims).rev() {
            let i = rest % self.resolution;
            rest /= self.resolution;
            coord[dim] = self.bounds[dim].0 + i as f64 * self.step(dim);
        }
        coord
    }

    /// Multilinear interpolation of `(mean, std)` at `point`; coordinates
    /// outside the box are clamped to it, reported by the flag.
    pub fn interpolate_clamped(&self, point: &[f64]) -> Result<(f64, f64, bool)> {
        if point.len() != self.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims,
                got: point.len(),
            });
        }
        let mut clamped = false;
        let mut cell = vec![0usize; self.dims];
        let mut frac = vec![0.0; self.dims];
        for dim in 0..self.dims {
            let (lo, hi) = self.bounds[dim];
            let mut x = point[dim];
            if x < lo || x > hi {
                clamped = true;
                x = x.clamp(lo, hi);
            }
            let t = (x - lo) / self.step(dim);
            let i = (t.floor() as usize).min(self.resolution - 2);
            cell[dim] = i;
            frac[dim] = t - i as f64;
        }
        let mut mean = 0.0;
        let mut std = 0.0;
        for corner in 0u32..(1 << self.dims) {
            let mut weight = 1.0;
            let mut flat = 0usize;
            for dim in 0..self.dims {
                let hi_side = (corner >> dim) & 1 == 1;
                weight *= if hi_side { frac[dim] } else { 1.0 - frac[dim] };
                flat = flat * self.resolution + cell[dim] + hi_side as usize;
            }
            mean += weight * self.mean[flat];
            std += weight * self.std[flat];
        }
        Ok((mean, std, clamped))
    }

    /// Interpolated `(mean, std)` at a point inside the box.
    pub fn interpolate(&self, point: &[f64]) -> Result<(f64, f64)> {
        self.interpolate_clamped(point).map(|(m, s, _)| (m, s))
    }

    /// Finite-shot evaluation: `mean + z·std/√shots` with one standard
    /// normal draw `z` from `seed`. Deterministic given the seed.
    pub fn sampled_eval(&self, point: &[f64], shots: u64, seed: u64) -> Result<f64> {
        if shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        let (mean, std, _) = self.interpolate_clamped(point)?;
        if std == 0.0 {
            return Ok(mean);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z: f64 = StandardNormal.sample(&mut rng);
        Ok(mean + z * std / (shots as f64).sqrt())
    }

    /// Serializes the grid into the `QGRD` container.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + 8 * (3 * self.dims + 2 * self.nodes()));
        out.extend_from_slice(GRID_MAGIC);
        out.extend_from_slice(&GRID_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dims as u32).to_le_bytes());
        out.extend_from_slice(&(self.resolution as u32).to_le_bytes());
        for &(lo, hi) in &self.bounds {
            out.extend_from_slice(&lo.to_le_bytes());
            out.extend_from_slice(&hi.to_le_bytes());
        }
        for &c in &self.center {
            out.extend_from_slice(&c.to_le_bytes());
        }
        for value in self.mean.iter().chain(&self.std) {
            out.extend_from_slice(&value.to_le_bytes());
        }
        out
    }

    /// Parses a `QGRD` container. Rejects malformed headers, unknown
    /// versions, payload-length mismatches, and non-finite entries without
    /// returning a partial grid.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = Cursor { bytes, at: 0 };
        let magic = cursor.take(4)?;
        if magic != GRID_MAGIC {
            return Err(Error::Schema("bad magic; not a QGRD grid container".into()));
        }
        let version = cursor.u32()?;
        if version != GRID_VERSION {
            return Err(Error::Schema(format!("unsupported grid version {version}")));
        }
        let dims = cursor.u32()? as usize;
        if dims < 1 || dims > MAX_DIMS {
            return Err(Error::Schema(format!("dims {dims} outside 1..={MAX_DIMS}")));
        }
        let resolution = cursor.u32()? as usize;
        if resolution < 2 {
            return Err(Error::Schema(format!("resolution {resolution} below 2")));
        }
        let cells = (resolution as u128).pow(dims as u32);
        if cells > DEFAULT_CELL_CAP as u128 {
            return Err(Error::GridCapacity {
                cells,
                max: DEFAULT_CELL_CAP,
            });
        }
        let nodes = cells as usize;
        let expected = 16 + 8 * (2 * dims + dims + 2 * nodes);
        if bytes.len() != expected {
            return Err(Error::Schema(format!(
                "container is {} bytes, header implies {expected}",
                bytes.len()
            )));
        }
        let mut bounds = Vec::with_capacity(dims);
        for dim in 0..dims {
            let lo = cursor.f64()?;
            let hi = cursor.f64()?;
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::Schema(format!("bad bounds for dimension {dim}")));
            }
            bounds.push((lo, hi));
        }
        let mut center = Vec::with_capacity(dims);
        for _ in 0..dims {
            let c = cursor.f64()?;
            if !c.is_finite() {
                return Err(Error::Schema("non-finite center".into()));
            }
            center.push(c);
        }
        let mut mean = Vec::with_capacity(nodes);
        for _ in 0..nodes {
            let v = cursor.f64()?;
            if !v.is_finite() {
                return Err(Error::Schema("non-finite mean entry".into()));
            }
            mean.push(v);
        }
        let mut std = Vec::with_capacity(nodes);
        for _ in 0..nodes {
            let v = cursor.f64()?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Schema("invalid std entry".into()));
            }
            std.push(v);
        }
        Ok(Self {
            dims,
            bounds,
            resolution,
            center,
            mean,
            std,
        })
    }

    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn import(path: impl AsRef<Path>) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    /// Writes plot rows `γ…, β…, mean, std`, one per node in flat order.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        let p = self.dims / 2;
        let mut header = Vec::new();
        if self.dims == 2 {
            header.push("gamma".to_string());
            header.push("beta".to_string());
        } else {
            for i in 1..=p {
                header.push(format!("gamma_{i}"));
            }
            for i in 1..=p {
                header.push(format!("beta_{i}"));
            }
        }
        writeln!(writer, "{},mean,std", header.join(","))?;
        for flat in 0..self.nodes() {
            let coord = self.node_coord(flat);
            for c in &coord {
                write!(writer, "{c},")?;
            }
            writeln!(writer, "{},{}", self.mean[flat], self.std[flat])?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.at + len > self.bytes.len() {
            return Err(Error::Schema("container truncated".into()));
        }
        let slice = &self.bytes[self.at..self.at + len];
        self.at += len;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// The default box: `width` per dimension, centered on `center`.
pub fn centered_bounds(center: &[f64], width: f64) -> Vec<(f64, f64)> {
    center.iter().map(|c| (c - width / 2.0, c + width / 2.0)).collect()
}

/// Evaluates the exact `(mean, std)` energy of the instance's QAOA state at
/// every grid node. `dims = 2p`; nodes are simulated in parallel and
/// assembled in flat order.
pub fn compute_landscape(
    inst: &ProblemInstance,
    p: usize,
    mixer: MixerKind,
    bounds: &[(f64, f64)],
    resolution: usize,
) -> Result<LandscapeGrid> {
    compute_landscape_capped(inst, p, mixer, bounds, resolution, DEFAULT_CELL_CAP)
}

/// [`compute_landscape`] with an explicit cell cap.
pub fn compute_landscape_capped(
    inst: &ProblemInstance,
    p: usize,
    mixer: MixerKind,
    bounds: &[(f64, f64)],
    resolution: usize,
    cell_cap: u64,
) -> Result<LandscapeGrid> {
    let dims = 2 * p;
    if p == 0 {
        return Err(Error::InvalidArgument("landscape needs p >= 1".into()));
    }
    if bounds.len() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims,
            got: bounds.len(),
        });
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "resolution {resolution} below 2"
        )));
    }
    for &(lo, hi) in bounds {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("bad bounds ({lo}, {hi})")));
        }
    }
    let cells = (resolution as u128).pow(dims as u32);
    if cells > cell_cap as u128 {
        return Err(Error::GridCapacity {
            cells,
            max: cell_cap,
        });
    }
    let prepared = PreparedQaoa::new(inst, mixer)?;
    let grid = LandscapeGrid {
        dims,
        bounds: bounds.to_vec(),
        resolution,
        center: bounds.iter().map(|&(lo, hi)| (lo + hi) / 2.0).collect(),
        mean: Vec::new(),
        std: Vec::new(),
    };
    let nodes = cells as usize;
    let moments: Vec<(f64, f64)> = (0..nodes)
        .into_par_iter()
        .map(|flat| {
            let params = QaoaParams::from_point(&grid.node_coord(flat))
                .expect("grid coordinates form valid parameters");
            prepared.energy_moments(&params)
        })
        .collect::<Result<_>>()?;
    let (mean, std) = moments.into_iter().unzip();
    Ok(LandscapeGrid {
        mean,
        std,
        ..grid
    })
}

/// [`ObjectiveOracle`] backed by a grid: answers evaluations in the raw
/// `(γ, β)` space, optionally negated so minimizers maximize the energy.
/// Out-of-box queries are clamped and counted.
pub struct LandscapeOracle {
    grid: Arc<LandscapeGrid>,
    negate: bool,
    clamp_events: AtomicU64,
}

impl LandscapeOracle {
    pub fn new(grid: Arc<LandscapeGrid>, negate: bool) -> Self {
        Self {
            grid,
            negate,
            clamp_events: AtomicU64::new(0),
        }
    }

    pub fn clamp_events(&self) -> u64 {
        self.clamp_events.load(Ordering::Relaxed)
    }

    pub fn grid(&self) -> &LandscapeGrid {
        &self.grid
    }
}

impl ObjectiveOracle for LandscapeOracle {
    fn dim(&self) -> usize {
        self.grid.dims
    }

    fn eval(&self, point: &[f64], shots: u64, seed: u64) -> f64 {
        let mut clamped = false;
        let inside: Vec<f64> = point
            .iter()
            .zip(&self.grid.bounds)
            .map(|(&x, &(lo, hi))| {
                let c = x.clamp(lo, hi);
                clamped |= c != x;
                c
            })
            .collect();
        if clamped {
            self.clamp_events.fetch_add(1, Ordering::Relaxed);
        }
        let value = self
            .grid
            .sampled_eval(&inside, shots.max(1), seed)
            .expect("clamped point is inside the box");
        if self.negate {
            -value
        } else {
            value
        }
    }
}

#[cfg(test)]
#[path = "landscape_tests.rs"]
mod tests;
