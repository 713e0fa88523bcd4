//! Gridded terrain model and the wind field derived from it.
//!
//! Elevations live on a regular grid of point samples (ESRI ASCII-grid
//! compatible). Queries between nodes are answered by bilinear interpolation,
//! so a query at a node reproduces the stored sample exactly and a query
//! inside a cell is bounded by the four surrounding samples.
//!
//! The wind model is intentionally simple: every node gets a base vector whose
//! horizontal part follows a configured direction angle and whose vertical
//! part follows the local slope toward the downwind neighbor. The base vector
//! is then rotated by a fixed angle about an axis perpendicular to both the
//! local flow and its downwind continuation, which tilts the flow along the
//! terrain without changing its speed. Wind acts on an airframe as a
//! quadratic drag force `F = c_d * v * |v|` applied per axis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

use crate::Vec3;

#[derive(Debug, thiserror::Error)]
pub enum TerrainError {
    #[error("point ({x}, {y}) lies outside the elevation grid")]
    OutOfBounds { x: f64, y: f64 },
    #[error("invalid elevation grid: {0}")]
    InvalidGrid(String),
    #[error("failed to read grid file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse grid file: {0}")]
    Parse(String),
}

/// Regular elevation grid. Row 0 is the southernmost row; node `(row, col)`
/// sits at `(origin_x + col*cellsize, origin_y + row*cellsize)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DemGrid {
    pub ncols: usize,
    pub nrows: usize,
    /// Node spacing in meters (square cells).
    pub cellsize: f64,
    /// World coordinates of node (0, 0).
    pub origin_x: f64,
    pub origin_y: f64,
    /// Row-major samples, `elevations[row * ncols + col]`, meters.
    pub elevations: Vec<f64>,
}

impl DemGrid {
    pub fn new(
        ncols: usize,
        nrows: usize,
        cellsize: f64,
        origin_x: f64,
        origin_y: f64,
        elevations: Vec<f64>,
    ) -> Result<Self, TerrainError> {
        if ncols < 2 || nrows < 2 {
            return Err(TerrainError::InvalidGrid(format!(
                "need at least 2x2 nodes, got {nrows}x{ncols}"
            )));
        }
        if !(cellsize > 0.0) || !cellsize.is_finite() {
            return Err(TerrainError::InvalidGrid(format!(
                "cellsize must be positive and finite, got {cellsize}"
            )));
        }
        if elevations.len() != ncols * nrows {
            return Err(TerrainError::InvalidGrid(format!(
                "expected {} samples, got {}",
                ncols * nrows,
                elevations.len()
            )));
        }
        if let Some(bad) = elevations.iter().find(|e| !e.is_finite()) {
            return Err(TerrainError::InvalidGrid(format!(
                "non-finite elevation sample {bad}"
            )));
        }
        Ok(Self {
            ncols,
            nrows,
            cellsize,
            origin_x,
            origin_y,
            elevations,
        })
    }

    /// Flat grid at a constant elevation, mostly for tests.
    pub fn flat(ncols: usize, nrows: usize, cellsize: f64, elevation: f64) -> Self {
        Self::new(ncols, nrows, cellsize, 0.0, 0.0, vec![elevation; ncols * nrows])
            .expect("flat grid parameters are valid")
    }

    /// Synthetic terrain: a sum of seeded Gaussian hills over a flat base.
    /// Deterministic for a given seed and geometry.
    pub fn synthetic(
        ncols: usize,
        nrows: usize,
        cellsize: f64,
        n_hills: usize,
        amplitude_range: (f64, f64),
        sigma_range: (f64, f64),
        seed: u64,
    ) -> Result<Self, TerrainError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let width = (ncols - 1) as f64 * cellsize;
        let height = (nrows - 1) as f64 * cellsize;
        let hills: Vec<(f64, f64, f64, f64)> = (0..n_hills)
            .map(|_| {
                let cx = rng.gen_range(0.0..=width);
                let cy = rng.gen_range(0.0..=height);
                let amp = rng.gen_range(amplitude_range.0..=amplitude_range.1);
                let sigma = rng.gen_range(sigma_range.0..=sigma_range.1);
                (cx, cy, amp, sigma)
            })
            .collect();
        let mut elevations = vec![0.0; ncols * nrows];
        for row in 0..nrows {
            for col in 0..ncols {
                let x = col as f64 * cellsize;
                let y = row as f64 * cellsize;
                let z: f64 = hills
                    .iter()
                    .map(|&(cx, cy, amp, sigma)| {
                        let d2 = (x - cx).powi(2) + (y - cy).powi(2);
                        amp * (-d2 / (2.0 * sigma * sigma)).exp()
                    })
                    .sum();
                elevations[row * ncols + col] = z;
            }
        }
        Self::new(ncols, nrows, cellsize, 0.0, 0.0, elevations)
    }

    pub fn sample(&self, row: usize, col: usize) -> f64 {
        self.elevations[row * self.ncols + col]
    }

    /// World-coordinate extent covered by the grid nodes.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.origin_x,
            self.origin_y,
            self.origin_x + (self.ncols - 1) as f64 * self.cellsize,
            self.origin_y + (self.nrows - 1) as f64 * self.cellsize,
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, y0, x1, y1) = self.bounds();
        x >= x0 && x <= x1 && y >= y0 && y <= y1
    }

    /// Bilinear elevation at `(x, y)`. Exact at nodes, bounded by the four
    /// surrounding samples elsewhere.
    pub fn interpolate_elevation(&self, x: f64, y: f64) -> Result<f64, TerrainError> {
        if !self.contains(x, y) || !x.is_finite() || !y.is_finite() {
            return Err(TerrainError::OutOfBounds { x, y });
        }
        let gx = (x - self.origin_x) / self.cellsize;
        let gy = (y - self.origin_y) / self.cellsize;
        // Clamp so queries on the far edges fall into the last cell with a
        // fractional coordinate of exactly 1.
        let col = (gx.floor() as usize).min(self.ncols - 2);
        let row = (gy.floor() as usize).min(self.nrows - 2);
        let fx = gx - col as f64;
        let fy = gy - row as f64;
        let z00 = self.sample(row, col);
        let z01 = self.sample(row, col + 1);
        let z10 = self.sample(row + 1, col);
        let z11 = self.sample(row + 1, col + 1);
        let south = z00 * (1.0 - fx) + z01 * fx;
        let north = z10 * (1.0 - fx) + z11 * fx;
        Ok(south * (1.0 - fy) + north * fy)
    }

    /// True when `p` keeps at least `buffer` meters of straight-line distance
    /// from the terrain. Checks every grid node within twice the buffer
    /// radius horizontally plus the interpolated foot point directly below
    /// `p` (clamped to the grid for points beyond the edge).
    pub fn clearance(&self, p: Vec3, buffer: f64) -> bool {
        let (x0, y0, x1, y1) = self.bounds();
        let fx = p.x.clamp(x0, x1);
        let fy = p.y.clamp(y0, y1);
        let foot = self
            .interpolate_elevation(fx, fy)
            .expect("clamped foot point is inside the grid");
        let foot_d2 = (p.x - fx).powi(2) + (p.y - fy).powi(2) + (p.z - foot).powi(2);
        if foot_d2 < buffer * buffer {
            return false;
        }
        let reach = 2.0 * buffer;
        let c_lo = (((p.x - reach) - self.origin_x) / self.cellsize).floor().max(0.0) as usize;
        let c_hi = ((((p.x + reach) - self.origin_x) / self.cellsize).ceil() as usize)
            .min(self.ncols - 1);
        let r_lo = (((p.y - reach) - self.origin_y) / self.cellsize).floor().max(0.0) as usize;
        let r_hi = ((((p.y + reach) - self.origin_y) / self.cellsize).ceil() as usize)
            .min(self.nrows - 1);
        for row in r_lo..=r_hi {
            for col in c_lo..=c_hi {
                let nx = self.origin_x + col as f64 * self.cellsize;
                let ny = self.origin_y + row as f64 * self.cellsize;
                let h2 = (p.x - nx).powi(2) + (p.y - ny).powi(2);
                if h2 > reach * reach {
                    continue;
                }
                let dz = p.z - self.sample(row, col);
                if h2 + dz * dz < buffer * buffer {
                    return false;
                }
            }
        }
        true
    }

    /// Lowest altitude above `(x, y)` that satisfies [`Self::clearance`].
    /// Only terrain within `buffer` horizontal meters can constrain a point
    /// on the vertical line, so the answer is a closed-form maximum.
    pub fn min_clear_altitude(&self, x: f64, y: f64, buffer: f64) -> Result<f64, TerrainError> {
        let foot = self.interpolate_elevation(x, y)?;
        let mut z_min = foot + buffer;
        let c_lo = (((x - buffer) - self.origin_x) / self.cellsize).floor().max(0.0) as usize;
        let c_hi =
            ((((x + buffer) - self.origin_x) / self.cellsize).ceil() as usize).min(self.ncols - 1);
        let r_lo = (((y - buffer) - self.origin_y) / self.cellsize).floor().max(0.0) as usize;
        let r_hi =
            ((((y + buffer) - self.origin_y) / self.cellsize).ceil() as usize).min(self.nrows - 1);
        for row in r_lo..=r_hi {
            for col in c_lo..=c_hi {
                let nx = self.origin_x + col as f64 * self.cellsize;
                let ny = self.origin_y + row as f64 * self.cellsize;
                let h2 = (x - nx).powi(2) + (y - ny).powi(2);
                if h2 < buffer * buffer {
                    let z = self.sample(row, col) + (buffer * buffer - h2).sqrt();
                    z_min = z_min.max(z);
                }
            }
        }
        Ok(z_min)
    }

    /// Parse an ESRI ASCII grid. File rows run north to south; they are
    /// flipped into the south-first in-memory layout.
    pub fn from_esri_ascii(path: &Path) -> Result<Self, TerrainError> {
        let text = std::fs::read_to_string(path)?;
        let mut ncols = None;
        let mut nrows = None;
        let mut cellsize = None;
        let mut xll = 0.0;
        let mut yll = 0.0;
        let mut nodata: Option<f64> = None;
        let mut values = Vec::new();
        for line in text.lines() {
            let mut parts = line.split_whitespace();
            let Some(first) = parts.next() else { continue };
            let key = first.to_ascii_lowercase();
            let parse = |parts: &mut std::str::SplitWhitespace, key: &str| {
                parts
                    .next()
                    .ok_or_else(|| TerrainError::Parse(format!("missing value for {key}")))?
                    .parse::<f64>()
                    .map_err(|e| TerrainError::Parse(format!("bad value for {key}: {e}")))
            };
            match key.as_str() {
                "ncols" => ncols = Some(parse(&mut parts, "ncols")? as usize),
                "nrows" => nrows = Some(parse(&mut parts, "nrows")? as usize),
                "xllcorner" => xll = parse(&mut parts, "xllcorner")?,
                "yllcorner" => yll = parse(&mut parts, "yllcorner")?,
                "cellsize" => cellsize = Some(parse(&mut parts, "cellsize")?),
                "nodata_value" => nodata = Some(parse(&mut parts, "nodata_value")?),
                _ => {
                    for tok in std::iter::once(first).chain(parts) {
                        values.push(tok.parse::<f64>().map_err(|e| {
                            TerrainError::Parse(format!("bad elevation '{tok}': {e}"))
                        })?);
                    }
                }
            }
        }
        let ncols = ncols.ok_or_else(|| TerrainError::Parse("missing ncols".into()))?;
        let nrows = nrows.ok_or_else(|| TerrainError::Parse("missing nrows".into()))?;
        let cellsize = cellsize.ok_or_else(|| TerrainError::Parse("missing cellsize".into()))?;
        if values.len() != ncols * nrows {
            return Err(TerrainError::Parse(format!(
                "expected {} samples, found {}",
                ncols * nrows,
                values.len()
            )));
        }
        if let Some(nd) = nodata {
            if values.iter().any(|v| *v == nd) {
                return Err(TerrainError::InvalidGrid(
                    "grid contains NODATA cells; fill them before use".into(),
                ));
            }
        }
        let mut elevations = vec![0.0; ncols * nrows];
        for (file_row, chunk) in values.chunks(ncols).enumerate() {
            let mem_row = nrows - 1 - file_row;
            elevations[mem_row * ncols..(mem_row + 1) * ncols].copy_from_slice(chunk);
        }
        Self::new(ncols, nrows, cellsize, xll, yll, elevations)
    }

    /// Serialize as an ESRI ASCII grid (north row first).
    pub fn to_esri_ascii(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "ncols {}", self.ncols);
        let _ = writeln!(out, "nrows {}", self.nrows);
        let _ = writeln!(out, "xllcorner {}", self.origin_x);
        let _ = writeln!(out, "yllcorner {}", self.origin_y);
        let _ = writeln!(out, "cellsize {}", self.cellsize);
        for mem_row in (0..self.nrows).rev() {
            let row = &self.elevations[mem_row * self.ncols..(mem_row + 1) * self.ncols];
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Rotate `f` by `angle` radians about the axis `(f x f_next) x z`. Returns
/// the rotated vector and whether the axis was degenerate (parallel flows or
/// zero input), in which case `f` comes back unchanged.
pub fn rotate_wind(f: Vec3, f_next: Vec3, angle: f64) -> (Vec3, bool) {
    let axis = f.cross(&f_next).cross(&Vec3::new(0.0, 0.0, 1.0));
    let scale = f.norm() * f_next.norm();
    if axis.norm() <= 1e-12 * scale.max(1e-300) {
        return (f, true);
    }
    let o = axis / axis.norm();
    let (s, c) = angle.sin_cos();
    // Axis-angle rotation: R = cos(a) I + (1 - cos(a)) o o^T + sin(a) [o]x.
    let rotated = f * c + o * (o.dot(&f)) * (1.0 - c) + o.cross(&f) * s;
    (rotated, false)
}

/// Per-node wind vectors tied to a [`DemGrid`]'s geometry.
#[derive(Debug, Clone)]
pub struct WindField {
    pub direction_angle: f64,
    pub rotation_angle: f64,
    /// Unrotated per-node vectors (m/s), row-major like the grid.
    pub base_vectors: Vec<Vec3>,
    /// Terrain-rotated per-node vectors (m/s); same norms as the base ones.
    pub rotated_vectors: Vec<Vec3>,
    ncols: usize,
    nrows: usize,
    cellsize: f64,
    origin_x: f64,
    origin_y: f64,
}

impl WindField {
    /// Build the field from terrain. Each node's base vector is
    /// `(d, d/tan(dir), dz/tan(dir))` with `d` the node spacing and `dz` the
    /// elevation rise toward the downwind neighbor; the vector is then
    /// rescaled to `speed` m/s so the slope shapes only its direction. A zero
    /// `speed` disables wind entirely.
    pub fn from_dem(grid: &DemGrid, direction_angle: f64, rotation_angle: f64, speed: f64) -> Self {
        let n = grid.ncols * grid.nrows;
        let inv_tan = {
            let t = direction_angle.tan();
            if t.abs() < 1e-12 || !t.is_finite() {
                0.0
            } else {
                1.0 / t
            }
        };
        // Downwind neighbor: one node step along the dominant horizontal
        // direction of the base vector.
        let hdir = nalgebra::Vector2::new(1.0, inv_tan).normalize();
        let step_c = hdir.x.round() as isize;
        let step_r = hdir.y.round() as isize;
        let neighbor = |row: usize, col: usize| -> (usize, usize) {
            let nr = (row as isize + step_r).clamp(0, grid.nrows as isize - 1) as usize;
            let nc = (col as isize + step_c).clamp(0, grid.ncols as isize - 1) as usize;
            (nr, nc)
        };
        let mut base_vectors = vec![Vec3::zeros(); n];
        if speed > 0.0 {
            for row in 0..grid.nrows {
                for col in 0..grid.ncols {
                    let (nr, nc) = neighbor(row, col);
                    let dz = grid.sample(nr, nc) - grid.sample(row, col);
                    let raw = Vec3::new(grid.cellsize, grid.cellsize * inv_tan, dz * inv_tan);
                    let norm = raw.norm();
                    base_vectors[row * grid.ncols + col] = if norm > 0.0 {
                        raw * (speed / norm)
                    } else {
                        Vec3::zeros()
                    };
                }
            }
        }
        let mut rotated_vectors = vec![Vec3::zeros(); n];
        for row in 0..grid.nrows {
            for col in 0..grid.ncols {
                let (nr, nc) = neighbor(row, col);
                let f = base_vectors[row * grid.ncols + col];
                let f_next = base_vectors[nr * grid.ncols + nc];
                rotated_vectors[row * grid.ncols + col] = rotate_wind(f, f_next, rotation_angle).0;
            }
        }
        Self {
            direction_angle,
            rotation_angle,
            base_vectors,
            rotated_vectors,
            ncols: grid.ncols,
            nrows: grid.nrows,
            cellsize: grid.cellsize,
            origin_x: grid.origin_x,
            origin_y: grid.origin_y,
        }
    }

    /// Wind vector (m/s) of the node nearest to `p`; points beyond the grid
    /// clamp to the border node.
    pub fn wind_at(&self, p: Vec3) -> Vec3 {
        let col = (((p.x - self.origin_x) / self.cellsize).round().max(0.0) as usize)
            .min(self.ncols - 1);
        let row = (((p.y - self.origin_y) / self.cellsize).round().max(0.0) as usize)
            .min(self.nrows - 1);
        self.rotated_vectors[row * self.ncols + col]
    }

    /// Drag force (N) the wind at `p` exerts on an airframe:
    /// `F_i = c_d * v_i * |v|`.
    pub fn force_at(&self, p: Vec3, drag_coeff: f64) -> Vec3 {
        let v = self.wind_at(p);
        v * (drag_coeff * v.norm())
    }
}
