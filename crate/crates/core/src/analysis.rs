//! Decay-exponent fitting across scales and assembly of singular-support /
//! wavefront-set maps from per-cell classifications.

use crate::error::{Error, Result};
use crate::generator::{GeneratorProfile, Variant};
use crate::spectra::AnalyticDistribution;
use crate::transform::{transform_scan, QuadratureSpec};
use rayon::prelude::*;

/// Classification thresholds; all config-exposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Fitted slope at or above this value counts as rapid decay.
    pub rapid_slope: f64,
    /// Maximum RMS log-residual for a trustworthy power law.
    pub residual: f64,
    /// Absolute magnitude floor; all-below-floor cells count as rapid.
    pub floor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            rapid_slope: 3.0,
            residual: 0.15,
            floor: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    Rapid,
    Power(f64),
    Undetermined,
    BelowFloor,
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self {
            Classification::Rapid => "rapid",
            Classification::Power(_) => "power",
            Classification::Undetermined => "undetermined",
            Classification::BelowFloor => "below_floor",
        }
    }
}

/// Log-log decay fit of |SH| across a scale ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub classification: Classification,
    pub scale_range: (f64, f64),
    pub count: usize,
    pub diagnostic: Option<String>,
}

impl DecayFit {
    /// Rapid in the Theorem sense: genuinely fast decay or everything under
    /// the magnitude floor.
    pub fn is_rapid(&self) -> bool {
        matches!(
            self.classification,
            Classification::Rapid | Classification::BelowFloor
        )
    }
}

/// Least-squares line through (ln a, ln |SH|) for entries above the floor.
pub fn fit_decay(scales: &[f64], magnitudes: &[f64], thresholds: &Thresholds) -> DecayFit {
    assert_eq!(scales.len(), magnitudes.len(), "mismatched scan lengths");
    let range = scales.iter().fold((f64::MAX, f64::MIN), |r, &a| {
        (r.0.min(a), r.1.max(a))
    });
    let usable: Vec<(f64, f64)> = scales
        .iter()
        .zip(magnitudes)
        .filter(|(_, &m)| m >= thresholds.floor)
        .map(|(&a, &m)| (a.ln(), m.ln()))
        .collect();
    if usable.is_empty() {
        return DecayFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            residual: f64::NAN,
            classification: Classification::BelowFloor,
            scale_range: range,
            count: 0,
            diagnostic: None,
        };
    }
    if usable.len() < 4 {
        // A clean tail that crossed the floor and stayed under it is decay
        // beyond measurability; anything else is unfittable. Magnitudes
        // within 10x of the floor are quadrature-noise gray zone and count
        // toward the tail.
        let min_solid = scales
            .iter()
            .zip(magnitudes)
            .filter(|(_, &m)| m >= 10.0 * thresholds.floor)
            .map(|(&a, _)| a)
            .fold(f64::MAX, f64::min);
        let clean_tail = scales
            .iter()
            .zip(magnitudes)
            .filter(|(_, &m)| m < 10.0 * thresholds.floor)
            .all(|(&a, _)| a < min_solid);
        let (classification, diagnostic) = if clean_tail {
            (
                Classification::Rapid,
                format!(
                    "{} of {} magnitudes fell below the floor at fine scales",
                    scales.len() - usable.len(),
                    scales.len()
                ),
            )
        } else {
            (
                Classification::Undetermined,
                format!(
                    "only {} of {} magnitudes above the floor; need at least 4",
                    usable.len(),
                    scales.len()
                ),
            )
        };
        return DecayFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            residual: f64::NAN,
            classification,
            scale_range: range,
            count: usable.len(),
            diagnostic: Some(diagnostic),
        };
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss: f64 = usable
        .iter()
        .map(|p| {
            let r = p.1 - (intercept + slope * p.0);
            r * r
        })
        .sum();
    let residual = (ss / n).sqrt();
    let classification = if slope >= thresholds.rapid_slope {
        Classification::Rapid
    } else if residual <= thresholds.residual {
        Classification::Power(slope)
    } else {
        Classification::Undetermined
    };
    DecayFit {
        slope,
        intercept,
        residual,
        classification,
        scale_range: range,
        count: usable.len(),
        diagnostic: None,
    }
}

/// Rectangular lattice of analysis locations.
#[derive(Debug, Clone, PartialEq)]
pub struct TGrid {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl TGrid {
    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidGrid("empty location grid".into()));
        }
        if !(self.x.0 <= self.x.1 && self.y.0 <= self.y.1) {
            return Err(Error::InvalidGrid("inverted grid bounds".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        let mut pts = Vec::with_capacity(self.nx * self.ny);
        for iy in 0..self.ny {
            for ix in 0..self.nx {
                pts.push([self.coord(self.x, ix, self.nx), self.coord(self.y, iy, self.ny)]);
            }
        }
        pts
    }

    pub fn spacing(&self) -> f64 {
        let dx = if self.nx > 1 {
            (self.x.1 - self.x.0) / (self.nx - 1) as f64
        } else {
            0.0
        };
        let dy = if self.ny > 1 {
            (self.y.1 - self.y.0) / (self.ny - 1) as f64
        } else {
            0.0
        };
        dx.max(dy)
    }

    fn coord(&self, range: (f64, f64), i: usize, n: usize) -> f64 {
        if n == 1 {
            0.5 * (range.0 + range.1)
        } else {
            range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
        }
    }
}

/// Uniform shear samples in [-1, 1].
pub fn shear_grid(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    if n == 1 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
        .collect()
}

/// One classified cell of the map.
#[derive(Debug, Clone)]
pub struct Cell {
    pub t: [f64; 2],
    pub t_index: usize,
    pub s: f64,
    pub s_index: usize,
    pub variant: Variant,
    pub fit: DecayFit,
}

impl Cell {
    /// Orientation (frequency slope) this cell represents; vertical cells
    /// stand for the reciprocal slope.
    pub fn orientation(&self) -> f64 {
        match self.variant {
            Variant::Horizontal => self.s,
            Variant::Vertical => {
                if self.s == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / self.s
                }
            }
        }
    }
}

/// Grid of decay fits over locations x shears x variants, with the derived
/// singular-support and wavefront masks. Maps are grid-resolution
/// estimates: neighborhood uniformity is approximated by finite sampling.
#[derive(Debug, Clone)]
pub struct WavefrontMap {
    pub t_points: Vec<[f64; 2]>,
    pub t_grid: TGrid,
    pub s_grid: Vec<f64>,
    pub scales: Vec<f64>,
    pub thresholds: Thresholds,
    /// Cell index layout: (t_index * s_len + s_index) * 2 + variant.
    pub cells: Vec<Cell>,
    pub singular_support_mask: Vec<bool>,
    pub wavefront_mask: Vec<bool>,
}

impl WavefrontMap {
    pub fn cell(&self, t_index: usize, s_index: usize, variant: Variant) -> &Cell {
        let v = match variant {
            Variant::Horizontal => 0,
            Variant::Vertical => 1,
        };
        &self.cells[(t_index * self.s_grid.len() + s_index) * 2 + v]
    }
}

fn validate_shears(s_grid: &[f64]) -> Result<()> {
    if s_grid.is_empty() {
        return Err(Error::InvalidGrid("empty shear grid".into()));
    }
    if s_grid.iter().any(|s| s.abs() > 1.0 || !s.is_finite()) {
        return Err(Error::InvalidGrid(
            "shear samples must lie in [-1, 1]".into(),
        ));
    }
    Ok(())
}

fn validate_scales(scales: &[f64]) -> Result<()> {
    if scales.len() < 4 {
        return Err(Error::InvalidScales(
            "need at least 4 scales for a decay fit".into(),
        ));
    }
    Ok(())
}

/// Default dyadic scale ladder 2^-4 .. 2^-12.
pub fn default_scales() -> Vec<f64> {
    (4..=12).map(|k| 0.5f64.powi(k)).collect()
}

/// Computes the full per-(t, s, variant) classification table plus masks.
pub fn wavefront_map(
    dist: &AnalyticDistribution,
    t_grid: &TGrid,
    s_grid: &[f64],
    scales: &[f64],
    profile: &GeneratorProfile,
    spec: &QuadratureSpec,
    thresholds: &Thresholds,
) -> Result<WavefrontMap> {
    t_grid.validate()?;
    validate_shears(s_grid)?;
    validate_scales(scales)?;
    dist.validate()?;
    let t_points = t_grid.points();
    let jobs: Vec<(usize, usize, Variant)> = (0..t_points.len())
        .flat_map(|ti| {
            (0..s_grid.len()).flat_map(move |si| {
                [
                    (ti, si, Variant::Horizontal),
                    (ti, si, Variant::Vertical),
                ]
            })
        })
        .collect();
    let cells: Vec<Cell> = jobs
        .par_iter()
        .map(|&(ti, si, variant)| {
            let t = t_points[ti];
            let s = s_grid[si];
            let fit = match transform_scan(dist, t, s, variant, scales, profile, spec) {
                Ok(values) => {
                    let mags: Vec<f64> = values.iter().map(|v| v.norm()).collect();
                    fit_decay(scales, &mags, thresholds)
                }
                Err(e) => DecayFit {
                    slope: f64::NAN,
                    intercept: f64::NAN,
                    residual: f64::NAN,
                    classification: Classification::Undetermined,
                    scale_range: (
                        *scales.last().unwrap_or(&f64::NAN),
                        *scales.first().unwrap_or(&f64::NAN),
                    ),
                    count: 0,
                    diagnostic: Some(format!("transform failed: {e}")),
                },
            };
            Cell {
                t,
                t_index: ti,
                s,
                s_index: si,
                variant,
                fit,
            }
        })
        .collect();

    let s_len = s_grid.len();
    let singular_support_mask: Vec<bool> = (0..t_points.len())
        .map(|ti| {
            !cells[ti * s_len * 2..(ti + 1) * s_len * 2]
                .iter()
                .all(|c| c.fit.is_rapid())
        })
        .collect();
    let wavefront_mask: Vec<bool> = cells.iter().map(|c| !c.fit.is_rapid()).collect();
    Ok(WavefrontMap {
        t_points,
        t_grid: t_grid.clone(),
        s_grid: s_grid.to_vec(),
        scales: scales.to_vec(),
        thresholds: *thresholds,
        cells,
        singular_support_mask,
        wavefront_mask,
    })
}

/// Per-location singular-support mask: a location is regular only when every
/// sampled shear in both variants classifies rapid.
pub fn singular_support_map(
    dist: &AnalyticDistribution,
    t_grid: &TGrid,
    s_samples: &[f64],
    scales: &[f64],
    profile: &GeneratorProfile,
    spec: &QuadratureSpec,
    thresholds: &Thresholds,
) -> Result<WavefrontMap> {
    wavefront_map(dist, t_grid, s_samples, scales, profile, spec, thresholds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_recovery() {
        let scales: Vec<f64> = (2..=10).map(|k| 0.5f64.powi(k)).collect();
        let mags: Vec<f64> = scales.iter().map(|a| 3.5 * a.powf(-0.75)).collect();
        let fit = fit_decay(&scales, &mags, &Thresholds::default());
        assert!((fit.slope + 0.75).abs() < 1e-12, "slope {}", fit.slope);
        assert!(matches!(fit.classification, Classification::Power(r) if (r + 0.75).abs() < 1e-12));
        assert!(fit.residual < 1e-12);
        assert!(!fit.is_rapid());
    }

    #[test]
    fn below_floor_counts_as_rapid() {
        let scales: Vec<f64> = (2..=8).map(|k| 0.5f64.powi(k)).collect();
        let mags = vec![1e-16; scales.len()];
        let fit = fit_decay(&scales, &mags, &Thresholds::default());
        assert_eq!(fit.classification, Classification::BelowFloor);
        assert!(fit.is_rapid());
    }

    #[test]
    fn noisy_fast_decay_classifies_rapid() {
        let scales: Vec<f64> = (2..=10).map(|k| 0.5f64.powi(k)).collect();
        // 1% multiplicative noise, deterministic
        let mut state = 7u64;
        let mags: Vec<f64> = scales
            .iter()
            .map(|a| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(11);
                let noise = 1.0 + 0.01 * (((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5);
                2.0 * a.powi(5) * noise
            })
            .collect();
        let fit = fit_decay(&scales, &mags, &Thresholds::default());
        assert!(fit.slope >= 3.0);
        assert_eq!(fit.classification, Classification::Rapid);
        assert!(fit.is_rapid());
    }

    #[test]
    fn too_few_usable_points() {
        // a clean below-floor tail counts as rapid decay
        let scales = vec![0.25, 0.125, 0.0625, 0.03125];
        let mags = vec![1.0, 1e-16, 1e-16, 1e-16];
        let fit = fit_decay(&scales, &mags, &Thresholds::default());
        assert_eq!(fit.classification, Classification::Rapid);
        assert!(fit.is_rapid());
        assert!(fit.diagnostic.is_some());
        // floor crossings interleaved with usable points are unfittable
        let mags = vec![1e-16, 1.0, 1e-16, 0.5];
        let fit = fit_decay(&scales, &mags, &Thresholds::default());
        assert_eq!(fit.classification, Classification::Undetermined);
        assert!(fit.diagnostic.is_some());
        assert!(!fit.is_rapid());
    }

    #[test]
    fn wobbly_magnitudes_fail_residual_gate() {
        let scales: Vec<f64> = (2..=10).map(|k| 0.5f64.powi(k)).collect();
        let mags: Vec<f64> = scales
            .iter()
            .enumerate()
            .map(|(i, a)| a.powf(-0.5) * if i % 2 == 0 { 3.0 } else { 0.3 })
            .collect();
        let fit = fit_decay(&scales, &mags, &Thresholds::default());
        assert_eq!(fit.classification, Classification::Undetermined);
    }

    #[test]
    fn grid_layout() {
        let g = TGrid {
            x: (0.0, 1.0),
            y: (0.0, 1.0),
            nx: 3,
            ny: 3,
        };
        let pts = g.points();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], [0.0, 0.0]);
        assert_eq!(pts[1], [0.5, 0.0]);
        assert_eq!(pts[8], [1.0, 1.0]);
        assert!((g.spacing() - 0.5).abs() < 1e-15);
        let s = shear_grid(9);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], -1.0);
        assert_eq!(s[4], 0.0);
        assert_eq!(s[8], 1.0);
    }

    #[test]
    fn dirac_map_small_grid() {
        let profile = GeneratorProfile::default_profile();
        let dist = AnalyticDistribution::Dirac { x0: [0.5, 0.5] };
        let grid = TGrid {
            x: (0.0, 1.0),
            y: (0.0, 1.0),
            nx: 3,
            ny: 3,
        };
        let scales: Vec<f64> = (4..=10).map(|k| 0.5f64.powi(k)).collect();
        let spec = QuadratureSpec {
            oscillation_factor: 4.0,
            ..QuadratureSpec::default()
        };
        let map = wavefront_map(
            &dist,
            &grid,
            &shear_grid(3),
            &scales,
            &profile,
            &spec,
            &Thresholds::default(),
        )
        .unwrap();
        // the only singular location is the grid point at (0.5, 0.5)
        for (ti, t) in map.t_points.iter().enumerate() {
            let on_point = (t[0] - 0.5).abs() < 1e-12 && (t[1] - 0.5).abs() < 1e-12;
            assert_eq!(map.singular_support_mask[ti], on_point, "t = {t:?}");
        }
        // at the Dirac location the fitted slope is -3/4 for every shear
        let ti = map
            .t_points
            .iter()
            .position(|t| (t[0] - 0.5).abs() < 1e-12 && (t[1] - 0.5).abs() < 1e-12)
            .unwrap();
        for si in 0..map.s_grid.len() {
            let cell = map.cell(ti, si, Variant::Horizontal);
            assert!(
                (cell.fit.slope + 0.75).abs() < 0.05,
                "slope {} at s={}",
                cell.fit.slope,
                cell.s
            );
        }
    }

    #[test]
    fn line_delta_map_flags_on_line_normal_cells() {
        let profile = GeneratorProfile::default_profile();
        let dist = AnalyticDistribution::LineDelta { p: 0.5 };
        let grid = TGrid {
            x: (-0.75, 0.75),
            y: (-0.75, 0.75),
            nx: 7,
            ny: 7,
        };
        let s_grid = shear_grid(9);
        let scales = default_scales();
        let map = wavefront_map(
            &dist,
            &grid,
            &s_grid,
            &scales,
            &profile,
            &QuadratureSpec::default(),
            &Thresholds::default(),
        )
        .unwrap();
        for cell in &map.cells {
            let on_line = (cell.t[0] + 0.5 * cell.t[1]).abs() < 1e-12;
            let normal_shear =
                cell.variant == Variant::Horizontal && (cell.s - 0.5).abs() < 1e-12;
            let flagged = !cell.fit.is_rapid();
            assert_eq!(
                flagged,
                on_line && normal_shear,
                "cell t={:?} s={} {:?}: fit {:?}",
                cell.t,
                cell.s,
                cell.variant,
                cell.fit.classification
            );
        }
    }
}
