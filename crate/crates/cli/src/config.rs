//! Flat JSON run configuration. Every section is optional with defaults;
//! each command validates the pieces it needs.

use serde::{Deserialize, Serialize};
use shearscope_core::analysis::{TGrid, Thresholds};
use shearscope_core::validation::FullEnergyGrids;
use shearscope_core::{AnalyticDistribution, BumpParams, QuadratureSpec, Sided, Variant};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default = "default_scales")]
    pub scales: Vec<f64>,
    #[serde(default)]
    pub thresholds: ThresholdConfig,
    #[serde(default)]
    pub distribution: Option<DistributionConfig>,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub gen_check: GenCheckConfig,
    #[serde(default)]
    pub frame_check: FrameCheckConfig,
    #[serde(default)]
    pub output_dir: Option<String>,
}

fn default_scales() -> Vec<f64> {
    (4..=12).map(|k| 0.5f64.powi(k)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub psi1_support: (f64, f64),
    pub psi1_sharpness: f64,
    pub psi2_sharpness: f64,
    pub sided: String,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            psi1_support: (0.5, 2.0),
            psi1_sharpness: 1.0,
            psi2_sharpness: 1.0,
            sided: "two_sided".into(),
        }
    }
}

impl ProfileConfig {
    pub fn to_params(&self) -> Result<BumpParams, String> {
        let sided = match self.sided.as_str() {
            "two_sided" => Sided::TwoSided,
            "positive_only" => Sided::PositiveOnly,
            "negative_only" => Sided::NegativeOnly,
            other => return Err(format!("unknown sided mode {other:?}")),
        };
        Ok(BumpParams {
            psi1_support: self.psi1_support,
            psi1_sharpness: self.psi1_sharpness,
            psi2_sharpness: self.psi2_sharpness,
            sided,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub base_nodes_u: usize,
    pub base_nodes_v: usize,
    pub oscillation_factor: f64,
    pub max_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        QuadratureConfig {
            base_nodes_u: q.base_nodes_u,
            base_nodes_v: q.base_nodes_v,
            oscillation_factor: q.oscillation_factor,
            max_nodes: q.max_nodes,
        }
    }
}

impl QuadratureConfig {
    pub fn to_spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            base_nodes_u: self.base_nodes_u,
            base_nodes_v: self.base_nodes_v,
            oscillation_factor: self.oscillation_factor,
            max_nodes: self.max_nodes,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    pub rapid_slope: f64,
    pub residual: f64,
    pub floor: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        let t = Thresholds::default();
        ThresholdConfig {
            rapid_slope: t.rapid_slope,
            residual: t.residual,
            floor: t.floor,
        }
    }
}

impl ThresholdConfig {
    pub fn to_thresholds(&self) -> Thresholds {
        Thresholds {
            rapid_slope: self.rapid_slope,
            residual: self.residual,
            floor: self.floor,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionConfig {
    Dirac { x0: [f64; 2] },
    LineDelta { p: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    TruncatedCone { p: f64, q: f64, extent: f64 },
    Disc { center: [f64; 2], radius: f64 },
    Bump {
        center: [f64; 2],
        halfwidth: [f64; 2],
        amplitude: f64,
        sharpness: f64,
    },
    Pgm { path: String },
}

impl DistributionConfig {
    pub fn build(&self) -> Result<AnalyticDistribution, String> {
        let dist = match self {
            DistributionConfig::Dirac { x0 } => AnalyticDistribution::Dirac { x0: *x0 },
            DistributionConfig::LineDelta { p } => AnalyticDistribution::LineDelta { p: *p },
            DistributionConfig::Polygon { vertices } => AnalyticDistribution::PolygonIndicator {
                vertices: vertices.clone(),
            },
            DistributionConfig::TruncatedCone { p, q, extent } => {
                shearscope_core::spectra::truncated_cone(*p, *q, *extent)
                    .map_err(|e| e.to_string())?
            }
            DistributionConfig::Disc { center, radius } => AnalyticDistribution::DiscIndicator {
                center: *center,
                radius: *radius,
            },
            DistributionConfig::Bump {
                center,
                halfwidth,
                amplitude,
                sharpness,
            } => AnalyticDistribution::BandlimitedBump {
                center: *center,
                halfwidth: *halfwidth,
                amplitude: *amplitude,
                sharpness: *sharpness,
            },
            DistributionConfig::Pgm { path } => {
                let bytes = std::fs::read(path).map_err(|e| format!("reading {path}: {e}"))?;
                shearscope_core::spectra::ingest_pgm(&bytes).map_err(|e| e.to_string())?
            }
        };
        dist.validate().map_err(|e| e.to_string())?;
        Ok(dist)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub t: [f64; 2],
    pub s: f64,
    #[serde(default = "default_variant")]
    pub variant: String,
}

fn default_variant() -> String {
    "horizontal".into()
}

pub fn parse_variant(name: &str) -> Result<Variant, String> {
    match name {
        "horizontal" => Ok(Variant::Horizontal),
        "vertical" => Ok(Variant::Vertical),
        other => Err(format!("unknown variant {other:?}")),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub s_count: usize,
}

impl GridConfig {
    pub fn to_tgrid(&self) -> TGrid {
        TGrid {
            x: self.x,
            y: self.y,
            nx: self.nx,
            ny: self.ny,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GenCheckConfig {
    pub xi1_range: (f64, f64),
    pub xi1_count: usize,
    pub slope_count: usize,
    pub tolerance: f64,
}

impl Default for GenCheckConfig {
    fn default() -> Self {
        GenCheckConfig {
            xi1_range: (2.0, 64.0),
            xi1_count: 20,
            slope_count: 20,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FrameCheckConfig {
    pub reduced_tolerance: f64,
    pub full_tolerance: f64,
    pub run_full: bool,
    pub full_grids: FullGridsConfig,
}

impl Default for FrameCheckConfig {
    fn default() -> Self {
        FrameCheckConfig {
            reduced_tolerance: 1e-6,
            full_tolerance: 5e-2,
            run_full: false,
            full_grids: FullGridsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FullGridsConfig {
    pub a_min: f64,
    pub a_nodes: usize,
    pub s_nodes: usize,
    pub t_half_extent: f64,
    pub t_nodes: usize,
    pub capture_required: f64,
}

impl Default for FullGridsConfig {
    fn default() -> Self {
        let g = FullEnergyGrids::default();
        FullGridsConfig {
            a_min: g.a_min,
            a_nodes: g.a_nodes,
            s_nodes: g.s_nodes,
            t_half_extent: g.t_half_extent,
            t_nodes: g.t_nodes,
            capture_required: g.capture_required,
        }
    }
}

impl FullGridsConfig {
    pub fn to_grids(&self) -> FullEnergyGrids {
        FullEnergyGrids {
            a_min: self.a_min,
            a_nodes: self.a_nodes,
            s_nodes: self.s_nodes,
            t_half_extent: self.t_half_extent,
            t_nodes: self.t_nodes,
            capture_required: self.capture_required,
        }
    }
}

impl RunConfig {
    pub fn load(path: &str) -> Result<RunConfig, String> {
        let text =
            std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|e| format!("config parse error: {e}"))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.scales.is_empty() {
            return Err("scale ladder must not be empty".into());
        }
        for w in self.scales.windows(2) {
            if !(w[1] < w[0]) {
                return Err("scales must be strictly decreasing".into());
            }
        }
        if self.scales.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err("scales must be positive".into());
        }
        let q = &self.quadrature;
        if q.base_nodes_u < 8 || q.base_nodes_v < 8 {
            return Err("quadrature node counts must be at least 8".into());
        }
        if q.max_nodes < q.base_nodes_u.max(q.base_nodes_v) {
            return Err("quadrature cap must be at least the base counts".into());
        }
        if !(q.oscillation_factor > 0.0) {
            return Err("oscillation factor must be positive".into());
        }
        let t = &self.thresholds;
        if !(t.floor > 0.0 && t.residual > 0.0) {
            return Err("thresholds must be positive".into());
        }
        if let Some(g) = &self.grid {
            if g.nx == 0 || g.ny == 0 || g.s_count == 0 {
                return Err("grid dimensions must be positive".into());
            }
            if !(g.x.0 <= g.x.1 && g.y.0 <= g.y.1) {
                return Err("grid bounds are inverted".into());
            }
        }
        let gc = &self.gen_check;
        if !(gc.xi1_range.0 >= 2.0 && gc.xi1_range.1 > gc.xi1_range.0) {
            return Err("gen_check xi1 range must lie inside the cone (start at 2)".into());
        }
        if gc.xi1_count == 0 || gc.slope_count == 0 {
            return Err("gen_check grid must be non-empty".into());
        }
        if !(gc.tolerance > 0.0) {
            return Err("gen_check tolerance must be positive".into());
        }
        Ok(())
    }
}
