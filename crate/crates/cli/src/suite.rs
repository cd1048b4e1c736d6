//! The `verify-geometry` checks and their pass thresholds.

use bubblecert::geometry::{
    self, kn_product, BiricciCase, FdConfig, HypersurfaceCase, SymBilinear,
};
use bubblecert::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const KN_TOLERANCE: f64 = 1e-14;
pub const FD_TOLERANCE: f64 = 1e-4;
pub const FRAME_TOLERANCE: f64 = 1e-12;
pub const TRANSFORM_TOLERANCE: f64 = 1e-10;
pub const ALGEBRAIC_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    All,
    Kn,
    Conformal,
    Hypersurface,
    Biricci,
    Inequality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub check_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckSummary>,
}

pub struct SuiteConfig {
    pub which: Which,
    pub n: usize,
    pub trials: usize,
    pub points: usize,
    pub fd: FdConfig,
    pub seed: u64,
}

fn summary(name: String, trials: Option<usize>, points: Option<usize>, residual: f64, tolerance: f64) -> CheckSummary {
    CheckSummary { check_name: name, trials, points, max_residual: residual, tolerance, pass: residual <= tolerance }
}

fn kn_check(cfg: &SuiteConfig) -> Result<CheckSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.trials {
        let s = SymBilinear::random(cfg.n, 1.0, &mut rng);
        let t = SymBilinear::random(cfg.n, 1.0, &mut rng);
        let r = kn_product(&s, &t)?;
        worst = worst.max(r.symmetry_defect()).max(r.bianchi_defect());
    }
    Ok(summary("kn_symmetries".into(), Some(cfg.trials), None, worst, KN_TOLERANCE))
}

fn conformal_checks(cfg: &SuiteConfig) -> Result<Vec<CheckSummary>> {
    (3..=5)
        .map(|dim| {
            let points = geometry::random_points(dim, cfg.points, cfg.seed);
            let rep = geometry::conformal_curvature_check(dim, &points, cfg.fd)?;
            let mut s = summary(format!("conformal_curvature_dim{dim}"), None, Some(cfg.points), rep.max_error(), FD_TOLERANCE);
            s.pass &= rep.max_frame_identity_error <= FRAME_TOLERANCE && rep.max_formula_error <= FRAME_TOLERANCE;
            Ok(s)
        })
        .collect()
}

fn hypersurface_checks(cfg: &SuiteConfig) -> Result<Vec<CheckSummary>> {
    let cases = [
        ("hypersurface_sphere", HypersurfaceCase::Sphere { radius: 2.0 }),
        ("hypersurface_plane_through_origin", HypersurfaceCase::PlaneThroughOrigin),
        ("hypersurface_plane_at_distance", HypersurfaceCase::PlaneAtDistance { distance: 1.0 }),
    ];
    cases
        .into_iter()
        .map(|(name, case)| {
            let rep = geometry::hypersurface_transform_check(case, cfg.n, cfg.trials, cfg.seed)?;
            Ok(summary(name.into(), Some(cfg.trials), None, rep.max_residual, TRANSFORM_TOLERANCE))
        })
        .collect()
}

fn biricci_checks(cfg: &SuiteConfig) -> Result<Vec<CheckSummary>> {
    let cases = [
        ("biricci_random", BiricciCase::Random),
        ("biricci_totally_geodesic", BiricciCase::TotallyGeodesic),
        ("biricci_round_sphere", BiricciCase::RoundSphere),
    ];
    cases
        .into_iter()
        .map(|(name, case)| {
            let rep = geometry::biricci_decomposition_check(cfg.trials, cfg.n, case, cfg.seed)?;
            Ok(summary(name.into(), Some(cfg.trials), None, rep.max_residual, ALGEBRAIC_TOLERANCE))
        })
        .collect()
}

fn inequality_check(cfg: &SuiteConfig) -> Result<CheckSummary> {
    let rep = geometry::inequality_step_check(cfg.trials, cfg.n, cfg.seed)?;
    let worst = rep.steps.iter().map(|s| -s.min_slack).fold(0.0, f64::max);
    Ok(CheckSummary {
        check_name: "inequality_steps".into(),
        trials: Some(cfg.trials),
        points: None,
        max_residual: worst,
        tolerance: ALGEBRAIC_TOLERANCE,
        pass: rep.pass,
    })
}

pub fn run(cfg: &SuiteConfig) -> Result<GeometrySummary> {
    let mut checks = Vec::new();
    let all = cfg.which == Which::All;
    if all || cfg.which == Which::Kn {
        checks.push(kn_check(cfg)?);
    }
    if all || cfg.which == Which::Conformal {
        checks.extend(conformal_checks(cfg)?);
    }
    if all || cfg.which == Which::Hypersurface {
        checks.extend(hypersurface_checks(cfg)?);
    }
    if all || cfg.which == Which::Biricci {
        checks.extend(biricci_checks(cfg)?);
    }
    if all || cfg.which == Which::Inequality {
        checks.push(inequality_check(cfg)?);
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(GeometrySummary { seed: cfg.seed, pass, checks })
}
