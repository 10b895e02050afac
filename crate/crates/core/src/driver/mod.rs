//! The SOLVE → ESTIMATE → MARK → REFINE loop and its outputs.

pub mod cases;
pub mod marking;

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use cases::{CaseName, TestCase};
pub use marking::{doerfler_mark, fit_order, OrderFit};

use crate::error::{Error, Result};
use crate::estimator::{assemble_report, bounds_probe, error_measure, EstimatorOptions, EstimatorReport, ProblemData};
use crate::ggrad::generalised_gradient;
use crate::mesh::{refine, vertex_patches, PolygonalMesh};
use crate::vem::{assemble_and_solve, DofMap, StabKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    HUniform,
    HAdaptive,
    PUniform,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "h-uniform" => Ok(Self::HUniform),
            "h-adaptive" => Ok(Self::HAdaptive),
            "p-uniform" => Ok(Self::PUniform),
            _ => Err(Error::Config(format!("unknown refinement mode {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HUniform => "h-uniform",
            Self::HAdaptive => "h-adaptive",
            Self::PUniform => "p-uniform",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub case: CaseName,
    /// Polynomial degree (the starting degree in p-uniform mode).
    pub degree: usize,
    pub stab: StabKind,
    pub mode: Mode,
    /// Dörfler bulk parameter.
    pub theta: f64,
    /// Number of solves.
    pub levels: usize,
    /// Stop before a level that would exceed this many dofs.
    pub max_dofs: Option<usize>,
    /// Highest degree reached by a p-uniform sweep.
    pub max_degree: usize,
    /// Solve the patch problems; without them only `ℰ(Ω)` is reported.
    pub estimate: bool,
    pub estimator: EstimatorOptions,
    pub out: Option<PathBuf>,
    /// Seeds the sampling of the finite-difference check of the test case.
    pub seed: u64,
    /// Replaces the test case's initial mesh.
    #[serde(skip)]
    pub mesh: Option<PolygonalMesh>,
}

impl RunConfig {
    pub fn new(case: CaseName, degree: usize, mode: Mode, levels: usize) -> Self {
        Self {
            case,
            degree,
            stab: StabKind::DofiDofi,
            mode,
            theta: 0.5,
            levels,
            max_dofs: None,
            max_degree: 5,
            estimate: true,
            estimator: EstimatorOptions::default(),
            out: None,
            seed: 0,
            mesh: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::Config("degree must be at least 1".into()));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("bulk parameter {} outside (0, 1]", self.theta)));
        }
        if self.levels == 0 {
            return Err(Error::Config("at least one level is needed".into()));
        }
        if self.mode == Mode::PUniform && self.degree > self.max_degree {
            return Err(Error::Config(format!(
                "starting degree {} above the cap {}",
                self.degree, self.max_degree
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    pub degree: usize,
    pub elements: usize,
    pub vertices: usize,
    pub dofs: usize,
    pub h: f64,
    /// `‖∇u - ∇_h Π∇ u_h‖`.
    pub energy_projection: f64,
    /// `‖∇u - 𝔊‖`.
    pub gradient: f64,
    pub mismatch: f64,
    pub jump: f64,
    /// `ℰ(Ω)`.
    pub error: f64,
    pub eta: Option<f64>,
    pub effectivity: Option<f64>,
    pub reliability: Option<f64>,
    pub efficiency: Option<f64>,
    pub marked: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fits {
    /// `"h"` for uniform refinement, `"dofs"` otherwise.
    pub abscissa: &'static str,
    pub energy_projection: Option<OrderFit>,
    pub gradient: Option<OrderFit>,
    pub error: Option<OrderFit>,
    pub eta: Option<OrderFit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config: RunConfig,
    /// Finite-difference defect of `-Δu = f` for the test case.
    pub pde_defect: f64,
    pub levels: Vec<LevelRecord>,
    pub fits: Fits,
}

impl RunRecord {
    pub fn effectivities(&self) -> Vec<f64> {
        self.levels.iter().filter_map(|l| l.effectivity).collect()
    }
}

fn at_level<T>(level: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Level {
        level,
        source: Box::new(e),
    })
}

pub fn run(config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let case = TestCase::new(config.case, config.degree);
    let pde_defect = case.check_pde(100, config.seed);
    let mut mesh = match &config.mesh {
        Some(m) => m.clone(),
        None => case.initial_mesh()?,
    };
    if let Some(dir) = &config.out {
        fs::create_dir_all(dir)?;
    }
    let (f, u, grad) = (&*case.f, &*case.u, &*case.gradient);

    let mut levels = Vec::new();
    let mut degree = config.degree;
    for level in 0..config.levels {
        let start = Instant::now();
        if let Some(max) = config.max_dofs {
            if level > 0 && DofMap::new(&mesh, degree).ndofs > max {
                break;
            }
        }
        let system = at_level(level, assemble_and_solve(&mesh, degree, config.stab, f, u))?;
        let (_, field) = at_level(level, generalised_gradient(&system))?;
        let (measure, report): (_, Option<EstimatorReport>) = if config.estimate {
            let patches = vertex_patches(&mesh);
            let data = ProblemData {
                f,
                dirichlet: u,
                exact_gradient: Some(grad),
            };
            let r = at_level(
                level,
                assemble_report(&system, &field, &patches, data, config.estimator),
            )?;
            (r.error.expect("exact gradient supplied"), Some(r))
        } else {
            (error_measure(&system, &field, u, grad), None)
        };

        let last = level + 1 == config.levels;
        let marked = match (config.mode, &report) {
            (Mode::HAdaptive, Some(r)) if !last => doerfler_mark(&r.element_eta, config.theta)?,
            (Mode::HAdaptive, None) => return Err(Error::Config("adaptive refinement needs the estimator".into())),
            (Mode::HUniform, _) if !last => (0..mesh.num_elements()).collect(),
            _ => Vec::new(),
        };
        let probe = report.as_ref().map(bounds_probe);
        if let (Some(dir), Some(r)) = (&config.out, &report) {
            r.write_csv(BufWriter::new(File::create(dir.join(format!("vertices_{level}.csv")))?))?;
        }
        levels.push(LevelRecord {
            level,
            degree,
            elements: mesh.num_elements(),
            vertices: mesh.num_vertices(),
            dofs: system.num_dofs(),
            h: mesh.max_diameter(),
            energy_projection: measure.energy_projection,
            gradient: measure.gradient,
            mismatch: measure.mismatch,
            jump: measure.jump,
            error: measure.total,
            eta: report.as_ref().map(|r| r.eta),
            effectivity: report.as_ref().and_then(|r| r.effectivity),
            reliability: probe.and_then(|p| p.reliability),
            efficiency: probe.and_then(|p| p.efficiency),
            marked: marked.len(),
            seconds: start.elapsed().as_secs_f64(),
        });
        if last {
            break;
        }
        match config.mode {
            Mode::PUniform => {
                if degree == config.max_degree {
                    break;
                }
                degree += 1;
            }
            _ => mesh = at_level(level, refine(&mesh, &marked))?,
        }
    }

    let fits = fit_levels(config.mode, &levels);
    let record = RunRecord {
        config: config.clone(),
        pde_defect,
        levels,
        fits,
    };
    if let Some(dir) = &config.out {
        write_levels_csv(&record, BufWriter::new(File::create(dir.join("levels.csv"))?))?;
        serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join("summary.json"))?), &record)?;
    }
    Ok(record)
}

fn fit_levels(mode: Mode, levels: &[LevelRecord]) -> Fits {
    let (abscissa, x): (_, Vec<f64>) = match mode {
        Mode::HUniform => ("h", levels.iter().map(|l| l.h).collect()),
        _ => ("dofs", levels.iter().map(|l| l.dofs as f64).collect()),
    };
    let fit = |y: Vec<f64>| fit_order(&x, &y).ok();
    Fits {
        abscissa,
        energy_projection: fit(levels.iter().map(|l| l.energy_projection).collect()),
        gradient: fit(levels.iter().map(|l| l.gradient).collect()),
        error: fit(levels.iter().map(|l| l.error).collect()),
        eta: levels.iter().map(|l| l.eta).collect::<Option<Vec<_>>>().and_then(fit),
    }
}

/// One row per level; wall times are left to `summary.json` so that the CSV
/// is reproducible.
pub fn write_levels_csv(record: &RunRecord, mut w: impl Write) -> std::io::Result<()> {
    writeln!(
        w,
        "level,degree,elements,vertices,dofs,h,energy_projection,gradient,mismatch,jump,error,eta,effectivity,marked"
    )?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:e}"));
    for l in &record.levels {
        writeln!(
            w,
            "{},{},{},{},{},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            l.level,
            l.degree,
            l.elements,
            l.vertices,
            l.dofs,
            l.h,
            l.energy_projection,
            l.gradient,
            l.mismatch,
            l.jump,
            l.error,
            opt(l.eta),
            opt(l.effectivity),
            l.marked
        )?;
    }
    Ok(())
}
