use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use polyvem::driver::{run, CaseName, Mode, RunConfig};
use polyvem::ggrad::{verify_identity, GradientOperator};
use polyvem::mesh::{check_regularity, io::read_mesh};
use polyvem::vem::{assemble_and_solve, StabKind};

#[derive(Parser)]
#[command(
    version,
    about = "Adaptive polygonal VEM with a generalised-gradient error estimator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    U1,
    U2,
    PatchTest,
    Manufactured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stab {
    Dofi,
    Projected,
}

impl From<Stab> for StabKind {
    fn from(s: Stab) -> Self {
        match s {
            Stab::Dofi => StabKind::DofiDofi,
            Stab::Projected => StabKind::Projected,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RunMode {
    HUniform,
    HAdaptive,
    PUniform,
}

#[derive(Subcommand)]
enum Command {
    /// Run a convergence or adaptivity study.
    Solve {
        #[arg(long, value_enum, default_value = "u1")]
        case: Case,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, value_enum, default_value = "dofi")]
        stab: Stab,
        #[arg(long, value_enum, default_value = "h-uniform")]
        mode: RunMode,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial mesh (JSON) instead of the test case's default.
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        max_dofs: Option<usize>,
        /// Highest degree of a p-uniform sweep.
        #[arg(long, default_value_t = 5)]
        max_p: usize,
        /// Only compute the error measure, not the estimator.
        #[arg(long)]
        no_estimate: bool,
    },
    /// Check a_h(φ, v) = (𝔊φ, ∇v) for all basis pairs on a mesh.
    VerifyIdentity {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, value_enum, default_value = "dofi")]
        stab: Stab,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Report the mesh regularity diagnostics.
    CheckMesh { file: PathBuf },
}

fn execute(cli: Cli) -> polyvem::Result<bool> {
    match cli.command {
        Command::Solve {
            case,
            p,
            stab,
            mode,
            theta,
            levels,
            out,
            seed,
            mesh,
            max_dofs,
            max_p,
            no_estimate,
        } => {
            let case = match case {
                Case::U1 => CaseName::U1,
                Case::U2 => CaseName::U2,
                Case::PatchTest => CaseName::PatchTest,
                Case::Manufactured => CaseName::Manufactured,
            };
            let mode = match mode {
                RunMode::HUniform => Mode::HUniform,
                RunMode::HAdaptive => Mode::HAdaptive,
                RunMode::PUniform => Mode::PUniform,
            };
            let mut cfg = RunConfig::new(case, p, mode, levels);
            cfg.stab = stab.into();
            cfg.theta = theta;
            cfg.out = out;
            cfg.seed = seed;
            cfg.max_dofs = max_dofs;
            cfg.max_degree = max_p;
            cfg.estimate = !no_estimate;
            cfg.mesh = mesh.map(read_mesh).transpose()?;
            let rec = run(&cfg)?;
            println!(
                "{:>5} {:>2} {:>8} {:>11} {:>11} {:>11} {:>11} {:>7}",
                "level", "p", "dofs", "|∇u-∇Πu|", "|∇u-G|", "E", "eta", "I"
            );
            for l in &rec.levels {
                let eta = l.eta.map_or("-".to_string(), |v| format!("{v:.4e}"));
                let eff = l.effectivity.map_or("-".to_string(), |v| format!("{v:.3}"));
                println!(
                    "{:>5} {:>2} {:>8} {:>11.4e} {:>11.4e} {:>11.4e} {:>11} {:>7}",
                    l.level, l.degree, l.dofs, l.energy_projection, l.gradient, l.error, eta, eff
                );
            }
            if let Some(f) = rec.fits.error {
                println!("order of E vs {}: {:.3} (R² {:.4})", rec.fits.abscissa, f.slope, f.r2);
            }
            Ok(true)
        }
        Command::VerifyIdentity { mesh, p, stab, tol } => {
            let mesh = read_mesh(mesh)?;
            let system = assemble_and_solve(&mesh, p, stab.into(), &|_| 1.0, &|_| 0.0)?;
            let op = GradientOperator::new(&system, p)?;
            let report = verify_identity(&system, &op);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.max <= tol)
        }
        Command::CheckMesh { file } => {
            let report = check_regularity(&read_mesh(file)?);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.satisfies_assumption())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
