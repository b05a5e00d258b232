use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fbms::cli::{describe, parse_mesh, run, Command, RunConfig};
use fbms::report::Format;
use fbms::tolerances::Tolerances;

#[derive(Parser)]
#[command(name = "fbms", version, about = "Jacobi-Steklov spectra and Gauss-map checks for free boundary minimal surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Lowest Jacobi-Steklov eigenvalues.
    Spectrum(RunArgs),
    /// Eigen-subspace test on span(nu_1, nu_2, nu_3).
    Subspace(RunArgs),
    /// Index-form matrices of the normal components.
    Index(RunArgs),
    /// Gauss-image reformulation, reconstruction, curvature and segment checks.
    Sphere(RunArgs),
    /// Closed-form curvature of the squares-map preimage curves.
    Appendix(RunArgs),
    /// Every suite in sequence.
    VerifyAll(RunArgs),
    /// Print the geometry of a surface.
    Describe { surface: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// catenoid, catenoid-rotated[:alpha], disk, or a surface-spec file.
    #[arg(long, default_value = "catenoid")]
    surface: String,
    /// Cells along t and theta.
    #[arg(long, default_value = "64x128")]
    mesh: String,
    #[arg(long, default_value_t = 8)]
    n_eig: usize,
    #[arg(long, default_value = "fbms-out")]
    output: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Also write full eigenfunction fields as JSON.
    #[arg(long)]
    dump_eigenfields: bool,
    #[arg(long)]
    tol_analytic: Option<f64>,
    #[arg(long)]
    tol_eigenvalue: Option<f64>,
    #[arg(long)]
    tol_kernel: Option<f64>,
    #[arg(long)]
    tol_compatibility: Option<f64>,
    #[arg(long)]
    tol_symmetry: Option<f64>,
    #[arg(long)]
    tol_subspace: Option<f64>,
    #[arg(long)]
    tol_identity: Option<f64>,
    #[arg(long)]
    tol_gauss_floor: Option<f64>,
    #[arg(long)]
    tol_discrete: Option<f64>,
    #[arg(long)]
    tol_boundary_integral: Option<f64>,
    #[arg(long)]
    tol_fit: Option<f64>,
    #[arg(long)]
    tol_oracle: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> fbms::Result<RunConfig> {
        let (n_t, n_theta) = parse_mesh(&self.mesh)?;
        let mut t = Tolerances::default();
        let overrides = [
            (self.tol_analytic, &mut t.analytic),
            (self.tol_eigenvalue, &mut t.eigenvalue),
            (self.tol_kernel, &mut t.kernel),
            (self.tol_compatibility, &mut t.compatibility),
            (self.tol_symmetry, &mut t.symmetry),
            (self.tol_subspace, &mut t.subspace),
            (self.tol_identity, &mut t.identity),
            (self.tol_gauss_floor, &mut t.gauss_floor),
            (self.tol_discrete, &mut t.discrete),
            (self.tol_boundary_integral, &mut t.boundary_integral),
            (self.tol_fit, &mut t.fit),
            (self.tol_oracle, &mut t.oracle),
        ];
        for (v, slot) in overrides {
            if let Some(v) = v {
                *slot = v;
            }
        }
        Ok(RunConfig {
            surface: self.surface.clone(),
            n_t,
            n_theta,
            n_eig: self.n_eig,
            tolerances: t,
            output: self.output.clone(),
            format: match self.format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            },
            dump_eigenfields: self.dump_eigenfields,
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Describe { surface } => {
            return match describe(&surface) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
        Cmd::Spectrum(a) => (Command::Spectrum, a),
        Cmd::Subspace(a) => (Command::Subspace, a),
        Cmd::Index(a) => (Command::Index, a),
        Cmd::Sphere(a) => (Command::Sphere, a),
        Cmd::Appendix(a) => (Command::Appendix, a),
        Cmd::VerifyAll(a) => (Command::VerifyAll, a),
    };
    let result = args.config().and_then(|cfg| run(command, &cfg));
    match result {
        Ok(report) => {
            for c in &report.checks {
                println!("{c}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            let failures = report.failures();
            if failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                eprintln!("{} check(s) failed:", failures.len());
                for c in failures {
                    eprintln!("  {c}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
