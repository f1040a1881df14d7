use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cdrive::energetics::{gate_costs, lz_costs, optimal_phi0, phi0_objective, EnergyCostReport};
use cdrive::models::{lz_track, Interpolation, LZModel};
use cdrive::openquantum::{BasisChoice, Channel, DephasingNorm, IntegratorConfig};
use cdrive::scenarios::{
    emit_csv, run_scenario, Measurement, ModelPreset, Protocol, ResourceMode, ScenarioConfig, ScenarioResult, Spacing,
    TauRange,
};
use cdrive::shortcut::{check_theorem2, Theorem2Report};
use cdrive::spectral::{build_track, Gauge, DEFAULT_GRID_POINTS};

#[derive(Parser)]
#[command(
    name = "cdrive",
    version,
    about = "Counter-diabatic driving: energy costs and open-system sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV and plot script.
    Run(RunArgs),
    /// Run the scenario once per channel into an output directory.
    Sweep(SweepArgs),
    /// Print the energy costs of both protocols at one tau.
    Cost(CostArgs),
    /// Test whether a model's shortcut can be made time independent.
    CheckTheorem2(TheoremArgs),
    /// Print the cost-optimal phi0 of the probabilistic gate protocol.
    Phi0Opt,
}

#[derive(Args, Clone, Default)]
struct ScenarioFlags {
    /// JSON scenario file; flags given on the command line override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<ModelPreset>,
    /// Comma-separated alpha values.
    #[arg(long, value_delimiter = ',', alias = "alphas")]
    alpha: Option<Vec<f64>>,
    /// `equal` or `independent`.
    #[arg(long)]
    resource: Option<ResourceMode>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    spacing: Option<SpacingArg>,
    /// Transitionless phi0 (defaults to the cost optimum).
    #[arg(long)]
    phi0: Option<f64>,
    #[arg(long)]
    phi0_adiabatic: Option<f64>,
    #[arg(long)]
    theta0: Option<f64>,
    /// Comma-separated subset of `adiabatic,transitionless`.
    #[arg(long, value_delimiter = ',')]
    protocols: Option<Vec<Protocol>>,
    /// `composite`, `postselect` or `unconditioned`.
    #[arg(long)]
    measurement: Option<Measurement>,
    /// `driving` or `adiabatic_h0`.
    #[arg(long)]
    basis: Option<BasisChoice>,
    /// `squared` or `linear`.
    #[arg(long)]
    dephasing_norm: Option<DephasingNorm>,
    /// RK4 steps per evolution.
    #[arg(long)]
    steps: Option<usize>,
    /// Plot title (defaults to a summary of the scenario).
    #[arg(long)]
    title: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Log,
    Linear,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RunArgs {
    #[command(flatten)]
    flags: ScenarioFlags,
    /// `none`, `gad` or `dephasing`.
    #[arg(long)]
    channel: Option<Channel>,
    /// CSV path; the plot script is written next to it with a `.gp` extension.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    #[command(flatten)]
    flags: ScenarioFlags,
    /// Channels to sweep.
    #[arg(long, value_delimiter = ',', default_value = "none,dephasing,gad")]
    channels: Vec<Channel>,
    /// Output directory, created if missing.
    #[arg(long, short, default_value = "sweep")]
    out_dir: PathBuf,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct CostArgs {
    #[arg(long, default_value = "lz")]
    model: ModelPreset,
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = PI / 3.0)]
    theta0: f64,
    /// Gate phi0 (defaults to the cost optimum).
    #[arg(long)]
    phi0: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Schedule {
    Linear,
    Quadratic,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct TheoremArgs {
    #[arg(long, default_value = "lz")]
    model: ModelPreset,
    #[arg(long, value_enum, default_value = "linear")]
    schedule: Schedule,
    #[arg(long, default_value_t = PI / 3.0)]
    theta0: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = PI)]
    phi0: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Use numerically diagonalized eigenstates instead of the closed forms.
    #[arg(long)]
    numeric: bool,
}

impl ScenarioFlags {
    fn config(&self, channel: Option<Channel>) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::from_file(p).with_context(|| format!("reading config {}", p.display()))?,
            None => ScenarioConfig::default(),
        };
        if let Some(m) = self.model {
            cfg.model = m;
        }
        if let Some(c) = channel {
            cfg.channel = c;
        }
        if let Some(a) = &self.alpha {
            cfg.alphas = a.clone();
        }
        if let Some(r) = self.resource {
            cfg.resource_mode = r;
        }
        if let Some(w) = self.omega {
            cfg.omega = w;
        }
        if self.tau_min.is_some() || self.tau_max.is_some() || self.points.is_some() || self.spacing.is_some() {
            let base = cfg.tau_range();
            let mut r = TauRange::new(
                self.tau_min.unwrap_or(base.min),
                self.tau_max.unwrap_or(base.max),
                self.points.unwrap_or(base.points),
            );
            r.spacing = match self.spacing {
                Some(SpacingArg::Log) => Spacing::Log,
                Some(SpacingArg::Linear) => Spacing::Linear,
                None => base.spacing,
            };
            cfg.tau_range = Some(r);
        }
        if let Some(p) = self.phi0 {
            cfg.phi0 = Some(p);
        }
        if let Some(p) = self.phi0_adiabatic {
            cfg.phi0_adiabatic = p;
        }
        if let Some(t) = self.theta0 {
            cfg.theta0 = t;
        }
        if let Some(p) = &self.protocols {
            cfg.protocols = p.clone();
        }
        if let Some(m) = self.measurement {
            cfg.measurement = m;
        }
        if let Some(b) = self.basis {
            cfg.basis = b;
        }
        if let Some(n) = self.dephasing_norm {
            cfg.dephasing_norm = n;
        }
        if let Some(n) = self.steps {
            cfg.integrator = IntegratorConfig {
                steps: n,
                ..cfg.integrator
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn title(&self, cfg: &ScenarioConfig) -> String {
        self.title
            .clone()
            .unwrap_or_else(|| format!("{} / {} / {} resources", cfg.model, cfg.channel, cfg.resource_mode))
    }
}

fn write_outputs(result: &ScenarioResult, csv: &Path, title: &str) -> Result<PathBuf> {
    if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    emit_csv(result, csv).with_context(|| format!("writing {}", csv.display()))?;
    let script = csv.with_extension("gp");
    let text = result.to_plot_script(title)?;
    std::fs::write(&script, text).with_context(|| format!("writing {}", script.display()))?;
    Ok(script)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = args.flags.config(args.channel)?;
    let csv = args
        .out
        .or_else(|| cfg.output.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}_{}.csv", cfg.model, cfg.channel)));
    let result = run_scenario(&cfg)?;
    let script = write_outputs(&result, &csv, &args.flags.title(&cfg))?;
    println!("wrote {} rows to {}", result.rows.len(), csv.display());
    println!("plot script {}", script.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    if args.channels.is_empty() {
        bail!("no channels to sweep");
    }
    for &channel in &args.channels {
        let cfg = args.flags.config(Some(channel))?;
        let result = run_scenario(&cfg)?;
        let csv = args
            .out_dir
            .join(format!("{}_{}_{}.csv", cfg.model, channel, cfg.resource_mode));
        write_outputs(&result, &csv, &args.flags.title(&cfg))?;
        println!("{channel}: {} rows -> {}", result.rows.len(), csv.display());
    }
    Ok(())
}

fn print_energy(r: &EnergyCostReport) {
    println!("tau          = {}", r.tau);
    println!("sigma_ad     = {:.6}", r.sigma_ad);
    println!("sigma_sa     = {:.6}", r.sigma_sa);
    println!("sigma_sa_avg = {:.6}", r.sigma_sa_avg);
    println!("ratio        = {:.6}", r.ratio);
    if let Some(d) = r.sigma_sa_direct {
        println!("sigma_sa_hs  = {d:.6}");
    }
}

fn cmd_cost(args: CostArgs) -> Result<()> {
    match args.model {
        ModelPreset::Lz => {
            let m = LZModel::new(args.omega, args.theta0)?;
            print_energy(&lz_costs(&m, args.tau)?);
        }
        ModelPreset::Gate(g) => {
            let phi0 = args.phi0.unwrap_or_else(optimal_phi0);
            let (prob, energy) = gate_costs(&g.spec(phi0, args.omega), args.tau)?;
            println!("phi0         = {:.6} ({:.6} pi)", prob.phi0, prob.phi0 / PI);
            println!("n_avg        = {:.6}", prob.n_avg);
            print_energy(&energy);
        }
    }
    Ok(())
}

fn print_theorem2(label: &str, r: &Theorem2Report) {
    println!("[{label}]");
    println!("residual     = {:e}", r.constancy_residual);
    println!("tolerance    = {:e}", r.tolerance);
    println!("passes       = {}", r.passes);
    println!("h_variation  = {:e}", r.hamiltonian_variation);
    if let Some(g) = &r.family_generator {
        println!("generator (per 1/tau):");
        for i in 0..g.dim() {
            let row: Vec<String> = (0..g.dim())
                .map(|j| {
                    let z = g[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            println!("  {}", row.join("  "));
        }
    }
}

fn cmd_theorem2(args: TheoremArgs) -> Result<()> {
    let gauge = if args.numeric {
        Gauge::ParallelTransport
    } else {
        Gauge::Analytic
    };
    match args.model {
        ModelPreset::Lz => {
            let interp = match args.schedule {
                Schedule::Linear => Interpolation::Linear,
                Schedule::Quadratic => Interpolation::Quadratic,
            };
            let m = LZModel::with_interpolation(args.omega, args.theta0, interp)?;
            let track = build_track(&lz_track(&m), args.grid_points, gauge)?;
            print_theorem2("lz", &check_theorem2(&track, args.tol)?);
        }
        ModelPreset::Gate(g) => {
            let spec = g.spec(args.phi0, args.omega);
            for (_, xi) in spec.sectors() {
                let track = build_track(&spec.sector_track(xi), args.grid_points, gauge)?;
                print_theorem2(&format!("{g} sector xi = {xi:.6}"), &check_theorem2(&track, args.tol)?);
            }
        }
    }
    Ok(())
}

fn cmd_phi0() {
    let p = optimal_phi0();
    println!("phi0 = {:.6} ({:.4} pi)", p, p / PI);
    println!("objective phi0 csc^2(phi0/2) = {:.6}", phi0_objective(p));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Cost(a) => cmd_cost(a),
        Command::CheckTheorem2(a) => cmd_theorem2(a),
        Command::Phi0Opt => {
            cmd_phi0();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
