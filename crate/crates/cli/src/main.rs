use anyhow::{bail, Context, Result};
use apkin_core::constants::FractionalConstants;
use apkin_core::equilibrium::{heavy_tail_normalization, make_equilibrium, EquilibriumKind};
use apkin_core::grid::VelocityGrid;
use apkin_core::harness::{
    emit_csv, run_scheme, sweep_dt, sweep_epsilon, uniform_study, CflPolicy, ErrorReport, ExperimentConfig, Scheme,
};
use apkin_core::micromacro::Stencil;
use apkin_core::tail::TailQuadrature;
use clap::{Args, Parser, Subcommand};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "apkin", version, about = "Asymptotic-preserving BGK solvers and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scheme to T and report its error against the reference.
    Run(Common),
    /// Error against the limit solver for each ε in --eps, with a log-log slope fit.
    SweepEps(Common),
    /// Observed time order for each Δt in --dt against a self-reference at Δt_min/16.
    SweepDt(Common),
    /// Runs along Δt = ε^α for each Δt in --dt (default 1e-1,1e-2,1e-3,1e-4).
    Uniform(Common),
    /// Table of κ, A, the printed normalization and the identity residuals.
    VerifyConstants {
        /// Comma-separated α values.
        #[arg(long, value_delimiter = ',', default_values_t = [0.8, 1.0, 1.5])]
        alpha: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Debug)]
struct Common {
    /// Key-value file with the same fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    alpha: Option<f64>,
    /// One value, or a comma-separated list for sweep-eps.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// One value, or a comma-separated list for sweep-dt and uniform.
    #[arg(long, value_delimiter = ',')]
    dt: Vec<f64>,
    #[arg(long)]
    tfinal: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nv: Option<usize>,
    #[arg(long)]
    vmax: Option<f64>,
    #[arg(long)]
    equilibrium: Option<EquilibriumKind>,
    #[arg(long)]
    stencil: Option<Stencil>,
    /// Scheme the errors are measured against.
    #[arg(long)]
    reference: Option<Scheme>,
    #[arg(long)]
    reference_dt: Option<f64>,
    /// warn | error | adapt, for micro-macro steps above the stability bound.
    #[arg(long, value_parser = parse_cfl)]
    cfl: Option<CflPolicy>,
    /// Limit solvers use D = 1 and the quadrature κ instead of the grid values.
    #[arg(long)]
    use_continuous_constants: bool,
    /// Skip Duhamel history terms below e^{-s_j} = 1e-16.
    #[arg(long)]
    truncate_history: bool,
    /// Write the CSV report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_cfl(s: &str) -> std::result::Result<CflPolicy, String> {
    match s.to_ascii_lowercase().as_str() {
        "warn" => Ok(CflPolicy::Warn),
        "error" => Ok(CflPolicy::Error),
        "adapt" => Ok(CflPolicy::Adapt),
        _ => Err(format!("unknown cfl policy '{s}' (warn|error|adapt)")),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Run,
    SweepEps,
    SweepDt,
    Uniform,
}

fn build_config(c: &Common, mode: Mode) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.scheme {
        cfg.scheme = s;
    }
    cfg.alpha = c.alpha.or(cfg.alpha);
    cfg.tfinal = c.tfinal.unwrap_or(cfg.tfinal);
    cfg.nx = c.nx.or(cfg.nx);
    cfg.nv = c.nv.or(cfg.nv);
    cfg.vmax = c.vmax.or(cfg.vmax);
    cfg.equilibrium = c.equilibrium.or(cfg.equilibrium);
    cfg.stencil = c.stencil.unwrap_or(cfg.stencil);
    cfg.reference = c.reference.or(cfg.reference);
    cfg.reference_dt = c.reference_dt.or(cfg.reference_dt);
    cfg.cfl = c.cfl.unwrap_or(cfg.cfl);
    cfg.use_continuous_constants |= c.use_continuous_constants;
    cfg.truncate_history |= c.truncate_history;
    match (mode, c.eps.as_slice()) {
        (_, []) => {}
        (Mode::SweepEps, list) => cfg.eps_list = list.to_vec(),
        (_, [e]) => cfg.eps = *e,
        _ => bail!("--eps takes a single value here"),
    }
    match (mode, c.dt.as_slice()) {
        (_, []) => {}
        (Mode::SweepDt | Mode::Uniform, list) => cfg.dt_list = list.to_vec(),
        (_, [d]) => cfg.dt = *d,
        _ => bail!("--dt takes a single value here"),
    }
    // A sweep's own Δt must also divide T; use the first entry.
    if mode == Mode::SweepDt || mode == Mode::Uniform {
        if let Some(&d) = cfg.dt_list.first() {
            cfg.dt = d;
        }
    }
    Ok(cfg)
}

fn write_report(report: &ErrorReport, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(p) => emit_csv(report, p).with_context(|| format!("writing {}", p.display()))?,
        None => report.write_csv(std::io::stdout().lock())?,
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn summarize(report: &ErrorReport, what: &str) {
    match report.fit {
        Some(f) => eprintln!("{what} = {:.4} (rms log residual {:.2e}, {} points)", f.slope, f.residual, f.points),
        None => eprintln!("{what}: fewer than 3 errors in the fit window"),
    }
}

fn verify_constants(alphas: &[f64], out: &Option<PathBuf>) -> Result<()> {
    let mut text = String::from("alpha,m,kappa,kappa_h,a_const,inv_a_const,c_paper,identity_residual\n");
    for &alpha in alphas {
        let m = heavy_tail_normalization(alpha + 1.0)?;
        let c = FractionalConstants::new(alpha, 1, m)?;
        let eq = make_equilibrium(EquilibriumKind::HeavyTail, alpha + 1.0, &VelocityGrid::midpoint(50.0, 200)?)?;
        let kappa_h = TailQuadrature::from_equilibrium(&eq)?.kappa_h();
        text.push_str(&format!(
            "{alpha},{m},{},{kappa_h},{},{},{},{}\n",
            c.kappa,
            c.a_const,
            1.0 / c.a_const,
            c.c_paper,
            c.identity_residual()
        ));
    }
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(c) => {
            let cfg = build_config(&c, Mode::Run)?;
            let out = run_scheme(&cfg)?;
            let report = ErrorReport { rows: vec![out.row], fit: None, warnings: out.warnings };
            write_report(&report, &c.out)?;
        }
        Command::SweepEps(c) => {
            let report = sweep_epsilon(&build_config(&c, Mode::SweepEps)?)?;
            write_report(&report, &c.out)?;
            summarize(&report, "slope in eps");
        }
        Command::SweepDt(c) => {
            let report = sweep_dt(&build_config(&c, Mode::SweepDt)?)?;
            write_report(&report, &c.out)?;
            summarize(&report, "order in dt");
        }
        Command::Uniform(c) => {
            let report = uniform_study(&build_config(&c, Mode::Uniform)?)?;
            write_report(&report, &c.out)?;
            summarize(&report, "slope along dt = eps^alpha");
            eprintln!(
                "{}",
                if report.is_uniform() { "errors decay along the sequence" } else { "errors plateau along the sequence" }
            );
        }
        Command::VerifyConstants { alpha, out } => verify_constants(&alpha, &out)?,
    }
    Ok(())
}
