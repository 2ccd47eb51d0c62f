//! `retrobell` — statistics and dynamics of a time-symmetric
//! hidden-variable EPRB model, as reproducible CSV/JSON tables.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use retrobell_core::dynamics::{
    check_invariant_triangle, extract_alpha_beta_gamma, solve_time_symmetric,
};
use retrobell_core::outcome::{ModelParams, SfpPolicy};
use retrobell_core::probability::{
    acute_angle_deg, bell_sum, chsh_value, local_anticoincidence, monte_carlo_anticoincidence,
    nu_params_unchecked, probability_bounds, qm_anticoincidence, screening_analysis, sweep_nu,
    sweep_beta_gamma, BellTriple, CapBin, Method, SweepRow,
};
use retrobell_core::sphere::UnitVec3;
use retrobell_core::Error as CoreError;

use output::{emit, num, opt_num, Format, Table};

/// Fixed column schema shared by all probability-table commands.
const SWEEP_COLUMNS: [&str; 11] = [
    "nu", "beta", "gamma", "angle_deg", "p_min", "p_max", "median", "method", "n_samples",
    "stderr", "regime_ok",
];

#[derive(Parser)]
#[command(name = "retrobell", version, about, disable_help_subcommand = true)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG master seed; falls back to $RETROBELL_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    FavorEqual,
    FavorUnequal,
    Unbiased,
}

impl From<PolicyArg> for SfpPolicy {
    fn from(p: PolicyArg) -> SfpPolicy {
        match p {
            PolicyArg::FavorEqual => SfpPolicy::FavorEqual,
            PolicyArg::FavorUnequal => SfpPolicy::FavorUnequal,
            PolicyArg::Unbiased => SfpPolicy::Unbiased,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Figure {
    Fig6,
    Fig7,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Oracle {
    /// Purely retarded model: P = 1 − 2∠/360.
    Local,
    /// Singlet prediction: P = ½ + ½⟨a,b⟩.
    Qm,
    /// Anti-coincidence upper bound of the time-symmetric model.
    Pmax,
    /// Lower bound.
    Pmin,
    /// Midpoint of the bounds.
    Median,
}

#[derive(Subcommand)]
enum Command {
    /// Local-model probabilities for a setting triple or a single angle.
    Local {
        /// Three coplanar settings in degrees, e.g. 0,120,240.
        #[arg(long, value_delimiter = ',', conflicts_with = "angle")]
        triple: Option<Vec<f64>>,
        /// Single separation angle in degrees.
        #[arg(long)]
        angle: Option<f64>,
    },
    /// Anti-coincidence probability bounds at one parameter point.
    Bounds {
        /// Separation angle a–b in degrees.
        #[arg(long)]
        angle: f64,
        #[arg(long, conflicts_with_all = ["beta", "gamma"])]
        nu: Option<f64>,
        #[arg(long, requires = "gamma")]
        beta: Option<f64>,
        #[arg(long, requires = "beta")]
        gamma: Option<f64>,
    },
    /// Bounds over a ν grid (fig6) or an independent (β,γ) grid (fig7).
    Sweep {
        #[arg(long, value_enum)]
        figure: Figure,
        /// Grid as comma list or start:stop:step.
        #[arg(long)]
        nu_grid: Option<String>,
        #[arg(long)]
        beta_grid: Option<String>,
        #[arg(long)]
        gamma_grid: Option<String>,
        #[arg(long, default_value_t = 120.0)]
        angle: f64,
    },
    /// Monte Carlo anti-coincidence estimate under an SFP policy.
    Mc {
        #[arg(long)]
        angle: f64,
        #[arg(long, conflicts_with_all = ["beta", "gamma"])]
        nu: Option<f64>,
        #[arg(long, requires = "gamma")]
        beta: Option<f64>,
        #[arg(long, requires = "beta")]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value_t = PolicyArg::Unbiased)]
        policy: PolicyArg,
        #[arg(short = 'n', long = "samples")]
        n: u64,
    },
    /// Three-term Bell sum over a chosen pairwise oracle.
    Bell {
        #[arg(long, value_delimiter = ',')]
        triple: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Oracle::Local)]
        oracle: Oracle,
        /// ν for the pmax/pmin/median oracles.
        #[arg(long, default_value_t = 0.2)]
        nu: f64,
    },
    /// CHSH combination over four coplanar settings a,a',b,b'.
    Chsh {
        #[arg(long, value_delimiter = ',')]
        settings: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Oracle::Qm)]
        oracle: Oracle,
        #[arg(long, default_value_t = 0.2)]
        nu: f64,
    },
    /// Conditional P(A=+1 | S0 ∈ bin) across distant-setting variants.
    Screening {
        /// Near setting in degrees.
        #[arg(long)]
        a: f64,
        /// Distant-setting variants in degrees.
        #[arg(long, value_delimiter = ',')]
        b_variants: Vec<f64>,
        #[arg(long, conflicts_with_all = ["beta", "gamma"])]
        nu: Option<f64>,
        #[arg(long, requires = "gamma")]
        beta: Option<f64>,
        #[arg(long, requires = "beta")]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value_t = PolicyArg::Unbiased)]
        policy: PolicyArg,
        /// Bin center as x,y,z (normalized).
        #[arg(long, value_delimiter = ',')]
        center: Vec<f64>,
        /// Bin angular radius in radians.
        #[arg(long)]
        radius: f64,
        #[arg(short = 'n', long = "samples")]
        n: u64,
    },
    /// Time-symmetric solver over all four outcome seeds.
    Dynamics {
        /// Flat key=value config file.
        #[arg(long)]
        config: PathBuf,
    },
}

enum CliError {
    /// Bad invocation or config: exit code 2.
    Usage(String),
    /// Failed computation: exit code 1.
    Compute(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Compute(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn resolve_seed(cli_seed: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = cli_seed {
        return Ok(s);
    }
    match std::env::var("RETROBELL_SEED") {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("RETROBELL_SEED is not a u64: {v}"))),
        Err(_) => Ok(0),
    }
}

fn check_angle(deg: f64) -> Result<f64, CliError> {
    if !(0.0..360.0).contains(&deg) {
        return Err(CliError::Usage(format!(
            "angles must lie in [0, 360), got {deg}"
        )));
    }
    Ok(deg)
}

/// Resolves `--nu` vs `--beta --gamma` into model params; returns the ν
/// echo when the single-parameter form was used.
fn resolve_params(
    nu: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
) -> Result<(Option<f64>, ModelParams), CliError> {
    match (nu, beta, gamma) {
        (Some(nu), None, None) => Ok((Some(nu), nu_params_unchecked(nu)?)),
        (None, Some(beta), Some(gamma)) => {
            let alpha = 1.0 - beta - gamma;
            if alpha < 0.0 {
                return Err(CliError::Usage(format!(
                    "beta + gamma must not exceed 1, got {}",
                    beta + gamma
                )));
            }
            Ok((None, ModelParams::new_unchecked(alpha, beta, gamma)?))
        }
        _ => Err(CliError::Usage(
            "specify either --nu or both --beta and --gamma".into(),
        )),
    }
}

/// Parses a grid given as `v1,v2,...` or `start:stop:step` (inclusive).
fn parse_grid(raw: &str) -> Result<Vec<f64>, CliError> {
    let parse_one = |s: &str| -> Result<f64, CliError> {
        s.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("not a number in grid: {s}")))
    };
    let grid = if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Usage(format!(
                "range grid must be start:stop:step, got {raw}"
            )));
        }
        let (start, stop, step) = (parse_one(parts[0])?, parse_one(parts[1])?, parse_one(parts[2])?);
        if step <= 0.0 || stop < start {
            return Err(CliError::Usage(format!("bad grid range {raw}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + step * i as f64).collect()
    } else {
        raw.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(parse_one)
            .collect::<Result<Vec<f64>, _>>()?
    };
    if grid.is_empty() {
        return Err(CliError::Usage("empty grid".into()));
    }
    Ok(grid)
}

fn sweep_row_values(row: &SweepRow) -> Vec<Value> {
    vec![
        opt_num(row.nu),
        num(row.beta),
        num(row.gamma),
        num(row.angle_deg),
        opt_num(row.p_min),
        opt_num(row.p_max),
        opt_num(row.median),
        json!(match row.method {
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }),
        json!(row.n_samples),
        num(row.stderr),
        json!(row.regime_ok),
    ]
}

fn oracle_fn(
    oracle: Oracle,
    nu: f64,
) -> Result<Box<dyn Fn(&UnitVec3, &UnitVec3) -> retrobell_core::Result<f64>>, CliError> {
    Ok(match oracle {
        Oracle::Local => Box::new(|a, b| {
            local_anticoincidence(a.dot(b).clamp(-1.0, 1.0).acos().to_degrees())
        }),
        Oracle::Qm => Box::new(|a, b| Ok(qm_anticoincidence(a, b))),
        Oracle::Pmax | Oracle::Pmin | Oracle::Median => {
            let p = nu_params_unchecked(nu)?;
            Box::new(move |a, b| {
                let bounds = probability_bounds(a, b, &p)?;
                Ok(match oracle {
                    Oracle::Pmax => bounds.p_max,
                    Oracle::Pmin => bounds.p_min,
                    _ => bounds.median,
                })
            })
        }
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let seed = resolve_seed(cli.seed)?;
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let table = build_table(&cli.command, seed)?;
    emit(&table, format, cli.out.as_deref())?;
    Ok(())
}

fn build_table(command: &Command, seed: u64) -> Result<Table, CliError> {
    match command {
        Command::Local { triple, angle } => cmd_local(triple.as_deref(), *angle, seed),
        Command::Bounds {
            angle,
            nu,
            beta,
            gamma,
        } => cmd_bounds(*angle, *nu, *beta, *gamma, seed),
        Command::Sweep {
            figure,
            nu_grid,
            beta_grid,
            gamma_grid,
            angle,
        } => cmd_sweep(
            *figure,
            nu_grid.as_deref(),
            beta_grid.as_deref(),
            gamma_grid.as_deref(),
            *angle,
            seed,
        ),
        Command::Mc {
            angle,
            nu,
            beta,
            gamma,
            policy,
            n,
        } => cmd_mc(*angle, *nu, *beta, *gamma, *policy, *n, seed),
        Command::Bell { triple, oracle, nu } => cmd_bell(triple, *oracle, *nu, seed),
        Command::Chsh {
            settings,
            oracle,
            nu,
        } => cmd_chsh(settings, *oracle, *nu, seed),
        Command::Screening {
            a,
            b_variants,
            nu,
            beta,
            gamma,
            policy,
            center,
            radius,
            n,
        } => cmd_screening(
            *a, b_variants, *nu, *beta, *gamma, *policy, center, *radius, *n, seed,
        ),
        Command::Dynamics { config } => cmd_dynamics(config, seed),
    }
}

fn cmd_local(triple: Option<&[f64]>, angle: Option<f64>, seed: u64) -> Result<Table, CliError> {
    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    table.meta("command", json!("local"));
    table.meta("seed", json!(seed));
    let push_angle = |table: &mut Table, sep: f64| -> Result<f64, CliError> {
        let p = local_anticoincidence(sep)?;
        table.push_row(vec![
            num(0.0),
            num(0.0),
            num(0.0),
            num(sep),
            num(p),
            num(p),
            num(p),
            json!("quadrature"),
            json!(0),
            num(0.0),
            json!(true),
        ]);
        Ok(p)
    };
    match (triple, angle) {
        (Some(triple), None) => {
            if triple.len() != 3 {
                return Err(CliError::Usage("--triple takes exactly three angles".into()));
            }
            for &t in triple {
                check_angle(t)?;
            }
            table.meta("triple", json!(triple));
            let pairs = [
                (triple[0], triple[1]),
                (triple[1], triple[2]),
                (triple[0], triple[2]),
            ];
            let mut sum = 0.0;
            for (t1, t2) in pairs {
                sum += push_angle(&mut table, acute_angle_deg(t1, t2))?;
            }
            table.meta("bell_sum", num(sum));
        }
        (None, Some(sep)) => {
            table.meta("angle", num(sep));
            push_angle(&mut table, sep)?;
        }
        _ => {
            return Err(CliError::Usage(
                "specify exactly one of --triple or --angle".into(),
            ))
        }
    }
    Ok(table)
}

fn cmd_bounds(
    angle: f64,
    nu: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    seed: u64,
) -> Result<Table, CliError> {
    check_angle(angle)?;
    let (nu_echo, p) = resolve_params(nu, beta, gamma)?;
    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    table.meta("command", json!("bounds"));
    table.meta("seed", json!(seed));
    table.meta("angle", num(angle));
    if let Some(nu) = nu_echo {
        table.meta("nu", num(nu));
    }
    table.meta("beta", num(p.beta()));
    table.meta("gamma", num(p.gamma()));
    let a = UnitVec3::from_plane_angle_deg(0.0);
    let b = UnitVec3::from_plane_angle_deg(angle);
    // regime violations become a flagged row, mirroring sweep semantics
    let bounds = probability_bounds(&a, &b, &p).ok();
    let row = SweepRow {
        nu: nu_echo,
        beta: p.beta(),
        gamma: p.gamma(),
        angle_deg: angle,
        p_min: bounds.map(|b| b.p_min),
        p_max: bounds.map(|b| b.p_max),
        median: bounds.map(|b| b.median),
        method: Method::Quadrature,
        n_samples: 0,
        stderr: 0.0,
        regime_ok: bounds.is_some(),
    };
    table.push_row(sweep_row_values(&row));
    Ok(table)
}

fn cmd_sweep(
    figure: Figure,
    nu_grid: Option<&str>,
    beta_grid: Option<&str>,
    gamma_grid: Option<&str>,
    angle: f64,
    seed: u64,
) -> Result<Table, CliError> {
    check_angle(angle)?;
    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    table.meta("command", json!("sweep"));
    table.meta("seed", json!(seed));
    table.meta("angle", num(angle));
    let rows = match figure {
        Figure::Fig6 => {
            let grid = parse_grid(nu_grid.unwrap_or("0:0.4:0.05"))?;
            table.meta("figure", json!("fig6"));
            table.meta("nu_grid", json!(grid));
            sweep_nu(&grid, angle)
        }
        Figure::Fig7 => {
            let betas = parse_grid(beta_grid.unwrap_or("0.05:0.35:0.05"))?;
            let gammas = parse_grid(gamma_grid.unwrap_or("0.01:0.10:0.01"))?;
            table.meta("figure", json!("fig7"));
            table.meta("beta_grid", json!(betas));
            table.meta("gamma_grid", json!(gammas));
            sweep_beta_gamma(&betas, &gammas, angle)
        }
    };
    for row in &rows {
        table.push_row(sweep_row_values(row));
    }
    Ok(table)
}

fn cmd_mc(
    angle: f64,
    nu: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    policy: PolicyArg,
    n: u64,
    seed: u64,
) -> Result<Table, CliError> {
    check_angle(angle)?;
    let (nu_echo, p) = resolve_params(nu, beta, gamma)?;
    let a = UnitVec3::from_plane_angle_deg(0.0);
    let b = UnitVec3::from_plane_angle_deg(angle);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let est = monte_carlo_anticoincidence(&a, &b, &p, policy.into(), n, &mut rng)?;
    let mut table = Table::new(SWEEP_COLUMNS.to_vec());
    table.meta("command", json!("mc"));
    table.meta("seed", json!(seed));
    table.meta("angle", num(angle));
    table.meta("policy", json!(format!("{policy:?}")));
    table.meta("ambiguous_fraction", num(est.ambiguous as f64 / est.n as f64));
    let row = SweepRow {
        nu: nu_echo,
        beta: p.beta(),
        gamma: p.gamma(),
        angle_deg: angle,
        p_min: Some(est.p_hat),
        p_max: Some(est.p_hat),
        median: Some(est.p_hat),
        method: Method::MonteCarlo,
        n_samples: est.n,
        stderr: est.stderr,
        regime_ok: true,
    };
    table.push_row(sweep_row_values(&row));
    Ok(table)
}

fn cmd_bell(triple: &[f64], oracle: Oracle, nu: f64, seed: u64) -> Result<Table, CliError> {
    if triple.len() != 3 {
        return Err(CliError::Usage("--triple takes exactly three angles".into()));
    }
    for &t in triple {
        check_angle(t)?;
    }
    let bt = BellTriple {
        a_deg: triple[0],
        b_deg: triple[1],
        c_deg: triple[2],
    };
    let f = oracle_fn(oracle, nu)?;
    let sum = bell_sum(&bt, &f)?;
    let mut table = Table::new(vec!["angle1_deg", "angle2_deg", "p_unequal"]);
    table.meta("command", json!("bell"));
    table.meta("seed", json!(seed));
    table.meta("oracle", json!(format!("{oracle:?}")));
    table.meta("triple", json!(triple));
    if matches!(oracle, Oracle::Pmax | Oracle::Pmin | Oracle::Median) {
        table.meta("nu", num(nu));
    }
    for (t1, t2) in [
        (bt.a_deg, bt.b_deg),
        (bt.b_deg, bt.c_deg),
        (bt.a_deg, bt.c_deg),
    ] {
        let p = f(
            &UnitVec3::from_plane_angle_deg(t1),
            &UnitVec3::from_plane_angle_deg(t2),
        )?;
        table.push_row(vec![num(t1), num(t2), num(p)]);
    }
    table.meta("bell_sum", num(sum));
    Ok(table)
}

fn cmd_chsh(settings: &[f64], oracle: Oracle, nu: f64, seed: u64) -> Result<Table, CliError> {
    if settings.len() != 4 {
        return Err(CliError::Usage(
            "--settings takes exactly four angles a,a',b,b'".into(),
        ));
    }
    for &t in settings {
        check_angle(t)?;
    }
    let [a, ap, b, bp] = [settings[0], settings[1], settings[2], settings[3]];
    let f = oracle_fn(oracle, nu)?;
    let value = chsh_value(
        &UnitVec3::from_plane_angle_deg(a),
        &UnitVec3::from_plane_angle_deg(ap),
        &UnitVec3::from_plane_angle_deg(b),
        &UnitVec3::from_plane_angle_deg(bp),
        &f,
    )?;
    let mut table = Table::new(vec!["a_deg", "a_prime_deg", "b_deg", "b_prime_deg", "chsh"]);
    table.meta("command", json!("chsh"));
    table.meta("seed", json!(seed));
    table.meta("oracle", json!(format!("{oracle:?}")));
    table.push_row(vec![num(a), num(ap), num(b), num(bp), num(value)]);
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn cmd_screening(
    a_deg: f64,
    b_variants: &[f64],
    nu: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
    policy: PolicyArg,
    center: &[f64],
    radius: f64,
    n: u64,
    seed: u64,
) -> Result<Table, CliError> {
    check_angle(a_deg)?;
    if b_variants.is_empty() {
        return Err(CliError::Usage("--b-variants needs at least one angle".into()));
    }
    for &t in b_variants {
        check_angle(t)?;
    }
    if center.len() != 3 {
        return Err(CliError::Usage("--center takes exactly x,y,z".into()));
    }
    let (nu_echo, p) = resolve_params(nu, beta, gamma)?;
    let center = UnitVec3::normalize(center[0], center[1], center[2])
        .map_err(|e| CliError::Usage(format!("bad bin center: {e}")))?;
    let a = UnitVec3::from_plane_angle_deg(a_deg);
    let variants: Vec<UnitVec3> = b_variants
        .iter()
        .map(|&t| UnitVec3::from_plane_angle_deg(t))
        .collect();
    let bin = CapBin {
        center,
        radius_rad: radius,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = screening_analysis(&a, &variants, &p, policy.into(), &bin, n, &mut rng)?;
    let mut table = Table::new(vec![
        "kind",
        "variant_i",
        "variant_j",
        "b_deg",
        "p_a_plus",
        "stderr",
        "n",
        "z",
    ]);
    table.meta("command", json!("screening"));
    table.meta("seed", json!(seed));
    table.meta("a", num(a_deg));
    table.meta("b_variants", json!(b_variants));
    if let Some(nu) = nu_echo {
        table.meta("nu", num(nu));
    }
    table.meta("beta", num(p.beta()));
    table.meta("gamma", num(p.gamma()));
    table.meta("policy", json!(format!("{policy:?}")));
    table.meta("center", json!(center.components()));
    table.meta("radius", num(radius));
    for row in &report.rows {
        table.push_row(vec![
            json!("variant"),
            json!(row.variant),
            Value::Null,
            num(b_variants[row.variant]),
            num(row.p_a_plus),
            num(row.stderr),
            json!(row.n),
            Value::Null,
        ]);
    }
    for z in &report.z_scores {
        table.push_row(vec![
            json!("z"),
            json!(z.variant_i),
            json!(z.variant_j),
            Value::Null,
            Value::Null,
            Value::Null,
            Value::Null,
            num(z.z),
        ]);
    }
    Ok(table)
}

fn cmd_dynamics(config_path: &std::path::Path, seed: u64) -> Result<Table, CliError> {
    let spec = config::parse_dynamics_config(config_path).map_err(CliError::Usage)?;
    let mut table = Table::new(vec![
        "seed_a",
        "seed_b",
        "status",
        "picard_iters",
        "residual",
        "alpha",
        "beta",
        "gamma",
        "fit_residual",
        "tri_max_violation",
        "tri_samples_above_tol",
    ]);
    table.meta("command", json!("dynamics"));
    table.meta("seed", json!(seed));
    table.meta("config", json!(config_path.display().to_string()));
    table.meta("a_deg", num(spec.a_deg));
    table.meta("b_deg", num(spec.b_deg));
    table.meta("s0", json!(spec.s0.components()));
    table.meta("kappa", num(spec.kappa));
    table.meta("h", num(spec.h));
    table.meta("speed", num(spec.speed));
    table.meta("length", num(spec.length));
    table.meta("delta", num(spec.delta));
    for outcome_seed in config::SEEDS {
        let cfg = spec.config_for_seed(outcome_seed);
        let (sa, sb) = (outcome_seed.a.sign(), outcome_seed.b.sign());
        match solve_time_symmetric(&cfg) {
            Ok(sol) => {
                let weights = extract_alpha_beta_gamma(&sol, &cfg).ok();
                let tri = check_invariant_triangle(&sol, &cfg).ok();
                table.push_row(vec![
                    json!(sa),
                    json!(sb),
                    json!("converged"),
                    json!(sol.picard_iters),
                    num(sol.residual),
                    opt_num(weights.map(|w| w.alpha)),
                    opt_num(weights.map(|w| w.beta)),
                    opt_num(weights.map(|w| w.gamma)),
                    opt_num(weights.map(|w| w.residual)),
                    opt_num(tri.map(|t| t.max_violation_a.max(t.max_violation_b))),
                    tri.map(|t| json!(t.samples_above_tol)).unwrap_or(Value::Null),
                ]);
            }
            Err(CoreError::SeedInconsistent { .. }) => {
                table.push_row(vec![
                    json!(sa),
                    json!(sb),
                    json!("seed-inconsistent"),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                ]);
            }
            Err(CoreError::NoConvergence { iters, residual }) => {
                table.push_row(vec![
                    json!(sa),
                    json!(sb),
                    json!("no-convergence"),
                    json!(iters),
                    num(residual),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                ]);
            }
            // config-level failures are fatal for the whole report
            Err(e) => return Err(e.into()),
        }
    }
    Ok(table)
}
