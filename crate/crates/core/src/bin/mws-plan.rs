use std::fs::{self, File};
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use mws_plan::netmodel::{
    load_demands, load_topology, LaserGrouping, Modulation, Scenario, SymbolRate, TransponderConfig,
};
use mws_plan::qot::{self, FiberParams, LaunchSpec};
use mws_plan::rcsa::{write_plan_csv, Planner, PlannerOptions};
use mws_plan::study::{
    laser_count, load_weights, penalty_sweep, randomize_weights, run_sweep, write_penalty_csv,
    write_results_csv,
};
use mws_plan::txchain::{
    self, sweep_osnr_tx, write_sweep_csv, LightSourceSpec, SourceKind, SweepAxis, TxArchitecture,
    TxScheme,
};

#[derive(Parser)]
#[command(
    name = "mws-plan",
    version,
    about = "SWS vs MWS transponder network planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep transmit OSNR over line power or OCNR.
    Osnr(OsnrArgs),
    /// Achieved vs required SNR for one configuration over N spans.
    Qot(QotArgs),
    /// Plan a demand file on a topology.
    Plan(PlanArgs),
    /// Scenario sweep over aggregate requested traffic.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Joint,
    PerLine,
    Sws,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Power,
    Ocnr,
}

#[derive(clap::Args)]
struct OsnrArgs {
    #[arg(long, value_enum, default_value = "joint")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "power")]
    axis: AxisArg,
    #[arg(long, allow_hyphen_values = true, default_value_t = -25.0)]
    start: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 5.0)]
    end: f64,
    #[arg(long, default_value_t = 0.5)]
    step: f64,
    /// OCNR (dB) held fixed on a power sweep.
    #[arg(long, default_value_t = 45.0)]
    ocnr_db: f64,
    /// Per-line power (dBm) held fixed on an OCNR sweep.
    #[arg(long, allow_hyphen_values = true, default_value_t = -10.0)]
    line_power_dbm: f64,
    #[arg(long, default_value_t = 4)]
    lines: usize,
    #[arg(long, default_value_t = 26.0)]
    ca_cap_dbm: f64,
    #[arg(long, default_value_t = 5.0)]
    nf_db: f64,
    #[arg(long, default_value_t = 5.0)]
    demux_loss_db: f64,
    #[arg(long, default_value_t = 5.0)]
    mux_loss_db: f64,
    #[arg(long, default_value_t = 5.0)]
    modulation_loss_db: f64,
    #[arg(long, default_value_t = 23.0)]
    insertion_loss_db: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    launch_dbm: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct QotArgs {
    #[arg(long)]
    spans: usize,
    #[arg(long, default_value_t = 80.0)]
    span_km: f64,
    /// Symbol rate in GBd (35, 70, 105 or 140).
    #[arg(long, default_value_t = 35.0)]
    symbol_rate: f64,
    /// Constellation order (4, 16 or 64).
    #[arg(long, default_value_t = 4)]
    modulation: u32,
    #[arg(long)]
    osnr_tx_db: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Sws,
    Flex,
    Fixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum GroupingArg {
    Source,
    Pair,
}

#[derive(clap::Args)]
struct PlanArgs {
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    demands: PathBuf,
    #[arg(long, value_enum, default_value = "sws")]
    scenario: ScenarioArg,
    #[arg(long)]
    penalty_db: Option<f64>,
    #[arg(long, default_value_t = 4)]
    lines: usize,
    #[arg(long, default_value_t = 150.0)]
    fsr_ghz: f64,
    /// How flex-MWS lines share a source.
    #[arg(long, value_enum, default_value = "source")]
    grouping: GroupingArg,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long)]
    topology: PathBuf,
    /// CSV `id,weight` overriding node weights.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = 20_000.0)]
    art_min: f64,
    #[arg(long, default_value_t = 400_000.0)]
    art_max: f64,
    #[arg(long, default_value_t = 20_000.0)]
    art_step: f64,
    /// Comma list of `sws`, `flex:<dB>`, `fixed:<dB>[:<fsr GHz>]`.
    #[arg(long, default_value = "sws,flex:1,flex:3,fixed:1")]
    scenarios: String,
    #[arg(long, default_value = "0,0.5,1,1.5,2,2.5,3")]
    penalty_grid: String,
    /// ART of the penalty sweep; defaults to the middle of the ART grid.
    #[arg(long)]
    penalty_art: Option<f64>,
    #[arg(long, default_value_t = 4)]
    lines: usize,
    /// Only used together with --randomize-weights.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    randomize_weights: bool,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

fn run_osnr(a: OsnrArgs) -> Result<()> {
    let scheme = match a.scheme {
        SchemeArg::Joint => TxScheme::JointCa,
        SchemeArg::PerLine => TxScheme::PerLineCa,
        SchemeArg::Sws => TxScheme::SwsDirect,
    };
    let arch = TxArchitecture {
        scheme,
        ca_cap_dbm: a.ca_cap_dbm,
        nf_db: a.nf_db,
        demux_loss_db: a.demux_loss_db,
        mux_loss_db: a.mux_loss_db,
        modulation_loss_db: a.modulation_loss_db,
        insertion_loss_db: a.insertion_loss_db,
        launch_dbm: a.launch_dbm,
    };
    let source = LightSourceSpec {
        kind: if scheme == TxScheme::SwsDirect && a.lines == 1 {
            SourceKind::Sws
        } else {
            SourceKind::Mws
        },
        ocnr_db: a.ocnr_db,
        line_power_dbm: a.line_power_dbm,
        lines: a.lines,
        fsr_ghz: None,
    };
    let axis = match a.axis {
        AxisArg::Power => SweepAxis::LinePower,
        AxisArg::Ocnr => SweepAxis::Ocnr,
    };
    let points = sweep_osnr_tx(&source, &arch, axis, a.start, a.end, a.step)?;
    write_sweep_csv(output(&a.out)?, &points, scheme)?;
    Ok(())
}

fn run_qot(a: QotArgs) -> Result<()> {
    let Some(rate) = SymbolRate::from_gbaud(a.symbol_rate) else {
        bail!("unsupported symbol rate {} GBd", a.symbol_rate);
    };
    let Some(modulation) = Modulation::from_order(a.modulation) else {
        bail!("unsupported modulation order {}", a.modulation);
    };
    let config = TransponderConfig::new(modulation, rate);
    let osnr_tx = a.osnr_tx_db.unwrap_or_else(txchain::sws_reference_osnr_db);
    let snr = qot::path_snr(
        &FiberParams::default(),
        vec![a.span_km; a.spans],
        &config,
        &LaunchSpec::default(),
        osnr_tx,
    )?;
    println!("config: {}", config.label());
    println!("osnr_tx_db: {osnr_tx:.3}");
    println!("achieved_snr_db: {snr:.3}");
    println!("required_snr_db: {:.3}", config.required_snr_db);
    println!("feasible: {}", snr >= config.required_snr_db);
    Ok(())
}

fn run_plan(a: PlanArgs) -> Result<()> {
    let topo = load_topology(&a.topology)?;
    let demands = load_demands(&a.demands, &topo)?;
    let mut scenario = match a.scenario {
        ScenarioArg::Sws => Scenario::sws(),
        ScenarioArg::Flex => Scenario::flex(a.penalty_db.unwrap_or(1.0)).with_lines(a.lines),
        ScenarioArg::Fixed => {
            Scenario::fixed(a.penalty_db.unwrap_or(1.0), a.fsr_ghz).with_lines(a.lines)
        }
    };
    if let (ScenarioArg::Sws, Some(p)) = (a.scenario, a.penalty_db) {
        scenario.mws_penalty_db = p;
    }
    scenario = scenario.with_grouping(match a.grouping {
        GroupingArg::Source => LaserGrouping::SourceNode,
        GroupingArg::Pair => LaserGrouping::NodePair,
    });
    let options = PlannerOptions {
        k: a.k,
        ..PlannerOptions::default()
    };
    let plan = Planner::new(&topo, scenario, options)?.plan_all(&demands)?;
    write_plan_csv(output(&a.out)?, &plan, &topo, laser_count(&plan))?;
    Ok(())
}

fn parse_scenarios(text: &str, lines: usize) -> Result<Vec<Scenario>> {
    text.split(',')
        .map(|tok| {
            let parts: Vec<&str> = tok.trim().split(':').collect();
            let num = |i: usize, default: f64| -> Result<f64> {
                parts
                    .get(i)
                    .map(|s| {
                        s.parse::<f64>()
                            .with_context(|| format!("in scenario `{tok}`"))
                    })
                    .unwrap_or(Ok(default))
            };
            Ok(match parts[0] {
                "sws" => Scenario::sws(),
                "flex" => Scenario::flex(num(1, 1.0)?).with_lines(lines),
                "fixed" => Scenario::fixed(num(1, 1.0)?, num(2, Scenario::DEFAULT_FSR_GHZ)?)
                    .with_lines(lines),
                other => bail!("unknown scenario `{other}`"),
            })
        })
        .collect()
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number `{s}`"))
        })
        .collect()
}

fn run_sweep_cmd(a: SweepArgs) -> Result<()> {
    let mut topo = load_topology(&a.topology)?;
    if let Some(w) = &a.weights {
        topo = load_weights(&topo, w)?;
    }
    if a.randomize_weights {
        topo = randomize_weights(&topo, a.seed);
    }
    if !(a.art_step > 0.0 && a.art_max >= a.art_min && a.art_min > 0.0) {
        bail!("invalid ART range");
    }
    let n = ((a.art_max - a.art_min) / a.art_step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| a.art_min + i as f64 * a.art_step).collect();
    let scenarios = parse_scenarios(&a.scenarios, a.lines)?;
    let options = PlannerOptions::default();

    let rows = run_sweep(&topo, &scenarios, &grid, &options)?;
    let penalties = parse_list(&a.penalty_grid)?;
    let penalty_art = a.penalty_art.unwrap_or(grid[grid.len() / 2]);
    let prow = penalty_sweep(&topo, penalty_art, &penalties, a.lines, &options)?;

    fs::create_dir_all(&a.out_dir)?;
    let results = a.out_dir.join("results.csv");
    let penalty = a.out_dir.join("penalty.csv");
    write_results_csv(File::create(&results)?, &rows)?;
    write_penalty_csv(File::create(&penalty)?, &prow)?;
    eprintln!("wrote {} and {}", results.display(), penalty.display());
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Osnr(a) => run_osnr(a),
        Command::Qot(a) => run_qot(a),
        Command::Plan(a) => run_plan(a),
        Command::Sweep(a) => run_sweep_cmd(a),
    }
}
