//! `edsa` command-line tool.
//!
//! Exit status: 0 on success, 2 on usage errors, 3 when an input fails to
//! load or validate, 1 on other runtime failures. Errors are printed to
//! stderr as `error[<category>]: <message>`.

use std::fs::File;
use std::io::{BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use edsa_core::ledger::{run_script, Chain, Ledger, LedgerState, Script};
use edsa_core::manifest::{write_atomic, RunManifest};
use edsa_core::model::{ActorId, DataType, Quality};
use edsa_core::pricing::{quality_score, PriceLedger, PriceRecord, Window};
use edsa_core::reputation::{RatingEvent, ReputationConfig, ReputationStore};
use edsa_core::scenario::Scenario;
use edsa_core::sim::{
    run_end_to_end, sweep_battery, sweep_demands, sweep_device_split, BatterySplit, E2eOptions, SimConfig,
};
use edsa_core::solver::{
    solve_exact, solve_greedy_with, validate_plan, DeviceOrder, ExactLimits, GreedyOptions, SolveReport,
};

#[derive(Parser)]
#[command(name = "edsa", version, about = "Energy-aware IoT data trading toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select and allocate demands for a scenario file.
    Solve(SolveArgs),
    /// Record prices and quote competition-based prices.
    Price {
        #[command(subcommand)]
        action: PriceAction,
    },
    /// Apply ratings and violations to a reputation event log.
    Rate {
        #[command(subcommand)]
        action: RateAction,
    },
    /// Run or replay subscription ledger transactions.
    Trade {
        #[command(subcommand)]
        action: TradeAction,
    },
    /// Monte-Carlo sweeps and end-to-end trade runs.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Greedy,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeviceOrderArg {
    Initial,
    Residual,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Toml,
    Json,
    Csv,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value = "greedy")]
    method: MethodArg,
    /// Device scan order for the greedy method.
    #[arg(long, value_enum, default_value = "initial")]
    device_order: DeviceOrderArg,
    #[arg(long, value_enum, default_value = "toml")]
    format: Format,
    /// Exact-solver time budget in seconds.
    #[arg(long, default_value_t = 10.0)]
    timeout: f64,
    #[arg(long, default_value_t = 20)]
    max_demands: usize,
    #[arg(long, default_value_t = 5)]
    max_devices: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PriceAction {
    /// Append a traded price to a price ledger file (created if missing).
    Record {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long = "type")]
        data_type: u16,
        #[arg(long)]
        price: f64,
        #[arg(long, default_value_t = 0.0)]
        qs: f64,
        #[arg(long, default_value_t = 0.0)]
        rs: f64,
        /// Epoch seconds.
        #[arg(long)]
        time: i64,
    },
    /// Quote a price from the records in `[start, end)`.
    Quote {
        #[arg(long)]
        ledger: PathBuf,
        #[arg(long = "type")]
        data_type: u16,
        /// Half-open time range `START,END` in epoch seconds.
        #[arg(long, value_parser = parse_window)]
        window: Window,
        #[arg(long, conflicts_with = "quality")]
        qs: Option<f64>,
        /// Quality level on the 10..100 ladder; sets the quality score to level/100.
        #[arg(long)]
        quality: Option<u32>,
        #[arg(long, default_value_t = 0.0)]
        rs: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        fee: f64,
    },
}

#[derive(Subcommand)]
enum RateAction {
    /// Apply a two-sided rating read from a JSON file; unknown actors are
    /// registered first.
    Apply {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        event: PathBuf,
    },
    /// Record a violated agreement.
    Violation {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        actor: String,
        #[arg(long)]
        time: i64,
    },
    /// Print current records.
    Show {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        actor: Option<String>,
    },
}

#[derive(Subcommand)]
enum TradeAction {
    /// Execute a transaction script and write the hash-chained log.
    Run {
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        log: PathBuf,
        /// Final materialized state, as JSON.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Step-by-step results; stdout when omitted.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Verify a log's chain and re-derive its state.
    Replay {
        #[arg(long)]
        log: PathBuf,
        /// Script supplying the keys and ledger config.
        #[arg(long)]
        script: PathBuf,
        /// State file whose digest must match the replayed state.
        #[arg(long)]
        state: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepKind {
    Demands,
    Battery,
    Devices,
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct SimulateArgs {
    #[command(subcommand)]
    action: Option<SimAction>,
    #[arg(long, value_enum)]
    sweep: Option<SweepKind>,
    #[command(flatten)]
    common: SimCommon,
    /// Comma-separated grid: demand counts, battery sizes, or `NxCAP` splits.
    #[arg(long)]
    grid: Option<String>,
    /// Defaults to `sweep-<kind>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimCommon {
    /// TOML file, or a preset: default, table3, demand-sweep, single-device.
    #[arg(long, default_value = "default")]
    config: String,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum SimAction {
    /// Solve one generated scenario and trade every allocation through the ledger.
    E2e {
        #[command(flatten)]
        common: SimCommon,
        /// Samples the buyer under-reports per trade.
        #[arg(long, default_value_t = 0)]
        shortfall: u64,
        /// The seller never settles.
        #[arg(long)]
        no_show: bool,
        #[arg(long)]
        seller_score: Option<f64>,
        #[arg(long)]
        buyer_score: Option<f64>,
        /// Transcript file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Ledger log file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome<T = ()> = Result<T, Failure>;

trait Invalid<T> {
    fn invalid(self, what: impl FnOnce() -> String) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Invalid<T> for Result<T, E> {
    fn invalid(self, what: impl FnOnce() -> String) -> Outcome<T> {
        self.map_err(|e| Failure::Validation(e.into().context(what())))
    }
}

struct Run {
    argv: Vec<String>,
    started: Instant,
    config: Vec<u8>,
    seed: Option<u64>,
    outputs: Vec<PathBuf>,
}

impl Run {
    fn new() -> Self {
        Self {
            argv: std::env::args().collect(),
            started: Instant::now(),
            config: Vec::new(),
            seed: None,
            outputs: Vec::new(),
        }
    }

    /// Writes to `path` atomically, or to stdout when there is no path.
    fn emit(&mut self, path: Option<&Path>, bytes: &[u8]) -> Outcome {
        match path {
            Some(p) => {
                write_atomic(p, bytes).with_context(|| format!("cannot write {}", p.display()))?;
                self.outputs.push(p.to_path_buf());
            }
            None => {
                std::io::stdout().write_all(bytes).context("cannot write to stdout")?;
            }
        }
        Ok(())
    }

    fn finish(self) -> Outcome {
        if self.outputs.is_empty() {
            return Ok(());
        }
        RunManifest::new(self.argv, &self.config, self.seed)
            .finish(self.outputs, self.started.elapsed())
            .write_beside_outputs()
            .context("cannot write run manifest")?;
        Ok(())
    }
}

fn read_input(path: &Path, what: &str) -> Outcome<Vec<u8>> {
    std::fs::read(path).invalid(|| format!("cannot read {what} {}", path.display()))
}

fn utf8(bytes: &[u8], path: &Path) -> Outcome<String> {
    String::from_utf8(bytes.to_vec()).invalid(|| format!("{} is not UTF-8", path.display()))
}

fn json_line<T: serde::Serialize>(value: &T) -> Outcome<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).context("cannot encode output")?;
    v.push(b'\n');
    Ok(v)
}

fn solve(args: SolveArgs) -> Outcome {
    let mut run = Run::new();
    let bytes = read_input(&args.scenario, "scenario file")?;
    let text = utf8(&bytes, &args.scenario)?;
    let scenario = Scenario::from_toml_str(&text).invalid(|| format!("invalid scenario {}", args.scenario.display()))?;
    run.config = bytes;
    run.seed = scenario.seed;

    let report: SolveReport = match args.method {
        MethodArg::Greedy => {
            let options = GreedyOptions {
                device_order: match args.device_order {
                    DeviceOrderArg::Initial => DeviceOrder::InitialBattery,
                    DeviceOrderArg::Residual => DeviceOrder::ResidualBattery,
                },
            };
            solve_greedy_with(&scenario, &options).invalid(|| "cannot solve scenario".into())?
        }
        MethodArg::Exact => {
            if !(args.timeout.is_finite() && args.timeout >= 0.0) {
                return Err(Failure::Validation(anyhow!("timeout must be a non-negative number of seconds")));
            }
            let limits = ExactLimits {
                max_demands: args.max_demands,
                max_devices: args.max_devices,
                timeout: Duration::from_secs_f64(args.timeout),
            };
            solve_exact(&scenario, &limits).invalid(|| "cannot solve scenario".into())?
        }
    };
    if let Err(violations) = validate_plan(&scenario, &report.plan) {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Failure::Runtime(anyhow!("solver produced an infeasible plan: {}", list.join("; "))));
    }
    let body = match args.format {
        Format::Toml => report.to_toml_string().context("cannot encode report")?.into_bytes(),
        Format::Json => json_line(&report)?,
        Format::Csv => report.to_csv().into_bytes(),
    };
    run.emit(args.out.as_deref(), &body)?;
    run.finish()
}

fn load_prices(path: &Path) -> Outcome<PriceLedger> {
    match File::open(path) {
        Ok(f) => PriceLedger::read_ndjson(BufReader::new(f)).invalid(|| format!("invalid price ledger {}", path.display())),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(PriceLedger::new()),
        Err(e) => Err(Failure::Validation(anyhow!(e).context(format!("cannot read price ledger {}", path.display())))),
    }
}

fn price(action: PriceAction) -> Outcome {
    match action {
        PriceAction::Record {
            ledger,
            data_type,
            price,
            qs,
            rs,
            time,
        } => {
            let mut book = load_prices(&ledger)?;
            let rec = PriceRecord {
                timestamp: time,
                data_type: DataType(data_type),
                price,
                quality_score: qs,
                risk_score: rs,
            };
            let at = book
                .record_price(rec)
                .invalid(|| "rejected price record".into())?;
            append_lines(&ledger, &[rec])?;
            println!("{}", serde_json::json!({ "position": at, "records": book.len() }));
            Ok(())
        }
        PriceAction::Quote {
            ledger,
            data_type,
            window,
            qs,
            quality,
            rs,
            beta,
            fee,
        } => {
            let book = load_prices(&ledger)?;
            let qs = match (qs, quality) {
                (Some(q), _) => q,
                (None, Some(level)) => quality_score(Quality::new(level).invalid(|| "invalid quality".into())?),
                (None, None) => 0.0,
            };
            let quote = book
                .quote(DataType(data_type), window, qs, rs, beta, fee)
                .invalid(|| "cannot quote".into())?;
            std::io::stdout().write_all(&json_line(&quote)?).context("cannot write to stdout")?;
            Ok(())
        }
    }
}

fn load_reputation(path: &Path) -> Outcome<ReputationStore> {
    let events = match File::open(path) {
        Ok(f) => ReputationStore::read_log(BufReader::new(f)).invalid(|| format!("invalid reputation log {}", path.display()))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(Failure::Validation(anyhow!(e).context(format!("cannot read {}", path.display())))),
    };
    ReputationStore::replay(ReputationConfig::default(), &events).invalid(|| format!("cannot replay {}", path.display()))
}

/// Appends the events past `seen` to the log and rewrites the snapshot
/// beside it.
fn save_reputation(path: &Path, store: &ReputationStore, seen: usize) -> Outcome {
    append_lines(path, &store.log()[seen..])?;
    let records: Vec<_> = store.records().collect();
    let snap = snapshot_path(path);
    write_atomic(&snap, &json_line(&records)?).with_context(|| format!("cannot write {}", snap.display()))?;
    Ok(())
}

fn snapshot_path(log: &Path) -> PathBuf {
    let mut name = log.file_name().unwrap_or_default().to_os_string();
    name.push(".snapshot.json");
    log.with_file_name(name)
}

fn append_lines<T: serde::Serialize>(path: &Path, items: &[T]) -> Outcome {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item).context("cannot encode record")?;
        buf.push(b'\n');
    }
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    f.write_all(&buf)
        .and_then(|()| f.sync_all())
        .with_context(|| format!("cannot append to {}", path.display()))?;
    Ok(())
}

fn parse_window(s: &str) -> Result<Window, String> {
    let (a, b) = s.split_once(',').ok_or("expected START,END")?;
    let start = a.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let end = b.trim().parse::<i64>().map_err(|e| e.to_string())?;
    Window::new(start, end).map_err(|e| e.to_string())
}

fn rate(action: RateAction) -> Outcome {
    match action {
        RateAction::Apply { log, event } => {
            let bytes = read_input(&event, "event file")?;
            let event: RatingEvent =
                serde_json::from_slice(&bytes).invalid(|| format!("invalid rating event {}", event.display()))?;
            let mut store = load_reputation(&log)?;
            let seen = store.log().len();
            event.validate().invalid(|| "invalid rating".into())?;
            store.register(&event.actor_i);
            store.register(&event.actor_j);
            let outcome = store.apply_rating(&event).invalid(|| "rating rejected".into())?;
            save_reputation(&log, &store, seen)?;
            let body = serde_json::json!({
                "outcome": outcome,
                "score_i": store.score(&event.actor_i),
                "score_j": store.score(&event.actor_j),
            });
            std::io::stdout().write_all(&json_line(&body)?).context("cannot write to stdout")?;
            Ok(())
        }
        RateAction::Violation { log, actor, time } => {
            let mut store = load_reputation(&log)?;
            let seen = store.log().len();
            let actor = ActorId::new(actor);
            store.register(&actor);
            let rec = store.apply_violation(&actor, time).invalid(|| "violation rejected".into())?.clone();
            save_reputation(&log, &store, seen)?;
            std::io::stdout().write_all(&json_line(&rec)?).context("cannot write to stdout")?;
            Ok(())
        }
        RateAction::Show { log, actor } => {
            if !log.exists() {
                return Err(Failure::Validation(anyhow!("cannot read reputation log {}", log.display())));
            }
            let store = load_reputation(&log)?;
            let body = match actor {
                Some(a) => {
                    let a = ActorId::new(a);
                    let rec = store
                        .get(&a)
                        .ok_or_else(|| Failure::Validation(anyhow!("unknown actor {a}")))?;
                    json_line(rec)?
                }
                None => json_line(&store.records().collect::<Vec<_>>())?,
            };
            std::io::stdout().write_all(&body).context("cannot write to stdout")?;
            Ok(())
        }
    }
}

fn load_script(path: &Path) -> Outcome<(Script, Vec<u8>)> {
    let bytes = read_input(path, "script file")?;
    let script = serde_json::from_slice(&bytes).invalid(|| format!("invalid script {}", path.display()))?;
    Ok((script, bytes))
}

fn trade(action: TradeAction) -> Outcome {
    match action {
        TradeAction::Run {
            script,
            log,
            state,
            transcript,
        } => {
            let mut run = Run::new();
            let (script, bytes) = load_script(&script)?;
            run.config = bytes;
            let (ledger, t) = run_script(&script);
            let mut buf = Vec::new();
            ledger.chain().write_ndjson(&mut buf).context("cannot encode log")?;
            run.emit(Some(&log), &buf)?;
            if let Some(p) = state {
                run.emit(Some(&p), &json_line(ledger.state())?)?;
            }
            run.emit(transcript.as_deref(), &json_line(&t)?)?;
            run.finish()
        }
        TradeAction::Replay { log, script, state } => {
            let (script, _) = load_script(&script)?;
            let f = File::open(&log).invalid(|| format!("cannot read log {}", log.display()))?;
            let entries = Chain::read_ndjson(BufReader::new(f)).invalid(|| format!("invalid log {}", log.display()))?;
            let ledger = Ledger::replay(script.key_ring(), script.config.clone(), &entries)
                .invalid(|| format!("log {} does not replay", log.display()))?;
            let digest = ledger.digest();
            let expected = match &state {
                Some(p) => {
                    let bytes = read_input(p, "state file")?;
                    let st: LedgerState = serde_json::from_slice(&bytes).invalid(|| format!("invalid state {}", p.display()))?;
                    Some(st.digest())
                }
                None => None,
            };
            let body = serde_json::json!({
                "entries": entries.len(),
                "head": ledger.chain().head(),
                "state_digest": digest,
                "matches_state": expected.as_ref().map(|e| *e == digest),
            });
            std::io::stdout().write_all(&json_line(&body)?).context("cannot write to stdout")?;
            match expected {
                Some(e) if e != digest => Err(Failure::Validation(anyhow!(
                    "replayed state digest {digest} differs from {e}"
                ))),
                _ => Ok(()),
            }
        }
    }
}

fn resolve_config(common: &SimCommon, fallback: fn() -> SimConfig) -> Outcome<(SimConfig, Vec<u8>)> {
    let path = Path::new(&common.config);
    let (mut cfg, bytes) = if path.is_file() {
        let bytes = read_input(path, "config file")?;
        let text = utf8(&bytes, path)?;
        let cfg = SimConfig::from_toml_str(&text).invalid(|| format!("invalid config {}", path.display()))?;
        (cfg, bytes)
    } else {
        let cfg = match common.config.as_str() {
            "default" => fallback(),
            "table3" => SimConfig::table3(),
            "demand-sweep" => SimConfig::demand_sweep(),
            "single-device" => SimConfig::single_device(),
            other => return Err(Failure::Validation(anyhow!("cannot read config file {other}: no such file or preset"))),
        };
        let bytes = toml::to_string(&cfg).context("cannot encode config")?.into_bytes();
        (cfg, bytes)
    };
    if let Some(n) = common.iterations {
        cfg.iterations = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate().invalid(|| "invalid simulation config".into())?;
    Ok((cfg, bytes))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Outcome<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',')
        .map(|p| p.trim().parse::<T>().invalid(|| format!("bad grid value {p:?}")))
        .collect()
}

fn parse_splits(s: &str) -> Outcome<Vec<BatterySplit>> {
    s.split(',')
        .map(|p| {
            let (n, cap) = p
                .trim()
                .split_once('x')
                .ok_or_else(|| Failure::Validation(anyhow!("bad split {p:?}, expected NxCAP")))?;
            Ok(BatterySplit {
                devices: n.parse().invalid(|| format!("bad split {p:?}"))?,
                battery: cap.parse().invalid(|| format!("bad split {p:?}"))?,
            })
        })
        .collect()
}

fn simulate(args: SimulateArgs) -> Outcome {
    if let Some(SimAction::E2e {
        common,
        shortfall,
        no_show,
        seller_score,
        buyer_score,
        out,
        log,
    }) = args.action
    {
        let mut run = Run::new();
        let (cfg, bytes) = resolve_config(&common, SimConfig::table3)?;
        run.config = bytes;
        run.seed = Some(cfg.seed);
        let options = E2eOptions {
            buyer_shortfall: shortfall,
            seller_no_show: no_show,
            seller_score,
            buyer_score,
            ..E2eOptions::default()
        };
        let (transcript, ledger) = run_end_to_end(&cfg, cfg.seed, &options).map_err(|e| Failure::Runtime(e.into()))?;
        if let Some(p) = log {
            let mut buf = Vec::new();
            ledger.chain().write_ndjson(&mut buf).context("cannot encode log")?;
            run.emit(Some(&p), &buf)?;
        }
        run.emit(out.as_deref(), &json_line(&transcript)?)?;
        return run.finish();
    }

    let Some(kind) = args.sweep else {
        return Err(Failure::Validation(anyhow!("simulate needs --sweep or the e2e subcommand")));
    };
    let mut run = Run::new();
    let fallback: fn() -> SimConfig = match kind {
        SweepKind::Demands => SimConfig::demand_sweep,
        SweepKind::Battery => SimConfig::single_device,
        SweepKind::Devices => SimConfig::table3,
    };
    let (cfg, bytes) = resolve_config(&args.common, fallback)?;
    run.config = bytes;
    run.seed = Some(cfg.seed);
    let sim_err = |e: edsa_core::sim::SimError| Failure::Validation(e.into());
    let (result, name) = match kind {
        SweepKind::Demands => {
            let grid = match &args.grid {
                Some(g) => parse_list::<usize>(g)?,
                None => (10..=250).step_by(20).collect(),
            };
            (sweep_demands(&cfg, &grid).map_err(sim_err)?, "demands")
        }
        SweepKind::Battery => {
            let grid = match &args.grid {
                Some(g) => parse_list::<f64>(g)?,
                None => (500..=3000).step_by(250).map(f64::from).collect(),
            };
            (sweep_battery(&cfg, &grid).map_err(sim_err)?, "battery")
        }
        SweepKind::Devices => {
            let splits = match &args.grid {
                Some(g) => parse_splits(g)?,
                None => [(10, 300.0), (5, 600.0), (2, 1500.0), (1, 3000.0)]
                    .map(|(devices, battery)| BatterySplit { devices, battery })
                    .to_vec(),
            };
            (sweep_device_split(&cfg, &splits).map_err(sim_err)?, "devices")
        }
    };
    let out = args.out.unwrap_or_else(|| PathBuf::from(format!("sweep-{name}.csv")));
    run.emit(Some(&out), result.to_csv().as_bytes())?;
    run.finish()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Price { action } => price(action),
        Command::Rate { action } => rate(action),
        Command::Trade { action } => trade(action),
        Command::Simulate(a) => simulate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error[validation]: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error[runtime]: {e:#}");
            ExitCode::from(1)
        }
    }
}
