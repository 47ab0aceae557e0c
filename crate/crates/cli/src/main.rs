use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use requbis::bus::{self, TorqueClass};
use requbis::docking::{attempt_dock, undock, DockEvent, DockLimits, DockState, RelativePose};
use requbis::gaits::{self, BipedParams, CrawlParams, GaitOutput, SerpentineParams};
use requbis::kinematics::forward_kinematics;
use requbis::model::{terminal_ratio, total_mass};
use requbis::stability::{validate_trajectory, Contact, StabilityReport};
use requbis::trajectory::Trajectory;
use requbis::transitions::{self, TransitionScript};
use requbis::{load_model, ConfigurationMode, RobotModel, LINKS};

/// Gaits, transitions, docking and bus tools for a 7-link reconfigurable snake robot.
#[derive(Parser)]
#[command(name = "requbis", version)]
struct Cli {
    /// Robot model JSON; missing keys take the default robot.
    #[arg(long, global = true, env = "REQUBIS_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a gait, check it and export the trajectory as CSV.
    Gait(GaitArgs),
    /// Run a transition script and check every sample.
    Transition(TransitionArgs),
    /// Dock two agents (optionally transform to a quadruped and undock).
    Dock(DockArgs),
    /// Compile a trajectory CSV into a bus command stream.
    Compile(CompileArgs),
    /// Replay a bus stream through emulated servos.
    Replay(ReplayArgs),
    /// Print a model summary.
    Info,
}

#[derive(Clone, Copy, ValueEnum)]
enum GaitName {
    Serpentine,
    Rolling,
    Crawl,
    Biped,
}

#[derive(Args)]
struct Output {
    /// Sample rate in Hz.
    #[arg(long, default_value_t = 50.0)]
    rate: f64,
    /// Trajectory CSV path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Stability report JSON path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Contact schedule JSON path (one contact list per sample).
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Scenario state file (dock status and mode).
    #[arg(long)]
    state: Option<PathBuf>,
}

#[derive(Args)]
struct GaitArgs {
    gait: GaitName,
    /// Seconds; defaults to 10 for snake gaits and one cycle for walking gaits.
    #[arg(long)]
    duration: Option<f64>,
    #[command(flatten)]
    io: Output,
    /// Gait parameter JSON; flags below override it.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    amp_x: Option<f64>,
    #[arg(long)]
    amp_y: Option<f64>,
    #[arg(long)]
    omega_x: Option<f64>,
    #[arg(long)]
    omega_y: Option<f64>,
    #[arg(long)]
    delta_x: Option<f64>,
    #[arg(long)]
    delta_y: Option<f64>,
    #[arg(long)]
    phi_plane: Option<f64>,
    /// Biped swing advance in degrees.
    #[arg(long)]
    lift: Option<f64>,
    /// Crawl hip sweep in degrees.
    #[arg(long)]
    hip_sweep: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransitionName {
    SnakeToBiped,
    SnakeToQuadruped,
    /// User script given with --script.
    Custom,
}

#[derive(Args)]
struct TransitionArgs {
    name: TransitionName,
    #[arg(long)]
    script: Option<PathBuf>,
    /// Write the keyframe script as JSON.
    #[arg(long)]
    export_script: Option<PathBuf>,
    #[command(flatten)]
    io: Output,
}

#[derive(Args)]
struct DockArgs {
    /// Offset of agent B's center link from nominal, mm: x,y,z.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0, 0.0], allow_hyphen_values = true)]
    offset: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    yaw: f64,
    /// Also transform to the quadruped and undock.
    #[arg(long)]
    full: bool,
    /// JSON-lines event log (stdout when omitted).
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, default_value_t = 50.0)]
    rate: f64,
}

#[derive(Args)]
struct CompileArgs {
    input: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Write a hex dump instead of raw bytes.
    #[arg(long)]
    hex: bool,
    /// Actuator ids, 7 per agent (default 1, 2, ...).
    #[arg(long, value_delimiter = ',')]
    ids: Option<Vec<u8>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Torque {
    Low,
    High,
}

#[derive(Args)]
struct ReplayArgs {
    input: PathBuf,
    /// Input is a hex dump.
    #[arg(long)]
    hex: bool,
    #[arg(long, default_value_t = 1)]
    agents: usize,
    #[arg(long, value_delimiter = ',')]
    ids: Option<Vec<u8>>,
    #[arg(long, value_enum, default_value_t = Torque::Low)]
    torque: Torque,
    #[command(flatten)]
    io: Output,
}

enum Failure {
    /// Exit 1: the run completed but a check failed.
    Validation(String),
    /// Exit 2: bad input or unmet precondition.
    Usage(String),
}

type Res<T> = Result<T, Failure>;

fn usage<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioState {
    dock: DockState,
    mode: ConfigurationMode,
}

impl Default for ScenarioState {
    fn default() -> Self {
        ScenarioState { dock: DockState::default(), mode: ConfigurationMode::Snake }
    }
}

fn read_state(path: &Path) -> Res<ScenarioState> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_state(path: &Path, s: &ScenarioState) -> Res<()> {
    write(path, serde_json::to_string_pretty(s).expect("state serializes") + "\n")
}

fn write(path: &Path, data: impl AsRef<[u8]>) -> Res<()> {
    fs::write(path, data).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(config: &Option<PathBuf>) -> Res<RobotModel> {
    match config {
        None => Ok(RobotModel::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            load_model(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

fn positive(name: &str, v: f64) -> Res<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("{name} must be positive")))
    }
}

fn read_params<T: serde::de::DeserializeOwned + Default>(path: &Option<PathBuf>) -> Res<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))
        }
    }
}

/// Writes the trajectory, schedule and report, then fails if unstable.
fn finish(io: &Output, traj: &Trajectory, schedule: Option<&[Vec<Contact>]>, models: &[&RobotModel]) -> Res<()> {
    finish_with(io, io.schedule.as_deref(), traj, schedule, models)
}

fn finish_with(
    io: &Output,
    schedule_out: Option<&Path>,
    traj: &Trajectory,
    schedule: Option<&[Vec<Contact>]>,
    models: &[&RobotModel],
) -> Res<()> {
    let csv = traj.to_csv();
    match &io.out {
        Some(p) => write(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Err(e) = traj.check(models[0]) {
        return Err(Failure::Validation(e.to_string()));
    }
    let Some(schedule) = schedule else { return Ok(()) };
    if let Some(p) = schedule_out {
        write(p, serde_json::to_string(schedule).expect("schedule serializes") + "\n")?;
    }
    let report = validate_trajectory(models, traj, schedule).map_err(usage)?;
    if let Some(p) = &io.report {
        write(p, report.to_json() + "\n")?;
    }
    eprintln!("{}", report.summary());
    check(&report)
}

fn check(report: &StabilityReport) -> Res<()> {
    match report.first_violation() {
        Some(v) => Err(Failure::Validation(format!("unstable at t = {:.3} s, margin {:.3} mm", v.t, v.margin))),
        None => Ok(()),
    }
}

fn engaged(state: &Option<PathBuf>, what: &str) -> Res<ScenarioState> {
    let path = state.as_ref().ok_or_else(|| usage(format!("{what} needs --state with an engaged dock")))?;
    let s = read_state(path)?;
    transitions::require_engaged(&s.dock).map_err(|e| usage(format!("{what}: {e}")))?;
    Ok(s)
}

fn run_gait(model: &RobotModel, a: &GaitArgs) -> Res<()> {
    let rate = positive("rate", a.io.rate)?;
    if let Some(d) = a.duration {
        positive("duration", d)?;
    }
    match a.gait {
        GaitName::Serpentine | GaitName::Rolling => {
            let mut p: SerpentineParams = read_params(&a.params)?;
            let set = |dst: &mut f64, v: Option<f64>| {
                if let Some(v) = v {
                    *dst = v;
                }
            };
            set(&mut p.amp_x, a.amp_x);
            set(&mut p.amp_y, a.amp_y);
            set(&mut p.omega_x, a.omega_x);
            set(&mut p.omega_y, a.omega_y);
            set(&mut p.delta_x, a.delta_x);
            set(&mut p.delta_y, a.delta_y);
            set(&mut p.phi_plane, a.phi_plane);
            p.validate().map_err(usage)?;
            let d = a.duration.unwrap_or(10.0);
            let traj = match a.gait {
                GaitName::Serpentine => gaits::serpentine_gait(&p, d, rate),
                _ => gaits::rolling_trajectory(&p, d, rate),
            };
            finish(&a.io, &traj, None, &[model])
        }
        GaitName::Crawl => {
            engaged(&a.io.state, "crawl")?;
            let mut p: CrawlParams = read_params(&a.params)?;
            if let Some(s) = a.hip_sweep {
                p.hip_sweep = s;
            }
            let out = gaits::quadruped_crawl_cycle([model, model], &p, rate).map_err(usage)?;
            if let Some(d) = out.displacement {
                eprintln!("displacement per cycle: {:.3} mm (x {:.3}, z {:.3})", d.norm(), d.x, d.z);
            }
            let out = repeat_cycle(out, a.duration, rate);
            finish(&a.io, &out.trajectory, Some(&out.schedule), &[model, model])
        }
        GaitName::Biped => {
            if let Some(path) = &a.io.state {
                let s = read_state(path)?;
                if s.mode != ConfigurationMode::Biped {
                    return Err(usage(format!("biped gait needs biped mode, state is {:?}", s.mode)));
                }
            }
            let mut p: BipedParams = read_params(&a.params)?;
            if let Some(l) = a.lift {
                p.lift_angle = l;
            }
            if !p.within_limit() {
                eprintln!("warning: lift {} deg is not below the stability limit {} deg", p.lift_angle, p.stability_limit);
            }
            let out = gaits::biped_walk(model, &p, rate, a.duration).map_err(usage)?;
            finish(&a.io, &out.trajectory, Some(&out.schedule), &[model])
        }
    }
}

/// Tiles a closed cycle to cover `duration` seconds.
fn repeat_cycle(out: GaitOutput, duration: Option<f64>, rate: f64) -> GaitOutput {
    let Some(d) = duration else { return out };
    let n = (d * rate).round() as usize;
    let per = out.trajectory.len() - 1;
    let mut trajectory = Trajectory::new(rate);
    let mut schedule = Vec::with_capacity(n);
    for i in 0..n {
        let k = i % per;
        let mut s = out.trajectory.samples[k].clone();
        s.t = i as f64 / rate;
        trajectory.samples.push(s);
        schedule.push(out.schedule[k].clone());
    }
    GaitOutput { trajectory, schedule, ..out }
}

fn run_transition(model: &RobotModel, a: &TransitionArgs) -> Res<()> {
    let rate = positive("rate", a.io.rate)?;
    let mut state = match &a.io.state {
        Some(p) if p.exists() => Some(read_state(p)?),
        Some(_) => Some(ScenarioState::default()),
        None => None,
    };
    let script = match a.name {
        TransitionName::SnakeToBiped => transitions::snake_to_biped_script(),
        TransitionName::SnakeToQuadruped => {
            state = Some(engaged(&a.io.state, "snake-to-quadruped")?);
            transitions::snakes_to_quadruped_script()
        }
        TransitionName::Custom => {
            let p = a.script.as_ref().ok_or_else(|| usage("custom transition needs --script"))?;
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            TransitionScript::from_json(&text).map_err(usage)?
        }
    };
    script.validate(model).map_err(usage)?;
    if let Some(p) = &a.export_script {
        write(p, script.to_json() + "\n")?;
    }
    let (traj, schedule) = script.sample(rate).map_err(usage)?;
    let models = vec![model; script.agents()];
    let has_contacts = schedule.iter().all(|c| !c.is_empty());
    finish(&a.io, &traj, has_contacts.then_some(&schedule[..]), &models)?;
    if let (Some(path), Some(mut s)) = (&a.io.state, state) {
        s.mode = script.target;
        write_state(path, &s)?;
    }
    Ok(())
}

fn run_dock(model: &RobotModel, a: &DockArgs) -> Res<()> {
    positive("rate", a.rate)?;
    let mut state = match &a.state {
        Some(p) if p.exists() => read_state(p)?,
        _ => ScenarioState::default(),
    };
    if a.offset.len() != 3 {
        return Err(usage("--offset takes x,y,z"));
    }
    let rel = RelativePose { translation: [a.offset[0], a.offset[1], a.offset[2]], yaw_deg: a.yaw };
    let limits = DockLimits::default();
    let mut log = Vec::new();
    let mut t = 0.0;
    let result = (|| -> Res<()> {
        state.dock.set_relative(rel).map_err(|e| Failure::Usage(e.to_string()))?;
        log.push(DockEvent::new(t, "align", &rel, "ok"));
        t += 1.0;
        match attempt_dock(&state.dock, &limits) {
            Ok(s) => {
                state.dock = s;
                log.push(DockEvent::new(t, "dock", &s.relative, "engaged"));
            }
            Err(e) => {
                log.push(DockEvent::new(t, "dock", &rel, &format!("error: {e}")));
                return Err(Failure::Validation(e.to_string()));
            }
        }
        if !a.full {
            return Ok(());
        }
        let script = transitions::snakes_to_quadruped_script();
        let (traj, schedule) = script.sample(a.rate).map_err(usage)?;
        let report = validate_trajectory(&[model, model], &traj, &schedule).map_err(usage)?;
        t += script.duration();
        let verdict = match report.min_margin() {
            Some(m) if report.is_stable() => format!("stable, min margin {m:.3} mm"),
            _ => "unstable".to_string(),
        };
        log.push(DockEvent::new(t, "transform", &state.dock.relative, &verdict));
        check(&report)?;
        state.mode = ConfigurationMode::Quadruped;
        t += 1.0;
        state.dock = undock(&state.dock).map_err(usage)?;
        state.mode = ConfigurationMode::Snake;
        log.push(DockEvent::new(t, "undock", &state.dock.relative, "retracted"));
        Ok(())
    })();
    let lines: String = log.iter().map(|e| e.to_json_line() + "\n").collect();
    match &a.log {
        Some(p) => write(p, &lines)?,
        None => print!("{lines}"),
    }
    if let Some(p) = &a.state {
        if result.is_ok() {
            write_state(p, &state)?;
        }
    }
    result
}

fn ids_for(ids: &Option<Vec<u8>>, agents: usize) -> Vec<u8> {
    ids.clone().unwrap_or_else(|| bus::default_ids(agents))
}

fn run_compile(a: &CompileArgs) -> Res<()> {
    let text = fs::read_to_string(&a.input).map_err(|e| usage(format!("{}: {e}", a.input.display())))?;
    let traj = Trajectory::from_csv(&text).map_err(usage)?;
    let bytes = bus::compile_trajectory(&traj, &ids_for(&a.ids, traj.agents())).map_err(usage)?;
    let data = if a.hex { bus::hex_dump(&bytes).expect("compiled stream decodes").into_bytes() } else { bytes };
    match &a.out {
        Some(p) => write(p, data),
        None if a.hex => {
            print!("{}", String::from_utf8(data).expect("hex is ascii"));
            Ok(())
        }
        None => Err(usage("binary output needs -o")),
    }
}

fn run_replay(model: &RobotModel, a: &ReplayArgs) -> Res<()> {
    let rate = positive("rate", a.io.rate)?;
    let raw = fs::read(&a.input).map_err(|e| usage(format!("{}: {e}", a.input.display())))?;
    let bytes = if a.hex { bus::parse_hex(&String::from_utf8_lossy(&raw)).map_err(usage)? } else { raw };
    if a.agents == 0 {
        return Err(usage("agents must be at least 1"));
    }
    let ids = ids_for(&a.ids, a.agents);
    let stream = bus::decompile(&bytes, &ids, rate).map_err(usage)?;
    let torque = match a.torque {
        Torque::Low => TorqueClass::Low,
        Torque::High => TorqueClass::High,
    };
    let tracked = bus::replay(&stream, [torque; LINKS]);
    let schedule: Option<Vec<Vec<Contact>>> = match &a.io.schedule {
        None => None,
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Some(serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?)
        }
    };
    let models = vec![model; a.agents];
    finish_with(&a.io, None, &tracked, schedule.as_deref(), &models)
}

fn info(model: &RobotModel) {
    let fk = forward_kinematics(model, &[0.0; LINKS]);
    println!("mode: {:?}", model.mode);
    println!("link lengths (mm): {:?}", model.lengths());
    println!("theta offsets (deg): {:?}", model.dh.map(|r| r.theta_offset));
    println!("zero-pose reach (mm): {:.3}", fk.end_effector().norm());
    println!("total mass (g): {:.1}", total_mass(model));
    println!("terminal/interior ratio: {:.4}", terminal_ratio(model));
    println!("foot polygon (mm): {:?}", model.foot.polygon);
    println!("joint limits (deg): {:?}", model.joint_limits);
}

fn run(cli: Cli) -> Res<()> {
    let model = load(&cli.config)?;
    match &cli.cmd {
        Cmd::Gait(a) => run_gait(&model, a),
        Cmd::Transition(a) => run_transition(&model, a),
        Cmd::Dock(a) => run_dock(&model, a),
        Cmd::Compile(a) => run_compile(a),
        Cmd::Replay(a) => run_replay(&model, a),
        Cmd::Info => {
            info(&model);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
