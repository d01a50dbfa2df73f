//! Command-line front end. Every report is JSON on stdout; workspace maps
//! go to a CSV file.
//!
//! Exit codes: 0 success, 1 invalid input or config, 2 singular or
//! infeasible configuration, 3 numerical nonconvergence.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use nalgebra::Vector3;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::CartesianBox;
use crate::kinematics::{forward_kinematics_traced, inverse_kinematics, jacobian_pair};
use crate::kinetostatics::{kinetostatic_report, NEAR_SINGULAR_KAPPA};
use crate::magnitude::Magnitude;
use crate::mechanism::{
    default_orthoglide, leg_frames, BiglideGeometry, JointVector, OrthoglideGeometry, ToolPose,
};
use crate::screw::{couple_space_rank, leg_wrench_system};
use crate::singularity::{
    biglide_report, classify_configuration, constraint_singularity_scan, parallelogram_angles,
    VariantLabel,
};
use crate::statics::{bar_force, bar_stress, static_balance_check, ParallelogramLoad};
use crate::units::{parse_box, parse_point, parse_quantity, Quantity};
use crate::workspace::{sample_box, summarize, write_csv};

/// Environment variable capping the sampler's worker threads.
pub const THREADS_ENV: &str = "ORTHOKIN_THREADS";

/// Tolerance of the isotropy checklist.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "orthokin",
    version,
    about = "Kinetostatic analysis of the Orthoglide parallel machine tool"
)]
struct Cli {
    /// Geometry file (JSON); defaults apply to missing keys or when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Joint coordinates for a tool position `x,y,z`.
    Ik {
        #[arg(allow_hyphen_values = true)]
        point: String,
    },
    /// Tool position for joint coordinates `rho1,rho2,rho3`.
    Fk {
        #[arg(allow_hyphen_values = true)]
        joints: String,
        /// Newton starting point; the isotropic pose when omitted.
        #[arg(long, allow_hyphen_values = true)]
        guess: Option<String>,
    },
    /// Kinetostatic, singularity and statics report at one tool position.
    Analyze {
        #[arg(allow_hyphen_values = true)]
        point: String,
        /// Couple applied to each parallelogram.
        #[arg(long, default_value = "10Nm", allow_hyphen_values = true)]
        torque: String,
    },
    /// Sample a box on a regular grid and write the CSV map.
    Workspace {
        /// `lo:hi` or `xlo:xhi,ylo:yhi,zlo:zhi`.
        #[arg(long = "box", allow_hyphen_values = true)]
        bounds: String,
        /// Samples per axis.
        #[arg(long, default_value_t = 11)]
        n: usize,
        #[arg(long, default_value = "10Nm", allow_hyphen_values = true)]
        torque: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Isotropy and leg-architecture checklist.
    Verify,
    /// Classify the symmetric biglide at strut angle `theta` (degrees).
    Biglide {
        #[arg(allow_hyphen_values = true)]
        theta: String,
        #[arg(long, default_value = "1m")]
        strut: String,
    },
    /// Bar force and stress for couple, bar separation, distortion and section.
    Statics {
        #[arg(allow_hyphen_values = true)]
        couple: String,
        #[arg(allow_hyphen_values = true)]
        width: String,
        #[arg(allow_hyphen_values = true)]
        alpha: String,
        #[arg(allow_hyphen_values = true)]
        section: String,
    },
}

/// Result of one command: exit code plus the JSON printed on stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub payload: Value,
}

impl CommandOutcome {
    fn ok(payload: Value) -> Self {
        Self {
            exit_code: 0,
            payload,
        }
    }

    fn with_code(exit_code: i32, payload: Value) -> Self {
        Self { exit_code, payload }
    }

    fn from_error(err: &Error) -> Self {
        Self {
            exit_code: err.exit_code(),
            payload: json!({ "error": err.to_string() }),
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn vec3(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn load_geometry(config: Option<&PathBuf>) -> Result<OrthoglideGeometry> {
    match config {
        Some(p) => OrthoglideGeometry::load(p),
        None => Ok(default_orthoglide()),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing JSON to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let outcome = execute(&cli);
    if let Some(msg) = outcome.payload.get("error").and_then(Value::as_str) {
        let _ = writeln!(err, "error: {msg}");
    }
    let text = serde_json::to_string_pretty(&outcome.payload).expect("json value serializes");
    let _ = writeln!(out, "{text}");
    outcome.exit_code
}

fn execute(cli: &Cli) -> CommandOutcome {
    if let Command::Statics {
        couple,
        width,
        alpha,
        section,
    } = &cli.command
    {
        return cmd_statics(couple, width, alpha, section)
            .unwrap_or_else(|e| CommandOutcome::from_error(&e));
    }
    if let Command::Biglide { theta, strut } = &cli.command {
        return cmd_biglide(theta, strut).unwrap_or_else(|e| CommandOutcome::from_error(&e));
    }
    let geom = match load_geometry(cli.config.as_ref()) {
        Ok(g) => g,
        Err(e) => return CommandOutcome::from_error(&e),
    };
    let result = match &cli.command {
        Command::Ik { point } => cmd_ik(&geom, point),
        Command::Fk { joints, guess } => cmd_fk(&geom, joints, guess.as_deref()),
        Command::Analyze { point, torque } => cmd_analyze(&geom, point, torque),
        Command::Workspace {
            bounds,
            n,
            torque,
            out,
        } => cmd_workspace(&geom, bounds, *n, torque, out),
        Command::Verify => Ok(cmd_verify(&geom)),
        Command::Statics { .. } | Command::Biglide { .. } => unreachable!("handled above"),
    };
    result.unwrap_or_else(|e| CommandOutcome::from_error(&e))
}

pub fn cmd_ik(geom: &OrthoglideGeometry, point: &str) -> Result<CommandOutcome> {
    let pose = ToolPose::from(parse_point(point)?);
    let joints = inverse_kinematics(geom, &pose)?;
    let residuals: Vec<f64> = (0..3)
        .map(|i| (pose.position - geom.rail_axes[i] * joints.rho[i]).norm() - geom.bar_length)
        .collect();
    let violations = joints.limit_violations(geom);
    Ok(CommandOutcome::ok(json!({
        "rho": vec3(&joints.rho),
        "residuals": residuals,
        "within_limits": violations.is_empty(),
        "limit_violations": violations,
    })))
}

pub fn cmd_fk(
    geom: &OrthoglideGeometry,
    joints: &str,
    guess: Option<&str>,
) -> Result<CommandOutcome> {
    let joints = JointVector::new(parse_point(joints)?);
    let guess = match guess {
        Some(g) => ToolPose::from(parse_point(g)?),
        None => geom.isotropic_pose(),
    };
    let sol = forward_kinematics_traced(geom, &joints, &guess)?;
    Ok(CommandOutcome::ok(json!({
        "position": vec3(&sol.pose.position),
        "iterations": sol.iterations,
    })))
}

pub fn cmd_analyze(geom: &OrthoglideGeometry, point: &str, torque: &str) -> Result<CommandOutcome> {
    let pose = ToolPose::from(parse_point(point)?);
    let couple = parse_quantity(torque, Quantity::Torque)?;
    if couple < 0.0 {
        return Err(Error::InvalidInput(format!(
            "torque must be non-negative, got {couple}"
        )));
    }
    let joints = inverse_kinematics(geom, &pose)?;
    let singularity = classify_configuration(geom, &pose)?;
    let alpha = parallelogram_angles(geom, &pose)?;

    let kin = jacobian_pair(geom, &pose).and_then(|jac| kinetostatic_report(&jac));
    let mut forces = [Magnitude::Infinite; 3];
    let mut stresses = [Magnitude::Infinite; 3];
    for i in 0..3 {
        let load = ParallelogramLoad {
            couple,
            alpha_deg: alpha[i],
            width: geom.parallelogram_width,
            section: geom.bar_section,
        };
        if let Ok(r) = bar_force(&load) {
            forces[i] = Magnitude::Finite(r.bar_force);
            stresses[i] = Magnitude::Finite(r.stress);
        }
    }

    let kappa = singularity.kappa;
    let near_singular = kappa.finite().is_none_or(|k| k > NEAR_SINGULAR_KAPPA);
    let mut payload = json!({
        "position": vec3(&pose.position),
        "rho": vec3(&joints.rho),
        "within_limits": joints.limit_violations(geom).is_empty(),
        "kappa": kappa,
        "near_singular": near_singular,
        "velocity_factors": Value::Null,
        "force_factors": Value::Null,
        "ellipsoid_axes": Value::Null,
        "ellipsoid_lengths": Value::Null,
        "alpha_deg": alpha,
        "bar_force_N": forces,
        "sigma_Pa": stresses,
        "singularity": to_json(&singularity),
    });
    if let Ok(r) = &kin {
        payload["kappa"] = to_json(&r.kappa);
        payload["velocity_factors"] = to_json(&r.velocity_factors);
        payload["force_factors"] = to_json(&r.force_factors);
        payload["ellipsoid_axes"] = json!(r.ellipsoid_axes.iter().map(vec3).collect::<Vec<_>>());
        payload["ellipsoid_lengths"] = to_json(&r.ellipsoid_lengths);
    }
    let singular = kin.is_err()
        || !singularity.serial_legs.is_empty()
        || singularity.parallel_singular
        || !singularity.parallelogram_singular_legs.is_empty()
        || forces.iter().any(Magnitude::is_infinite);
    Ok(CommandOutcome::with_code(
        if singular { 2 } else { 0 },
        payload,
    ))
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidInput(format!(
                "{THREADS_ENV} must be a positive integer, got '{s}'"
            ))),
        },
    }
}

fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let cap = thread_cap()?;
    #[cfg(feature = "parallel")]
    if let Some(n) = cap {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?;
        return Ok(pool.install(f));
    }
    let _ = cap;
    Ok(f())
}

pub fn cmd_workspace(
    geom: &OrthoglideGeometry,
    bounds: &str,
    n: usize,
    torque: &str,
    out: &PathBuf,
) -> Result<CommandOutcome> {
    let (lo, hi) = parse_box(bounds)?;
    let bounds = CartesianBox::new(lo, hi)?;
    let couple = parse_quantity(torque, Quantity::Torque)?;
    let samples = with_thread_cap(|| sample_box(geom, &bounds, n, couple))??;
    let file = std::fs::File::create(out)?;
    write_csv(&samples, std::io::BufWriter::new(file))?;
    let csv = out.display().to_string();
    match summarize(geom, &samples) {
        Ok(summary) => {
            let mut payload = to_json(&summary);
            payload["csv"] = json!(csv);
            Ok(CommandOutcome::ok(payload))
        }
        Err(Error::EmptyWorkspace) => Ok(CommandOutcome::with_code(
            2,
            json!({
                "samples": samples.len(),
                "reachable": 0,
                "reachable_fraction": 0.0,
                "csv": csv,
                "error": Error::EmptyWorkspace.to_string(),
            }),
        )),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name,
        pass,
        detail: detail.into(),
    }
}

/// Isotropy and leg-architecture checklist at the isotropic configuration.
pub fn verify_checks(geom: &OrthoglideGeometry) -> Vec<CheckResult> {
    let pose = geom.isotropic_pose();
    let joints = geom.isotropic_joints();
    let mut checks = Vec::new();

    match jacobian_pair(geom, &pose).and_then(|j| kinetostatic_report(&j)) {
        Ok(r) => {
            let k = r.kappa.as_f64();
            checks.push(check(
                "isotropic_conditioning",
                (k - 1.0).abs() <= VERIFY_TOL,
                format!("kappa = {k}"),
            ));
            let v = r.velocity_factors.map(|m| m.as_f64());
            let unit = v.iter().all(|x| (x - 1.0).abs() <= VERIFY_TOL);
            checks.push(check(
                "unit_amplification",
                unit,
                format!("velocity factors = {v:?}"),
            ));
        }
        Err(e) => {
            checks.push(check("isotropic_conditioning", false, e.to_string()));
            checks.push(check("unit_amplification", false, e.to_string()));
        }
    }

    let frames = match leg_frames(geom, &pose, &joints) {
        Ok(f) => f,
        Err(e) => {
            checks.push(check("leg_frames", false, e.to_string()));
            return checks;
        }
    };
    let max_cross = (0..3)
        .flat_map(|i| ((i + 1)..3).map(move |j| (i, j)))
        .map(|(i, j)| frames[i].bar.dot(&frames[j].bar).abs())
        .fold(0.0, f64::max);
    checks.push(check(
        "bar_orthogonality",
        max_cross <= VERIFY_TOL,
        format!("max |W_i·W_j| = {max_cross:e}"),
    ));
    let min_collinear = frames
        .iter()
        .map(|f| f.bar.dot(&f.rail).abs())
        .fold(f64::INFINITY, f64::min);
    checks.push(check(
        "rail_bar_collinearity",
        (1.0 - min_collinear) <= VERIFY_TOL,
        format!("min |W_i·T_i| = {min_collinear}"),
    ));

    let systems: Result<Vec<_>> = frames.iter().map(leg_wrench_system).collect();
    match systems {
        Ok(s) => {
            let rank = couple_space_rank(&s);
            checks.push(check(
                "couple_space_rank",
                rank == 3,
                format!("rank = {rank}"),
            ));
        }
        Err(e) => checks.push(check("couple_space_rank", false, e.to_string())),
    }

    let half = 0.2 * geom.bar_length;
    let scan = CartesianBox::cube(pose.position, half)
        .and_then(|b| constraint_singularity_scan(geom, &b, 11));
    match scan {
        Ok(s) => checks.push(check(
            "constraint_singularity_scan",
            s.findings.is_empty() && s.samples_scanned > 0,
            format!(
                "{} findings over {} reachable samples",
                s.findings.len(),
                s.samples_scanned
            ),
        )),
        Err(e) => checks.push(check("constraint_singularity_scan", false, e.to_string())),
    }

    match classify_configuration(geom, &pose) {
        Ok(r) => {
            let folded = !r.parallelogram_singular_legs.is_empty()
                || r.has_label(VariantLabel::Antiparallelogram);
            checks.push(check(
                "parallelogram_singularity",
                !folded,
                format!("folded legs {:?}", r.parallelogram_singular_legs),
            ));
            let rpm: Vec<usize> = r
                .variant_findings
                .iter()
                .filter(|f| f.label == VariantLabel::RpmIoIi)
                .map(|f| f.leg)
                .collect();
            checks.push(check(
                "leg_rpm_singularity",
                rpm.is_empty(),
                format!("RPM legs {rpm:?}"),
            ));
        }
        Err(e) => {
            checks.push(check("parallelogram_singularity", false, e.to_string()));
            checks.push(check("leg_rpm_singularity", false, e.to_string()));
        }
    }
    checks
}

pub fn cmd_verify(geom: &OrthoglideGeometry) -> CommandOutcome {
    let checks = verify_checks(geom);
    let all_pass = checks.iter().all(|c| c.pass);
    CommandOutcome::with_code(
        if all_pass { 0 } else { 2 },
        json!({
            "variant": geom.leg_variant.label(),
            "checks": checks,
            "all_pass": all_pass,
        }),
    )
}

pub fn cmd_biglide(theta: &str, strut: &str) -> Result<CommandOutcome> {
    let theta = parse_quantity(theta, Quantity::Angle)?;
    let geom = BiglideGeometry::new(parse_quantity(strut, Quantity::Length)?)?;
    let (class, amp) = biglide_report(&geom, theta)?;
    Ok(CommandOutcome::ok(json!({
        "theta_deg": theta,
        "class": class,
        "vertical_amplification": amp,
    })))
}

pub fn cmd_statics(
    couple: &str,
    width: &str,
    alpha: &str,
    section: &str,
) -> Result<CommandOutcome> {
    let load = ParallelogramLoad {
        couple: parse_quantity(couple, Quantity::Torque)?,
        width: parse_quantity(width, Quantity::Length)?,
        alpha_deg: parse_quantity(alpha, Quantity::Angle)?,
        section: parse_quantity(section, Quantity::Area)?,
    };
    bar_stress(1.0, load.section)?;
    let base = json!({
        "couple_Nm": load.couple,
        "width_m": load.width,
        "alpha_deg": load.alpha_deg,
        "section_m2": load.section,
    });
    match bar_force(&load) {
        Ok(r) => {
            let mut payload = base;
            payload["bar_force_N"] = json!(r.bar_force);
            payload["sigma_Pa"] = json!(r.stress);
            payload["sigma_MPa"] = json!(r.stress / 1e6);
            payload["balanced"] = json!(r.balanced);
            Ok(CommandOutcome::ok(payload))
        }
        Err(e @ Error::ParallelogramSingularity { .. }) => {
            let mut payload = base;
            payload["balanced"] = json!(static_balance_check(load.alpha_deg));
            payload["bar_force_N"] = json!(Magnitude::Infinite);
            payload["error"] = json!(e.to_string());
            Ok(CommandOutcome::with_code(2, payload))
        }
        Err(e) => Err(e),
    }
}
