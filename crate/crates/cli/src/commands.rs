//! The four subcommands: simulate, compare, sweep, limit.

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use hbac_core::{
    compare_protocols, hbac_limit, iterate, iterate_noisy, Epsilon, Error as CoreError, NoiseSpec,
    Polarization, PopulationVector, ProtocolKind, ProtocolSpec, RegisterLayout, Trajectory,
};

use crate::config::{ResetValue, RunConfig};
use crate::output::{csv_value, format_significant, manifest_path_for, write_csv, write_manifest};
use crate::sweep::run_sweep;

/// Failures, partitioned by exit code: config errors exit 2, non-convergence
/// exits 3 (with the CSV already on disk), I/O failures exit 1.
#[derive(Debug)]
pub enum CommandError {
    Config(String),
    NonConvergence(String),
    Io(io::Error),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::NonConvergence(_) => 3,
            CommandError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Config(msg) => write!(f, "config error: {msg}"),
            CommandError::NonConvergence(msg) => write!(f, "did not converge: {msg}"),
            CommandError::Io(err) => write!(f, "i/o error: {err}"),
        }
    }
}

impl From<io::Error> for CommandError {
    fn from(err: io::Error) -> Self {
        CommandError::Io(err)
    }
}

impl From<CoreError> for CommandError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::NonConvergence { ref trajectory } => CommandError::NonConvergence(format!(
                "{} iterations, last polarization {}",
                trajectory.iterations_run(),
                trajectory.final_polarization().value()
            )),
            other => CommandError::Config(other.to_string()),
        }
    }
}

/// What a data-producing command wrote.
#[derive(Debug)]
pub struct RunOutcome {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub data_rows: usize,
    pub summary: String,
}

fn reset_polarization(value: ResetValue) -> Result<Polarization, CommandError> {
    let p = match value {
        ResetValue::Polarization(p) => p,
        ResetValue::Epsilon(eps) => Epsilon::new(eps)?.polarization().value(),
    };
    Ok(Polarization::new(p)?)
}

fn reset_epsilon(value: ResetValue) -> Result<Epsilon, CommandError> {
    match value {
        ResetValue::Polarization(p) => Ok(Polarization::new(p)?.epsilon()?),
        ResetValue::Epsilon(eps) => Ok(Epsilon::new(eps)?),
    }
}

/// Mixed target polarized as configured, everything else maximally mixed.
fn initial_state(config: &RunConfig, layout: &RegisterLayout) -> Result<PopulationVector, CommandError> {
    let target = Polarization::new(config.initial_p_target)?;
    let parts: Vec<PopulationVector> = (0..layout.num_qubits())
        .map(|q| {
            if q == layout.target_index() {
                PopulationVector::polarized_qubit(target)
            } else {
                PopulationVector::uniform(RegisterLayout::single_qubit())
            }
        })
        .collect();
    Ok(PopulationVector::tensor(&parts, layout.clone())?)
}

/// Builds the protocol spec for the given reset biases (in reset-spin order).
fn protocol_spec(config: &RunConfig, eps: &[Epsilon]) -> Result<ProtocolSpec, CommandError> {
    let spec = match config.protocol {
        ProtocolKind::FixedCircuit => ProtocolSpec::fixed_circuit(eps[0], eps[1]),
        ProtocolKind::PpaTwoReset => ProtocolSpec::ppa_two_reset(eps[0], eps[1]),
        // the reset spin sits at the least significant qubit, where the
        // sort/reset cycle keeps pumping
        ProtocolKind::PpaSingleReset => ProtocolSpec::ppa_single_reset(2, eps[0])?,
    };
    Ok(spec
        .with_max_iterations(config.iterations)
        .with_convergence_tol(config.tol))
}

fn noise_spec(values: crate::config::NoiseValues) -> Result<NoiseSpec, CommandError> {
    Ok(NoiseSpec::new(values.gamma, values.gate_fidelity, values.reset_efficiency)?)
}

fn run_trajectory(
    config: &RunConfig,
    spec: &ProtocolSpec,
) -> Result<Trajectory, CommandError> {
    let initial = initial_state(config, spec.layout())?;
    let trajectory = match config.noise {
        Some(values) => iterate_noisy(spec, &noise_spec(values)?, &initial)?,
        None => iterate(spec, &initial)?,
    };
    Ok(trajectory)
}

fn protocol_name(kind: ProtocolKind) -> &'static str {
    match kind {
        ProtocolKind::FixedCircuit => "fixed-circuit",
        ProtocolKind::PpaTwoReset => "ppa-two-reset",
        ProtocolKind::PpaSingleReset => "ppa-single-reset",
    }
}

/// Shared manifest head: tool version, command, timing, and the resolved
/// configuration with every polarization echoed in both P and eps form.
fn manifest_entries(
    command: &str,
    config: &RunConfig,
    started: Instant,
) -> Result<Vec<(String, String)>, CommandError> {
    let mut entries = vec![
        ("manifest.tool".to_string(), "hbac".to_string()),
        ("manifest.version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("manifest.command".to_string(), command.to_string()),
        (
            "manifest.generated_unix_ms".to_string(),
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis().to_string())
                .unwrap_or_else(|_| "0".to_string()),
        ),
        (
            "manifest.wall_time_ms".to_string(),
            format!("{:.3}", started.elapsed().as_secs_f64() * 1e3),
        ),
        ("config.protocol.kind".to_string(), protocol_name(config.protocol).to_string()),
        ("config.initial.p_target".to_string(), csv_value(config.initial_p_target)),
        ("config.run.iterations".to_string(), config.iterations.to_string()),
        ("config.run.tol".to_string(), format!("{:e}", config.tol)),
    ];
    if let Some(label) = &config.label {
        entries.push(("config.run.label".to_string(), label.clone()));
    }
    if let Some(noise) = &config.noise {
        entries.push(("config.noise.gamma".to_string(), csv_value(noise.gamma)));
        entries.push(("config.noise.gate_fidelity".to_string(), csv_value(noise.gate_fidelity)));
        entries.push((
            "config.noise.reset_efficiency".to_string(),
            csv_value(noise.reset_efficiency),
        ));
    }
    for (spin, value) in [(1, config.reset1), (2, config.reset2)] {
        if let Some(value) = value {
            let p = reset_polarization(value)?;
            let eps = reset_epsilon(value)?;
            entries.push((format!("resolved.reset{spin}.p"), csv_value(p.value())));
            entries.push((format!("resolved.reset{spin}.eps"), csv_value(eps.value())));
        }
    }
    if let Some(plan) = &config.sweep {
        let names: Vec<&str> = plan.axes.iter().map(|(a, _)| a.key()).collect();
        entries.push(("config.sweep.axes".to_string(), names.join(", ")));
        for (axis, range) in &plan.axes {
            let key = axis.key();
            entries.push((format!("config.sweep.{key}.min"), csv_value(range.min)));
            entries.push((format!("config.sweep.{key}.max"), csv_value(range.max)));
            entries.push((format!("config.sweep.{key}.step"), csv_value(range.step)));
        }
    }
    Ok(entries)
}

/// Runs one protocol and writes its trajectory:
/// `iteration,p_target,p_limit,converged_flag`. A run that hits the
/// iteration cap still writes the full CSV, then reports non-convergence.
pub fn cmd_simulate(config: &RunConfig, out: &Path) -> Result<RunOutcome, CommandError> {
    let started = Instant::now();
    if config.sweep.is_some() {
        return Err(CommandError::Config(
            "config has a sweep block; use `hbac sweep` for it".into(),
        ));
    }
    let mut eps = vec![reset_epsilon(config.reset1.expect("validated"))?];
    if let Some(second) = config.reset2 {
        eps.push(reset_epsilon(second)?);
    }
    let spec = protocol_spec(config, &eps)?;
    let limit = spec.cooling_limit()?;
    let trajectory = run_trajectory(config, &spec)?;

    let limit_text = csv_value(limit.p_max().value());
    let last = trajectory.records().len() - 1;
    let rows: Vec<Vec<String>> = trajectory
        .records()
        .iter()
        .enumerate()
        .map(|(i, record)| {
            let flag = if i == last && trajectory.converged() { "1" } else { "0" };
            vec![
                record.iteration.to_string(),
                csv_value(record.polarization.value()),
                limit_text.clone(),
                flag.to_string(),
            ]
        })
        .collect();
    write_csv(out, &["iteration", "p_target", "p_limit", "converged_flag"], &rows)?;

    let mut entries = manifest_entries("simulate", config, started)?;
    entries.push(("resolved.limit.p_max".to_string(), csv_value(limit.p_max().value())));
    entries.push(("resolved.limit.eps_max".to_string(), csv_value(limit.eps_max().value())));
    entries.push(("result.converged".to_string(), trajectory.converged().to_string()));
    entries.push(("result.iterations".to_string(), trajectory.iterations_run().to_string()));
    entries.push((
        "result.final_polarization".to_string(),
        csv_value(trajectory.final_polarization().value()),
    ));
    let manifest_path = manifest_path_for(out);
    write_manifest(&manifest_path, &entries)?;

    if !trajectory.converged() {
        return Err(CommandError::NonConvergence(format!(
            "|dP| stayed above {:e} for {} iterations; partial CSV written to {}",
            config.tol,
            trajectory.iterations_run(),
            out.display()
        )));
    }
    Ok(RunOutcome {
        csv_path: out.to_path_buf(),
        manifest_path,
        data_rows: rows.len(),
        summary: format!(
            "converged to {} after {} iterations (limit {})",
            format_significant(trajectory.final_polarization().value(), 12),
            trajectory.iterations_run(),
            format_significant(limit.p_max().value(), 12),
        ),
    })
}

/// Runs all three protocols side by side from maximally mixed targets:
/// `iteration,fixed_circuit,ppa_two_reset,ppa_single_reset,hbac_limit`.
pub fn cmd_compare(config: &RunConfig, out: &Path) -> Result<RunOutcome, CommandError> {
    let started = Instant::now();
    if config.sweep.is_some() {
        return Err(CommandError::Config(
            "config has a sweep block; use `hbac sweep` for it".into(),
        ));
    }
    if config.noise.is_some() {
        return Err(CommandError::Config(
            "the comparison is noiseless; remove the noise block".into(),
        ));
    }
    let (Some(first), Some(second)) = (config.reset1, config.reset2) else {
        return Err(CommandError::Config(
            "the comparison needs both reset spins (`reset.p1`/`reset.p2`)".into(),
        ));
    };
    let p1 = reset_polarization(first)?;
    let p2 = reset_polarization(second)?;
    let comparison = compare_protocols(p1, p2, config.iterations)?;

    let limit_text = csv_value(comparison.two_reset_limit.p_max().value());
    let rows: Vec<Vec<String>> = (0..=comparison.iterations)
        .map(|k| {
            vec![
                k.to_string(),
                csv_value(comparison.fixed_circuit[k]),
                csv_value(comparison.ppa_two_reset[k]),
                csv_value(comparison.ppa_single_reset[k]),
                limit_text.clone(),
            ]
        })
        .collect();
    write_csv(
        out,
        &["iteration", "fixed_circuit", "ppa_two_reset", "ppa_single_reset", "hbac_limit"],
        &rows,
    )?;

    let mut entries = manifest_entries("compare", config, started)?;
    entries.push((
        "resolved.limit.two_reset.p_max".to_string(),
        csv_value(comparison.two_reset_limit.p_max().value()),
    ));
    entries.push((
        "resolved.limit.two_reset.eps_max".to_string(),
        csv_value(comparison.two_reset_limit.eps_max().value()),
    ));
    entries.push((
        "resolved.limit.single_reset.p_max".to_string(),
        csv_value(comparison.single_reset_limit.p_max().value()),
    ));
    entries.push((
        "resolved.limit.single_reset.eps_max".to_string(),
        csv_value(comparison.single_reset_limit.eps_max().value()),
    ));
    let manifest_path = manifest_path_for(out);
    write_manifest(&manifest_path, &entries)?;

    Ok(RunOutcome {
        csv_path: out.to_path_buf(),
        manifest_path,
        data_rows: rows.len(),
        summary: format!(
            "{} iterations of three protocols; two-reset limit {}",
            comparison.iterations,
            format_significant(comparison.two_reset_limit.p_max().value(), 12),
        ),
    })
}

/// Scans the grid in row-major order over the declared axes and writes one
/// row per point: `P_C1,P_C2,p_final,p_limit`. Points that fail to converge
/// within the iteration cap report their last value; their count lands in
/// the manifest.
pub fn cmd_sweep(config: &RunConfig, out: &Path) -> Result<RunOutcome, CommandError> {
    let started = Instant::now();
    let result = run_sweep(config)?;

    let rows: Vec<Vec<String>> = result
        .records
        .iter()
        .map(|record| {
            vec![
                csv_value(record.p1),
                record.p2.map(csv_value).unwrap_or_default(),
                csv_value(record.p_final),
                csv_value(record.p_limit),
            ]
        })
        .collect();
    write_csv(out, &["P_C1", "P_C2", "p_final", "p_limit"], &rows)?;

    let unconverged = result.unconverged_points();
    let mut entries = manifest_entries("sweep", config, started)?;
    entries.push(("result.grid_points".to_string(), result.grid_points().to_string()));
    entries.push(("result.unconverged_points".to_string(), unconverged.to_string()));
    let manifest_path = manifest_path_for(out);
    write_manifest(&manifest_path, &entries)?;

    Ok(RunOutcome {
        csv_path: out.to_path_buf(),
        manifest_path,
        data_rows: rows.len(),
        summary: format!("{} grid points ({unconverged} unconverged)", result.grid_points()),
    })
}

/// Prints the cooling bound for `n` computation qubits and the given reset
/// polarizations, both as a bias and as a polarization, to 12 significant
/// digits.
pub fn cmd_limit(n: usize, polarizations: &[f64]) -> Result<String, CommandError> {
    let eps: Vec<Epsilon> = polarizations
        .iter()
        .map(|&p| Ok(Polarization::new(p)?.epsilon()?))
        .collect::<Result<_, CommandError>>()?;
    let limit = hbac_limit(n, &eps)?;
    Ok(format!(
        "eps_max = {}\np_max = {}\n",
        format_significant(limit.eps_max().value(), 12),
        format_significant(limit.p_max().value(), 12),
    ))
}
