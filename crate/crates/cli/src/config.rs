//! Run configuration: a flat key-value file format, one dotted key per line.
//!
//! ```text
//! # lines starting with '#' are comments
//! protocol.kind = fixed-circuit
//! reset.p1 = 0.2
//! reset.p2 = 0.2
//! run.iterations = 25
//! run.tol = 1e-8
//! ```
//!
//! Reset keys number the reset *spins* in layout order (`reset.p1` is the
//! first reset spin), each given either as a polarization (`reset.pN`) or as
//! a thermal bias (`reset.epsN`), never both. Sweep axes replace the fixed
//! value of whatever they scan.

use std::collections::BTreeMap;
use std::path::PathBuf;

use hbac_core::ProtocolKind;

use crate::commands::CommandError;

/// Fixed setting for one reset spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetValue {
    Polarization(f64),
    Epsilon(f64),
}

/// Noise block; `gamma` may be replaced by a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseValues {
    pub gamma: f64,
    pub gate_fidelity: f64,
    pub reset_efficiency: f64,
}

/// A quantity the sweep command can scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Polarization of reset spin 1.
    PC1,
    /// Polarization of reset spin 2.
    PC2,
    /// Rotation angle preparing reset spin 1.
    Theta1,
    /// Rotation angle preparing reset spin 2.
    Theta2,
    /// Per-iteration target depolarization.
    Gamma,
}

impl SweepAxis {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "p_c1" => Some(SweepAxis::PC1),
            "p_c2" => Some(SweepAxis::PC2),
            "theta1" => Some(SweepAxis::Theta1),
            "theta2" => Some(SweepAxis::Theta2),
            "gamma" => Some(SweepAxis::Gamma),
            _ => None,
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            SweepAxis::PC1 => "p_c1",
            SweepAxis::PC2 => "p_c2",
            SweepAxis::Theta1 => "theta1",
            SweepAxis::Theta2 => "theta2",
            SweepAxis::Gamma => "gamma",
        }
    }
}

/// Inclusive range scanned in `step` increments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl AxisRange {
    /// Number of grid values, robust against `max` landing a rounding error
    /// short of the last step.
    pub fn count(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    /// The `i`-th grid value, computed directly from `min` so rows do not
    /// accumulate rounding drift.
    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    /// Axes in declaration order; the grid is row-major over this order.
    pub axes: Vec<(SweepAxis, AxisRange)>,
}

impl SweepPlan {
    pub fn grid_points(&self) -> usize {
        self.axes.iter().map(|(_, r)| r.count()).product()
    }
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub protocol: ProtocolKind,
    pub reset1: Option<ResetValue>,
    pub reset2: Option<ResetValue>,
    pub initial_p_target: f64,
    pub iterations: usize,
    pub tol: f64,
    pub label: Option<String>,
    pub noise: Option<NoiseValues>,
    pub rotation_base_p1: f64,
    pub rotation_base_p2: f64,
    pub sweep: Option<SweepPlan>,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    /// Number of reset spins the protocol uses.
    pub fn reset_spin_count(&self) -> usize {
        match self.protocol {
            ProtocolKind::FixedCircuit | ProtocolKind::PpaTwoReset => 2,
            ProtocolKind::PpaSingleReset => 1,
        }
    }

    pub fn has_axis(&self, axis: SweepAxis) -> bool {
        self.sweep
            .as_ref()
            .is_some_and(|plan| plan.axes.iter().any(|(a, _)| *a == axis))
    }
}

fn config_error(message: impl Into<String>) -> CommandError {
    CommandError::Config(message.into())
}

/// Parses the raw `key = value` lines, rejecting duplicates and anything
/// that is not a key-value pair or a comment.
fn parse_lines(text: &str) -> Result<BTreeMap<String, String>, CommandError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(config_error(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(config_error(format!("line {}: empty key or value", lineno + 1)));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(config_error(format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

struct KeyReader {
    map: BTreeMap<String, String>,
    used: Vec<String>,
}

impl KeyReader {
    fn take(&mut self, key: &str) -> Option<String> {
        self.used.push(key.to_string());
        self.map.remove(key)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, CommandError> {
        match self.take(key) {
            None => Ok(None),
            Some(text) => text
                .parse::<f64>()
                .map(Some)
                .map_err(|_| config_error(format!("`{key}` is not a number: `{text}`"))),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, CommandError> {
        match self.take(key) {
            None => Ok(None),
            Some(text) => text
                .parse::<usize>()
                .map(Some)
                .map_err(|_| config_error(format!("`{key}` is not a count: `{text}`"))),
        }
    }
}

/// Parses and validates a configuration file body.
pub fn parse_config(text: &str) -> Result<RunConfig, CommandError> {
    let mut reader = KeyReader { map: parse_lines(text)?, used: Vec::new() };

    let protocol = match reader.take("protocol.kind") {
        None => return Err(config_error("missing `protocol.kind`")),
        Some(kind) => match kind.as_str() {
            "fixed-circuit" => ProtocolKind::FixedCircuit,
            "ppa-two-reset" => ProtocolKind::PpaTwoReset,
            "ppa-single-reset" => ProtocolKind::PpaSingleReset,
            other => {
                return Err(config_error(format!(
                    "unknown protocol.kind `{other}` (expected fixed-circuit, \
                     ppa-two-reset, or ppa-single-reset)"
                )))
            }
        },
    };

    let reset1 = take_reset(&mut reader, 1)?;
    let reset2 = take_reset(&mut reader, 2)?;
    let initial_p_target = reader.take_f64("initial.p_target")?.unwrap_or(0.0);
    if !(-1.0..=1.0).contains(&initial_p_target) {
        return Err(config_error("`initial.p_target` must lie in [-1, 1]"));
    }
    let iterations = reader.take_usize("run.iterations")?.unwrap_or(100);
    if iterations == 0 {
        return Err(config_error("`run.iterations` must be at least 1"));
    }
    let tol = reader.take_f64("run.tol")?.unwrap_or(1e-9);
    if !tol.is_finite() || tol < 0.0 {
        return Err(config_error("`run.tol` must be a nonnegative number"));
    }
    let label = reader.take("run.label");

    let gamma = reader.take_f64("noise.gamma")?;
    let gate_fidelity = reader.take_f64("noise.gate_fidelity")?;
    let reset_efficiency = reader.take_f64("noise.reset_efficiency")?;
    let noise = if gamma.is_some() || gate_fidelity.is_some() || reset_efficiency.is_some() {
        let values = NoiseValues {
            gamma: gamma.unwrap_or(0.0),
            gate_fidelity: gate_fidelity.unwrap_or(1.0),
            reset_efficiency: reset_efficiency.unwrap_or(1.0),
        };
        for (name, v) in [
            ("noise.gamma", values.gamma),
            ("noise.gate_fidelity", values.gate_fidelity),
            ("noise.reset_efficiency", values.reset_efficiency),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(config_error(format!("`{name}` must lie in [0, 1]")));
            }
        }
        Some(values)
    } else {
        None
    };

    let rotation_base_p1 = reader.take_f64("rotation.base_p1")?.unwrap_or(1.0);
    let rotation_base_p2 = reader.take_f64("rotation.base_p2")?.unwrap_or(1.0);
    for (name, v) in [
        ("rotation.base_p1", rotation_base_p1),
        ("rotation.base_p2", rotation_base_p2),
    ] {
        if !(-1.0..=1.0).contains(&v) {
            return Err(config_error(format!("`{name}` must lie in [-1, 1]")));
        }
    }

    let sweep = take_sweep(&mut reader)?;
    let output_path = reader.take("output.path").map(PathBuf::from);

    if let Some(stray) = reader.map.keys().next() {
        return Err(config_error(format!("unknown key `{stray}`")));
    }

    let config = RunConfig {
        protocol,
        reset1,
        reset2,
        initial_p_target,
        iterations,
        tol,
        label,
        noise,
        rotation_base_p1,
        rotation_base_p2,
        sweep,
        output_path,
    };
    validate(&config)?;
    Ok(config)
}

fn take_reset(reader: &mut KeyReader, spin: usize) -> Result<Option<ResetValue>, CommandError> {
    let p = reader.take_f64(&format!("reset.p{spin}"))?;
    let eps = reader.take_f64(&format!("reset.eps{spin}"))?;
    match (p, eps) {
        (Some(_), Some(_)) => Err(config_error(format!(
            "`reset.p{spin}` and `reset.eps{spin}` are mutually exclusive"
        ))),
        (Some(p), None) => {
            if p.abs() >= 1.0 {
                return Err(config_error(format!(
                    "`reset.p{spin}` must lie strictly inside (-1, 1)"
                )));
            }
            Ok(Some(ResetValue::Polarization(p)))
        }
        (None, Some(eps)) => {
            if !eps.is_finite() {
                return Err(config_error(format!("`reset.eps{spin}` must be finite")));
            }
            Ok(Some(ResetValue::Epsilon(eps)))
        }
        (None, None) => Ok(None),
    }
}

fn take_sweep(reader: &mut KeyReader) -> Result<Option<SweepPlan>, CommandError> {
    let Some(axes_text) = reader.take("sweep.axes") else {
        // reject orphaned range keys
        if let Some(stray) = reader.map.keys().find(|k| k.starts_with("sweep.")) {
            return Err(config_error(format!("`{stray}` given without `sweep.axes`")));
        }
        return Ok(None);
    };
    let mut axes = Vec::new();
    for name in axes_text.split(',') {
        let name = name.trim();
        let Some(axis) = SweepAxis::parse(name) else {
            return Err(config_error(format!(
                "unknown sweep axis `{name}` (expected p_c1, p_c2, theta1, theta2, or gamma)"
            )));
        };
        if axes.iter().any(|(a, _)| *a == axis) {
            return Err(config_error(format!("sweep axis `{name}` listed twice")));
        }
        let range = take_range(reader, axis)?;
        axes.push((axis, range));
    }
    if axes.is_empty() {
        return Err(config_error("`sweep.axes` lists no axes"));
    }
    Ok(Some(SweepPlan { axes }))
}

fn take_range(reader: &mut KeyReader, axis: SweepAxis) -> Result<AxisRange, CommandError> {
    let key = axis.key();
    let read = |reader: &mut KeyReader, part: &str| -> Result<f64, CommandError> {
        reader
            .take_f64(&format!("sweep.{key}.{part}"))?
            .ok_or_else(|| config_error(format!("missing `sweep.{key}.{part}`")))
    };
    let min = read(reader, "min")?;
    let max = read(reader, "max")?;
    let step = read(reader, "step")?;
    if !min.is_finite() || !max.is_finite() || !step.is_finite() || step <= 0.0 || max < min {
        return Err(config_error(format!(
            "invalid range for sweep axis `{key}`: min {min}, max {max}, step {step}"
        )));
    }
    let bounds_ok = match axis {
        SweepAxis::PC1 | SweepAxis::PC2 => min > -1.0 && max < 1.0,
        SweepAxis::Theta1 | SweepAxis::Theta2 => min >= 0.0 && max <= std::f64::consts::PI,
        SweepAxis::Gamma => min >= 0.0 && max <= 1.0,
    };
    if !bounds_ok {
        return Err(config_error(format!("range for sweep axis `{key}` out of bounds")));
    }
    Ok(AxisRange { min, max, step })
}

fn validate(config: &RunConfig) -> Result<(), CommandError> {
    let spins = config.reset_spin_count();
    if spins == 1 {
        if config.reset2.is_some() {
            return Err(config_error(
                "ppa-single-reset has one reset spin; `reset.p2`/`reset.eps2` not allowed",
            ));
        }
        if config.has_axis(SweepAxis::PC2) || config.has_axis(SweepAxis::Theta2) {
            return Err(config_error(
                "ppa-single-reset has one reset spin; axes p_c2/theta2 not allowed",
            ));
        }
    }

    // every reset spin needs exactly one source: a fixed value or an axis
    for spin in 1..=spins {
        let fixed = if spin == 1 { config.reset1 } else { config.reset2 };
        let (p_axis, theta_axis) = if spin == 1 {
            (SweepAxis::PC1, SweepAxis::Theta1)
        } else {
            (SweepAxis::PC2, SweepAxis::Theta2)
        };
        let sources = fixed.is_some() as usize
            + config.has_axis(p_axis) as usize
            + config.has_axis(theta_axis) as usize;
        match sources {
            0 => {
                return Err(config_error(format!(
                    "reset spin {spin} needs `reset.p{spin}`, `reset.eps{spin}`, or a sweep axis"
                )))
            }
            1 => {}
            _ => {
                return Err(config_error(format!(
                    "reset spin {spin} has more than one source (fixed value and/or \
                     multiple axes)"
                )))
            }
        }
    }

    if config.has_axis(SweepAxis::Gamma) {
        if let Some(noise) = &config.noise {
            if noise.gamma != 0.0 {
                return Err(config_error(
                    "`noise.gamma` conflicts with the gamma sweep axis",
                ));
            }
        }
    }

    if let Some(plan) = &config.sweep {
        if plan.grid_points() > 1_000_000 {
            return Err(config_error(format!(
                "sweep grid has {} points, above the 1000000-point cap",
                plan.grid_points()
            )));
        }
    }

    Ok(())
}
