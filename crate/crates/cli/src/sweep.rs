//! Sweep execution: runs the configured protocol over a parameter grid and
//! collects one record per point, in deterministic row-major order.

use hbac_core::{
    iterate, iterate_noisy, polarization_from_rotation, Epsilon, NoiseSpec, Polarization,
    PopulationVector, ProtocolKind, ProtocolSpec, RegisterLayout,
};

use crate::commands::CommandError;
use crate::config::{AxisRange, ResetValue, RunConfig, SweepAxis};

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    /// Resolved polarization of reset spin 1.
    pub p1: f64,
    /// Resolved polarization of reset spin 2 (absent for single-reset runs).
    pub p2: Option<f64>,
    /// Target polarization when the run stopped.
    pub p_final: f64,
    /// Cooling bound at this point.
    pub p_limit: f64,
    /// Iterations actually run.
    pub iterations: usize,
    pub converged: bool,
}

/// The evaluated grid. Records are row-major over the declared axes, so
/// their count is the product of the per-axis counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<(SweepAxis, AxisRange)>,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn grid_points(&self) -> usize {
        self.axes.iter().map(|(_, r)| r.count()).product()
    }

    pub fn unconverged_points(&self) -> usize {
        self.records.iter().filter(|r| !r.converged).count()
    }
}

struct GridPoint {
    p1: Polarization,
    p2: Option<Polarization>,
    gamma: Option<f64>,
}

fn reset_polarization(value: ResetValue) -> Result<Polarization, CommandError> {
    let p = match value {
        ResetValue::Polarization(p) => p,
        ResetValue::Epsilon(eps) => Epsilon::new(eps)?.polarization().value(),
    };
    Ok(Polarization::new(p)?)
}

fn resolve_point(config: &RunConfig, values: &[(SweepAxis, f64)]) -> Result<GridPoint, CommandError> {
    let axis = |wanted: SweepAxis| values.iter().find(|(a, _)| *a == wanted).map(|&(_, v)| v);

    let spin = |fixed: Option<ResetValue>,
                p_axis: Option<f64>,
                theta_axis: Option<f64>,
                base: f64|
     -> Result<Option<Polarization>, CommandError> {
        if let Some(p) = p_axis {
            return Ok(Some(Polarization::new(p)?));
        }
        if let Some(theta) = theta_axis {
            let base = Polarization::new(base)?;
            return Ok(Some(polarization_from_rotation(theta, base)?));
        }
        fixed.map(reset_polarization).transpose()
    };

    let p1 = spin(
        config.reset1,
        axis(SweepAxis::PC1),
        axis(SweepAxis::Theta1),
        config.rotation_base_p1,
    )?
    .ok_or_else(|| CommandError::Config("reset spin 1 has no source".into()))?;
    let p2 = spin(
        config.reset2,
        axis(SweepAxis::PC2),
        axis(SweepAxis::Theta2),
        config.rotation_base_p2,
    )?;

    let gamma = axis(SweepAxis::Gamma).or(config.noise.map(|n| n.gamma));
    Ok(GridPoint { p1, p2, gamma })
}

fn protocol_spec(config: &RunConfig, eps: &[Epsilon]) -> Result<ProtocolSpec, CommandError> {
    let spec = match config.protocol {
        ProtocolKind::FixedCircuit => ProtocolSpec::fixed_circuit(eps[0], eps[1]),
        ProtocolKind::PpaTwoReset => ProtocolSpec::ppa_two_reset(eps[0], eps[1]),
        ProtocolKind::PpaSingleReset => ProtocolSpec::ppa_single_reset(2, eps[0])?,
    };
    Ok(spec
        .with_max_iterations(config.iterations)
        .with_convergence_tol(config.tol))
}

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

/// Evaluates every grid point of the config's sweep plan. Points that hit
/// the iteration cap are recorded as unconverged rather than aborting the
/// scan.
pub fn run_sweep(config: &RunConfig) -> Result<SweepResult, CommandError> {
    let Some(plan) = &config.sweep else {
        return Err(CommandError::Config("config has no sweep block".into()));
    };

    let counts: Vec<usize> = plan.axes.iter().map(|(_, r)| r.count()).collect();
    let total: usize = counts.iter().product();
    let mut records = Vec::with_capacity(total);
    let mut indices = vec![0usize; plan.axes.len()];

    for _ in 0..total {
        let values: Vec<(SweepAxis, f64)> = plan
            .axes
            .iter()
            .zip(&indices)
            .map(|(&(axis, range), &i)| (axis, range.value(i)))
            .collect();
        let point = resolve_point(config, &values)?;

        let mut eps = vec![point.p1.epsilon()?];
        if let Some(p2) = point.p2 {
            eps.push(p2.epsilon()?);
        }
        let spec = protocol_spec(config, &eps)?;
        let limit = spec.cooling_limit()?;
        let initial = initial_state(config, spec.layout())?;
        let trajectory = match point.gamma {
            Some(gamma) => {
                let (fidelity, efficiency) = config
                    .noise
                    .map(|n| (n.gate_fidelity, n.reset_efficiency))
                    .unwrap_or((1.0, 1.0));
                iterate_noisy(&spec, &NoiseSpec::new(gamma, fidelity, efficiency)?, &initial)?
            }
            None => iterate(&spec, &initial)?,
        };

        records.push(SweepRecord {
            p1: point.p1.value(),
            p2: point.p2.map(|p| p.value()),
            p_final: trajectory.final_polarization().value(),
            p_limit: limit.p_max().value(),
            iterations: trajectory.iterations_run(),
            converged: trajectory.converged(),
        });

        // row-major: last axis fastest
        for d in (0..indices.len()).rev() {
            indices[d] += 1;
            if indices[d] < counts[d] {
                break;
            }
            indices[d] = 0;
        }
    }

    Ok(SweepResult { axes: plan.axes.clone(), records })
}
