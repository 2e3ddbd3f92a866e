//! The cooling protocols: a fixed three-spin compression circuit, the
//! partner-pairing algorithm with two-spin and single-spin reset, the
//! analytic cooling limits, and the iteration driver.

use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::noise::{apply_noise, NoiseSpec};
use crate::permutation::Permutation;
use crate::polarization::{Epsilon, Polarization};
use crate::population::PopulationVector;

pub const DEFAULT_MAX_ITERATIONS: usize = 100;
pub const DEFAULT_CONVERGENCE_TOL: f64 = 1e-9;
/// Tolerance used when a converged asymptotic value is requested.
pub const ASYMPTOTE_TOL: f64 = 1e-12;

/// Which compression is applied each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProtocolKind {
    /// The fixed transposition exchanging `|100>` and `|011>` on a three-spin
    /// register with two reset spins.
    FixedCircuit,
    /// Partner-pairing compression (sort the populations in decreasing
    /// order), both reset spins re-thermalized.
    PpaTwoReset,
    /// Partner-pairing compression with a single reset spin; the remaining
    /// spin becomes a second computation qubit.
    PpaSingleReset,
}

/// A fully specified cooling run: protocol, register, reset biases, and the
/// iteration/convergence policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    kind: ProtocolKind,
    layout: RegisterLayout,
    reset_eps: Vec<Epsilon>,
    max_iterations: usize,
    convergence_tol: f64,
    compression_first: bool,
}

impl ProtocolSpec {
    /// `reset_eps` aligns with `layout.reset_indices()`.
    pub fn new(kind: ProtocolKind, layout: RegisterLayout, reset_eps: Vec<Epsilon>) -> Result<Self> {
        if reset_eps.len() != layout.reset_indices().len() {
            return Err(Error::InvalidArgument(format!(
                "{} reset biases for {} reset qubits",
                reset_eps.len(),
                layout.reset_indices().len()
            )));
        }
        match kind {
            ProtocolKind::FixedCircuit => {
                let mut resets = layout.reset_indices().to_vec();
                resets.sort_unstable();
                if layout.num_qubits() != 3 || layout.target_index() != 0 || resets != [1, 2] {
                    return Err(Error::InvalidArgument(
                        "fixed-circuit protocol needs a 3-qubit register with target 0 \
                         and reset qubits {1, 2}"
                            .into(),
                    ));
                }
            }
            ProtocolKind::PpaTwoReset => {
                if layout.reset_indices().len() != 2 {
                    return Err(Error::InvalidArgument(
                        "two-reset PPA needs exactly two reset qubits".into(),
                    ));
                }
            }
            ProtocolKind::PpaSingleReset => {
                if layout.reset_indices().len() != 1 {
                    return Err(Error::InvalidArgument(
                        "single-reset PPA resets exactly one qubit".into(),
                    ));
                }
            }
        }
        if layout.computation_count() == 0 {
            return Err(Error::InvalidArgument("no computation qubit to cool".into()));
        }
        Ok(ProtocolSpec {
            kind,
            layout,
            reset_eps,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            convergence_tol: DEFAULT_CONVERGENCE_TOL,
            compression_first: false,
        })
    }

    /// The fixed circuit on the standard three-spin register.
    pub fn fixed_circuit(eps1: Epsilon, eps2: Epsilon) -> Self {
        ProtocolSpec::new(
            ProtocolKind::FixedCircuit,
            RegisterLayout::three_spin(),
            vec![eps1, eps2],
        )
        .expect("three-spin layout is valid for the fixed circuit")
    }

    /// Two-reset PPA on the standard three-spin register.
    pub fn ppa_two_reset(eps1: Epsilon, eps2: Epsilon) -> Self {
        ProtocolSpec::new(
            ProtocolKind::PpaTwoReset,
            RegisterLayout::three_spin(),
            vec![eps1, eps2],
        )
        .expect("three-spin layout is valid for two-reset PPA")
    }

    /// Single-reset PPA on a three-spin register; `reset_qubit` must be 1
    /// or 2, and the other spin becomes a second computation qubit.
    ///
    /// The position matters: with the reset spin at the least significant
    /// bit (qubit 2) the sort/reset cycle keeps pumping the target towards
    /// the two-computation-qubit bound, while a reset spin in the middle of
    /// the index leaves sorted states invariant and the run parks at the
    /// reset polarization itself.
    pub fn ppa_single_reset(reset_qubit: usize, eps: Epsilon) -> Result<Self> {
        if reset_qubit == 0 {
            return Err(Error::InvalidArgument("qubit 0 is the target, not a reset spin".into()));
        }
        let layout = RegisterLayout::new(3, 0, vec![reset_qubit])?;
        ProtocolSpec::new(ProtocolKind::PpaSingleReset, layout, vec![eps])
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_convergence_tol(mut self, tol: f64) -> Self {
        self.convergence_tol = tol;
        self
    }

    /// Run compression before the reset within each iteration instead of the
    /// default reset-then-compress order. The asymptote is unchanged; only
    /// the transient shifts.
    pub fn with_compression_first(mut self, compression_first: bool) -> Self {
        self.compression_first = compression_first;
        self
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn reset_eps(&self) -> &[Epsilon] {
        &self.reset_eps
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn convergence_tol(&self) -> f64 {
        self.convergence_tol
    }

    pub fn compression_first(&self) -> bool {
        self.compression_first
    }

    /// Reset qubits paired with their biases.
    pub fn resets(&self) -> Vec<(usize, Epsilon)> {
        self.layout
            .reset_indices()
            .iter()
            .copied()
            .zip(self.reset_eps.iter().copied())
            .collect()
    }

    /// The cooling bound applicable to this spec's register.
    pub fn cooling_limit(&self) -> Result<CoolingLimit> {
        hbac_limit(self.layout.computation_count(), &self.reset_eps)
    }
}

/// One recorded iteration: the polarization of the target spin and the full
/// population snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub polarization: Polarization,
    pub state: PopulationVector,
}

/// Per-iteration record of a cooling run. Index 0 is the initial state, so
/// there are `iterations_run + 1` records.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    records: Vec<TrajectoryPoint>,
    converged: bool,
    iterations_run: usize,
    final_polarization: Polarization,
}

impl Trajectory {
    pub fn records(&self) -> &[TrajectoryPoint] {
        &self.records
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations_run(&self) -> usize {
        self.iterations_run
    }

    pub fn final_polarization(&self) -> Polarization {
        self.final_polarization
    }

    /// The polarization column, one value per record.
    pub fn polarizations(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.polarization.value()).collect()
    }
}

/// The analytic cooling bound: the largest bias the target can reach given
/// the register shape and the reset biases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoolingLimit {
    eps_max: Epsilon,
    p_max: Polarization,
    n_computation: usize,
}

impl CoolingLimit {
    pub fn eps_max(&self) -> Epsilon {
        self.eps_max
    }

    pub fn p_max(&self) -> Polarization {
        self.p_max
    }

    pub fn n_computation(&self) -> usize {
        self.n_computation
    }
}

/// Cooling bound for `n` computation qubits refreshed by reset spins of the
/// given biases: `eps_max = 2^(n-1) * sum(eps)`, reached at polarization
/// `tanh(eps_max)`.
pub fn hbac_limit(n_computation: usize, eps_list: &[Epsilon]) -> Result<CoolingLimit> {
    if n_computation < 1 {
        return Err(Error::InvalidArgument("need at least one computation qubit".into()));
    }
    if eps_list.is_empty() {
        return Err(Error::InvalidArgument("need at least one reset bias".into()));
    }
    let sum: f64 = eps_list.iter().map(|e| e.value()).sum();
    let eps_max = Epsilon::new(2f64.powi(n_computation as i32 - 1) * sum)?;
    Ok(CoolingLimit {
        eps_max,
        p_max: eps_max.polarization(),
        n_computation,
    })
}

/// The compression gate of the fixed circuit: the transposition exchanging
/// basis states `|100>` (index 4) and `|011>` (index 3). The target spin is
/// flipped exactly when the other two spins agree with each other and
/// disagree with it.
pub fn u_e_permutation(layout: &RegisterLayout) -> Result<Permutation> {
    if layout.num_qubits() != 3 || layout.target_index() != 0 {
        return Err(Error::InvalidArgument(
            "compression gate is defined on a 3-qubit register with target 0".into(),
        ));
    }
    Permutation::transposition(8, 3, 4)
}

/// The partner-pairing compression for the current state: the permutation
/// that rearranges populations in non-increasing order by basis index. Ties
/// keep their relative order, so an already-sorted state maps to the
/// identity.
pub fn ppa_sort_permutation(state: &PopulationVector) -> Permutation {
    let probs = state.probabilities();
    let mut order: Vec<usize> = (0..probs.len()).collect();
    // stable sort: equal populations keep ascending index order
    order.sort_by(|&a, &b| probs[b].partial_cmp(&probs[a]).expect("populations are finite"));
    let mut map = vec![0; probs.len()];
    for (rank, &source) in order.iter().enumerate() {
        map[source] = rank;
    }
    Permutation::new(map).expect("rank assignment is a bijection")
}

/// Closed-form polarization update of one fixed-circuit iteration
/// (reset both spins, apply the compression gate):
///
/// `P' = P + [(1-P)(1+P1)(1+P2) - (1+P)(1-P1)(1-P2)] / 4`
///
/// Equivalently `P' = (P1+P2)/2 + P (1 - P1 P2)/2`: an affine contraction
/// with fixed point `tanh(eps1 + eps2)`.
pub fn fixed_circuit_map(p: Polarization, p1: Polarization, p2: Polarization) -> Polarization {
    let (p, p1, p2) = (p.value(), p1.value(), p2.value());
    let gain = (1.0 - p) * (1.0 + p1) * (1.0 + p2);
    let loss = (1.0 + p) * (1.0 - p1) * (1.0 - p2);
    Polarization::from_computed(p + (gain - loss) / 4.0)
}

/// Repeats the protocol's iteration (reset the reset spins, then compress)
/// until the per-iteration change of the target polarization drops below the
/// spec's tolerance or the iteration cap is hit. Records every iteration.
pub fn iterate(spec: &ProtocolSpec, initial: &PopulationVector) -> Result<Trajectory> {
    run_protocol(spec, initial, None)
}

/// The asymptotic target polarization: closed form `tanh(eps1 + eps2)` for
/// the fixed circuit, and the converged iteration value (tolerance
/// [`ASYMPTOTE_TOL`], maximally mixed start) for the PPA variants.
///
/// Single-reset PPA pumps in a two-iteration cycle and its target marginal
/// sits still on alternate iterations, so convergence here means two
/// consecutive sub-tolerance steps, not one.
pub fn asymptote(spec: &ProtocolSpec) -> Result<Polarization> {
    match spec.kind {
        ProtocolKind::FixedCircuit => {
            let sum = spec.reset_eps.iter().map(|e| e.value()).sum::<f64>();
            Ok(Epsilon::new(sum)?.polarization())
        }
        ProtocolKind::PpaTwoReset | ProtocolKind::PpaSingleReset => {
            converged_polarization(spec, None)
        }
    }
}

/// Runs to stationarity (two consecutive target-polarization steps below
/// [`ASYMPTOTE_TOL`]) and returns the settled value.
pub(crate) fn converged_polarization(
    spec: &ProtocolSpec,
    noise: Option<&NoiseSpec>,
) -> Result<Polarization> {
    let initial = PopulationVector::uniform(spec.layout.clone());
    let trajectory = run_with_stop(
        spec,
        &initial,
        noise,
        StopRule::ConsecutiveDeltas { tol: ASYMPTOTE_TOL, window: 2 },
    )?;
    if !trajectory.converged() {
        return Err(Error::NonConvergence { trajectory: Box::new(trajectory) });
    }
    Ok(trajectory.final_polarization())
}

/// Aligned per-iteration polarization columns for the three protocols, run
/// from maximally mixed starts, plus the applicable cooling bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolComparison {
    pub iterations: usize,
    /// `iterations + 1` values each, index 0 being the initial state.
    pub fixed_circuit: Vec<f64>,
    pub ppa_two_reset: Vec<f64>,
    pub ppa_single_reset: Vec<f64>,
    /// Bound for one computation qubit refreshed by both reset spins; the
    /// reference line for the fixed-circuit and two-reset columns.
    pub two_reset_limit: CoolingLimit,
    /// Bound for the single-reset run (two computation qubits).
    pub single_reset_limit: CoolingLimit,
}

/// Runs the fixed circuit, two-reset PPA, and single-reset PPA for exactly
/// `iterations` iterations each. The single-reset run keeps the higher of
/// the two biases for its reset spin, placed at the least significant qubit
/// so the sort keeps pumping; the other spin becomes a second computation
/// qubit.
pub fn compare_protocols(
    p1: Polarization,
    p2: Polarization,
    iterations: usize,
) -> Result<ProtocolComparison> {
    if iterations < 1 {
        return Err(Error::InvalidArgument("comparison needs at least one iteration".into()));
    }
    let eps1 = p1.epsilon()?;
    let eps2 = p2.epsilon()?;
    let single_eps = if eps1.value() >= eps2.value() { eps1 } else { eps2 };

    let run = |spec: ProtocolSpec| -> Result<Vec<f64>> {
        // tolerance 0 never triggers, so every column has the same length
        let spec = spec.with_max_iterations(iterations).with_convergence_tol(0.0);
        let initial = PopulationVector::uniform(spec.layout().clone());
        Ok(iterate(&spec, &initial)?.polarizations())
    };

    Ok(ProtocolComparison {
        iterations,
        fixed_circuit: run(ProtocolSpec::fixed_circuit(eps1, eps2))?,
        ppa_two_reset: run(ProtocolSpec::ppa_two_reset(eps1, eps2))?,
        ppa_single_reset: run(ProtocolSpec::ppa_single_reset(2, single_eps)?)?,
        two_reset_limit: hbac_limit(1, &[eps1, eps2])?,
        single_reset_limit: hbac_limit(2, &[single_eps])?,
    })
}

/// Polarization left on a spin of polarization `base_p` after rotating it by
/// `theta` and letting it dephase completely: `base_p * cos(theta)`.
pub fn polarization_from_rotation(theta: f64, base_p: Polarization) -> Result<Polarization> {
    if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "rotation angle {theta} outside [0, pi]"
        )));
    }
    Ok(Polarization::from_computed(base_p.value() * theta.cos()))
}

/// When an iteration run stops early.
#[derive(Debug, Clone, Copy)]
pub(crate) enum StopRule {
    /// One target-polarization step below `tol` (the trajectory criterion).
    SingleDelta { tol: f64 },
    /// `window` consecutive steps below `tol` (the stationarity criterion;
    /// robust against protocols that pump in multi-iteration cycles).
    ConsecutiveDeltas { tol: f64, window: usize },
}

/// Shared iteration driver. `noise` hooks in the imperfection model; `None`
/// is the ideal protocol.
pub(crate) fn run_protocol(
    spec: &ProtocolSpec,
    initial: &PopulationVector,
    noise: Option<&NoiseSpec>,
) -> Result<Trajectory> {
    run_with_stop(spec, initial, noise, StopRule::SingleDelta { tol: spec.convergence_tol })
}

pub(crate) fn run_with_stop(
    spec: &ProtocolSpec,
    initial: &PopulationVector,
    noise: Option<&NoiseSpec>,
    stop: StopRule,
) -> Result<Trajectory> {
    if initial.layout() != &spec.layout {
        return Err(Error::InvalidArgument(
            "initial state does not match the protocol's register layout".into(),
        ));
    }
    let target = spec.layout.target_index();
    let resets = effective_resets(spec, noise)?;
    let fixed_perm = match spec.kind {
        ProtocolKind::FixedCircuit => Some(u_e_permutation(&spec.layout)?),
        _ => None,
    };

    let mut state = initial.clone();
    let mut previous = state.marginal_polarization(target)?;
    let mut records = vec![TrajectoryPoint {
        iteration: 0,
        polarization: previous,
        state: state.clone(),
    }];
    let mut converged = false;
    let mut iterations_run = 0;
    let mut quiet_steps = 0usize;

    for iteration in 1..=spec.max_iterations {
        state = if spec.compression_first {
            let compressed = compress(spec, &state, fixed_perm.as_ref(), noise)?;
            compressed.reset_channel(&resets)?
        } else {
            let refreshed = state.reset_channel(&resets)?;
            compress(spec, &refreshed, fixed_perm.as_ref(), noise)?
        };
        let polarization = state.marginal_polarization(target)?;
        records.push(TrajectoryPoint { iteration, polarization, state: state.clone() });
        iterations_run = iteration;
        let delta = (polarization.value() - previous.value()).abs();
        match stop {
            StopRule::SingleDelta { tol } => {
                if delta < tol {
                    converged = true;
                }
            }
            StopRule::ConsecutiveDeltas { tol, window } => {
                quiet_steps = if delta < tol { quiet_steps + 1 } else { 0 };
                if quiet_steps >= window {
                    converged = true;
                }
            }
        }
        if converged {
            break;
        }
        previous = polarization;
    }

    let final_polarization = records.last().expect("at least the initial record").polarization;
    Ok(Trajectory { records, converged, iterations_run, final_polarization })
}

/// Reset list with the noise model's reset efficiency folded in: an
/// efficiency `eta` scales each achieved reset polarization to
/// `eta * tanh(eps)`.
fn effective_resets(spec: &ProtocolSpec, noise: Option<&NoiseSpec>) -> Result<Vec<(usize, Epsilon)>> {
    let mut resets = spec.resets();
    if let Some(noise) = noise {
        let eta = noise.reset_efficiency();
        if eta < 1.0 {
            for (_, eps) in &mut resets {
                let scaled = Polarization::from_computed(eta * eps.polarization().value());
                *eps = scaled.epsilon()?;
            }
        }
    }
    Ok(resets)
}

/// One compression step: the protocol's permutation, degraded by the noise
/// model's gate fidelity (a convex mix of the permuted and unpermuted
/// states) and followed by target depolarization.
fn compress(
    spec: &ProtocolSpec,
    state: &PopulationVector,
    fixed_perm: Option<&Permutation>,
    noise: Option<&NoiseSpec>,
) -> Result<PopulationVector> {
    let sort_perm;
    let perm = match spec.kind {
        ProtocolKind::FixedCircuit => fixed_perm.expect("precomputed for the fixed circuit"),
        ProtocolKind::PpaTwoReset | ProtocolKind::PpaSingleReset => {
            sort_perm = ppa_sort_permutation(state);
            &sort_perm
        }
    };
    let permuted = state.apply_permutation(perm)?;
    let compressed = match noise {
        Some(noise) if noise.gate_fidelity() < 1.0 => {
            let f = noise.gate_fidelity();
            let probs = permuted
                .probabilities()
                .iter()
                .zip(state.probabilities())
                .map(|(&after, &before)| f * after + (1.0 - f) * before)
                .collect();
            PopulationVector::from_computed(spec.layout.clone(), probs)
        }
        _ => permuted,
    };
    match noise {
        Some(noise) => Ok(apply_noise(&compressed, noise)),
        None => Ok(compressed),
    }
}
