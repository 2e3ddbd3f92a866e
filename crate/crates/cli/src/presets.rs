//! Bundled run configurations. Presets are stored in the same flat
//! key-value format as user config files and go through the same parser.

/// Name/body pairs, in the order `--help` style listings should show them.
pub const PRESETS: &[(&str, &str)] = &[
    (
        "fig2-top",
        "# equal reset polarizations, iterated 25 times\n\
         protocol.kind = fixed-circuit\n\
         reset.p1 = 0.2\n\
         reset.p2 = 0.2\n\
         run.iterations = 25\n\
         run.tol = 1e-8\n",
    ),
    (
        "fig2-bottom-caption",
        "# unequal reset polarizations (0.2, 0.3)\n\
         protocol.kind = fixed-circuit\n\
         reset.p1 = 0.2\n\
         reset.p2 = 0.3\n\
         run.iterations = 50\n\
         run.tol = 1e-9\n",
    ),
    (
        "fig2-bottom-body",
        "# unequal reset polarizations (0.1, 0.3)\n\
         protocol.kind = fixed-circuit\n\
         reset.p1 = 0.1\n\
         reset.p2 = 0.3\n\
         run.iterations = 50\n\
         run.tol = 1e-9\n",
    ),
    (
        "fig3a-like",
        "# saturation visibly below the ideal limit; illustrative noise\n\
         # parameters, not fitted to anything\n\
         protocol.kind = fixed-circuit\n\
         reset.p1 = 0.2\n\
         reset.p2 = 0.2\n\
         run.iterations = 100\n\
         run.tol = 1e-9\n\
         noise.gamma = 0.05\n\
         noise.gate_fidelity = 0.98\n\
         noise.reset_efficiency = 0.97\n",
    ),
    (
        "fig3d-grid",
        "# asymptotic polarization over the reset-polarization plane\n\
         protocol.kind = fixed-circuit\n\
         run.iterations = 100\n\
         run.tol = 1e-9\n\
         sweep.axes = p_c1, p_c2\n\
         sweep.p_c1.min = 0\n\
         sweep.p_c1.max = 0.95\n\
         sweep.p_c1.step = 0.05\n\
         sweep.p_c2.min = 0\n\
         sweep.p_c2.max = 0.95\n\
         sweep.p_c2.step = 0.05\n",
    ),
];

pub fn preset_body(name: &str) -> Option<&'static str> {
    PRESETS
        .iter()
        .find(|(preset_name, _)| *preset_name == name)
        .map(|(_, body)| *body)
}

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}
