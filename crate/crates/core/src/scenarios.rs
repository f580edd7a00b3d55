//! The canonical experiments, shipped as config files under `configs/`.

use crate::config::{parse_config, AbsorberParams, Dispersion, PotentialKind, Scenario};
use crate::Result;

pub const FIG1_INI: &str = include_str!("../configs/fig1_wavefront.ini");
pub const FIG2_INI: &str = include_str!("../configs/fig2_barrier.ini");
pub const FIG4_INI: &str = include_str!("../configs/fig4_oscillating.ini");
pub const CLOSED_BOX_INI: &str = include_str!("../configs/closed_box.ini");

/// Time standing in for "t = ∞" in the relaxed snapshots.
pub const RELAXED_TIME: f64 = 20.0;
/// Snapshot times of the wavefront figure.
pub const FIG1_SNAPSHOT_TIMES: [f64; 4] = [0.0, 2.5, 5.0, RELAXED_TIME];
/// Default sweep grid `0.6:0.2:3.2`.
pub const SWEEP_K_FROM: f64 = 0.6;
pub const SWEEP_K_TO: f64 = 3.2;
pub const SWEEP_K_STEP: f64 = 0.2;

/// Hard-source injection of `k = 2.4` with a Gaussian front, free propagation.
pub fn wavefront() -> Result<Scenario> {
    parse_config(FIG1_INI)
}

/// Transparent-source scattering off `SquareBarrier(5, −1, 1)`.
pub fn square_barrier() -> Result<Scenario> {
    parse_config(FIG2_INI)
}

/// Same geometry with the barrier height modulated at `ν = 1`, `α = 1/2`.
pub fn oscillating_barrier() -> Result<Scenario> {
    parse_config(FIG4_INI)
}

/// Gaussian packet `σ = 1, k0 = 1` in the box `[−20, 20]`.
pub fn closed_box() -> Result<Scenario> {
    parse_config(CLOSED_BOX_INI)
}

/// Base scenario of the transmission sweep (the barrier scenario; `k` is overridden).
pub fn sweep_base() -> Result<Scenario> {
    square_barrier()
}

/// Free transparent-source run for checking that nothing leaks left of the source.
///
/// The incident frequency is lattice matched so the injected wave solves the
/// discrete equations exactly. The right absorber is long and weak (its own
/// reflection is ~2e-7), and the initial front only rolls off deep inside it, where
/// the slow components created by the roll-off are damped before they can travel.
pub fn source_shielding() -> Result<Scenario> {
    let mut s = square_barrier()?;
    s.potential.kind = PotentialKind::Zero;
    s.grid.x_max = 150.0;
    s.time.steps = 10_000;
    s.mode.x_g = 100.0;
    s.mode.l_g = 5.0;
    s.mode.dispersion = Dispersion::Lattice;
    s.absorber_right = Some(AbsorberParams { c: 5e-5, x_i: 20.0 });
    s.output.probes = vec![-20.0, 10.0];
    s.output.snapshot_stride = 1000;
    s.output.dir = "out/shielding".into();
    s.check()?;
    Ok(s)
}

/// Looks up a scenario by name: `wavefront`, `barrier`, `oscillating`, `closed_box`,
/// `shielding`.
pub fn by_name(name: &str) -> Option<Result<Scenario>> {
    Some(match name {
        "wavefront" => wavefront(),
        "barrier" => square_barrier(),
        "oscillating" => oscillating_barrier(),
        "closed_box" => closed_box(),
        "shielding" => source_shielding(),
        _ => return None,
    })
}
