// One-at-a-time sweeps of intensity, radius and mask reduction.

use gravity_shock::pipeline::linspace_step;
use gravity_shock::sensitivity::{classify_response, sweep, SweepParameter, SweepScope};
use gravity_shock::shock::ClampMode;
use gravity_shock::{load_fixture_panel, Result, ShockParams};

pub fn run_example() -> Result<()> {
    let panel = load_fixture_panel(&[2019])?;
    let literal = ShockParams::new("UKR");
    let clamped = ShockParams {
        clamp_mode: ClampMode::ClampAtZero,
        ..literal.clone()
    };
    let runs = [
        (&literal, SweepParameter::Intensity, linspace_step(1.0, 0.5, 9), 1e-6),
        (&literal, SweepParameter::Radius, linspace_step(100.0, 100.0, 15), 1e-6),
        (&clamped, SweepParameter::MaskReduction, linspace_step(0.0, 0.11, 10), 5e-3),
    ];
    for (base, parameter, values, tol) in runs {
        let curve = sweep(&panel, 2019, base, parameter, &values, SweepScope::AllPairs)?;
        let class = classify_response(&curve, tol)?;
        println!(
            "{:<15} {:<22} ({} mode) range/|mean| = {:.3e}",
            parameter.key(),
            class.shape.as_str(),
            base.clamp_mode.as_str(),
            class.range / class.mean.abs()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
