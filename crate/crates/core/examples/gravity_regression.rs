// Nested log-linear gravity regressions on the 2023 fixture.

use gravity_shock::estimator::{effect_size, nested_comparison, DesignOptions, ModelSpec};
use gravity_shock::{load_fixture_panel, Result};

pub fn run_example() -> Result<()> {
    let panel = load_fixture_panel(&[2023])?;
    let chain = nested_comparison(&panel, 2023, &ModelSpec::standard_chain(), &DesignOptions::default())?;
    for (i, row) in chain.iter().enumerate() {
        println!(
            "model {}: k={} n={} r2={:.4} adj_r2={:.4}",
            i + 1,
            row.fit.k,
            row.fit.n,
            row.fit.r2,
            row.fit.adj_r2
        );
    }
    let fit = &chain.last().expect("four models").fit;
    for (j, term) in fit.terms.iter().enumerate() {
        println!(
            "  {term:<18} {:>9.4} (se {:.4}, p {:.2e}) effect {:+.1}%",
            fit.betas[j],
            fit.standard_errors[j],
            fit.p_values[j],
            100.0 * effect_size(fit.betas[j])
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
