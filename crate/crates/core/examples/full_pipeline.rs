// Every stage from `fixtures/run.toml`, written to a temporary directory.

use gravity_shock::pipeline::{run_pipeline, RunConfig, Stage};
use gravity_shock::{fixture_dir, Error, Result};

pub fn run_example() -> Result<()> {
    let mut config = RunConfig::load(fixture_dir().join("run.toml"))?;
    let dir = tempfile::tempdir().map_err(|e| Error::Io { path: "<tempdir>".into(), source: e })?;
    config.out_dir = dir.path().to_path_buf();

    let report = run_pipeline(&config, &Stage::ALL)?;
    for (name, digest) in &report.files {
        println!("{}  {name}", &digest[..16]);
    }
    if let Some(agg) = report.aggregate {
        println!("F_target = {:.4e}", agg.f_target);
    }
    for (key, shape) in &report.sweep_shapes {
        println!("sweep {key}: {}", shape.as_str());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
