// Regenerates the bundled synthetic fixture.
//
// With no argument this only checks that `fixtures/countries.csv` and
// `fixtures/pairs.csv` match the generator. Pass a directory to write the
// files there (`fixtures/` to refresh them).

use std::path::{Path, PathBuf};

use gravity_shock::ingest::{write_countries, write_pairs};
use gravity_shock::synthetic::{generate_fixture, FIXTURE_SEED, FIXTURE_YEARS};
use gravity_shock::{Error, Result};

fn render() -> Result<(Vec<u8>, Vec<u8>)> {
    let (countries, pairs) = generate_fixture(FIXTURE_SEED);
    let (mut c, mut p) = (Vec::new(), Vec::new());
    write_countries(&countries, &FIXTURE_YEARS, &mut c)?;
    write_pairs(&pairs, &FIXTURE_YEARS, &mut p)?;
    Ok((c, p))
}

pub fn write_fixture(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    let (c, p) = render()?;
    for (name, bytes) in [("countries.csv", c), ("pairs.csv", p)] {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Error::Io { path, source: e })?;
    }
    println!("wrote fixture to {}", dir.display());
    Ok(())
}

pub fn run_example() -> Result<()> {
    let dir = gravity_shock::fixture_dir();
    let (c, p) = render()?;
    for (name, bytes) in [("countries.csv", c), ("pairs.csv", p)] {
        let path = dir.join(name);
        let bundled = std::fs::read(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        if bundled != bytes {
            return Err(Error::InvalidInput(format!(
                "{} is stale; rerun with `fixtures` as argument",
                path.display()
            )));
        }
    }
    println!("bundled fixture matches seed {FIXTURE_SEED}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    match std::env::args().nth(1) {
        Some(dir) => write_fixture(&PathBuf::from(dir)),
        None => run_example(),
    }
}
