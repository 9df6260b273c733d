//! Acceptance criteria, one line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the report.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use gravity_shock::estimator::{effect_size, nested_comparison, ols_fit, DesignOptions, ModelSpec};
use gravity_shock::field::{idw_field, CellClass, IdwOptions};
use gravity_shock::geo::EARTH_RADIUS_KM;
use gravity_shock::ingest::build_panel;
use gravity_shock::pipeline::{linspace_step, run_pipeline, RunConfig, Stage};
use gravity_shock::sensitivity::{classify_response, sweep, ResponseShape, SweepParameter, SweepScope};
use gravity_shock::shock::{
    anti_gravity_aggregate, shock_factor, significance_filter, simulate_routes, ClampMode,
};
use gravity_shock::synthetic::{simulate_pairs, standard_countries, Dgp, FIXTURE_SEED};
use gravity_shock::{haversine_km, load_fixture_panel, GeoPoint, GridSpec, ShockParams};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac1_shock_factor() -> Outcome {
    let s = shock_factor(100.0, &ShockParams::new("UKR"));
    check((s - 30.25).abs() < 1e-9, format!("shock_factor(100 km) = {s}"))
}

fn ac2_sensitivity_shapes() -> Outcome {
    let start = Instant::now();
    let panel = load_fixture_panel(&[2019]).map_err(|e| e.to_string())?;
    let literal = ShockParams::new("UKR");
    let run = |base: &ShockParams, p: SweepParameter, values: Vec<f64>, tol: f64| {
        let curve = sweep(&panel, 2019, base, p, &values, SweepScope::AllPairs).map_err(|e| e.to_string())?;
        let class = classify_response(&curve, tol).map_err(|e| e.to_string())?;
        Ok::<_, String>((curve, class))
    };

    let (_, sp) = run(&literal, SweepParameter::Intensity, linspace_step(1.0, 0.5, 9), 1e-6)?;
    let (_, r) = run(&literal, SweepParameter::Radius, linspace_step(100.0, 100.0, 15), 1e-6)?;

    // Epicenter share of the baseline total, straight from the panel.
    let (mut epi, mut total) = (0.0, 0.0);
    for pair in panel.pairs() {
        let (go, gd) = panel.gdps(pair, 2019).ok_or("missing GDP")?;
        let f = go * gd / (pair.dist_km * pair.dist_km);
        total += f;
        if pair.iso3_o == "UKR" || pair.iso3_d == "UKR" {
            epi += f;
        }
    }
    let share = epi / total;
    // Literal mode puts the epicenter's own routes at distance zero, where the
    // shock term dwarfs every other flow; floored forces keep totals comparable.
    let clamped = ShockParams {
        clamp_mode: ClampMode::ClampAtZero,
        ..literal.clone()
    };
    let (mask_curve, mask) = run(&clamped, SweepParameter::MaskReduction, linspace_step(0.0, 0.11, 10), 5e-3)?;
    let t0 = mask_curve.totals[0];
    let max_rel = mask_curve
        .totals
        .iter()
        .map(|t| ((t - t0) / t0).abs())
        .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();

    let ok = sp.shape == ResponseShape::Linear
        && sp.max_abs_second_diff < 1e-9 * sp.range
        && r.shape == ResponseShape::NonlinearAccelerating
        && share < 1e-3
        && max_rel < 5e-3
        && mask.shape == ResponseShape::Insensitive
        && secs < 10.0;
    check(
        ok,
        format!(
            "s_p {} (max|d2|/range {:.1e}); R_km {}; mask_reduction {} (epicenter share {:.3}%, max change {:.3}%, clamp_at_zero); {secs:.2}s",
            sp.shape.as_str(),
            sp.max_abs_second_diff / sp.range,
            r.shape.as_str(),
            mask.shape.as_str(),
            100.0 * share,
            100.0 * max_rel
        ),
    )
}

fn ac3_effect_sizes() -> Outcome {
    let cases = [(0.4031, 0.4965), (-1.4891, -0.7745), (-1.321, -0.733)];
    let worst = cases
        .iter()
        .map(|&(b, e)| (effect_size(b) - e).abs())
        .fold(0.0, f64::max);
    check(
        worst <= 1e-3,
        format!(
            "{:.4}, {:.4}, {:.4}; worst deviation {worst:.1e}",
            effect_size(0.4031),
            effect_size(-1.4891),
            effect_size(-1.321)
        ),
    )
}

fn ac4_ols_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(4);
    let (mut worst_coef, mut worst_recovery, mut worst_orth) = (0.0f64, 0.0f64, 0.0f64);
    let mut identity_exact = true;
    for i in 0..50 {
        let k = 2 + i % 6;
        let x = common::random_design(&mut rng, 200, k);
        let beta = common::random_beta(&mut rng, k);
        let exact = x.mul_vec(&beta);
        let noise: Vec<f64> = (0..200).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = exact.iter().zip(&noise).map(|(a, b)| a + b).collect();

        let fit = ols_fit(&x, &y).map_err(|e| e.to_string())?;
        for (b, o) in fit.betas.iter().zip(common::normal_equations(&x, &y)) {
            worst_coef = worst_coef.max(common::rel_err(*b, o));
        }
        let clean = ols_fit(&x, &exact).map_err(|e| e.to_string())?;
        for (b, t) in clean.betas.iter().zip(&beta) {
            worst_recovery = worst_recovery.max((b - t).abs());
        }
        let fitted = x.mul_vec(&fit.betas);
        let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for j in 0..k {
            let col = x.column(j);
            let dot: f64 = col.iter().zip(&resid).map(|(a, b)| a * b).sum();
            worst_orth = worst_orth.max(dot.abs() / (norm(col) * norm(&y)));
        }
        let (n, kk) = (fit.n as f64, fit.k as f64);
        identity_exact &= fit.adj_r2 == 1.0 - (1.0 - fit.r2) * (n - 1.0) / (n - kk);
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst_coef < 1e-6 && worst_recovery < 1e-8 && worst_orth < 1e-6 && identity_exact && secs < 5.0,
        format!(
            "50 fixtures: coef rel err {worst_coef:.1e}, recovery {worst_recovery:.1e}, orthogonality {worst_orth:.1e}, adj_r2 identity {}; {secs:.2}s",
            if identity_exact { "exact" } else { "broken" }
        ),
    )
}

fn ac5_nested_monotone() -> Outcome {
    let countries = standard_countries(FIXTURE_SEED);
    let chain = ModelSpec::standard_chain();
    let trials = 30;
    let mut monotone = 0;
    for seed in 0..trials {
        let dgp = if seed % 2 == 0 { Dgp::pre_conflict() } else { Dgp::post_conflict() };
        let year = if seed % 2 == 0 { 2019 } else { 2023 };
        let pairs = simulate_pairs(&countries, &[(year, dgp)], "RUS", 1000 + seed);
        let panel = build_panel(countries.clone(), pairs, &[year]).map_err(|e| e.to_string())?;
        let rows = nested_comparison(&panel, year, &chain, &DesignOptions::default()).map_err(|e| e.to_string())?;
        if rows.windows(2).all(|w| w[1].fit.r2 >= w[0].fit.r2 && w[1].fit.n == w[0].fit.n) {
            monotone += 1;
        }
    }
    check(monotone == trials, format!("{monotone}/{trials} fixtures with non-decreasing R²"))
}

fn ac6_geometry() -> Outcome {
    let (kyiv, berlin) = ((50.4501f64, 30.5234f64), (52.5200f64, 13.4050f64));
    let (p1, l1) = (kyiv.0.to_radians(), kyiv.1.to_radians());
    let (p2, l2) = (berlin.0.to_radians(), berlin.1.to_radians());
    let oracle = EARTH_RADIUS_KM * (p1.sin() * p2.sin() + p1.cos() * p2.cos() * (l1 - l2).cos()).acos();
    let d = haversine_km(
        GeoPoint::new(kyiv.0, kyiv.1).map_err(|e| e.to_string())?,
        GeoPoint::new(berlin.0, berlin.1).map_err(|e| e.to_string())?,
    );
    let anti = haversine_km(
        GeoPoint::new(10.0, 20.0).map_err(|e| e.to_string())?,
        GeoPoint::new(-10.0, -160.0).map_err(|e| e.to_string())?,
    );
    let half = std::f64::consts::PI * 6371.0088;
    check(
        (d - oracle).abs() <= 5.0 && (anti - half).abs() <= 0.1,
        format!("Kyiv-Berlin {d:.3} km (oracle {oracle:.3}); antipodal {anti:.4} km"),
    )
}

fn ac7_idw() -> Outcome {
    let panel = load_fixture_panel(&[2019]).map_err(|e| e.to_string())?;
    let countries = panel.countries();
    let mut rng = common::rng(7);
    let values: BTreeMap<String, f64> = countries
        .iter()
        .map(|c| (c.iso3.clone(), rng.random_range(-5.0..5.0)))
        .collect();
    let opts = IdwOptions::default();
    let one_cell = |lat: f64, lng: f64| {
        let spec = GridSpec::bbox(0.5, (lat - 0.25, lat + 0.25), (lng - 0.25, lng + 0.25));
        idw_field(&values, countries, &spec, opts).map(|g| g.cells[0])
    };

    let (mut bounded, mut empty_ok) = (0, 0);
    for _ in 0..1000 {
        let cell = one_cell(rng.random_range(-89.0..89.0), rng.random_range(-179.0..179.0))
            .map_err(|e| e.to_string())?;
        let in_range: Vec<f64> = countries
            .iter()
            .filter(|c| haversine_km(cell.center, c.location) <= 2000.0)
            .map(|c| values[&c.iso3])
            .collect();
        match cell.value {
            None => empty_ok += usize::from(in_range.is_empty() && cell.class == CellClass::Empty),
            Some(v) => {
                let lo = in_range.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = in_range.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                bounded += usize::from(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }
    let mut coincident = 0;
    for c in countries.iter() {
        let cell = one_cell(c.location.lat(), c.location.lng()).map_err(|e| e.to_string())?;
        let want = values[&c.iso3];
        if cell.value.is_some_and(|v| (v - want).abs() <= 1e-6 * want.abs()) {
            coincident += 1;
        }
    }
    check(
        bounded + empty_ok == 1000 && coincident == countries.len(),
        format!(
            "1000 random cells: {bounded} bounded, {empty_ok} empty; {coincident}/{} coincident cells exact",
            countries.len()
        ),
    )
}

fn ac8_determinism() -> Outcome {
    let mut manifests = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut config = RunConfig::load(gravity_shock::fixture_dir().join("run.toml")).map_err(|e| e.to_string())?;
        config.out_dir = dir.path().to_path_buf();
        run_pipeline(&config, &Stage::ALL).map_err(|e| e.to_string())?;
        manifests.push(std::fs::read(dir.path().join("manifest.txt")).map_err(|e| e.to_string())?);
    }
    let lines = String::from_utf8_lossy(&manifests[0]).lines().count();
    check(
        manifests[0] == manifests[1],
        format!("two `all` runs, {lines} manifest entries, byte-identical: {}", manifests[0] == manifests[1]),
    )
}

fn ac9a_closer_routes_lose_more() -> Outcome {
    // Same GDPs and pair distance, origins 1 and 3 degrees from the epicenter.
    let countries = "iso3,name,lat,lng,gdp_2019\nEPI,E,0,0,1\nNEA,N,0,10,1\nMID,M,0,30,1\nDST,D,0,40,1\n";
    let pairs = "iso3_o,iso3_d,dist_km,trade_2019\nNEA,DST,900,1\nMID,DST,900,1\n";
    let panel = common::panel(countries, pairs, &[2019]);
    let routes = simulate_routes(&panel, 2019, &ShockParams::new("EPI")).map_err(|e| e.to_string())?;
    let (near, mid) = (&routes[1], &routes[0]);
    let constructed = near.f_norm == mid.f_norm && near.f_diff / near.f_norm > mid.f_diff / mid.f_norm;

    let fixture = load_fixture_panel(&[2019]).map_err(|e| e.to_string())?;
    let mut all: Vec<_> = simulate_routes(&fixture, 2019, &ShockParams::new("UKR"))
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|r| !r.involves("UKR"))
        .collect();
    all.sort_by(|a, b| a.dist_epicenter_km.total_cmp(&b.dist_epicenter_km));
    let ordered = all.windows(2).all(|w| {
        w[0].dist_epicenter_km == w[1].dist_epicenter_km || w[0].f_diff / w[0].f_norm > w[1].f_diff / w[1].f_norm
    });
    check(
        constructed && ordered,
        format!(
            "equal-force pair loses {:.2}% vs {:.2}%; {} fixture routes strictly ordered by distance: {ordered}",
            -near.pct_change,
            -mid.pct_change,
            all.len()
        ),
    )
}

fn ac9b_sanctions_recovered() -> Outcome {
    let countries = standard_countries(FIXTURE_SEED);
    let mut hits = 0;
    for seed in 0..100 {
        let pairs = simulate_pairs(&countries, &[(2023, Dgp::post_conflict())], "RUS", 5000 + seed);
        let panel = build_panel(countries.clone(), pairs, &[2023]).map_err(|e| e.to_string())?;
        let rows = nested_comparison(&panel, 2023, &[ModelSpec::full()], &DesignOptions::default())
            .map_err(|e| e.to_string())?;
        let fit = &rows[0].fit;
        let j = fit.coefficient("sanctions").ok_or("no sanctions term")?;
        if fit.betas[j] < 0.0 && fit.p_values[j] < 0.05 {
            hits += 1;
        }
    }
    check(hits >= 95, format!("{hits}/100 simulations with a significant negative sanctions effect"))
}

fn ac9c_masked_aggregate_negative() -> Outcome {
    let panel = load_fixture_panel(&[2019]).map_err(|e| e.to_string())?;
    let codes: Vec<String> = panel.countries().iter().map(|c| c.iso3.clone()).collect();
    let mut rng = common::rng(9);
    let trials = 200;
    let mut negative = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let mut p = ShockParams::new(codes[rng.random_range(0..codes.len())].clone());
        p.clamp_mode = ClampMode::ClampAtZero;
        p.intensity = rng.random_range(0.5..5.0);
        p.radius_km = rng.random_range(100.0..1500.0);
        p.mask_reduction = rng.random_range(0.0..0.99);
        let routes = significance_filter(&simulate_routes(&panel, 2019, &p).map_err(|e| e.to_string())?, &p)
            .map_err(|e| e.to_string())?;
        let agg = anti_gravity_aggregate(&routes, &p.epicenter_iso3).map_err(|e| e.to_string())?;
        worst = worst.max(agg.f_target);
        negative += usize::from(agg.f_target < 0.0);
    }
    check(
        negative == trials,
        format!("{negative}/{trials} random shocks (clamp_at_zero) with F_tg < 0; largest {worst:.3e}"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("AC1 shock factor point check", ac1_shock_factor),
        ("AC2 sensitivity shapes", ac2_sensitivity_shapes),
        ("AC3 effect-size anchors", ac3_effect_sizes),
        ("AC4 OLS oracle equivalence", ac4_ols_oracle),
        ("AC5 nested-model monotonicity", ac5_nested_monotone),
        ("AC6 geometry", ac6_geometry),
        ("AC7 IDW properties", ac7_idw),
        ("AC8 determinism", ac8_determinism),
        ("AC9a closer routes lose more", ac9a_closer_routes_lose_more),
        ("AC9b sanctions effect recovered", ac9b_sanctions_recovered),
        ("AC9c masked aggregate negative", ac9c_masked_aggregate_negative),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                println!("[FAIL] {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
