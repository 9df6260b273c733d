use std::cmp::Ordering;
use std::io::Write;

use crate::error::{Error, Result};
use crate::ingest::{csv_write_error, GravityPanel, Year};

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRecord {
    pub iso3_o: String,
    pub iso3_d: String,
    pub trade_t0: f64,
    pub trade_t1: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    /// Largest positive changes first.
    pub gains: Vec<DeltaRecord>,
    /// Largest negative changes first.
    pub losses: Vec<DeltaRecord>,
    /// Pairs missing either year.
    pub excluded: usize,
    pub compared: usize,
}

fn key_order(a: &DeltaRecord, b: &DeltaRecord) -> Ordering {
    a.iso3_o.cmp(&b.iso3_o).then_with(|| a.iso3_d.cmp(&b.iso3_d))
}

/// Ranks the `top_n` largest gains and losses in trade between two years.
/// Only strictly positive changes are gains and strictly negative ones losses.
pub fn trade_deltas(
    panel: &GravityPanel,
    year_t0: Year,
    year_t1: Year,
    top_n: usize,
) -> Result<DeltaReport> {
    let mut records = Vec::new();
    let mut excluded = 0;
    for pair in panel.pairs() {
        match (pair.trade(year_t0), pair.trade(year_t1)) {
            (Some(t0), Some(t1)) => records.push(DeltaRecord {
                iso3_o: pair.iso3_o.clone(),
                iso3_d: pair.iso3_d.clone(),
                trade_t0: t0,
                trade_t1: t1,
                delta: t1 - t0,
            }),
            _ => excluded += 1,
        }
    }
    if records.is_empty() {
        return Err(Error::EmptySelection(format!(
            "no pair has trade in both {year_t0} and {year_t1}"
        )));
    }
    let compared = records.len();

    let mut gains: Vec<_> = records.iter().filter(|r| r.delta > 0.0).cloned().collect();
    gains.sort_by(|a, b| b.delta.total_cmp(&a.delta).then_with(|| key_order(a, b)));
    gains.truncate(top_n);

    let mut losses: Vec<_> = records.into_iter().filter(|r| r.delta < 0.0).collect();
    losses.sort_by(|a, b| a.delta.total_cmp(&b.delta).then_with(|| key_order(a, b)));
    losses.truncate(top_n);

    Ok(DeltaReport {
        gains,
        losses,
        excluded,
        compared,
    })
}

/// `side,iso3_o,iso3_d,trade_t0,trade_t1,delta`; gains first, then losses.
pub fn write_deltas<W: Write>(report: &DeltaReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["side", "iso3_o", "iso3_d", "trade_t0", "trade_t1", "delta"])
        .map_err(csv_write_error)?;
    let sides = [("gain", &report.gains), ("loss", &report.losses)];
    for (side, list) in sides {
        for r in list {
            w.write_record([
                side.to_string(),
                r.iso3_o.clone(),
                r.iso3_d.clone(),
                crate::fmt_f64(r.trade_t0),
                crate::fmt_f64(r.trade_t1),
                crate::fmt_f64(r.delta),
            ])
            .map_err(csv_write_error)?;
        }
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_panel, parse_countries, parse_pairs};

    fn panel(pairs: &str) -> GravityPanel {
        let countries = "iso3,name,lat,lng,gdp_2019\nAAA,A,0,0,1\nBBB,B,0,1,1\nCCC,C,0,2,1\n";
        build_panel(
            parse_countries(countries.as_bytes(), "c").unwrap(),
            parse_pairs(pairs.as_bytes(), "p").unwrap(),
            &[2019],
        )
        .unwrap()
    }

    #[test]
    fn gain_is_ranked() {
        let p = panel("iso3_o,iso3_d,dist_km,trade_2019,trade_2023\nAAA,BBB,1,10,15\n");
        let r = trade_deltas(&p, 2019, 2023, 10).unwrap();
        assert_eq!(r.gains.len(), 1);
        assert_eq!(r.gains[0].delta, 5.0);
        assert!(r.losses.is_empty());
    }

    #[test]
    fn unchanged_pair_is_in_neither_list() {
        let p = panel(
            "iso3_o,iso3_d,dist_km,trade_2019,trade_2023\n\
             AAA,BBB,1,10,10\nAAA,CCC,1,10,20\nBBB,AAA,1,10,5\nCCC,AAA,1,10,\n",
        );
        let r = trade_deltas(&p, 2019, 2023, 1).unwrap();
        assert_eq!(r.gains.len(), 1);
        assert_eq!(r.gains[0].iso3_d, "CCC");
        assert_eq!(r.losses.len(), 1);
        assert_eq!(r.losses[0].iso3_o, "BBB");
        assert_eq!(r.excluded, 1);
        assert_eq!(r.compared, 3);
    }

    #[test]
    fn ties_break_by_codes() {
        let p = panel(
            "iso3_o,iso3_d,dist_km,trade_2019,trade_2023\n\
             BBB,CCC,1,0,7\nAAA,CCC,1,0,7\nAAA,BBB,1,1,8\n",
        );
        let r = trade_deltas(&p, 2019, 2023, 10).unwrap();
        let keys: Vec<_> = r.gains.iter().map(|d| (d.iso3_o.as_str(), d.iso3_d.as_str())).collect();
        assert_eq!(keys, vec![("AAA", "BBB"), ("AAA", "CCC"), ("BBB", "CCC")]);
    }

    #[test]
    fn no_comparable_pairs() {
        let p = panel("iso3_o,iso3_d,dist_km,trade_2019,trade_2023\nAAA,BBB,1,10,\n");
        assert!(trade_deltas(&p, 2019, 2023, 10).is_err());
    }
}
