//! Country and bilateral-pair tables, and the joined analysis panel.
//!
//! Both tables are UTF-8 CSV with a header row:
//!
//! ```text
//! countries.csv: iso3,name,lat,lng,gdp_<year>...,eu_member,sanctioning,energy_exporter
//! pairs.csv:     iso3_o,iso3_d,dist_km,trade_<year>...
//! ```
//!
//! An empty cell means "not observed". Flags are `0`/`1` and default to
//! false when the column is absent.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geo::GeoPoint;

pub type Year = i32;

#[derive(Debug, Clone, PartialEq)]
pub struct CountryRecord {
    pub iso3: String,
    pub name: String,
    pub location: GeoPoint,
    pub gdp_by_year: BTreeMap<Year, f64>,
    pub eu_member: bool,
    pub sanctioning: bool,
    pub energy_exporter: bool,
}

impl CountryRecord {
    pub fn gdp(&self, year: Year) -> Option<f64> {
        self.gdp_by_year.get(&year).copied()
    }
}

/// Countries keyed by ISO3 code, kept in code order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountryTable {
    records: Vec<CountryRecord>,
}

impl CountryTable {
    /// Builds a table, rejecting duplicate codes.
    pub fn new(mut records: Vec<CountryRecord>) -> Result<Self> {
        records.sort_by(|a, b| a.iso3.cmp(&b.iso3));
        if let Some(w) = records.windows(2).find(|w| w[0].iso3 == w[1].iso3) {
            return Err(Error::DuplicateKey {
                file: "<country table>".into(),
                line: 0,
                key: w[0].iso3.clone(),
            });
        }
        Ok(Self { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CountryRecord> {
        self.records.iter()
    }

    pub fn index_of(&self, iso3: &str) -> Option<usize> {
        self.records
            .binary_search_by(|r| r.iso3.as_str().cmp(iso3))
            .ok()
    }

    pub fn get(&self, iso3: &str) -> Option<&CountryRecord> {
        self.index_of(iso3).map(|i| &self.records[i])
    }

    pub fn by_index(&self, idx: usize) -> &CountryRecord {
        &self.records[idx]
    }

    /// Every year for which at least one GDP value is present.
    pub fn years(&self) -> BTreeSet<Year> {
        self.records
            .iter()
            .flat_map(|r| r.gdp_by_year.keys().copied())
            .collect()
    }
}

/// One directed pair as loaded. `dist_km` is `None` when the cell was empty.
#[derive(Debug, Clone, PartialEq)]
pub struct PairObservation {
    pub iso3_o: String,
    pub iso3_d: String,
    pub dist_km: Option<f64>,
    pub trade_by_year: BTreeMap<Year, f64>,
}

/// A pair that survived the panel join: both endpoints resolve and the
/// distance is known.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelPair {
    pub origin: usize,
    pub dest: usize,
    pub iso3_o: String,
    pub iso3_d: String,
    pub dist_km: f64,
    pub trade_by_year: BTreeMap<Year, f64>,
}

impl PanelPair {
    pub fn trade(&self, year: Year) -> Option<f64> {
        self.trade_by_year.get(&year).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GravityPanel {
    countries: CountryTable,
    pairs: Vec<PanelPair>,
    years: Vec<Year>,
    dropped: usize,
}

impl GravityPanel {
    pub fn countries(&self) -> &CountryTable {
        &self.countries
    }

    pub fn pairs(&self) -> &[PanelPair] {
        &self.pairs
    }

    pub fn years(&self) -> &[Year] {
        &self.years
    }

    /// Pairs removed by [`build_panel`] for missing critical variables.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn origin(&self, pair: &PanelPair) -> &CountryRecord {
        self.countries.by_index(pair.origin)
    }

    pub fn dest(&self, pair: &PanelPair) -> &CountryRecord {
        self.countries.by_index(pair.dest)
    }

    pub fn has_year(&self, year: Year) -> bool {
        self.years.contains(&year)
    }

    pub(crate) fn require_year(&self, year: Year) -> Result<()> {
        if self.has_year(year) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "year {year} was not requested when the panel was built (have {:?})",
                self.years
            )))
        }
    }

    /// GDP pair `(origin, destination)`; present for every panel year.
    pub fn gdps(&self, pair: &PanelPair, year: Year) -> Option<(f64, f64)> {
        Some((self.origin(pair).gdp(year)?, self.dest(pair).gdp(year)?))
    }
}

/// Joins countries and pairs, dropping pairs with an unknown endpoint, a
/// missing distance, or a missing endpoint GDP for any requested year.
pub fn build_panel(
    countries: CountryTable,
    pairs: Vec<PairObservation>,
    years: &[Year],
) -> Result<GravityPanel> {
    if years.is_empty() {
        return Err(Error::InvalidInput("no panel years requested".into()));
    }
    let years: Vec<Year> = years.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let has_gdp = |idx: usize| {
        let c = countries.by_index(idx);
        years.iter().all(|&y| c.gdp(y).is_some())
    };

    let loaded = pairs.len();
    let mut kept = Vec::with_capacity(loaded);
    for p in pairs {
        let (Some(o), Some(d)) = (countries.index_of(&p.iso3_o), countries.index_of(&p.iso3_d))
        else {
            continue;
        };
        let Some(dist_km) = p.dist_km else {
            continue;
        };
        if !has_gdp(o) || !has_gdp(d) {
            continue;
        }
        kept.push(PanelPair {
            origin: o,
            dest: d,
            iso3_o: p.iso3_o,
            iso3_d: p.iso3_d,
            dist_km,
            trade_by_year: p.trade_by_year,
        });
    }
    kept.sort_by(|a, b| (&a.iso3_o, &a.iso3_d).cmp(&(&b.iso3_o, &b.iso3_d)));
    if let Some(w) = kept
        .windows(2)
        .find(|w| w[0].iso3_o == w[1].iso3_o && w[0].iso3_d == w[1].iso3_d)
    {
        return Err(Error::DuplicateKey {
            file: "<pair table>".into(),
            line: 0,
            key: format!("{}->{}", w[0].iso3_o, w[0].iso3_d),
        });
    }
    let dropped = loaded - kept.len();
    if kept.is_empty() {
        return Err(Error::EmptyPanel { dropped });
    }
    Ok(GravityPanel {
        countries,
        pairs: kept,
        years,
        dropped,
    })
}

pub fn load_countries(path: impl AsRef<Path>) -> Result<CountryTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_countries(file, &path.display().to_string())
}

pub fn load_pair_table(path: impl AsRef<Path>) -> Result<Vec<PairObservation>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_pairs(file, &path.display().to_string())
}

struct Sheet<'a> {
    file: &'a str,
    headers: csv::StringRecord,
}

impl Sheet<'_> {
    fn err(&self, line: u64, column: &str, message: impl Into<String>) -> Error {
        Error::Malformed {
            file: self.file.to_string(),
            line,
            column: column.to_string(),
            message: message.into(),
        }
    }

    fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| self.err(1, name, "required column missing from header"))
    }

    fn optional_column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h.trim() == name)
    }

    /// `(column index, year)` for every `<prefix><year>` header.
    fn year_columns(&self, prefix: &str) -> Result<Vec<(usize, Year)>> {
        let mut out = Vec::new();
        for (i, h) in self.headers.iter().enumerate() {
            let h = h.trim();
            if let Some(rest) = h.strip_prefix(prefix) {
                let year = rest
                    .parse::<Year>()
                    .map_err(|_| self.err(1, h, "year suffix is not an integer"))?;
                out.push((i, year));
            }
        }
        Ok(out)
    }
}

fn cell(rec: &csv::StringRecord, idx: usize) -> &str {
    rec.get(idx).unwrap_or("").trim()
}

fn parse_f64(sheet: &Sheet, line: u64, column: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .parse()
        .map_err(|_| sheet.err(line, column, format!("`{raw}` is not a number")))?;
    if !v.is_finite() {
        return Err(sheet.err(line, column, format!("`{raw}` is not finite")));
    }
    Ok(v)
}

fn parse_flag(sheet: &Sheet, line: u64, column: &str, raw: &str) -> Result<bool> {
    match raw {
        "" | "0" | "false" => Ok(false),
        "1" | "true" => Ok(true),
        other => Err(sheet.err(line, column, format!("`{other}` is not a 0/1 flag"))),
    }
}

fn parse_iso3(sheet: &Sheet, line: u64, column: &str, raw: &str) -> Result<String> {
    if raw.len() == 3 && raw.bytes().all(|b| b.is_ascii_uppercase()) {
        Ok(raw.to_string())
    } else {
        Err(sheet.err(line, column, format!("`{raw}` is not an uppercase ISO3 code")))
    }
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader)
}

fn csv_error(file: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Malformed {
        file: file.to_string(),
        line,
        column: "<row>".into(),
        message: e.to_string(),
    }
}

pub fn parse_countries<R: Read>(reader: R, file: &str) -> Result<CountryTable> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(file, e))?.clone();
    let sheet = Sheet { file, headers };
    let iso_col = sheet.column("iso3")?;
    let name_col = sheet.column("name")?;
    let lat_col = sheet.column("lat")?;
    let lng_col = sheet.column("lng")?;
    let gdp_cols = sheet.year_columns("gdp_")?;
    let flag_cols = [
        sheet.optional_column("eu_member"),
        sheet.optional_column("sanctioning"),
        sheet.optional_column("energy_exporter"),
    ];

    let mut records = Vec::new();
    let mut seen: BTreeMap<String, u64> = BTreeMap::new();
    for row in rdr.records() {
        let rec = row.map_err(|e| csv_error(file, e))?;
        let line = line_of(&rec);
        let iso3 = parse_iso3(&sheet, line, "iso3", cell(&rec, iso_col))?;
        if seen.insert(iso3.clone(), line).is_some() {
            return Err(Error::DuplicateKey {
                file: file.to_string(),
                line,
                key: iso3,
            });
        }
        let lat = parse_f64(&sheet, line, "lat", cell(&rec, lat_col))?;
        let lng = parse_f64(&sheet, line, "lng", cell(&rec, lng_col))?;
        let location =
            GeoPoint::new(lat, lng).map_err(|e| sheet.err(line, "lat", e.to_string()))?;

        let mut gdp_by_year = BTreeMap::new();
        for &(idx, year) in &gdp_cols {
            let raw = cell(&rec, idx);
            if raw.is_empty() {
                continue;
            }
            let column = format!("gdp_{year}");
            let v = parse_f64(&sheet, line, &column, raw)?;
            if v <= 0.0 {
                return Err(sheet.err(line, &column, format!("GDP must be positive, got {raw}")));
            }
            gdp_by_year.insert(year, v);
        }

        let mut flags = [false; 3];
        for (slot, (col, name)) in flags.iter_mut().zip(
            flag_cols
                .iter()
                .zip(["eu_member", "sanctioning", "energy_exporter"]),
        ) {
            if let Some(idx) = col {
                *slot = parse_flag(&sheet, line, name, cell(&rec, *idx))?;
            }
        }

        records.push(CountryRecord {
            iso3,
            name: cell(&rec, name_col).to_string(),
            location,
            gdp_by_year,
            eu_member: flags[0],
            sanctioning: flags[1],
            energy_exporter: flags[2],
        });
    }
    CountryTable::new(records)
}

pub fn parse_pairs<R: Read>(reader: R, file: &str) -> Result<Vec<PairObservation>> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(file, e))?.clone();
    let sheet = Sheet { file, headers };
    let o_col = sheet.column("iso3_o")?;
    let d_col = sheet.column("iso3_d")?;
    let dist_col = sheet.column("dist_km")?;
    let trade_cols = sheet.year_columns("trade_")?;

    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for row in rdr.records() {
        let rec = row.map_err(|e| csv_error(file, e))?;
        let line = line_of(&rec);
        let iso3_o = parse_iso3(&sheet, line, "iso3_o", cell(&rec, o_col))?;
        let iso3_d = parse_iso3(&sheet, line, "iso3_d", cell(&rec, d_col))?;
        if iso3_o == iso3_d {
            return Err(sheet.err(line, "iso3_d", format!("self-pair {iso3_o}->{iso3_d}")));
        }
        if !seen.insert((iso3_o.clone(), iso3_d.clone())) {
            return Err(Error::DuplicateKey {
                file: file.to_string(),
                line,
                key: format!("{iso3_o}->{iso3_d}"),
            });
        }
        let raw_dist = cell(&rec, dist_col);
        let dist_km = if raw_dist.is_empty() {
            None
        } else {
            let d = parse_f64(&sheet, line, "dist_km", raw_dist)?;
            if d <= 0.0 {
                return Err(sheet.err(line, "dist_km", format!("distance must be positive, got {raw_dist}")));
            }
            Some(d)
        };
        let mut trade_by_year = BTreeMap::new();
        for &(idx, year) in &trade_cols {
            let raw = cell(&rec, idx);
            if raw.is_empty() {
                continue;
            }
            let column = format!("trade_{year}");
            let v = parse_f64(&sheet, line, &column, raw)?;
            if v < 0.0 {
                return Err(sheet.err(line, &column, format!("trade must be nonnegative, got {raw}")));
            }
            trade_by_year.insert(year, v);
        }
        out.push(PairObservation {
            iso3_o,
            iso3_d,
            dist_km,
            trade_by_year,
        });
    }
    Ok(out)
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(crate::fmt_f64).unwrap_or_default()
}

/// Writes a country table in the same schema [`parse_countries`] reads.
pub fn write_countries<W: Write>(table: &CountryTable, years: &[Year], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iso3".to_string(), "name".into(), "lat".into(), "lng".into()];
    header.extend(years.iter().map(|y| format!("gdp_{y}")));
    header.extend(["eu_member", "sanctioning", "energy_exporter"].map(String::from));
    w.write_record(&header).map_err(csv_write_error)?;
    for c in table.iter() {
        let mut row = vec![
            c.iso3.clone(),
            c.name.clone(),
            crate::fmt_f64(c.location.lat()),
            crate::fmt_f64(c.location.lng()),
        ];
        row.extend(years.iter().map(|&y| opt_cell(c.gdp(y))));
        row.extend(
            [c.eu_member, c.sanctioning, c.energy_exporter].map(|f| u8::from(f).to_string()),
        );
        w.write_record(&row).map_err(csv_write_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

/// Writes pair observations in the schema [`parse_pairs`] reads.
pub fn write_pairs<W: Write>(pairs: &[PairObservation], years: &[Year], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["iso3_o".to_string(), "iso3_d".into(), "dist_km".into()];
    header.extend(years.iter().map(|y| format!("trade_{y}")));
    w.write_record(&header).map_err(csv_write_error)?;
    for p in pairs {
        let mut row = vec![p.iso3_o.clone(), p.iso3_d.clone(), opt_cell(p.dist_km)];
        row.extend(years.iter().map(|y| opt_cell(p.trade_by_year.get(y).copied())));
        w.write_record(&row).map_err(csv_write_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

pub(crate) fn csv_write_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io("<csv writer>", io),
        other => Error::Numerical(format!("csv serialization failed: {other:?}")),
    }
}
