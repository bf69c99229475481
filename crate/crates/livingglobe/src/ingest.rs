//! Parsers for the indicator table and the country geography files.

use std::collections::BTreeMap;

use livingglobe_core::store::{CountryRecord, GeoPoint, IndicatorTable, Ring, YearRange};
use livingglobe_core::Iso3;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("borders json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("dataset error: {0}")]
    Dataset(#[from] livingglobe_core::Error),
}

/// Names of the non-year columns of the indicator table. Every other header
/// must be a year; years must be contiguous and ascending.
#[derive(Debug, Clone)]
pub struct TableSchema {
    pub name_column: String,
    pub code_column: String,
    pub indicator_column: String,
}

impl Default for TableSchema {
    fn default() -> Self {
        TableSchema {
            name_column: "country_name".into(),
            code_column: "iso3".into(),
            indicator_column: "indicator".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    /// 1-based line in the input, header included.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub rows: usize,
    pub stored_cells: usize,
    pub missing_cells: usize,
    pub warnings: Vec<Rejected>,
    pub rejected: Vec<Rejected>,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize, IngestError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| IngestError::Schema(format!("missing column {name:?}")))
}

/// Reads a wide indicator table: one line per (country, indicator), one
/// column per year.
pub fn parse_indicator_table(
    text: &str,
    schema: &TableSchema,
) -> Result<(IndicatorTable, ParseReport), IngestError> {
    let mut rdr = reader(text);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(IngestError::Schema("missing header row".into()));
    }
    let name_col = column(&headers, &schema.name_column)?;
    let code_col = column(&headers, &schema.code_column)?;
    let ind_col = column(&headers, &schema.indicator_column)?;

    let mut year_cols = Vec::new();
    for (i, h) in headers.iter().enumerate() {
        if [name_col, code_col, ind_col].contains(&i) {
            continue;
        }
        let year: i32 = h
            .parse()
            .map_err(|_| IngestError::Schema(format!("column {h:?} is not a year")))?;
        year_cols.push((i, year));
    }
    let (first, last) = match (year_cols.first(), year_cols.last()) {
        (Some(f), Some(l)) => (f.1, l.1),
        _ => return Err(IngestError::Schema("no year columns".into())),
    };
    if year_cols.iter().enumerate().any(|(k, (_, y))| *y != first + k as i32) {
        return Err(IngestError::Schema(
            "year columns must be contiguous and ascending".into(),
        ));
    }

    let mut table = IndicatorTable::new(YearRange::new(first, last)?);
    let mut report = ParseReport::default();
    for result in rdr.records() {
        let record = result?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            report.rejected.push(Rejected {
                line,
                reason: format!("{} fields, expected {}", record.len(), headers.len()),
            });
            continue;
        }
        let iso3 = match Iso3::new(&record[code_col]) {
            Ok(c) => c,
            Err(e) => {
                report.rejected.push(Rejected {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let indicator = &record[ind_col];
        if indicator.is_empty() {
            report.rejected.push(Rejected {
                line,
                reason: "empty indicator".into(),
            });
            continue;
        }
        let mut values = Vec::with_capacity(year_cols.len());
        for &(col, year) in &year_cols {
            let cell = &record[col];
            let value = if cell.is_empty() {
                None
            } else {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => Some(v),
                    _ => {
                        report.warnings.push(Rejected {
                            line,
                            reason: format!("non-numeric cell {cell:?} for {year}, stored as missing"),
                        });
                        None
                    }
                }
            };
            match value {
                Some(_) => report.stored_cells += 1,
                None => report.missing_cells += 1,
            }
            values.push(value);
        }
        table.insert_series(indicator, iso3, &record[name_col], values)?;
        report.rows += 1;
    }
    Ok((table, report))
}

/// One entry of the borders file; rings are `[lon, lat]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorderEntry {
    pub iso3: String,
    pub rings: Vec<Vec<[f64; 2]>>,
}

pub fn ring_from_pairs(pairs: &[[f64; 2]]) -> Ring {
    pairs.iter().map(|&[lon, lat]| GeoPoint { lat, lon }).collect()
}

pub fn ring_to_pairs(ring: &[GeoPoint]) -> Vec<[f64; 2]> {
    ring.iter().map(|p| [p.lon, p.lat]).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeographyReport {
    pub records: usize,
    pub rejected: Vec<String>,
    pub dropped_rings: Vec<String>,
    /// Border entries whose code has no row in the locations table.
    pub unmatched_borders: Vec<String>,
    /// Locations without any border; kept, but they cannot be drawn or picked.
    pub without_borders: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct LocationRow {
    iso3: String,
    name: String,
    latitude: f64,
    longitude: f64,
}

/// Joins the locations table (`iso3,name,latitude,longitude`) with the
/// borders document on ISO code.
pub fn parse_country_geography(
    locations: &str,
    borders: &str,
) -> Result<(Vec<CountryRecord>, GeographyReport), IngestError> {
    let entries: Vec<BorderEntry> = serde_json::from_str(borders)?;
    let mut rings_by_code: BTreeMap<String, Vec<Vec<[f64; 2]>>> = BTreeMap::new();
    for e in entries {
        rings_by_code.entry(e.iso3).or_default().extend(e.rings);
    }

    let mut report = GeographyReport::default();
    let mut records = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut rdr = reader(locations);
    for h in ["iso3", "name", "latitude", "longitude"] {
        column(rdr.headers()?, h)?;
    }
    for row in rdr.deserialize::<LocationRow>() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                report.rejected.push(format!("locations: {e}"));
                continue;
            }
        };
        let iso3 = match Iso3::new(&row.iso3) {
            Ok(c) => c,
            Err(e) => {
                report.rejected.push(e.to_string());
                continue;
            }
        };
        if !seen.insert(iso3) {
            return Err(livingglobe_core::Error::DuplicateCountry(iso3).into());
        }
        let raw_rings = rings_by_code.remove(&row.iso3).unwrap_or_default();
        if raw_rings.is_empty() {
            report.without_borders.push(row.iso3.clone());
        }
        let mut rings = Vec::new();
        let mut bad_coordinate = None;
        for (i, pairs) in raw_rings.iter().enumerate() {
            let ring = ring_from_pairs(pairs);
            match livingglobe_core::store::validate_ring(&ring) {
                Ok(()) => rings.push(ring),
                Err(e @ livingglobe_core::Error::InvalidCoordinate { .. }) => {
                    bad_coordinate = Some(e);
                    break;
                }
                Err(e) => report.dropped_rings.push(format!("{iso3} ring {i}: {e}")),
            }
        }
        if let Some(e) = bad_coordinate {
            report.rejected.push(format!("{iso3}: {e}"));
            continue;
        }
        match CountryRecord::new(iso3, &row.name, row.latitude, row.longitude, rings) {
            Ok(r) => records.push(r),
            Err(e) => report.rejected.push(format!("{iso3}: {e}")),
        }
    }
    report.unmatched_borders = rings_by_code.into_keys().collect();
    report.records = records.len();
    Ok((records, report))
}
