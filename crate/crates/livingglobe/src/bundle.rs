//! Self-contained JSON container for an ingested dataset.
//!
//! ```text
//! {
//!   "format": "livingglobe-bundle",
//!   "version": 1,
//!   "years": {"first": 1980, "last": 2014},
//!   "indicators": [{"key": ..., "label": ..., "unit": ...}, ...],
//!   "countries": [{"iso3", "name", "lat", "lon", "rings": [[[lon, lat], ...], ...]}, ...],
//!   "series": [{"indicator", "iso3", "name", "values": [number | null, ...]}, ...]
//! }
//! ```
//!
//! Numbers are written in shortest round-trip form, so reading a bundle back
//! reproduces every stored value bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use livingglobe_core::store::{CountryRecord, Geography, IndicatorId, IndicatorTable, YearRange};
use livingglobe_core::Iso3;
use serde::{Deserialize, Serialize};

use crate::ingest::{ring_from_pairs, ring_to_pairs};

pub const FORMAT: &str = "livingglobe-bundle";
pub const VERSION: u32 = 1;
pub const FILE_NAME: &str = "bundle.json";

#[derive(Debug, Clone, PartialEq)]
pub struct Bundle {
    pub table: IndicatorTable,
    pub geography: Geography,
}

#[derive(Serialize, Deserialize)]
struct CountryWire {
    iso3: Iso3,
    name: String,
    lat: f64,
    lon: f64,
    rings: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct SeriesWire {
    indicator: String,
    iso3: Iso3,
    name: String,
    values: Vec<Option<f64>>,
}

#[derive(Serialize, Deserialize)]
struct BundleWire {
    format: String,
    version: u32,
    years: YearRange,
    indicators: Vec<IndicatorId>,
    countries: Vec<CountryWire>,
    series: Vec<SeriesWire>,
}

impl Bundle {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let table = &self.table;
        let wire = BundleWire {
            format: FORMAT.into(),
            version: VERSION,
            years: table.years(),
            indicators: table.indicators().to_vec(),
            countries: self
                .geography
                .records()
                .iter()
                .map(|r| CountryWire {
                    iso3: r.iso3,
                    name: r.name.clone(),
                    lat: r.lat,
                    lon: r.lon,
                    rings: r.rings.iter().map(|ring| ring_to_pairs(ring)).collect(),
                })
                .collect(),
            series: table
                .iter_series()
                .map(|(indicator, iso3, values)| SeriesWire {
                    indicator: indicator.to_string(),
                    iso3,
                    name: table.country_name(iso3).unwrap_or_default().to_string(),
                    values: values.to_vec(),
                })
                .collect(),
        };
        serde_json::to_string(&wire)
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let wire: BundleWire = serde_json::from_str(text).context("parsing bundle")?;
        if wire.format != FORMAT || wire.version != VERSION {
            bail!(
                "unsupported bundle {:?} version {} (expected {FORMAT:?} version {VERSION})",
                wire.format,
                wire.version
            );
        }
        let mut table = IndicatorTable::new(wire.years);
        for id in wire.indicators {
            table.add_indicator(id);
        }
        for s in wire.series {
            table.insert_series(&s.indicator, s.iso3, &s.name, s.values)?;
        }
        let records = wire
            .countries
            .into_iter()
            .map(|c| {
                let rings = c.rings.iter().map(|r| ring_from_pairs(r)).collect();
                CountryRecord::new(c.iso3, &c.name, c.lat, c.lon, rings)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Bundle {
            table,
            geography: Geography::new(records)?,
        })
    }

    pub fn path_in(dir: &Path) -> PathBuf {
        dir.join(FILE_NAME)
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<PathBuf> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = Self::path_in(dir);
        fs::write(&path, self.to_json()?).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> anyhow::Result<Self> {
        let path = Self::path_in(dir);
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("loading {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use livingglobe_core::store::GeoPoint;

    fn sample() -> Bundle {
        let mut table = IndicatorTable::new(YearRange::new(2000, 2002).unwrap());
        table
            .insert_series(
                "total_population",
                Iso3::new("PRT").unwrap(),
                "Portugal",
                vec![Some(0.1 + 0.2), None, Some(1e300)],
            )
            .unwrap();
        table.add_indicator(IndicatorId::new("empty", "Empty", ""));
        let ring = vec![
            GeoPoint { lat: 37.0, lon: -9.5 },
            GeoPoint { lat: 37.0, lon: -6.2 },
            GeoPoint { lat: 42.1, lon: -6.2 },
        ];
        let rec = CountryRecord::new(Iso3::new("PRT").unwrap(), "Portugal", 39.4, -8.2, vec![ring])
            .unwrap();
        Bundle {
            table,
            geography: Geography::new(vec![rec]).unwrap(),
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let b = sample();
        let back = Bundle::from_json(&b.to_json().unwrap()).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn rejects_foreign_documents() {
        let json = sample().to_json().unwrap().replace(FORMAT, "something-else");
        assert!(Bundle::from_json(&json).is_err());
    }

    #[test]
    fn disk_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let b = sample();
        b.write(dir.path()).unwrap();
        assert_eq!(Bundle::read(dir.path()).unwrap(), b);
    }
}
