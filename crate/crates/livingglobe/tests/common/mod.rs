#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use livingglobe::assets::{atlas_dir, build_atlas, write_atlas, DEFAULT_STROKE};
use livingglobe::ingest::{parse_country_geography, parse_indicator_table, TableSchema};
use livingglobe::Bundle;
use livingglobe_core::store::Geography;
use tempfile::TempDir;

pub fn reference_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/reference").join(name)
}

pub fn read_reference(name: &str) -> String {
    fs::read_to_string(reference_file(name)).unwrap()
}

pub fn reference_bundle() -> Bundle {
    let (table, _) =
        parse_indicator_table(&read_reference("indicators.csv"), &TableSchema::default()).unwrap();
    let (records, _) = parse_country_geography(
        &read_reference("locations.csv"),
        &read_reference("borders.json"),
    )
    .unwrap();
    Bundle {
        table,
        geography: Geography::new(records).unwrap(),
    }
}

/// A bundle directory with the atlas built at `width` x `width / 2`.
pub fn prepared_dir(width: u32) -> TempDir {
    let dir = TempDir::new().unwrap();
    let bundle = reference_bundle();
    bundle.write(dir.path()).unwrap();
    let set = build_atlas(&bundle, width, width / 2, DEFAULT_STROKE).unwrap();
    write_atlas(&set, &atlas_dir(dir.path())).unwrap();
    dir
}

/// Raw cells straight from the indicator CSV, keyed by (iso3, indicator).
pub fn csv_cells() -> BTreeMap<(String, String), BTreeMap<i32, Option<f64>>> {
    let mut reader = csv::Reader::from_path(reference_file("indicators.csv")).unwrap();
    let header = reader.headers().unwrap().clone();
    let mut out = BTreeMap::new();
    for row in reader.records() {
        let row = row.unwrap();
        let mut cells = BTreeMap::new();
        for (name, value) in header.iter().zip(row.iter()).skip(3) {
            cells.insert(name.parse().unwrap(), value.parse::<f64>().ok());
        }
        out.insert((row[1].to_string(), row[2].to_string()), cells);
    }
    out
}

type Rings = Vec<Vec<(f64, f64)>>;

/// Country polygons straight from the borders JSON.
pub struct PipOracle {
    countries: Vec<(String, Rings)>,
    /// Latitude span of each country, for skipping ones that cannot match.
    spans: Vec<(f64, f64)>,
}

impl PipOracle {
    pub fn load() -> Self {
        let raw: Vec<serde_json::Value> =
            serde_json::from_str(&read_reference("borders.json")).unwrap();
        let mut countries: Vec<(String, Rings)> = raw
            .iter()
            .map(|e| {
                let rings = e["rings"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|r| {
                        r.as_array()
                            .unwrap()
                            .iter()
                            .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
                            .collect()
                    })
                    .collect();
                (e["iso3"].as_str().unwrap().to_string(), rings)
            })
            .collect();
        countries.sort_by(|a, b| a.0.cmp(&b.0));
        let spans = countries
            .iter()
            .map(|(_, rings)| {
                rings.iter().flatten().fold((f64::MAX, f64::MIN), |(lo, hi), p| {
                    (lo.min(p.1), hi.max(p.1))
                })
            })
            .collect();
        PipOracle { countries, spans }
    }

    /// Even-odd count of ring edges crossing the meridian north of the
    /// point. Works on raw coordinates: an edge spans the shorter way round,
    /// so antimeridian and south-pole rings need no special handling.
    pub fn country_at(&self, lat: f64, lon: f64) -> Option<&str> {
        self.countries.iter().zip(&self.spans).find_map(|((iso3, rings), (lo, hi))| {
            if lat < *lo || lat > *hi {
                return None;
            }
            let n: usize = rings.iter().map(|r| crossings_north(r, lat, lon)).sum();
            (n % 2 == 1).then_some(iso3.as_str())
        })
    }
}

fn crossings_north(ring: &[(f64, f64)], lat: f64, lon: f64) -> usize {
    let mut count = 0;
    for i in 0..ring.len() {
        let (mut a, mut b) = (ring[i], ring[(i + 1) % ring.len()]);
        let mut d = (b.0 - a.0).rem_euclid(360.0);
        if d > 180.0 {
            std::mem::swap(&mut a, &mut b);
            d = 360.0 - d;
        }
        if d == 0.0 {
            continue;
        }
        // half-open [a, b) eastward from a
        let t = (lon - a.0).rem_euclid(360.0);
        if t < d {
            let y = a.1 + (b.1 - a.1) * t / d;
            if y > lat {
                count += 1;
            }
        }
    }
    count
}
