//! Demographic dataset: indicator catalog, country geography, the
//! indicator × country × year value table, and per-year extents.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Iso3, Result};

pub mod keys {
    pub const TOTAL_POPULATION: &str = "total_population";
    pub const POPULATION_DENSITY: &str = "population_density";
    pub const POPULATION_GROWTH: &str = "population_growth";
    pub const CRUDE_BIRTH_RATE: &str = "crude_birth_rate";
    pub const CRUDE_DEATH_RATE: &str = "crude_death_rate";
    pub const LIFE_EXPECTANCY: &str = "life_expectancy";
    pub const NET_MIGRATION: &str = "net_migration";
    pub const AGES_0_14: &str = "population_ages_0_14";
    pub const AGES_15_64: &str = "population_ages_15_64";
    pub const AGES_65_UP: &str = "population_ages_65_up";
}

const CATALOG: [(&str, &str, &str); 10] = [
    (keys::TOTAL_POPULATION, "Total population", "people"),
    (keys::POPULATION_DENSITY, "Population density", "people per sq. km"),
    (keys::POPULATION_GROWTH, "Population growth", "annual %"),
    (keys::CRUDE_BIRTH_RATE, "Crude birth rate", "per 1,000 people"),
    (keys::CRUDE_DEATH_RATE, "Crude death rate", "per 1,000 people"),
    (keys::LIFE_EXPECTANCY, "Life expectancy at birth", "years"),
    (keys::NET_MIGRATION, "Net migration", "people, 5-year total"),
    (keys::AGES_0_14, "Population ages 0-14", "% of total"),
    (keys::AGES_15_64, "Population ages 15-64", "% of total"),
    (keys::AGES_65_UP, "Population ages 65 and above", "% of total"),
];

/// A demographic variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndicatorId {
    pub key: String,
    pub label: String,
    pub unit: String,
}

impl IndicatorId {
    pub fn new(key: &str, label: &str, unit: &str) -> Self {
        IndicatorId {
            key: key.to_string(),
            label: label.to_string(),
            unit: unit.to_string(),
        }
    }

    /// The ten indicators the globe knows labels and units for.
    pub fn canonical() -> Vec<IndicatorId> {
        CATALOG
            .iter()
            .map(|&(key, label, unit)| IndicatorId::new(key, label, unit))
            .collect()
    }

    /// Catalog entry for `key`, or a bare entry labelled by its key.
    pub fn from_key(key: &str) -> Self {
        CATALOG
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|&(k, label, unit)| IndicatorId::new(k, label, unit))
            .unwrap_or_else(|| IndicatorId::new(key, key, ""))
    }
}

/// Inclusive span of years covered by a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    first: i32,
    last: i32,
}

impl YearRange {
    pub fn new(first: i32, last: i32) -> Result<Self> {
        if first > last {
            return Err(Error::InvalidYearRange { first, last });
        }
        Ok(YearRange { first, last })
    }

    pub fn first(&self) -> i32 {
        self.first
    }

    pub fn last(&self) -> i32 {
        self.last
    }

    pub fn len(&self) -> usize {
        (self.last - self.first) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.first..=self.last).contains(&year)
    }

    /// Position of `year` within the range, or a range error.
    pub fn index(&self, year: i32) -> Result<usize> {
        if self.contains(year) {
            Ok((year - self.first) as usize)
        } else {
            Err(Error::YearOutOfRange {
                year,
                first: self.first,
                last: self.last,
            })
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.first..=self.last
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !((-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)) {
            return Err(Error::InvalidCoordinate { lat, lon });
        }
        Ok(GeoPoint { lat, lon })
    }
}

pub type Ring = Vec<GeoPoint>;

/// Checks a border ring: every vertex in range and at least three distinct
/// vertices once the closing repeat is dropped.
pub fn validate_ring(ring: &[GeoPoint]) -> Result<()> {
    for p in ring {
        GeoPoint::new(p.lat, p.lon)?;
    }
    let open = match ring {
        [first, .., last] if first == last => &ring[..ring.len() - 1],
        _ => ring,
    };
    let mut distinct: Vec<(u64, u64)> = open
        .iter()
        .map(|p| (p.lat.to_bits(), p.lon.to_bits()))
        .collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateRing {
            vertices: distinct.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRecord {
    pub iso3: Iso3,
    pub name: String,
    /// Label/bar anchor, not necessarily inside the polygons.
    pub lat: f64,
    pub lon: f64,
    pub rings: Vec<Ring>,
}

impl CountryRecord {
    pub fn new(iso3: Iso3, name: &str, lat: f64, lon: f64, rings: Vec<Ring>) -> Result<Self> {
        GeoPoint::new(lat, lon)?;
        for ring in &rings {
            validate_ring(ring)?;
        }
        Ok(CountryRecord {
            iso3,
            name: name.to_string(),
            lat,
            lon,
            rings,
        })
    }
}

/// Country records keyed and ordered by ISO code.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Geography {
    records: Vec<CountryRecord>,
}

impl Geography {
    pub fn new(mut records: Vec<CountryRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.iso3);
        for pair in records.windows(2) {
            if pair[0].iso3 == pair[1].iso3 {
                return Err(Error::DuplicateCountry(pair[0].iso3));
            }
        }
        Ok(Geography { records })
    }

    pub fn records(&self) -> &[CountryRecord] {
        &self.records
    }

    pub fn get(&self, iso3: Iso3) -> Option<&CountryRecord> {
        self.records
            .binary_search_by_key(&iso3, |r| r.iso3)
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Observed range of one indicator in one year over a set of countries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Extent {
    pub fn contains(&self, value: f64) -> bool {
        self.min <= value && value <= self.max
    }

    fn from_values(values: impl IntoIterator<Item = f64>) -> Option<Extent> {
        values.into_iter().fold(None, |acc, v| match acc {
            None => Some(Extent {
                min: v,
                max: v,
                count: 1,
            }),
            Some(e) => Some(Extent {
                min: e.min.min(v),
                max: e.max.max(v),
                count: e.count + 1,
            }),
        })
    }
}

/// All values V(indicator, country, year). Missing cells are `None`, never 0.
///
/// Immutable once built; queries take `&self` and are safe to share.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorTable {
    years: YearRange,
    indicators: Vec<IndicatorId>,
    names: BTreeMap<Iso3, String>,
    series: BTreeMap<(usize, Iso3), Vec<Option<f64>>>,
}

impl IndicatorTable {
    pub fn new(years: YearRange) -> Self {
        IndicatorTable {
            years,
            indicators: Vec::new(),
            names: BTreeMap::new(),
            series: BTreeMap::new(),
        }
    }

    pub fn years(&self) -> YearRange {
        self.years
    }

    pub fn indicators(&self) -> &[IndicatorId] {
        &self.indicators
    }

    pub fn indicator(&self, key: &str) -> Option<&IndicatorId> {
        self.indicators.iter().find(|i| i.key == key)
    }

    fn indicator_index(&self, key: &str) -> Result<usize> {
        self.indicators
            .iter()
            .position(|i| i.key == key)
            .ok_or_else(|| Error::UnknownIndicator(key.to_string()))
    }

    /// Registers an indicator, returning its position. Re-adding a key is a no-op.
    pub fn add_indicator(&mut self, id: IndicatorId) -> usize {
        match self.indicators.iter().position(|i| i.key == id.key) {
            Some(i) => i,
            None => {
                self.indicators.push(id);
                self.indicators.len() - 1
            }
        }
    }

    /// Stores one country-indicator line; `values` holds one cell per year.
    pub fn insert_series(
        &mut self,
        indicator: &str,
        iso3: Iso3,
        name: &str,
        values: Vec<Option<f64>>,
    ) -> Result<()> {
        if values.len() != self.years.len() {
            return Err(Error::SeriesLength {
                expected: self.years.len(),
                found: values.len(),
            });
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                indicator: indicator.to_string(),
                iso3,
            });
        }
        let idx = self.add_indicator(IndicatorId::from_key(indicator));
        if self.series.contains_key(&(idx, iso3)) {
            return Err(Error::DuplicateSeries {
                indicator: indicator.to_string(),
                iso3,
            });
        }
        self.names
            .entry(iso3)
            .or_insert_with(|| name.to_string());
        self.series.insert((idx, iso3), values);
        Ok(())
    }

    /// Countries with at least one line in the table, with the name the table gives them.
    pub fn countries(&self) -> impl Iterator<Item = (Iso3, &str)> {
        self.names.iter().map(|(c, n)| (*c, n.as_str()))
    }

    pub fn country_name(&self, iso3: Iso3) -> Option<&str> {
        self.names.get(&iso3).map(String::as_str)
    }

    pub fn has_country(&self, iso3: Iso3) -> bool {
        self.names.contains_key(&iso3)
    }

    pub fn series(&self, indicator: &str, iso3: Iso3) -> Option<&[Option<f64>]> {
        let idx = self.indicator_index(indicator).ok()?;
        self.series.get(&(idx, iso3)).map(Vec::as_slice)
    }

    /// Every stored line as (indicator key, country, cells).
    pub fn iter_series(&self) -> impl Iterator<Item = (&str, Iso3, &[Option<f64>])> {
        self.series
            .iter()
            .map(|((i, c), v)| (self.indicators[*i].key.as_str(), *c, v.as_slice()))
    }

    pub fn row_count(&self) -> usize {
        self.series.len()
    }

    /// (stored numeric cells, missing cells)
    pub fn cell_counts(&self) -> (usize, usize) {
        self.series.values().flatten().fold((0, 0), |(p, m), v| match v {
            Some(_) => (p + 1, m),
            None => (p, m + 1),
        })
    }

    pub fn lookup_value(&self, indicator: &str, iso3: Iso3, year: i32) -> Result<Option<f64>> {
        let y = self.years.index(year)?;
        let idx = self.indicator_index(indicator)?;
        Ok(self.series.get(&(idx, iso3)).and_then(|s| s[y]))
    }

    /// Latest observation at or before `year`, tagged with the year it was recorded.
    pub fn value_with_carry(
        &self,
        indicator: &str,
        iso3: Iso3,
        year: i32,
    ) -> Result<Option<(f64, i32)>> {
        let y = self.years.index(year)?;
        let idx = self.indicator_index(indicator)?;
        let Some(series) = self.series.get(&(idx, iso3)) else {
            return Ok(None);
        };
        Ok(series[..=y]
            .iter()
            .enumerate()
            .rev()
            .find_map(|(i, v)| v.map(|v| (v, self.years.first + i as i32))))
    }

    /// Non-missing (country, value) pairs of one indicator in one year.
    pub fn values_at(
        &self,
        indicator: &str,
        year: i32,
    ) -> Result<impl Iterator<Item = (Iso3, f64)> + '_> {
        let y = self.years.index(year)?;
        let idx = self.indicator_index(indicator)?;
        let lo = Iso3::new("AAA")?;
        let hi = Iso3::new("ZZZ")?;
        Ok(self
            .series
            .range((idx, lo)..=(idx, hi))
            .filter_map(move |((_, c), s)| s[y].map(|v| (*c, v))))
    }

    /// Min/max of `indicator` at `year` over `domain` (all countries when `None`).
    pub fn indicator_extent(
        &self,
        indicator: &str,
        year: i32,
        domain: Option<&BTreeSet<Iso3>>,
    ) -> Result<Option<Extent>> {
        let values = self
            .values_at(indicator, year)?
            .filter(|(c, _)| domain.is_none_or(|d| d.contains(c)))
            .map(|(_, v)| v);
        Ok(Extent::from_values(values))
    }
}
