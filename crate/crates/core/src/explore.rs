//! Exploration semantics: value filters per visual variable, year changes
//! with optional limit persistence, country search and the selected-country
//! readout.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::mapping::MappingConfig;
use crate::store::{CountryRecord, Extent, Geography, IndicatorTable, YearRange};
use crate::{Error, Iso3, Result};

pub const MAX_SUGGESTIONS: usize = 10;

/// The three visual variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Height,
    BarColor,
    CountryColor,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Height, Channel::BarColor, Channel::CountryColor];
}

/// Inclusive `[lo, hi]` in raw data units. Serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            // also catches NaN bounds
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from([lo, hi]: [f64; 2]) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Intervals {
    pub height: Option<Interval>,
    pub bar_color: Option<Interval>,
    pub country_color: Option<Interval>,
}

/// Active value limits, plus whether they survive a year change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState {
    pub intervals: Intervals,
    pub sticky: bool,
}

impl Default for FilterState {
    fn default() -> Self {
        FilterState {
            intervals: Intervals::default(),
            sticky: true,
        }
    }
}

impl FilterState {
    pub fn interval(&self, ch: Channel) -> Option<&Interval> {
        match ch {
            Channel::Height => self.intervals.height.as_ref(),
            Channel::BarColor => self.intervals.bar_color.as_ref(),
            Channel::CountryColor => self.intervals.country_color.as_ref(),
        }
    }

    pub fn set(&mut self, ch: Channel, interval: Option<Interval>) {
        match ch {
            Channel::Height => self.intervals.height = interval,
            Channel::BarColor => self.intervals.bar_color = interval,
            Channel::CountryColor => self.intervals.country_color = interval,
        }
    }

    pub fn with(mut self, ch: Channel, interval: Option<Interval>) -> Self {
        self.set(ch, interval);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for ch in Channel::ALL {
            if let Some(i) = self.interval(ch) {
                Interval::new(i.lo, i.hi)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExploreState {
    pub year: i32,
    pub config: MappingConfig,
    pub filters: FilterState,
    pub selected: Option<Iso3>,
}

#[derive(Serialize, Deserialize)]
struct ExploreStateWire {
    year: i32,
    #[serde(default)]
    config: Option<MappingConfig>,
    #[serde(default)]
    filters: Intervals,
    #[serde(default = "sticky_default")]
    sticky: bool,
    #[serde(default)]
    selected: Option<Iso3>,
}

fn sticky_default() -> bool {
    true
}

impl Serialize for ExploreState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        ExploreStateWire {
            year: self.year,
            config: Some(self.config.clone()),
            filters: self.filters.intervals,
            sticky: self.filters.sticky,
            selected: self.selected,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExploreState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let w = ExploreStateWire::deserialize(d)?;
        Ok(ExploreState {
            year: w.year,
            config: w.config.unwrap_or_default(),
            filters: FilterState {
                intervals: w.filters,
                sticky: w.sticky,
            },
            selected: w.selected,
        })
    }
}

impl ExploreState {
    pub fn new(year: i32, config: MappingConfig) -> Self {
        ExploreState {
            year,
            config,
            filters: FilterState::default(),
            selected: None,
        }
    }
}

/// Extent of `indicator` over the countries whose value passes `filter`, so
/// that filtering out outliers stretches the scale over the survivors.
pub fn effective_extent(
    table: &IndicatorTable,
    indicator: &str,
    year: i32,
    filter: Option<&Interval>,
) -> Result<Option<Extent>> {
    let Some(filter) = filter else {
        return table.indicator_extent(indicator, year, None);
    };
    let survivors: BTreeSet<Iso3> = table
        .values_at(indicator, year)?
        .filter(|(_, v)| filter.contains(*v))
        .map(|(c, _)| c)
        .collect();
    table.indicator_extent(indicator, year, Some(&survivors))
}

/// Countries with a value for at least one mapped indicator that pass every
/// active filter. A missing value never passes a filter.
pub fn visible_countries(
    table: &IndicatorTable,
    config: &MappingConfig,
    year: i32,
    filters: &FilterState,
) -> Result<BTreeSet<Iso3>> {
    config.validate(table)?;
    table.years().index(year)?;
    let mut out = BTreeSet::new();
    for (iso3, _) in table.countries() {
        let mut any = false;
        let mut pass = true;
        for ch in Channel::ALL {
            let value = table.lookup_value(config.indicator(ch), iso3, year)?;
            any |= value.is_some();
            if let Some(interval) = filters.interval(ch) {
                pass &= value.is_some_and(|v| interval.contains(v));
            }
        }
        if any && pass {
            out.insert(iso3);
        }
    }
    Ok(out)
}

/// Moves to `year`. Sticky limits carry over; otherwise they are cleared.
pub fn set_year(state: &ExploreState, year: i32, years: YearRange) -> Result<ExploreState> {
    years.index(year)?;
    let mut next = state.clone();
    next.year = year;
    if !state.filters.sticky {
        next.filters.intervals = Intervals::default();
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suggestion {
    pub iso3: Iso3,
    pub name: String,
}

/// Case-insensitive prefix search over names and codes, alphabetical by name.
pub fn suggest_countries(prefix: &str, records: &[CountryRecord]) -> Vec<Suggestion> {
    let needle = prefix.trim().to_lowercase();
    if needle.is_empty() {
        return Vec::new();
    }
    let mut hits: Vec<(String, &CountryRecord)> = records
        .iter()
        .filter(|r| {
            r.name.to_lowercase().starts_with(&needle)
                || r.iso3.as_str().to_lowercase().starts_with(&needle)
        })
        .map(|r| (r.name.to_lowercase(), r))
        .collect();
    hits.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.iso3.cmp(&b.1.iso3)));
    hits.into_iter()
        .take(MAX_SUGGESTIONS)
        .map(|(_, r)| Suggestion {
            iso3: r.iso3,
            name: r.name.clone(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarriedValue {
    pub value: f64,
    pub source_year: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailValue {
    pub indicator: String,
    pub label: String,
    pub unit: String,
    /// The stored cell for the current year.
    pub value: Option<f64>,
    /// Latest earlier observation, present only when `value` is missing.
    pub carried: Option<CarriedValue>,
}

/// Numeric readout for the selected country.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryDetail {
    pub iso3: Iso3,
    pub name: String,
    pub year: i32,
    pub values: Vec<DetailValue>,
}

pub fn country_detail(
    table: &IndicatorTable,
    geography: &Geography,
    iso3: Iso3,
    year: i32,
) -> Result<CountryDetail> {
    table.years().index(year)?;
    let name = geography
        .get(iso3)
        .map(|r| r.name.as_str())
        .or_else(|| table.country_name(iso3))
        .ok_or(Error::UnknownCountry(iso3))?;
    let values = table
        .indicators()
        .iter()
        .map(|ind| {
            let value = table.lookup_value(&ind.key, iso3, year)?;
            let carried = match value {
                Some(_) => None,
                None => table
                    .value_with_carry(&ind.key, iso3, year)?
                    .map(|(value, source_year)| CarriedValue { value, source_year }),
            };
            Ok(DetailValue {
                indicator: ind.key.clone(),
                label: ind.label.clone(),
                unit: ind.unit.clone(),
                value,
                carried,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CountryDetail {
        iso3,
        name: name.to_string(),
        year,
        values,
    })
}

pub fn select_country(
    state: &ExploreState,
    iso3: Iso3,
    table: &IndicatorTable,
    geography: &Geography,
) -> Result<(ExploreState, CountryDetail)> {
    let detail = country_detail(table, geography, iso3, state.year)?;
    let mut next = state.clone();
    next.selected = Some(iso3);
    Ok((next, detail))
}
