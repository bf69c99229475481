//! Visual encodings: min/max normalization, color scales for countries and
//! bars, bar heights, and per-year frames combining all three.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::explore::{self, Channel, FilterState};
use crate::store::{keys, Extent, Geography, IndicatorTable};
use crate::{Error, Iso3, Result};

/// Height of the bar for the largest value in scene units.
pub const MAX_BAR_HEIGHT: f64 = 100.0;

/// Country color used when a value is missing or filtered out.
pub const NEUTRAL_GREY: Rgb = Rgb([160, 160, 160]);

/// A value mapped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct NormalizedValue(f64);

impl NormalizedValue {
    pub fn new(v: f64) -> Option<Self> {
        (0.0..=1.0).contains(&v).then_some(NormalizedValue(v))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// `(value - min) / (max - min)`. A zero-width extent carries no ordering, so
/// every value in it maps to the middle of the scale.
pub fn normalize(value: f64, extent: &Extent) -> Result<NormalizedValue> {
    if !extent.contains(value) {
        return Err(Error::OutsideExtent {
            value,
            min: extent.min,
            max: extent.max,
        });
    }
    if extent.max == extent.min {
        return Ok(NormalizedValue(0.5));
    }
    let v = (value - extent.min) / (extent.max - extent.min);
    Ok(NormalizedValue(v.clamp(0.0, 1.0)))
}

pub fn bar_height(v: NormalizedValue) -> f64 {
    MAX_BAR_HEIGHT * v.0
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb([r, g, b])
    }

    pub fn to_hex(self) -> String {
        let [r, g, b] = self.0;
        alloc::format!("#{r:02x}{g:02x}{b:02x}")
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let hex = s.strip_prefix('#')?;
        if hex.len() != 6 || !hex.is_ascii() {
            return None;
        }
        let ch = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
        Some(Rgb([ch(0)?, ch(2)?, ch(4)?]))
    }
}

impl fmt::Debug for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rgb::from_hex(&s).ok_or_else(|| serde::de::Error::custom("expected #rrggbb"))
    }
}

/// Piecewise-linear gradient over `[0, 1]`, interpolated per sRGB channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorScale {
    id: String,
    stops: Vec<(f64, Rgb)>,
}

const fn stop(pos: f64, r: u8, g: u8, b: u8) -> (f64, Rgb) {
    (pos, Rgb::new(r, g, b))
}

const PRESETS: &[(&str, &[(f64, Rgb)])] = &[
    (
        "red-green",
        &[stop(0.0, 255, 0, 0), stop(1.0, 0, 255, 0)],
    ),
    (
        "blue-yellow",
        &[stop(0.0, 0, 0, 255), stop(1.0, 255, 255, 0)],
    ),
    // Color-blind-safe alternatives.
    (
        "viridis",
        &[
            stop(0.0, 0x44, 0x01, 0x54),
            stop(0.25, 0x3b, 0x52, 0x8b),
            stop(0.5, 0x21, 0x91, 0x8c),
            stop(0.75, 0x5e, 0xc9, 0x62),
            stop(1.0, 0xfd, 0xe7, 0x25),
        ],
    ),
    (
        "cividis",
        &[
            stop(0.0, 0x00, 0x20, 0x4d),
            stop(0.25, 0x41, 0x4d, 0x6b),
            stop(0.5, 0x7c, 0x7b, 0x78),
            stop(0.75, 0xbc, 0xaf, 0x6f),
            stop(1.0, 0xff, 0xea, 0x46),
        ],
    ),
    (
        "blue-orange",
        &[
            stop(0.0, 0x21, 0x66, 0xac),
            stop(0.5, 0xf7, 0xf7, 0xf7),
            stop(1.0, 0xe6, 0x61, 0x01),
        ],
    ),
];

impl ColorScale {
    pub const DEFAULT_COUNTRY: &'static str = "red-green";
    pub const DEFAULT_BAR: &'static str = "blue-yellow";

    pub fn new(id: &str, stops: Vec<(f64, Rgb)>) -> Result<Self> {
        match (stops.first(), stops.last()) {
            (Some((first, _)), Some((last, _))) if *first == 0.0 && *last == 1.0 => {}
            _ => return Err(Error::InvalidScale("stops must start at 0 and end at 1")),
        }
        if stops.len() < 2 || stops.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidScale("stop positions must strictly increase"));
        }
        Ok(ColorScale {
            id: id.to_string(),
            stops,
        })
    }

    pub fn preset(id: &str) -> Result<Self> {
        PRESETS
            .iter()
            .find(|(name, _)| *name == id)
            .map(|(name, stops)| ColorScale {
                id: name.to_string(),
                stops: stops.to_vec(),
            })
            .ok_or_else(|| Error::UnknownScale(id.to_string()))
    }

    pub fn preset_ids() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|(id, _)| *id)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn stops(&self) -> &[(f64, Rgb)] {
        &self.stops
    }
}

impl Serialize for ColorScale {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id)
    }
}

impl<'de> Deserialize<'de> for ColorScale {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let id = String::deserialize(d)?;
        ColorScale::preset(&id).map_err(serde::de::Error::custom)
    }
}

fn round_half_up(x: f64) -> u8 {
    libm::floor(x + 0.5).clamp(0.0, 255.0) as u8
}

pub fn scale_color(v: NormalizedValue, scale: &ColorScale) -> Rgb {
    let v = v.0;
    let stops = &scale.stops;
    let k = stops
        .windows(2)
        .position(|w| v <= w[1].0)
        .unwrap_or(stops.len() - 2);
    let (p0, Rgb(c0)) = stops[k];
    let (p1, Rgb(c1)) = stops[k + 1];
    let t = (v - p0) / (p1 - p0);
    let lerp = |a: u8, b: u8| round_half_up(f64::from(a) + t * (f64::from(b) - f64::from(a)));
    Rgb([lerp(c0[0], c1[0]), lerp(c0[1], c1[1]), lerp(c0[2], c1[2])])
}

/// Which indicator drives each visual variable, and the two color scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingConfig {
    pub height: String,
    pub bar_color: String,
    pub country_color: String,
    pub country_scale: ColorScale,
    pub bar_scale: ColorScale,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            height: keys::TOTAL_POPULATION.to_string(),
            bar_color: keys::POPULATION_DENSITY.to_string(),
            country_color: keys::POPULATION_GROWTH.to_string(),
            country_scale: ColorScale::preset(ColorScale::DEFAULT_COUNTRY)
                .expect("built-in preset"),
            bar_scale: ColorScale::preset(ColorScale::DEFAULT_BAR).expect("built-in preset"),
        }
    }
}

impl MappingConfig {
    pub fn indicator(&self, channel: Channel) -> &str {
        match channel {
            Channel::Height => &self.height,
            Channel::BarColor => &self.bar_color,
            Channel::CountryColor => &self.country_color,
        }
    }

    pub fn validate(&self, table: &IndicatorTable) -> Result<()> {
        for ch in Channel::ALL {
            let key = self.indicator(ch);
            if table.indicator(key).is_none() {
                return Err(Error::UnknownIndicator(key.to_string()));
            }
        }
        Ok(())
    }
}

/// One value per visual variable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Channels<T> {
    pub height: T,
    pub bar_color: T,
    pub country_color: T,
}

impl<T> Channels<T> {
    pub fn get(&self, ch: Channel) -> &T {
        match ch {
            Channel::Height => &self.height,
            Channel::BarColor => &self.bar_color,
            Channel::CountryColor => &self.country_color,
        }
    }

    pub fn from_fn(mut f: impl FnMut(Channel) -> T) -> Self {
        Channels {
            height: f(Channel::Height),
            bar_color: f(Channel::BarColor),
            country_color: f(Channel::CountryColor),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameEntry {
    pub visible: bool,
    /// `None` renders as [`NEUTRAL_GREY`].
    pub country_color: Option<Rgb>,
    pub bar_color: Option<Rgb>,
    pub bar_height: Option<f64>,
    pub normalized: Channels<Option<f64>>,
    pub raw: Channels<Option<f64>>,
}

/// Render instructions for every country in one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualFrame {
    pub year: i32,
    pub config: MappingConfig,
    pub extents: Channels<Option<Extent>>,
    pub countries: BTreeMap<Iso3, FrameEntry>,
}

/// Evaluates the three mapped indicators for every country known to either
/// the table or the geography.
///
/// Each encoding is normalized against the extent of the countries that pass
/// that encoding's own filter. A country failing any active filter is hidden
/// entirely; a visible country missing a value loses only that encoding, and
/// a bar is drawn only when both its height and its color are known.
pub fn build_frame(
    table: &IndicatorTable,
    geography: &Geography,
    config: &MappingConfig,
    year: i32,
    filters: &FilterState,
) -> Result<VisualFrame> {
    table.years().index(year)?;
    config.validate(table)?;
    filters.validate()?;

    let extents = Channels::from_fn(|ch| {
        explore::effective_extent(table, config.indicator(ch), year, filters.interval(ch))
    });
    let extents = Channels {
        height: extents.height?,
        bar_color: extents.bar_color?,
        country_color: extents.country_color?,
    };
    let visible = explore::visible_countries(table, config, year, filters)?;

    let mut ids: Vec<Iso3> = table.countries().map(|(c, _)| c).collect();
    ids.extend(geography.records().iter().map(|r| r.iso3));
    ids.sort_unstable();
    ids.dedup();

    let mut countries = BTreeMap::new();
    for iso3 in ids {
        let raw = Channels {
            height: table.lookup_value(&config.height, iso3, year)?,
            bar_color: table.lookup_value(&config.bar_color, iso3, year)?,
            country_color: table.lookup_value(&config.country_color, iso3, year)?,
        };
        let is_visible = visible.contains(&iso3);
        let mut entry = FrameEntry {
            visible: is_visible,
            country_color: None,
            bar_color: None,
            bar_height: None,
            normalized: Channels::default(),
            raw,
        };
        if is_visible {
            let norm = |ch: Channel| -> Result<Option<NormalizedValue>> {
                match (raw.get(ch), extents.get(ch)) {
                    (Some(v), Some(e)) => normalize(*v, e).map(Some),
                    _ => Ok(None),
                }
            };
            let h = norm(Channel::Height)?;
            let b = norm(Channel::BarColor)?;
            let c = norm(Channel::CountryColor)?;
            entry.normalized = Channels {
                height: h.map(NormalizedValue::get),
                bar_color: b.map(NormalizedValue::get),
                country_color: c.map(NormalizedValue::get),
            };
            entry.country_color = c.map(|v| scale_color(v, &config.country_scale));
            if let (Some(h), Some(b)) = (h, b) {
                entry.bar_height = Some(bar_height(h));
                entry.bar_color = Some(scale_color(b, &config.bar_scale));
            }
        }
        countries.insert(iso3, entry);
    }

    Ok(VisualFrame {
        year,
        config: config.clone(),
        extents,
        countries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::YearRange;
    use alloc::vec;

    fn ext(min: f64, max: f64) -> Extent {
        Extent { min, max, count: 2 }
    }

    #[test]
    fn normalize_endpoints_and_midpoint() {
        assert_eq!(normalize(10.0, &ext(10.0, 50.0)).unwrap().get(), 0.0);
        assert_eq!(normalize(50.0, &ext(10.0, 50.0)).unwrap().get(), 1.0);
        assert_eq!(normalize(30.0, &ext(10.0, 50.0)).unwrap().get(), 0.5);
    }

    #[test]
    fn normalize_degenerate_extent_is_mid_scale() {
        assert_eq!(normalize(42.0, &ext(42.0, 42.0)).unwrap().get(), 0.5);
    }

    #[test]
    fn normalize_outside_extent_is_an_error() {
        assert!(matches!(
            normalize(9.0, &ext(10.0, 50.0)),
            Err(Error::OutsideExtent { .. })
        ));
        assert!(normalize(f64::NAN, &ext(10.0, 50.0)).is_err());
    }

    #[test]
    fn default_scale_endpoints() {
        let red_green = ColorScale::preset("red-green").unwrap();
        let blue_yellow = ColorScale::preset("blue-yellow").unwrap();
        let zero = NormalizedValue::new(0.0).unwrap();
        let one = NormalizedValue::new(1.0).unwrap();
        assert_eq!(scale_color(zero, &red_green), Rgb::new(255, 0, 0));
        assert_eq!(scale_color(one, &red_green), Rgb::new(0, 255, 0));
        assert_eq!(scale_color(zero, &blue_yellow), Rgb::new(0, 0, 255));
        assert_eq!(scale_color(one, &blue_yellow), Rgb::new(255, 255, 0));
    }

    #[test]
    fn two_stop_midpoint_rounds_half_up() {
        // 127.5 on every channel
        let s = ColorScale::preset("blue-yellow").unwrap();
        let mid = NormalizedValue::new(0.5).unwrap();
        assert_eq!(scale_color(mid, &s), Rgb::new(128, 128, 128));
    }

    #[test]
    fn multi_stop_hits_interior_stops() {
        let s = ColorScale::preset("viridis").unwrap();
        for &(pos, color) in s.stops() {
            assert_eq!(scale_color(NormalizedValue::new(pos).unwrap(), &s), color);
        }
    }

    #[test]
    fn scale_validation() {
        let c = Rgb::new(0, 0, 0);
        assert!(ColorScale::new("x", vec![(0.0, c)]).is_err());
        assert!(ColorScale::new("x", vec![(0.1, c), (1.0, c)]).is_err());
        assert!(ColorScale::new("x", vec![(0.0, c), (0.5, c), (0.5, c), (1.0, c)]).is_err());
        assert!(ColorScale::new("x", vec![(0.0, c), (1.0, c)]).is_ok());
        assert!(ColorScale::preset("rainbow").is_err());
    }

    #[test]
    fn at_least_one_alternative_preset_per_channel() {
        let ids: Vec<_> = ColorScale::preset_ids().collect();
        assert!(ids.len() >= 4);
        assert!(ids.contains(&"viridis") && ids.contains(&"cividis"));
    }

    #[test]
    fn bar_heights() {
        let h = |v| bar_height(NormalizedValue::new(v).unwrap());
        assert_eq!(h(1.0), 100.0);
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h(0.25), 25.0);
    }

    #[test]
    fn hex_round_trip() {
        let c = Rgb::new(1, 171, 255);
        assert_eq!(c.to_hex(), "#01abff");
        assert_eq!(Rgb::from_hex("#01abff"), Some(c));
        assert_eq!(Rgb::from_hex("01abff"), None);
    }

    #[test]
    fn mapping_config_json_shape() {
        let json = serde_json::to_string(&MappingConfig::default()).unwrap();
        assert_eq!(
            json,
            r#"{"height":"total_population","bar_color":"population_density","country_color":"population_growth","country_scale":"red-green","bar_scale":"blue-yellow"}"#
        );
        let back: MappingConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, MappingConfig::default());
    }

    fn constant_table() -> (IndicatorTable, Geography) {
        let mut t = IndicatorTable::new(YearRange::new(2000, 2001).unwrap());
        for c in ["AAA", "BBB", "CCC"] {
            t.insert_series("flat", Iso3::new(c).unwrap(), c, vec![Some(7.0); 2])
                .unwrap();
        }
        (t, Geography::default())
    }

    #[test]
    fn constant_indicator_renders_mid_scale() {
        let (t, g) = constant_table();
        let config = MappingConfig {
            height: "flat".into(),
            bar_color: "flat".into(),
            country_color: "flat".into(),
            ..MappingConfig::default()
        };
        let frame = build_frame(&t, &g, &config, 2000, &FilterState::default()).unwrap();
        assert_eq!(frame.countries.len(), 3);
        for e in frame.countries.values() {
            assert!(e.visible);
            assert_eq!(e.bar_height, Some(50.0));
            assert_eq!(e.country_color, Some(Rgb::new(128, 128, 0)));
            assert_eq!(e.bar_color, Some(Rgb::new(128, 128, 128)));
        }
    }

    #[test]
    fn unknown_indicator_in_config() {
        let (t, g) = constant_table();
        let err = build_frame(&t, &g, &MappingConfig::default(), 2000, &FilterState::default())
            .unwrap_err();
        assert!(matches!(err, Error::UnknownIndicator(_)));
    }
}
