use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::store::CountryRecord;
use crate::{Error, Iso3, Result};

pub const SEA_LEVEL: u8 = 0;
/// Never assigned; kept free for the selection highlight.
pub const HIGHLIGHT_LEVEL: u8 = 255;
pub const MAX_COUNTRIES: usize = 254;

/// Bijection between lookup-texture grey levels and countries.
///
/// Serializes as `{"127": "PRT", ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GreyMap {
    by_level: BTreeMap<u8, Iso3>,
    by_country: BTreeMap<Iso3, u8>,
}

impl GreyMap {
    pub fn level(&self, iso3: Iso3) -> Option<u8> {
        self.by_country.get(&iso3).copied()
    }

    pub fn country(&self, level: u8) -> Option<Iso3> {
        self.by_level.get(&level).copied()
    }

    /// `(level, country)` in ascending level order.
    pub fn iter(&self) -> impl Iterator<Item = (u8, Iso3)> + '_ {
        self.by_level.iter().map(|(l, c)| (*l, *c))
    }

    pub fn len(&self) -> usize {
        self.by_level.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_level.is_empty()
    }

    fn from_pairs(pairs: impl IntoIterator<Item = (u8, Iso3)>) -> core::result::Result<Self, &'static str> {
        let mut map = GreyMap::default();
        for (level, iso3) in pairs {
            if level == SEA_LEVEL || level == HIGHLIGHT_LEVEL {
                return Err("grey levels 0 and 255 are reserved");
            }
            if map.by_level.insert(level, iso3).is_some() || map.by_country.insert(iso3, level).is_some() {
                return Err("grey map is not a bijection");
            }
        }
        Ok(map)
    }
}

impl Serialize for GreyMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        self.by_level.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GreyMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let raw = BTreeMap::<u8, Iso3>::deserialize(d)?;
        GreyMap::from_pairs(raw).map_err(serde::de::Error::custom)
    }
}

/// Spreads the countries, in ISO order, evenly over levels 1..=254:
/// the i-th of n gets `floor((i + 1) * 255 / (n + 1))`.
pub fn assign_grey_levels(records: &[CountryRecord]) -> Result<GreyMap> {
    let mut codes: Vec<Iso3> = records.iter().map(|r| r.iso3).collect();
    codes.sort_unstable();
    codes.dedup();
    let n = codes.len();
    if n > MAX_COUNTRIES {
        return Err(Error::AtlasCapacity { countries: n });
    }
    let pairs = codes
        .into_iter()
        .enumerate()
        .map(|(i, c)| (((i + 1) * 255 / (n + 1)) as u8, c));
    Ok(GreyMap::from_pairs(pairs).expect("even spacing yields distinct levels in 1..=254"))
}
