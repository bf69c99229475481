use alloc::string::String;

use crate::Iso3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid ISO 3166-1 alpha-3 code {0:?}")]
    InvalidIso3(String),

    #[error("year {year} outside dataset range {first}..={last}")]
    YearOutOfRange { year: i32, first: i32, last: i32 },

    #[error("empty or inverted year range {first}..={last}")]
    InvalidYearRange { first: i32, last: i32 },

    #[error("unknown indicator {0:?}")]
    UnknownIndicator(String),

    #[error("unknown country {0}")]
    UnknownCountry(Iso3),

    #[error("duplicate row for ({indicator}, {iso3})")]
    DuplicateSeries { indicator: String, iso3: Iso3 },

    #[error("series has {found} values, expected {expected}")]
    SeriesLength { expected: usize, found: usize },

    #[error("non-finite value in ({indicator}, {iso3})")]
    NonFiniteValue { indicator: String, iso3: Iso3 },

    #[error("country {0} listed twice")]
    DuplicateCountry(Iso3),

    #[error("coordinate out of range: lat {lat}, lon {lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },

    #[error("ring has {vertices} distinct vertices, need at least 3")]
    DegenerateRing { vertices: usize },

    #[error("value {value} outside extent [{min}, {max}]")]
    OutsideExtent { value: f64, min: f64, max: f64 },

    #[error("invalid filter interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid color scale: {0}")]
    InvalidScale(&'static str),

    #[error("unknown color scale {0:?}")]
    UnknownScale(String),

    #[error("{countries} countries exceed the 254 available grey levels")]
    AtlasCapacity { countries: usize },

    #[error("atlas size {width}x{height} invalid: width must be 2*height and at least 512")]
    AtlasSize { width: u32, height: u32 },

    #[error("lookup atlas holds grey level {0} which is not in the grey map")]
    UnknownGreyLevel(u8),

    #[error("expected a lookup image")]
    NotLookupImage,
}
