use alloc::string::{String, ToString};
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// ISO 3166-1 alpha-3 country code, always three ASCII uppercase letters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iso3([u8; 3]);

impl Iso3 {
    pub fn new(code: &str) -> Result<Self, Error> {
        match code.as_bytes() {
            &[a, b, c] if [a, b, c].iter().all(u8::is_ascii_uppercase) => Ok(Iso3([a, b, c])),
            _ => Err(Error::InvalidIso3(code.to_string())),
        }
    }

    pub fn as_str(&self) -> &str {
        // only ever built from ASCII uppercase bytes
        core::str::from_utf8(&self.0).unwrap_or("???")
    }
}

impl FromStr for Iso3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Iso3::new(s)
    }
}

impl fmt::Display for Iso3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Iso3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Iso3({})", self.as_str())
    }
}

impl Serialize for Iso3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Iso3 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Iso3::new(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_three_uppercase_letters() {
        assert_eq!(Iso3::new("PRT").unwrap().as_str(), "PRT");
    }

    #[test]
    fn rejects_malformed_codes() {
        for bad in ["prt", "PR", "PRTX", "P1T", "", "ÅBC"] {
            assert!(Iso3::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn orders_lexicographically() {
        assert!(Iso3::new("ABW").unwrap() < Iso3::new("AFG").unwrap());
    }
}
