use alloc::vec::Vec;

use super::continuous_ring;
use crate::store::{CountryRecord, GeoPoint};
use crate::{Iso3, Result};

fn crossings(ring: &[(f64, f64)], lon: f64, lat: f64) -> usize {
    let n = ring.len();
    let mut count = 0;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = ring[i];
        let (xj, yj) = ring[j];
        if (yi > lat) != (yj > lat) && lon < (xj - xi) * (lat - yi) / (yj - yi) + xi {
            count += 1;
        }
        j = i;
    }
    count
}

fn contains(record: &CountryRecord, lat: f64, lon: f64) -> bool {
    let rings: Vec<Vec<(f64, f64)>> = record
        .rings
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| continuous_ring(r))
        .collect();
    [0.0, 360.0, -360.0].iter().any(|shift| {
        let total: usize = rings.iter().map(|r| crossings(r, lon + shift, lat)).sum();
        total % 2 == 1
    })
}

/// Even-odd ray casting against every country's border rings. Where
/// countries overlap the first by ISO code wins. Points inside a hole ring
/// are outside.
pub fn point_in_country(lat: f64, lon: f64, records: &[CountryRecord]) -> Result<Option<Iso3>> {
    GeoPoint::new(lat, lon)?;
    let mut order: Vec<&CountryRecord> = records.iter().collect();
    order.sort_by_key(|r| r.iso3);
    Ok(order
        .into_iter()
        .find(|r| contains(r, lat, lon))
        .map(|r| r.iso3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ring(pts: &[(f64, f64)]) -> Vec<GeoPoint> {
        pts.iter().map(|&(lon, lat)| GeoPoint { lat, lon }).collect()
    }

    fn square(code: &str, lon0: f64, lat0: f64, size: f64) -> CountryRecord {
        CountryRecord::new(
            Iso3::new(code).unwrap(),
            code,
            lat0 + size / 2.0,
            lon0 + size / 2.0,
            vec![ring(&[
                (lon0, lat0),
                (lon0 + size, lat0),
                (lon0 + size, lat0 + size),
                (lon0, lat0 + size),
            ])],
        )
        .unwrap()
    }

    #[test]
    fn inside_and_outside_a_square() {
        let recs = [square("SQR", 10.0, 10.0, 10.0)];
        assert_eq!(point_in_country(15.0, 15.0, &recs).unwrap().unwrap().as_str(), "SQR");
        assert_eq!(point_in_country(0.0, 0.0, &recs).unwrap(), None);
        assert!(point_in_country(95.0, 0.0, &recs).is_err());
    }

    #[test]
    fn hole_ring_is_outside() {
        let mut r = square("HOL", 0.0, 0.0, 10.0);
        r.rings.push(ring(&[(4.0, 4.0), (6.0, 4.0), (6.0, 6.0), (4.0, 6.0)]));
        let recs = [r];
        assert_eq!(point_in_country(5.0, 5.0, &recs).unwrap(), None);
        assert!(point_in_country(2.0, 2.0, &recs).unwrap().is_some());
    }

    #[test]
    fn overlap_goes_to_first_code() {
        let recs = [square("ZZZ", 0.0, 0.0, 10.0), square("AAA", 5.0, 5.0, 10.0)];
        assert_eq!(point_in_country(7.0, 7.0, &recs).unwrap().unwrap().as_str(), "AAA");
        assert_eq!(point_in_country(2.0, 2.0, &recs).unwrap().unwrap().as_str(), "ZZZ");
    }

    #[test]
    fn ring_around_the_pole() {
        let cap = CountryRecord::new(
            Iso3::new("ATA").unwrap(),
            "Antarctica",
            -80.0,
            0.0,
            vec![ring(&[(-180.0, -70.0), (-60.0, -65.0), (60.0, -70.0), (180.0, -70.0), (180.0, -90.0), (-180.0, -90.0)])],
        )
        .unwrap();
        let recs = [cap];
        assert!(point_in_country(-85.0, 0.0, &recs).unwrap().is_some());
        assert!(point_in_country(-75.0, 179.0, &recs).unwrap().is_some());
        assert!(point_in_country(-60.0, 0.0, &recs).unwrap().is_none());
    }

    #[test]
    fn ring_crossing_the_antimeridian() {
        let r = CountryRecord::new(
            Iso3::new("FJI").unwrap(),
            "Fiji",
            -17.0,
            178.0,
            vec![ring(&[(175.0, -20.0), (-175.0, -20.0), (-175.0, -15.0), (175.0, -15.0)])],
        )
        .unwrap();
        let recs = [r];
        assert!(point_in_country(-17.0, 179.0, &recs).unwrap().is_some());
        assert!(point_in_country(-17.0, -178.0, &recs).unwrap().is_some());
        assert_eq!(point_in_country(-17.0, 0.0, &recs).unwrap(), None);
        assert_eq!(point_in_country(-17.0, 170.0, &recs).unwrap(), None);
    }
}
