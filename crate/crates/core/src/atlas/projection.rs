use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::store::GeoPoint;
use crate::Result;

/// Texture coordinates: `u` grows eastward from lon -180, `v` grows southward
/// from lat 90.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uv {
    pub u: f64,
    pub v: f64,
}

pub fn latlon_to_uv(lat: f64, lon: f64) -> Result<Uv> {
    GeoPoint::new(lat, lon)?;
    Ok(Uv {
        u: (lon + 180.0) / 360.0,
        v: (90.0 - lat) / 180.0,
    })
}

/// Inverse of [`latlon_to_uv`]; returns `(lat, lon)`.
pub fn uv_to_latlon(uv: Uv) -> (f64, f64) {
    (90.0 - uv.v * 180.0, uv.u * 360.0 - 180.0)
}

/// Longitude step folded into [-180, 180].
fn wrap_step(d: f64) -> f64 {
    if d > 180.0 {
        d - 360.0
    } else if d < -180.0 {
        d + 360.0
    } else {
        d
    }
}

/// The ring as (lon, lat) with longitude made continuous, so a ring that
/// crosses the antimeridian may extend past +/-180. A ring that winds all the
/// way around a pole is closed through that pole, which makes it a plain
/// polygon spanning 360 degrees of longitude.
pub fn continuous_ring(ring: &[GeoPoint]) -> Vec<(f64, f64)> {
    let (Some(first), Some(last)) = (ring.first(), ring.last()) else {
        return Vec::new();
    };
    let mut lon = first.lon;
    let mut pts = Vec::with_capacity(ring.len() + 3);
    pts.push((lon, first.lat));
    for w in ring.windows(2) {
        lon += wrap_step(w[1].lon - w[0].lon);
        pts.push((lon, w[1].lat));
    }
    let closed = lon + wrap_step(first.lon - last.lon);
    if libm::fabs(closed - first.lon) > 180.0 {
        let mean = ring.iter().map(|p| p.lat).sum::<f64>() / ring.len() as f64;
        let pole = if mean < 0.0 { -90.0 } else { 90.0 };
        if closed != lon || first.lat != last.lat {
            pts.push((closed, first.lat));
        }
        pts.push((closed, pole));
        pts.push((first.lon, pole));
    }
    pts
}
