use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{check_size, continuous_ring, GreyMap, Uv, SEA_LEVEL};
use crate::store::{CountryRecord, GeoPoint};
use crate::{Error, Iso3, Result};

/// Default frontier color (RGBA).
pub const OUTLINE_COLOR: [u8; 4] = [32, 32, 32, 255];
/// Default sea gradient endpoints (RGBA), top row and bottom row.
pub const BLEND_TOP: [u8; 4] = [16, 48, 96, 255];
pub const BLEND_BOTTOM: [u8; 4] = [4, 16, 40, 255];
/// How far, in pixels, a sub-pixel country may be moved off its centroid.
pub const STAMP_SEARCH_RADIUS: isize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtlasKind {
    /// One 8-bit grey channel.
    Lookup,
    /// RGBA.
    Outline,
    /// RGBA.
    Blend,
}

impl AtlasKind {
    pub fn channels(self) -> usize {
        match self {
            AtlasKind::Lookup => 1,
            AtlasKind::Outline | AtlasKind::Blend => 4,
        }
    }
}

/// Row-major 8-bit raster in equirectangular projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtlasImage {
    pub kind: AtlasKind,
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl AtlasImage {
    pub fn new(kind: AtlasKind, width: u32, height: u32) -> Self {
        let len = width as usize * height as usize * kind.channels();
        AtlasImage {
            kind,
            width,
            height,
            pixels: vec![0; len],
        }
    }

    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let c = self.kind.channels();
        let i = (y as usize * self.width as usize + x as usize) * c;
        &self.pixels[i..i + c]
    }

    /// Pixel count per grey level of a lookup image.
    pub fn grey_histogram(&self) -> [usize; 256] {
        let mut hist = [0usize; 256];
        if self.kind == AtlasKind::Lookup {
            for &p in &self.pixels {
                hist[p as usize] += 1;
            }
        }
        hist
    }

    /// Pixels that are not fully zero/transparent.
    pub fn painted_count(&self) -> usize {
        match self.kind {
            AtlasKind::Lookup => self.pixels.iter().filter(|&&p| p != 0).count(),
            _ => self.pixels.chunks_exact(4).filter(|px| px[3] != 0).count(),
        }
    }
}

/// The continuous ring; when it extends past the antimeridian a copy shifted
/// by 360 degrees is added, so that clipping both to the image splits the
/// ring at the seam.
fn seam_split(ring: &[GeoPoint]) -> Vec<Vec<(f64, f64)>> {
    let pts = continuous_ring(ring);
    if pts.is_empty() {
        return Vec::new();
    }
    let (lo, hi) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    let mut out = Vec::new();
    if hi > 180.0 {
        out.push(pts.iter().map(|&(x, y)| (x - 360.0, y)).collect());
    }
    if lo < -180.0 {
        out.push(pts.iter().map(|&(x, y)| (x + 360.0, y)).collect());
    }
    out.push(pts);
    out
}

fn to_pixel((lon, lat): (f64, f64), w: f64, h: f64) -> (f64, f64) {
    ((lon + 180.0) / 360.0 * w, (90.0 - lat) / 180.0 * h)
}

/// Closed pixel-space edges of every ring of a country, seam copies included.
fn pixel_edges(record: &CountryRecord, w: u32, h: u32) -> Vec<[(f64, f64); 2]> {
    let (wf, hf) = (f64::from(w), f64::from(h));
    let mut edges = Vec::new();
    for ring in &record.rings {
        for part in seam_split(ring) {
            let px: Vec<_> = part.into_iter().map(|p| to_pixel(p, wf, hf)).collect();
            for i in 0..px.len() {
                let a = px[i];
                let b = px[(i + 1) % px.len()];
                if a != b {
                    edges.push([a, b]);
                }
            }
        }
    }
    edges
}

fn ceil_index(x: f64, limit: u32) -> usize {
    libm::ceil(x).clamp(0.0, f64::from(limit)) as usize
}

/// Pixels whose centers fall inside the country under the even-odd rule,
/// as (row, first column, end column) spans.
fn scanline_spans(record: &CountryRecord, w: u32, h: u32) -> Vec<(usize, usize, usize)> {
    let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for [(x0, y0), (x1, y1)] in pixel_edges(record, w, h) {
        if y0 == y1 {
            continue;
        }
        let (ya, yb) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
        // rows whose center j + 0.5 lies in [ya, yb)
        for j in ceil_index(ya - 0.5, h)..ceil_index(yb - 0.5, h) {
            let yc = j as f64 + 0.5;
            let x = x0 + (yc - y0) * (x1 - x0) / (y1 - y0);
            rows.entry(j).or_default().push(x);
        }
    }
    let mut spans = Vec::new();
    for (j, mut xs) in rows {
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let start = ceil_index(pair[0] - 0.5, w);
            let end = ceil_index(pair[1] - 0.5, w);
            if start < end {
                spans.push((j, start, end));
            }
        }
    }
    spans
}

/// Area centroid of the largest ring, folded back into [-180, 180).
fn anchor(record: &CountryRecord) -> Option<(f64, f64)> {
    let mut best: Option<(f64, (f64, f64))> = None;
    for ring in &record.rings {
        if let Some(part) = seam_split(ring).pop() {
            let n = part.len();
            let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
            for i in 0..n {
                let (x0, y0) = part[i];
                let (x1, y1) = part[(i + 1) % n];
                let cross = x0 * y1 - x1 * y0;
                a2 += cross;
                cx += (x0 + x1) * cross;
                cy += (y0 + y1) * cross;
            }
            let center = if a2.abs() > 1e-12 {
                (cx / (3.0 * a2), cy / (3.0 * a2))
            } else {
                let (sx, sy) = part.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.0, sy + p.1));
                (sx / n as f64, sy / n as f64)
            };
            if best.is_none_or(|(area, _)| a2.abs() > area) {
                best = Some((a2.abs(), center));
            }
        }
    }
    best.map(|(_, (lon, lat))| {
        let lon = libm::fmod(lon + 180.0, 360.0);
        let lon = if lon < 0.0 { lon + 360.0 } else { lon } - 180.0;
        (lon, lat.clamp(-90.0, 90.0))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapConflict {
    pub kept: Iso3,
    pub dropped: Iso3,
    pub pixels: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LookupReport {
    /// Pixels claimed by two countries, resolved to the first by ISO code.
    pub conflicts: Vec<OverlapConflict>,
    /// Countries smaller than a pixel, stamped at or near their centroid.
    pub stamped: Vec<Iso3>,
    /// Countries in the grey map that ended up with no pixel.
    pub unrendered: Vec<Iso3>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupRaster {
    pub image: AtlasImage,
    pub report: LookupReport,
}

/// Fills each country's territory with its grey level by even-odd scanline
/// fill at pixel centers, without anti-aliasing. Countries are drawn in ISO
/// order and a pixel keeps the first country that claims it. A country that
/// covers no pixel center is stamped on the pixel holding its centroid, or
/// the nearest pixel that does not erase another country.
/// Offsets on the square ring at Chebyshev distance `r`, row by row.
fn ring_offsets(r: isize) -> impl Iterator<Item = (isize, isize)> {
    (-r..=r).flat_map(move |dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter(move |(dx, dy)| dx.abs().max(dy.abs()) == r)
}

pub fn rasterize_lookup(
    records: &[CountryRecord],
    greymap: &GreyMap,
    width: u32,
    height: u32,
) -> Result<LookupRaster> {
    check_size(width, height)?;
    let mut image = AtlasImage::new(AtlasKind::Lookup, width, height);
    let w = width as usize;
    let mut order: Vec<&CountryRecord> = records
        .iter()
        .filter(|r| greymap.level(r.iso3).is_some())
        .collect();
    order.sort_by_key(|r| r.iso3);

    let mut conflicts: BTreeMap<(Iso3, Iso3), usize> = BTreeMap::new();
    let mut owned: BTreeMap<Iso3, usize> = BTreeMap::new();
    for record in &order {
        let level = greymap.level(record.iso3).expect("filtered above");
        let mut count = 0;
        for (j, start, end) in scanline_spans(record, width, height) {
            for px in &mut image.pixels[j * w + start..j * w + end] {
                if *px == SEA_LEVEL {
                    *px = level;
                    count += 1;
                } else if *px != level {
                    let kept = greymap.country(*px).expect("only mapped levels are written");
                    *conflicts.entry((kept, record.iso3)).or_default() += 1;
                }
            }
        }
        owned.insert(record.iso3, count);
    }

    let mut report = LookupReport {
        conflicts: conflicts
            .into_iter()
            .map(|((kept, dropped), pixels)| OverlapConflict {
                kept,
                dropped,
                pixels,
            })
            .collect(),
        ..LookupReport::default()
    };

    let hgt = height as usize;
    let mut stamped_at: BTreeSet<usize> = BTreeSet::new();
    for record in &order {
        if owned[&record.iso3] > 0 {
            continue;
        }
        let Some((lon, lat)) = anchor(record) else {
            continue;
        };
        let (x, y) = to_pixel((lon, lat), f64::from(width), f64::from(height));
        let x = (libm::floor(x).max(0.0) as usize).min(w - 1);
        let y = (libm::floor(y).max(0.0) as usize).min(hgt - 1);
        // the centroid pixel unless it would erase another country's only
        // pixel; then the nearest pixel that would not
        let free = |idx: usize| {
            let px = image.pixels[idx];
            !stamped_at.contains(&idx)
                && (px == SEA_LEVEL
                    || greymap.country(px).is_some_and(|c| owned.get(&c).is_some_and(|n| *n > 1)))
        };
        let Some(idx) = (0..=STAMP_SEARCH_RADIUS)
            .flat_map(ring_offsets)
            .filter_map(|(dx, dy)| {
                let yy = y.checked_add_signed(dy).filter(|v| *v < hgt)?;
                let xx = (x as isize + dx).rem_euclid(w as isize) as usize;
                Some(yy * w + xx)
            })
            .find(|idx| free(*idx))
        else {
            continue;
        };
        let previous = image.pixels[idx];
        if let Some(c) = greymap.country(previous) {
            *owned.get_mut(&c).expect("every drawn country is counted") -= 1;
        }
        stamped_at.insert(idx);
        image.pixels[idx] = greymap.level(record.iso3).expect("filtered above");
        owned.insert(record.iso3, 1);
        report.stamped.push(record.iso3);
    }

    let hist = image.grey_histogram();
    report.unrendered = greymap
        .iter()
        .filter(|(level, _)| hist[*level as usize] == 0)
        .map(|(_, c)| c)
        .collect();
    Ok(LookupRaster { image, report })
}

pub fn rasterize_outline(
    records: &[CountryRecord],
    width: u32,
    height: u32,
    stroke: u32,
) -> Result<AtlasImage> {
    rasterize_outline_with(records, width, height, stroke, OUTLINE_COLOR)
}

/// Draws every ring edge with a square brush `stroke` pixels wide on a
/// transparent background. The brush covers columns
/// `floor(x) - (stroke - 1) / 2 ..= floor(x) + stroke / 2`, likewise for rows.
pub fn rasterize_outline_with(
    records: &[CountryRecord],
    width: u32,
    height: u32,
    stroke: u32,
    color: [u8; 4],
) -> Result<AtlasImage> {
    check_size(width, height)?;
    let stroke = stroke.max(1) as i64;
    let mut image = AtlasImage::new(AtlasKind::Outline, width, height);
    let (w, h) = (i64::from(width), i64::from(height));
    let (before, after) = ((stroke - 1) / 2, stroke / 2);
    let mut stamp = |x: f64, y: f64| {
        let (cx, cy) = (libm::floor(x) as i64, libm::floor(y) as i64);
        for py in (cy - before).max(0)..=(cy + after).min(h - 1) {
            for px in (cx - before).max(0)..=(cx + after).min(w - 1) {
                let i = (py * w + px) as usize * 4;
                image.pixels[i..i + 4].copy_from_slice(&color);
            }
        }
    };
    for record in records {
        for [(x0, y0), (x1, y1)] in pixel_edges(record, width, height) {
            let steps = libm::ceil((x1 - x0).abs().max((y1 - y0).abs()) * 2.0).max(1.0) as usize;
            for k in 0..=steps {
                let t = k as f64 / steps as f64;
                stamp(x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            }
        }
    }
    Ok(image)
}

pub fn make_blend(width: u32, height: u32) -> AtlasImage {
    make_blend_with(width, height, BLEND_TOP, BLEND_BOTTOM)
}

/// Vertical gradient from `top` (first row) to `bottom` (last row).
pub fn make_blend_with(width: u32, height: u32, top: [u8; 4], bottom: [u8; 4]) -> AtlasImage {
    let mut image = AtlasImage::new(AtlasKind::Blend, width, height);
    let row_len = width as usize * 4;
    for y in 0..height as usize {
        let t = if height > 1 {
            y as f64 / f64::from(height - 1)
        } else {
            0.0
        };
        let mut px = [0u8; 4];
        for c in 0..4 {
            let a = f64::from(top[c]);
            let b = f64::from(bottom[c]);
            px[c] = libm::floor(a + t * (b - a) + 0.5) as u8;
        }
        for chunk in image.pixels[y * row_len..(y + 1) * row_len].chunks_exact_mut(4) {
            chunk.copy_from_slice(&px);
        }
    }
    image
}

/// Nearest-pixel sample of the lookup image, decoded through the grey map.
pub fn pick_country(uv: Uv, lookup: &AtlasImage, greymap: &GreyMap) -> Result<Option<Iso3>> {
    if lookup.kind != AtlasKind::Lookup {
        return Err(Error::NotLookupImage);
    }
    let clamp = |t: f64, n: u32| (libm::floor(t * f64::from(n)).max(0.0) as u32).min(n - 1);
    let x = clamp(uv.u, lookup.width);
    let y = clamp(uv.v, lookup.height);
    match lookup.pixel(x, y)[0] {
        SEA_LEVEL => Ok(None),
        level => greymap
            .country(level)
            .map(Some)
            .ok_or(Error::UnknownGreyLevel(level)),
    }
}
