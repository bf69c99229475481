//! Atlas build: lookup/outline/blend PNGs plus the grey-level map.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use livingglobe_core::atlas::{
    assign_grey_levels, check_size, make_blend, rasterize_lookup, rasterize_outline, AtlasImage,
    AtlasKind, GreyMap, LookupReport,
};
use livingglobe_core::store::CountryRecord;

use crate::Bundle;

pub const ATLAS_DIR: &str = "atlas";
pub const LOOKUP_FILE: &str = "lookup.png";
pub const OUTLINE_FILE: &str = "outline.png";
pub const BLEND_FILE: &str = "blend.png";
pub const GREYMAP_FILE: &str = "greymap.json";
pub const DEFAULT_STROKE: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct AtlasSet {
    pub greymap: GreyMap,
    pub lookup: AtlasImage,
    pub outline: AtlasImage,
    pub blend: AtlasImage,
    pub report: LookupReport,
}

/// Only countries with borders take part in the atlas.
pub fn drawable(records: &[CountryRecord]) -> Vec<CountryRecord> {
    records.iter().filter(|r| !r.rings.is_empty()).cloned().collect()
}

pub fn build_atlas(bundle: &Bundle, width: u32, height: u32, stroke: u32) -> anyhow::Result<AtlasSet> {
    check_size(width, height)?;
    if stroke == 0 {
        bail!("stroke must be at least 1 pixel");
    }
    let records = drawable(bundle.geography.records());
    let greymap = assign_grey_levels(&records)?;
    let lookup = rasterize_lookup(&records, &greymap, width, height)?;
    let outline = rasterize_outline(&records, width, height, stroke)?;
    Ok(AtlasSet {
        greymap,
        lookup: lookup.image,
        outline,
        blend: make_blend(width, height),
        report: lookup.report,
    })
}

/// 8-bit PNG: greyscale without alpha for lookup images, RGBA otherwise.
pub fn encode_png(image: &AtlasImage) -> anyhow::Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, image.width, image.height);
        enc.set_color(match image.kind {
            AtlasKind::Lookup => png::ColorType::Grayscale,
            AtlasKind::Outline | AtlasKind::Blend => png::ColorType::Rgba,
        });
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header()?;
        writer.write_image_data(&image.pixels)?;
        writer.finish()?;
    }
    Ok(out)
}

pub fn decode_png(bytes: &[u8], kind: AtlasKind) -> anyhow::Result<AtlasImage> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0; reader.output_buffer_size().context("png too large")?];
    let info = reader.next_frame(&mut buf)?;
    let expected = match kind {
        AtlasKind::Lookup => png::ColorType::Grayscale,
        _ => png::ColorType::Rgba,
    };
    if info.color_type != expected || info.bit_depth != png::BitDepth::Eight {
        bail!("unexpected png format {:?}/{:?}", info.color_type, info.bit_depth);
    }
    buf.truncate(info.buffer_size());
    Ok(AtlasImage {
        kind,
        width: info.width,
        height: info.height,
        pixels: buf,
    })
}

pub fn atlas_dir(bundle_dir: &Path) -> PathBuf {
    bundle_dir.join(ATLAS_DIR)
}

/// Writes the four atlas files and returns their paths.
pub fn write_atlas(set: &AtlasSet, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for (name, image) in [
        (LOOKUP_FILE, &set.lookup),
        (OUTLINE_FILE, &set.outline),
        (BLEND_FILE, &set.blend),
    ] {
        let path = dir.join(name);
        fs::write(&path, encode_png(image)?).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    let path = dir.join(GREYMAP_FILE);
    fs::write(&path, serde_json::to_string_pretty(&set.greymap)?)
        .with_context(|| format!("writing {}", path.display()))?;
    written.push(path);
    Ok(written)
}
