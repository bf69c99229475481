//! Equirectangular texture atlas for country coloring and picking.
//!
//! Three static layers are produced here: `lookup` (one grey level per
//! country, sampled nearest-neighbor to identify the country under the
//! cursor), `outline` (frontier lines) and `blend` (decorative sea gradient).
//! [`point_in_country`] answers the same question as the lookup texture
//! directly from the border polygons and serves as its oracle.

mod grey;
mod pip;
mod projection;
mod raster;

pub use grey::{assign_grey_levels, GreyMap, HIGHLIGHT_LEVEL, MAX_COUNTRIES, SEA_LEVEL};
pub use pip::point_in_country;
pub use projection::{continuous_ring, latlon_to_uv, uv_to_latlon, Uv};
pub use raster::{
    make_blend, make_blend_with, pick_country, rasterize_lookup, rasterize_outline,
    rasterize_outline_with, AtlasImage, AtlasKind, LookupRaster, LookupReport, OverlapConflict,
    BLEND_BOTTOM, BLEND_TOP, OUTLINE_COLOR, STAMP_SEARCH_RADIUS,
};

pub const DEFAULT_WIDTH: u32 = 2048;
pub const DEFAULT_HEIGHT: u32 = 1024;
pub const MIN_WIDTH: u32 = 512;

/// Width must be twice the height and at least [`MIN_WIDTH`].
pub fn check_size(width: u32, height: u32) -> crate::Result<()> {
    if width < MIN_WIDTH || u64::from(width) != 2 * u64::from(height) {
        return Err(crate::Error::AtlasSize { width, height });
    }
    Ok(())
}
