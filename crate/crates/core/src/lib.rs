//! Engine for an interactive demographic globe.
//!
//! The crate is `no_std` and only needs `alloc`. It holds the data model and
//! every pure algorithm: per-year extents and min/max normalization, color and
//! height encodings, the equirectangular lookup/outline/blend atlas with its
//! grey-level country map, point-in-polygon picking, and the exploration
//! state machine (filters, year changes, search, selection).
//!
//! Parsing, file formats, PNG encoding and the HTTP service live in the
//! `livingglobe` crate.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications, missing_copy_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod atlas;
mod error;
pub mod explore;
mod iso;
pub mod mapping;
pub mod store;

pub use error::Error;
pub use iso::Iso3;

pub type Result<T, E = Error> = core::result::Result<T, E>;
