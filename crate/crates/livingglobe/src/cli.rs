//! `livingglobe` subcommands.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use livingglobe_core::explore::{country_detail, CountryDetail};
use livingglobe_core::mapping::{build_frame, MappingConfig, VisualFrame};
use livingglobe_core::store::Geography;
use livingglobe_core::Iso3;
use serde::{Deserialize, Serialize};

use crate::assets::{atlas_dir, build_atlas, write_atlas, DEFAULT_STROKE};
use crate::ingest::{parse_country_geography, parse_indicator_table, GeographyReport, ParseReport, TableSchema};
use crate::service::{parse_filters, serve, ServiceConfig};
use crate::Bundle;

#[derive(Debug, Parser)]
#[command(name = "livingglobe", version, about = "Demographic globe: ingest, atlas, serve")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse the indicator table and geography into a dataset bundle.
    Ingest {
        #[arg(long)]
        indicators: PathBuf,
        #[arg(long)]
        locations: PathBuf,
        #[arg(long)]
        borders: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render lookup/outline/blend PNGs and the grey map into BUNDLE/atlas.
    BuildAtlas {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value_t = 2048)]
        width: u32,
        /// Defaults to width / 2; anything else is rejected.
        #[arg(long)]
        height: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_STROKE)]
        stroke: u32,
    },
    /// Serve the HTTP API, atlas assets and an optional static UI.
    Serve {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Directory served at `/` (the browser UI).
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        /// Mapping config JSON used when a request gives none.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write one year's frame as JSON.
    ExportFrame {
        #[arg(long, default_value = ".")]
        bundle: PathBuf,
        #[arg(long)]
        year: i32,
        /// Mapping config JSON; the default mapping when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Filter intervals JSON, `{"height": [lo, hi] | null, ...}`.
        #[arg(long)]
        filters: Option<PathBuf>,
        /// Include the numeric readout for this country.
        #[arg(long)]
        select: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Serialize)]
pub struct IngestSummary {
    pub bundle: PathBuf,
    pub countries: usize,
    pub years: usize,
    pub indicators: usize,
    pub table: ParseReport,
    pub geography: GeographyReport,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn ingest(
    indicators: &Path,
    locations: &Path,
    borders: &Path,
    out: &Path,
) -> anyhow::Result<IngestSummary> {
    let (table, table_report) = parse_indicator_table(&read(indicators)?, &TableSchema::default())
        .with_context(|| format!("parsing {}", indicators.display()))?;
    let (records, geo_report) = parse_country_geography(&read(locations)?, &read(borders)?)
        .with_context(|| format!("parsing {} / {}", locations.display(), borders.display()))?;
    let bundle = Bundle {
        table,
        geography: Geography::new(records)?,
    };
    let path = bundle.write(out)?;
    Ok(IngestSummary {
        bundle: path,
        countries: bundle.table.countries().count(),
        years: bundle.table.years().len(),
        indicators: bundle.table.indicators().len(),
        table: table_report,
        geography: geo_report,
    })
}

pub fn atlas_height(width: u32, height: Option<u32>) -> anyhow::Result<u32> {
    let derived = width / 2;
    match height {
        Some(h) if h != derived || !width.is_multiple_of(2) => {
            bail!("atlas {width}x{h} rejected: width must be exactly twice the height")
        }
        _ if !width.is_multiple_of(2) => bail!("atlas width {width} must be even"),
        _ => Ok(derived),
    }
}

/// Export document: the frame plus, optionally, the selected country's readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameExport {
    pub frame: VisualFrame,
    pub selected: Option<CountryDetail>,
}

pub fn export_frame(
    bundle: &Bundle,
    year: i32,
    config: &MappingConfig,
    filters_json: Option<&str>,
    select: Option<Iso3>,
) -> anyhow::Result<FrameExport> {
    let filters = parse_filters(filters_json).map_err(|e| anyhow::anyhow!(e.error))?;
    let frame = build_frame(&bundle.table, &bundle.geography, config, year, &filters)?;
    let selected = select
        .map(|c| country_detail(&bundle.table, &bundle.geography, c, year))
        .transpose()?;
    Ok(FrameExport { frame, selected })
}

fn load_config(path: Option<&Path>) -> anyhow::Result<MappingConfig> {
    match path {
        None => Ok(MappingConfig::default()),
        Some(p) => serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display())),
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest {
            indicators,
            locations,
            borders,
            out,
        } => {
            let start = Instant::now();
            let summary = ingest(&indicators, &locations, &borders, &out)?;
            if summary.table.rows == 0 {
                log::warn!("{} holds no data rows", indicators.display());
            }
            println!(
                "wrote {} in {:.2?}: {} countries x {} years x {} indicators; {} rows, {} cells, {} missing, {} warnings, {} rejected rows; {} geography records ({} rejected, {} unmatched borders, {} without borders)",
                summary.bundle.display(),
                start.elapsed(),
                summary.countries,
                summary.years,
                summary.indicators,
                summary.table.rows,
                summary.table.stored_cells,
                summary.table.missing_cells,
                summary.table.warnings.len(),
                summary.table.rejected.len(),
                summary.geography.records,
                summary.geography.rejected.len(),
                summary.geography.unmatched_borders.len(),
                summary.geography.without_borders.len(),
            );
            for r in &summary.table.rejected {
                log::warn!("line {}: {}", r.line, r.reason);
            }
            for r in &summary.geography.rejected {
                log::warn!("{r}");
            }
        }
        Command::BuildAtlas {
            bundle,
            width,
            height,
            stroke,
        } => {
            let height = atlas_height(width, height)?;
            let data = Bundle::read(&bundle)?;
            let set = build_atlas(&data, width, height, stroke)?;
            for c in &set.report.conflicts {
                log::info!("{} overlaps {} on {} px; kept {}", c.dropped, c.kept, c.pixels, c.kept);
            }
            for path in write_atlas(&set, &atlas_dir(&bundle))? {
                println!("wrote {}", path.display());
            }
            println!(
                "{} countries, {} sub-pixel stamped, {} overlaps, {} unrendered",
                set.greymap.len(),
                set.report.stamped.len(),
                set.report.conflicts.len(),
                set.report.unrendered.len()
            );
        }
        Command::Serve {
            bundle,
            port,
            host,
            static_dir,
            config,
        } => {
            let service = ServiceConfig {
                bundle_dir: bundle,
                host,
                port,
                static_dir,
                default_config: load_config(config.as_deref())?,
            };
            tokio::runtime::Runtime::new()?.block_on(serve(service))?;
        }
        Command::ExportFrame {
            bundle,
            year,
            config,
            filters,
            select,
            out,
        } => {
            let data = Bundle::read(&bundle)?;
            let config = load_config(config.as_deref())?;
            let filters = filters.as_deref().map(read).transpose()?;
            let select = select.map(|s| Iso3::new(&s.to_ascii_uppercase())).transpose()?;
            let export = export_frame(&data, year, &config, filters.as_deref(), select)?;
            fs::write(&out, serde_json::to_vec(&export)?)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}
