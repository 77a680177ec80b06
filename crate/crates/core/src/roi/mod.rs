//! Region-of-interest workflow on an RGB preview: edges, regions, restricted
//! scan plans and region spectra.

mod canny;
mod plan;
mod segment;
mod spectrum;

pub use canny::{canny, CannyParams, EdgeMap};
pub use plan::{region_columns, regions_to_plan};
pub use segment::{
    close3, connected_components, fill_holes, label_regions, segment, RegionInfo, RegionLabelMap,
    DEFAULT_MIN_AREA,
};
pub use spectrum::{block_origin, labels_pgm, region_mean_spectrum, spectrum_csv, DEFAULT_BLOCK};
