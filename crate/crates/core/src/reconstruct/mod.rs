//! Cube recovery: stripe localisation, frame registration, slice placement
//! and gap filling.

mod assemble;
mod gaps;
mod register;
mod stripe;

pub use assemble::{
    assemble, diagnostics_csv, output_groups, AssembleOptions, FrameDiagnostic, FrameStatus,
    ReconstructedCube,
};
pub use gaps::fill_gaps;
pub use register::{masked_ncc, register_frame, register_planes, FrameAlignment, DEFAULT_SEARCH_RADIUS};
pub use stripe::{
    column_profile, edge_dark_runs, locate_stripe, locate_stripe_in, locate_stripe_within,
    StripeEstimate, DEFAULT_STRIPE_THRESHOLD,
};
