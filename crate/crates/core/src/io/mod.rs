//! Export, manifests and the ambient lift.

mod export;
mod lift;
mod manifest;

pub use export::{
    export_csv, export_obj, field_rows, format_g17, import_csv, read_csv, write_csv, write_obj, CsvRow, CSV_HEADER,
};
pub use lift::{
    ambient_mse, lift_and_verify, random_ambient_samples, reduction_coordinates, AmbientReport, AmbientSample,
    QuotientProfile,
};
pub use manifest::{sha256_hex, ArtifactHash, RunManifest, Timing, MANIFEST_VERSION};
