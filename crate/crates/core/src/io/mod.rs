//! Instance files, random instances and SVG output.

pub mod generate;
pub mod instance;
pub mod svg;

pub use generate::{generate, generate_disks, GeneratorSpec, Mode};
pub use instance::{parse_instance, InstanceFile, Metadata, SchemaError};
pub use svg::render_svg;
