pub mod cli;
pub mod config;
pub mod fs;
pub mod obj;
pub mod svg;
pub mod tables;

pub use config::{load_config, DesignConfig, EnergySettings};
pub use obj::{export_obj, parse_obj, ObjMesh};
pub use svg::{export_svg, parse_svg, SvgDocument, SvgStyle};
