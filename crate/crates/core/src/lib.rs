//! Design, folding simulation and fabrication export for Yoshimura-pattern
//! origami grippers.

pub mod error;
pub mod grasp;
pub mod io;
pub mod kinematics;
pub mod mechanics;
pub mod optimize;
pub mod pattern;

/// Name and version embedded in every exported file.
pub const TOOLKIT_VERSION: &str = concat!("yoshimura-gripper ", env!("CARGO_PKG_VERSION"));
