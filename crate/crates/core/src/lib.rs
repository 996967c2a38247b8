pub mod angles;
pub mod dynamics;
pub mod puzzle;
pub mod renorm;
pub mod lemmas;
pub mod modulus;

/// Crate version, recorded in run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
