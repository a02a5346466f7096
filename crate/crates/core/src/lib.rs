//! Maniplexes, voltage graphs and polytopality checks for two-orbit
//! constructions.

pub mod colorset;
pub mod config;
pub mod constructions;
pub mod error;
pub mod flagcore;
pub mod perm;
pub mod polytopality;
pub mod poset;
pub mod premaniplex;
pub mod symmetry;
pub mod voltage;

pub use colorset::ColorSet;
pub use config::Config;
pub use error::{ForgeError, Result};
pub use flagcore::Maniplex;
