//! Resolution-exact subdivision path planning for a rigid triangle robot
//! (the "Delta robot") moving in SE(3) among polyhedral obstacles.

pub mod footprint;
pub mod geom;
pub mod io;
pub mod oracle;
pub mod planner;
pub mod predicate;
pub mod sep;
pub mod so3;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
