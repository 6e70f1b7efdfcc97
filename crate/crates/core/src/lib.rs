pub mod complex;
pub mod error;
pub mod linalg;
pub mod ring;
pub mod specfile;
pub mod umodule;
pub mod verify;

pub use error::{Error, Result};
