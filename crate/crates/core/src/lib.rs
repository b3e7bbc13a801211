pub mod constructions;
pub mod diagram;
pub mod error;
pub mod khcomplex;
pub mod linalg;
pub mod movie;
pub mod steenrod;
pub mod verify;

pub use diagram::{Crossing, Diagram, EdgeId, Sign, Tangle};
pub use movie::{Move, MoveKind, Movie};
pub use error::{KhError, Result};
