//! Herd spaces, herd covers and critical cones of flocks of planes in PG(3,q).

pub mod equiv;
pub mod error;
pub mod families;
pub mod flock;
pub mod gf;
pub mod herd;
pub mod linalg;
pub mod projgeom;
pub mod selfcheck;
pub mod smallq;
pub mod zspace;

pub use error::{Error, Result};
pub use flock::{Flock, StarStatus};
pub use gf::{Felt, Field};
pub use herd::{HerdSpace, Selection};
pub use zspace::{ZClass, ZFunc};
