pub mod arith;
pub mod characters;
pub mod cyclotomic;
pub mod divisor;
pub mod error;
pub mod field_tower;
pub mod fourier;
pub mod identity;
pub mod norm;
pub mod stalk;
pub mod suite;

pub use characters::{AddCharacter, CharContext, MultCharacter};
pub use cyclotomic::CycloValue;
pub use divisor::{ANElement, Divisor, XPoint};
pub use error::{Error, Result};
pub use field_tower::{FieldElement, FieldTower, TowerOptions};
