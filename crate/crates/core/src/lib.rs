pub mod circle;
pub mod error;
pub mod symplectic;
pub mod path;
pub mod index;
pub mod iteration;
pub mod jump;
pub mod harness;
