//! Hodge operators on exterior powers of hermitian spaces.

mod arith;
pub mod scalars;
pub mod linalg;
pub mod forms;
pub mod exterior;
pub mod hodge;
pub mod kmodule;
pub mod compalg;
pub mod groups;
pub mod geometry;
