//! Small reference systems for exercising the steppers.

mod linear;
mod toy;

pub use linear::LinearSystem;
pub use toy::CoupledToy;
