//! Unitary representations of Sp(4,R) on holomorphic functions over the Lie ball.

pub mod characters;
pub mod cquat;
pub mod error;
pub mod fockbasis;
pub mod gegenbauer;
pub mod halfint;
pub mod harmonics;
pub mod matrix_elements;
pub mod series;
pub mod sp4;
pub mod verify;
pub mod wigner;

pub use cquat::{CQuat, C64};
pub use error::{Error, Result};
pub use halfint::HalfInt;
pub use sp4::Sp4Element;
