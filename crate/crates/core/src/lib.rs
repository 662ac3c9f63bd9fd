pub mod criticality;
pub mod error;
pub mod exact_engine;
pub mod landscape;
pub mod linalg;
pub mod mc_sim;
pub mod monotonicity;
pub mod path_enumerator;
pub mod rational;
pub mod trajectory;

pub use error::{Error, Result};
pub use landscape::Landscape;
pub use rational::Rational;
