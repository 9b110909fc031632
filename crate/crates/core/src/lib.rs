//! Tools for planning and scoring audiovisual (McGurk) speech illusions and
//! for generating Yanny/Laurel-style auditory illusion candidates.

pub mod audio;
pub mod corpus;
pub mod data;
pub mod error;
pub mod features;
pub mod mcgurk;
pub mod phoneme;
pub mod ridge;
pub mod sentence;
pub mod synthetic;

pub use error::{Error, Result};
