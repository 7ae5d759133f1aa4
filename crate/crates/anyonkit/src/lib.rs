//! Model files, threaded braid-word search and the command-line front end
//! for [`anyonkit_core`].

pub mod cli;
pub mod json;
pub mod model_file;
pub mod parallel;

pub use anyonkit_core as core;
