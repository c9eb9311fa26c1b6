//! Problem files, built-in models, result cache and the command layer.

pub mod builtins;
pub mod cache;
pub mod commands;
pub mod json;
pub mod problem;
pub mod random;
pub mod verify;
