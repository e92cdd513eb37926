pub mod commands;
pub mod config;
pub mod dump;
pub mod svg;
pub mod validate;
