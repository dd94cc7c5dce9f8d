pub mod config;
pub mod error;
pub mod report;
pub mod serial;
pub mod suites;
