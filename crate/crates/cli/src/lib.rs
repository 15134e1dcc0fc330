//! File formats, atlas storage, and batch jobs behind the `capset` binary.

pub mod capfile;
pub mod jobs;
pub mod manifest;
pub mod store;
