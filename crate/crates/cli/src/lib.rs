//! File formats and benchmark harness around `nilfill-core`.

pub mod bench;
pub mod format;
