//! Holds the acceptance suite in `tests/acceptance.rs`; this crate exports nothing.
