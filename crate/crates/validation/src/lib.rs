//! Holds the acceptance suite in `tests/acceptance.rs`. Kept in its own
//! package so its known failures do not stop the other suites under
//! `cargo test --workspace`.
