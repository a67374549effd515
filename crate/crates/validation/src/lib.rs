//! Test-only package. The acceptance suite lives in `tests/acceptance.rs`
//! and runs with `cargo test -p qm-bootstrap-validation --test acceptance`.
