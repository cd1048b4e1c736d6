//! Acceptance suite for `bubblecert`. The criteria live in
//! `tests/acceptance.rs`; run them with `cargo test -p validation`.
