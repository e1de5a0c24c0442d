//! Acceptance criteria live in `tests/acceptance.rs`, one test per
//! criterion. Run them with `cargo test -p persona-acceptance`.
