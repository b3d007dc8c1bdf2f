//! Acceptance checks for the `dotbus` library live in `tests/acceptance.rs`.
