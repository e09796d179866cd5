//! Holds the `acceptance` test target. The checks live in `tests/`; this
//! library is intentionally empty.
