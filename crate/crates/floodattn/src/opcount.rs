//! Per-thread multiply counter for the attention kernels.
//!
//! Each kernel adds the number of scalar multiplications it performs to the
//! calling thread's counter. `reset` / `multiplies` bracket a region of
//! interest. Thread-local storage keeps concurrent callers (parallel tests
//! included) from contaminating each other's tallies; the cost is one
//! thread-local add per kernel call, so it stays enabled in release builds.

use std::cell::Cell;

thread_local! {
    static MULTIPLIES: Cell<u64> = const { Cell::new(0) };
}

/// Zero this thread's counter.
pub fn reset() {
    MULTIPLIES.with(|c| c.set(0));
}

/// Multiplications recorded on this thread since the last `reset`.
pub fn multiplies() -> u64 {
    MULTIPLIES.with(Cell::get)
}

pub(crate) fn add(n: u64) {
    MULTIPLIES.with(|c| c.set(c.get().wrapping_add(n)));
}
