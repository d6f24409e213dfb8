#pragma once

namespace khintype {

/// Worker count: KHINTYPE_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
int default_threads();

/// Clamps a requested thread count; 0 means default_threads().
int resolve_threads(int requested);

}  // namespace khintype
