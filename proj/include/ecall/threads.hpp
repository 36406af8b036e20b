#pragma once

namespace ecall {

// Pins the OpenMP thread count for the process. n <= 0 leaves the runtime
// default in place.
void set_threads(int n);
int current_threads();

}  // namespace ecall
