#pragma once

namespace sublab {

/// Parallel runs the OpenMP kernels; Serial forces one thread through the same kernels.
/// Results never depend on the choice.
enum class Execution { Parallel, Serial };

/// Bound OpenMP worker count; n <= 0 restores the default (available cores).
void set_thread_count(int n);
int thread_count();

}  // namespace sublab
