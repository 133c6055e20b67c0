#pragma once

namespace ando {

/// Thread count for the OpenMP kernels: an explicit override if set, else the
/// ANDO_LAB_THREADS environment variable, else the OpenMP default. Results never depend on it.
int worker_threads();

/// 0 clears the override.
void set_worker_threads(int n);

}  // namespace ando
