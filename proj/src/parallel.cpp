#include "ando/parallel.hpp"

#include <atomic>
#include <cstdlib>

#include <omp.h>

namespace ando {

namespace {
std::atomic<int> g_override{0};
}

int worker_threads() {
    if (int n = g_override.load(); n > 0) return n;
    if (const char* env = std::getenv("ANDO_LAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return omp_get_max_threads();
}

void set_worker_threads(int n) { g_override.store(n > 0 ? n : 0); }

}  // namespace ando
