#include <atomic>
#include <cstdlib>
#include <string>

#include "backends.hpp"
#include "cwsk/error.hpp"
#include "cwsk/numeric.hpp"

namespace cwsk::simd {
namespace {

const Kernels* table_for(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return &detail::scalar_kernels();
        case Backend::Avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
            if (!__builtin_cpu_supports("avx2")) return nullptr;
#endif
            return detail::avx2_kernels();
        case Backend::Neon:
            return detail::neon_kernels();
    }
    return nullptr;
}

Backend parse_env(const char* s, Backend fallback) {
    const std::string v = s;
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
        if (v == name(b) && supported(b)) return b;
    }
    return fallback;
}

Backend detect() {
    Backend best = Backend::Scalar;
    if (supported(Backend::Avx2)) {
        best = Backend::Avx2;
    } else if (supported(Backend::Neon)) {
        best = Backend::Neon;
    }
    if (const char* env = std::getenv("CWSK_SIMD")) best = parse_env(env, best);
    return best;
}

struct State {
    std::atomic<Backend> backend;
    std::atomic<const Kernels*> table;
    State() {
        const Backend b = detect();
        backend.store(b);
        table.store(table_for(b));
    }
};

State& state() {
    static State s;
    return s;
}

}  // namespace

std::string_view name(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return "scalar";
        case Backend::Avx2:
            return "avx2";
        case Backend::Neon:
            return "neon";
    }
    return "unknown";
}

bool supported(Backend b) { return table_for(b) != nullptr; }

std::vector<Backend> supported_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
        if (supported(b)) out.push_back(b);
    }
    return out;
}

Backend active_backend() { return state().backend.load(); }

void set_backend(Backend b) {
    const Kernels* k = table_for(b);
    if (k == nullptr) throw UsageError("SIMD backend not supported on this CPU: " + std::string(name(b)));
    state().table.store(k);
    state().backend.store(b);
}

const Kernels& kernels(Backend b) {
    const Kernels* k = table_for(b);
    if (k == nullptr) throw UsageError("SIMD backend not supported on this CPU: " + std::string(name(b)));
    return *k;
}

const Kernels& active() { return *state().table.load(); }

MinMaxSums dense_min_max(const Kernels& k, const double* u, const double* v, std::size_t n) {
    if (n <= kMinMaxBlock) return k.min_max_block(u, v, n);
    CompensatedSum lo;
    CompensatedSum hi;
    for (std::size_t i = 0; i < n; i += kMinMaxBlock) {
        const std::size_t len = n - i < kMinMaxBlock ? n - i : kMinMaxBlock;
        const MinMaxSums s = k.min_max_block(u + i, v + i, len);
        lo.add(s.min_sum);
        hi.add(s.max_sum);
    }
    return {lo.value(), hi.value()};
}

MinMaxSums dense_min_max(const double* u, const double* v, std::size_t n) {
    return dense_min_max(active(), u, v, n);
}

}  // namespace cwsk::simd
