#include "anc/kernels.hpp"

namespace anc::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

constexpr detail::KernelTable kScalarTable{dot_scalar, axpy_scalar, sum_sq_scalar};

struct Dispatch {
    Backend backend;
    const detail::KernelTable* table;
};

Dispatch& dispatch() {
    static Dispatch d = [] {
#if defined(__x86_64__)
        if (const auto* t = detail::table_for(Backend::avx2))
            return Dispatch{Backend::avx2, t};
#elif defined(__aarch64__)
        if (const auto* t = detail::table_for(Backend::neon))
            return Dispatch{Backend::neon, t};
#endif
        return Dispatch{Backend::scalar, &kScalarTable};
    }();
    return d;
}

}  // namespace

namespace detail {

#if defined(__x86_64__)
const KernelTable* avx2_table();  // kernels_avx2.cpp
#endif
#if defined(__aarch64__)
const KernelTable* neon_table();  // kernels_neon.cpp
#endif

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &kScalarTable;
        case Backend::avx2:
#if defined(__x86_64__)
            if (__builtin_cpu_supports("avx2")) return avx2_table();
#endif
            return nullptr;
        case Backend::neon:
#if defined(__aarch64__)
            return neon_table();
#else
            return nullptr;
#endif
    }
    return nullptr;
}

}  // namespace detail

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

Backend active_backend() { return dispatch().backend; }

std::vector<Backend> available_backends() {
    std::vector<Backend> out;
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon})
        if (detail::table_for(b)) out.push_back(b);
    return out;
}

bool set_backend(Backend b) {
    const auto* t = detail::table_for(b);
    if (!t) return false;
    dispatch() = {b, t};
    return true;
}

double dot(const double* a, const double* b, std::size_t n) {
    return dispatch().table->dot(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    dispatch().table->axpy(alpha, x, y, n);
}

double sum_sq(const double* a, std::size_t n) {
    return dispatch().table->sum_sq(a, n);
}

}  // namespace anc::kernels
