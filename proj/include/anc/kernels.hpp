#pragma once

#include <cstddef>
#include <vector>

// Arithmetic inner loops shared by the filtering, simulation, and training
// code paths. A scalar reference implementation always exists; AVX2 (x86-64)
// and NEON (aarch64) variants are selected at runtime and equivalence-tested
// against the reference:
//
//   - axpy is bit-identical to the scalar reference on every backend. No
//     backend uses fused multiply-add here; the step-size sensitivity
//     recursion is checked bit-exactly against a scalar re-summation and
//     that only holds if every backend rounds each multiply and add
//     separately.
//   - dot and sum_sq may differ from the reference by summation order only
//     (lane-wise partial sums), which stays within a few ulps.
//
// Backend selection is process-global; call set_backend() before spawning
// work, not concurrently with it.
namespace anc::kernels {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

/// Backend currently used by dot/axpy/sum_sq. Defaults to the widest
/// instruction set the CPU supports.
Backend active_backend();

std::vector<Backend> available_backends();

/// Selects a backend; returns false (and changes nothing) if it is not
/// available on this machine.
bool set_backend(Backend b);

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);  // y += alpha * x
double sum_sq(const double* a, std::size_t n);

namespace detail {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*sum_sq)(const double*, std::size_t);
};

/// Table for one backend; nullptr when unavailable on this machine.
const KernelTable* table_for(Backend b);

}  // namespace detail

}  // namespace anc::kernels
