// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string>

#include "metaseg/error.hpp"
#include "metaseg/kernels.hpp"

namespace metaseg::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(METASEG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend default_backend() {
  if (const char* env = std::getenv("METASEG_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return Backend::Scalar;
    if (want == "avx2" && cpu_has_avx2()) return Backend::Avx2;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{default_backend()};
  return backend;
}

}  // namespace

std::string_view to_string(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool backend_available(Backend backend) {
  return backend == Backend::Scalar || cpu_has_avx2();
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw Error(ErrorKind::SpecInfeasible,
                "kernel backend " + std::string(to_string(backend)) + " not available on this CPU");
  }
  current().store(backend, std::memory_order_relaxed);
}

#if defined(METASEG_HAVE_AVX2)
#define METASEG_DISPATCH(fn, ...)                                                      \
  (active_backend() == Backend::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define METASEG_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void normalized_entropy(std::span<const float> probs, std::size_t num_classes,
                        std::span<double> out) {
  METASEG_DISPATCH(normalized_entropy, probs, num_classes, out);
}

void top2_difference(std::span<const float> probs, std::size_t num_classes,
                     std::span<double> out) {
  METASEG_DISPATCH(top2_difference, probs, num_classes, out);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return METASEG_DISPATCH(dot, a, b);
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
  return METASEG_DISPATCH(weighted_dot, a, b, w);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  METASEG_DISPATCH(axpy, alpha, x, y);
}

#undef METASEG_DISPATCH

#if !defined(METASEG_HAVE_AVX2)
// Non-x86 builds: the avx2 entry points forward to the scalar reference so the
// equivalence tests still link.
namespace avx2 {
void normalized_entropy(std::span<const float> p, std::size_t q, std::span<double> o) {
  scalar::normalized_entropy(p, q, o);
}
void top2_difference(std::span<const float> p, std::size_t q, std::span<double> o) {
  scalar::top2_difference(p, q, o);
}
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> w) {
  return scalar::weighted_dot(a, b, w);
}
void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  scalar::axpy(alpha, x, y);
}
}  // namespace avx2
#endif

}  // namespace metaseg::kernels
