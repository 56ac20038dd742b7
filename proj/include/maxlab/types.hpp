#pragma once

#include <chrono>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace maxlab {

using index_t = std::int32_t;
using complex_t = std::complex<double>;

// Thrown when a factorization meets a zero or near-zero pivot.
class SingularMatrixError : public std::runtime_error {
public:
  explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the SPD factorization on a non-positive pivot.
class NotSpdError : public std::runtime_error {
public:
  explicit NotSpdError(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised by PCG when the operator exposes a direction of nonpositive curvature.
class IndefiniteOperatorError : public std::runtime_error {
public:
  explicit IndefiniteOperatorError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

template <class T>
struct scalar_traits {
  static constexpr bool is_complex = false;
  using real_type = T;
};

template <class T>
struct scalar_traits<std::complex<T>> {
  static constexpr bool is_complex = true;
  using real_type = T;
};

template <class T>
using real_t = typename scalar_traits<T>::real_type;

inline double conj_mult(double a, double b) { return a * b; }

// Monotonic wall-clock stopwatch used for setup/solve timing.
class Stopwatch {
public:
  Stopwatch() : start_(clock::now()) {}
  void reset() { start_ = clock::now(); }
  double seconds() const {
    return std::chrono::duration<double>(clock::now() - start_).count();
  }

private:
  using clock = std::chrono::steady_clock;
  clock::time_point start_;
};

// Global thread budget: BENCH_THREADS caps it, callers may lower it further.
int thread_budget();
void set_thread_budget(int n);

// Runs fn(i) for i in [0, count). Work is split across the thread budget;
// iterations must write to disjoint slots so results do not depend on the split.
void parallel_for(index_t count, const std::function<void(index_t)>& fn);

}  // namespace maxlab
