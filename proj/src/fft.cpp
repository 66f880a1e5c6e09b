#include "fisher_hydro/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace fisher_hydro {
namespace {

// Plans are made once per (dim, n, sign) and executed with the new-array interface,
// which FFTW documents as thread-safe.
fftw_plan cached_plan(int dim, std::size_t n, int sign) {
  static std::mutex mu;
  static std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(dim, n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::size_t total = dim == 1 ? n : n * n;
  fftw_complex* buf = fftw_alloc_complex(total);
  fftw_plan p;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dim == 1) {
    p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, flags);
  } else {
    p = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf, sign, flags);
  }
  fftw_free(buf);
  if (!p) throw std::runtime_error("fftw plan creation failed");
  plans.emplace(key, p);
  return p;
}

void run(ComplexField& data, const Grid& g, int sign) {
  if (data.size() != g.size()) throw std::invalid_argument("fft: field size does not match grid");
  fftw_plan p = cached_plan(g.dim(), g.n(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

void fft_forward(ComplexField& data, const Grid& g) { run(data, g, FFTW_FORWARD); }

void fft_inverse(ComplexField& data, const Grid& g) {
  run(data, g, FFTW_BACKWARD);
  const double s = 1.0 / static_cast<double>(g.size());
  for (auto& z : data) z *= s;
}

}  // namespace fisher_hydro
