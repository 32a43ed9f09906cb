#include "stablepoly/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <new>

#include "stablepoly/errors.hpp"

namespace stablepoly {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

std::size_t product(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

}  // namespace

ComplexDft::ComplexDft(const std::vector<int>& dims, int sign) {
  require(!dims.empty() && dims.size() <= 3, "dft: rank must be 1..3");
  for (int d : dims) require(d >= 1, "dft: empty axis");
  size_ = product(dims);
  data_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(size_));
  if (!data_) throw ResourceError("dft: allocation of " + std::to_string(size_) + " complex values failed");
  std::fill(data_, data_ + size_, std::complex<double>{});
  std::lock_guard lock(fftw_planner_mutex());
  plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), reinterpret_cast<fftw_complex*>(data_),
                        reinterpret_cast<fftw_complex*>(data_), sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                        FFTW_ESTIMATE);
  if (!plan_) {
    fftw_free(data_);
    throw ResourceError("dft: planning failed");
  }
}

ComplexDft::~ComplexDft() {
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
  fftw_free(data_);
}

void ComplexDft::execute() { fftw_execute(static_cast<fftw_plan>(plan_)); }

RealDft::RealDft(const std::vector<int>& dims) : dims_(dims) {
  require(!dims.empty() && dims.size() <= 3, "dft: rank must be 1..3");
  for (int d : dims) require(d >= 1, "dft: empty axis");
  real_size_ = product(dims);
  spec_size_ = real_size_ / static_cast<std::size_t>(dims.back()) * static_cast<std::size_t>(dims.back() / 2 + 1);
  real_ = fftw_alloc_real(real_size_);
  spec_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(spec_size_));
  if (!real_ || !spec_) {
    fftw_free(real_);
    fftw_free(spec_);
    throw ResourceError("dft: allocation of " + std::to_string(real_size_) + " values failed");
  }
  std::lock_guard lock(fftw_planner_mutex());
  const int rank = static_cast<int>(dims.size());
  fwd_ = fftw_plan_dft_r2c(rank, dims.data(), real_, reinterpret_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft_c2r(rank, dims.data(), reinterpret_cast<fftw_complex*>(spec_), real_, FFTW_ESTIMATE);
  if (!fwd_ || !bwd_) throw ResourceError("dft: planning failed");
}

RealDft::~RealDft() {
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  }
  fftw_free(real_);
  fftw_free(spec_);
}

void RealDft::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }
void RealDft::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

}  // namespace stablepoly
