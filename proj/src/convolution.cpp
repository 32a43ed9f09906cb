#include "stablepoly/convolution.hpp"

#include <algorithm>
#include <cmath>

#include "stablepoly/errors.hpp"
#include "stablepoly/fft.hpp"

namespace stablepoly {

namespace {
constexpr double kClampRelative = 1e-13;
constexpr std::size_t kMinFftSupport = 16;
}  // namespace

int good_fft_size(int n) {
  int best = 1;
  while (best < n) best *= 2;
  for (long p3 = 1; p3 < best; p3 *= 3)
    for (long v = p3; v < best; v *= 2)
      if (v >= n) best = static_cast<int>(v);
  return best;
}

struct LayerConvolver::FftCache {
  std::vector<int> dims;
  std::unique_ptr<RealDft> dft;
  std::vector<std::complex<double>> kernel_spectrum;
};

LayerConvolver::LayerConvolver(JumpKernel kernel, ConvolutionMode mode)
    : kernel_(std::move(kernel)), mode_(mode), fft_(std::make_unique<FftCache>()) {}
LayerConvolver::~LayerConvolver() = default;
LayerConvolver::LayerConvolver(LayerConvolver&&) noexcept = default;
LayerConvolver& LayerConvolver::operator=(LayerConvolver&&) noexcept = default;

double LayerConvolver::apply(const DenseLayer& in, DenseLayer& out) {
  require(in.box.dim == kernel_.dim(), "convolution: dimension mismatch");
  require(in.values.size() == in.box.volume(), "convolution: layer size mismatch");
  out.box = in.box.sum(kernel_.bounding_box());
  ConvolutionMode route = mode_;
  if (route == ConvolutionMode::automatic) {
    std::size_t nonzero = 0;
    for (double v : in.values) nonzero += v != 0.0;
    double padded = 1.0;
    for (int a = 0; a < out.box.dim; ++a) padded *= good_fft_size(static_cast<int>(out.box.extent(a)));
    const double naive_cost = static_cast<double>(nonzero) * static_cast<double>(kernel_.size());
    const double fft_cost = 6.0 * padded * std::log2(std::max(2.0, padded));
    route = kernel_.size() >= kMinFftSupport && fft_cost < naive_cost ? ConvolutionMode::fft : ConvolutionMode::naive;
  }
  last_ = route;
  if (route == ConvolutionMode::fft) return apply_fft(in, out);
  apply_naive(in, out);
  return 0.0;
}

void LayerConvolver::apply_naive(const DenseLayer& in, DenseLayer& out) const {
  const Box& ob = out.box;
  out.values.assign(ob.volume(), 0.0);
  const int d = ob.dim;
  // Linear offsets of the support in the output box, relative to the
  // position of an input site.
  std::vector<std::ptrdiff_t> off(kernel_.size());
  for (std::size_t k = 0; k < kernel_.size(); ++k) {
    std::ptrdiff_t o = 0;
    for (int a = 0; a < d; ++a) o += static_cast<std::ptrdiff_t>(kernel_.coord(k, a)) * static_cast<std::ptrdiff_t>(ob.stride(a));
    off[k] = o;
  }
  const auto probs = kernel_.probs();
  const auto row = static_cast<std::size_t>(in.box.extent(d - 1));
  const std::size_t rows = in.box.volume() / row;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = in.values.data() + r * row;
    double* dst = out.values.data() + ob.index(in.box.site(r * row));
    for (std::size_t i = 0; i < row; ++i) {
      const double w = src[i];
      if (w == 0.0) continue;
      double* o = dst + i;
      for (std::size_t k = 0; k < off.size(); ++k) o[off[k]] += w * probs[k];
    }
  }
}

double LayerConvolver::apply_fft(const DenseLayer& in, DenseLayer& out) {
  const Box& ob = out.box;
  const int d = ob.dim;
  std::vector<int> dims(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) dims[static_cast<std::size_t>(a)] = good_fft_size(static_cast<int>(ob.extent(a)));
  FftCache& c = *fft_;
  if (dims != c.dims) {
    c.dft.reset();
    c.dft = std::make_unique<RealDft>(dims);
    c.dims = dims;
    // Kernel placed at its bounding-box offset.
    std::fill(c.dft->real(), c.dft->real() + c.dft->real_size(), 0.0);
    const Box& kb = kernel_.bounding_box();
    for (std::size_t k = 0; k < kernel_.size(); ++k) {
      std::size_t idx = 0;
      for (int a = 0; a < d; ++a)
        idx = idx * static_cast<std::size_t>(dims[std::size_t(a)]) + static_cast<std::size_t>(kernel_.coord(k, a) - kb.lo[a]);
      c.dft->real()[idx] = kernel_.prob(k);
    }
    c.dft->forward();
    c.kernel_spectrum.assign(c.dft->spectrum(), c.dft->spectrum() + c.dft->spectrum_size());
  }
  RealDft& f = *c.dft;
  std::fill(f.real(), f.real() + f.real_size(), 0.0);
  // Row start of box site i inside the padded array (origin at box.lo).
  auto padded_index = [&](const Box& b, std::size_t i) {
    const Site x = b.site(i);
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a)
      idx = idx * static_cast<std::size_t>(dims[std::size_t(a)]) + static_cast<std::size_t>(x[a] - b.lo[a]);
    return idx;
  };
  {
    const auto row = static_cast<std::size_t>(in.box.extent(d - 1));
    const std::size_t rows = in.box.volume() / row;
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(in.values.data() + r * row, row, f.real() + padded_index(in.box, r * row));
  }
  f.forward();
  auto* spec = f.spectrum();
  for (std::size_t k = 0; k < f.spectrum_size(); ++k) spec[k] *= c.kernel_spectrum[k];
  f.backward();
  const double scale = 1.0 / static_cast<double>(f.real_size());
  out.values.resize(ob.volume());
  double peak = 0.0;
  {
    const auto row = static_cast<std::size_t>(ob.extent(d - 1));
    const std::size_t rows = ob.volume() / row;
    for (std::size_t r = 0; r < rows; ++r) {
      const double* src = f.real() + padded_index(ob, r * row);
      double* dst = out.values.data() + r * row;
      for (std::size_t i = 0; i < row; ++i) {
        dst[i] = src[i] * scale;
        peak = std::max(peak, dst[i]);
      }
    }
  }
  const double floor = kClampRelative * peak;
  double clamped = 0.0;
  for (double& v : out.values)
    if (v < floor) {
      if (v > 0.0) clamped += v;
      v = 0.0;
    }
  return clamped;
}

}  // namespace stablepoly
