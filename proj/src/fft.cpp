#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <stdexcept>

namespace fracham::fft {
namespace {

// FFTW planning is not re-entrant; execution on distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct RealBuffer {
  explicit RealBuffer(std::size_t n) : ptr(fftw_alloc_real(n)), size(n) {
    if (!ptr)
      throw std::bad_alloc();
    std::fill(ptr, ptr + n, 0.0);
  }
  ~RealBuffer() { fftw_free(ptr); }
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;
  double* ptr;
  std::size_t size;
};

struct ComplexBuffer {
  explicit ComplexBuffer(std::size_t n) : ptr(fftw_alloc_complex(n)), size(n) {
    if (!ptr)
      throw std::bad_alloc();
  }
  ~ComplexBuffer() { fftw_free(ptr); }
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;
  fftw_complex* ptr;
  std::size_t size;
};

class Plan {
public:
  explicit Plan(fftw_plan p) : plan_(p) {
    if (!plan_)
      throw std::runtime_error("fftw: planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

private:
  fftw_plan plan_;
};

Plan forward_plan(RealBuffer& in, ComplexBuffer& out) {
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_r2c_1d(static_cast<int>(in.size), in.ptr, out.ptr, FFTW_ESTIMATE));
}

Plan backward_plan(ComplexBuffer& in, RealBuffer& out) {
  std::lock_guard lock(planner_mutex());
  return Plan(fftw_plan_dft_c2r_1d(static_cast<int>(out.size), in.ptr, out.ptr, FFTW_ESTIMATE));
}

std::size_t convolution_length(std::size_t n) {
  std::size_t p = 1;
  while (p < 2 * n)
    p <<= 1;
  return p;
}

// Linear convolution of a and b, truncated to the first n outputs.
std::vector<double> convolve_truncated(std::span<const double> a, std::span<const double> b,
                                       std::size_t n) {
  const std::size_t p = convolution_length(n);
  const std::size_t nc = p / 2 + 1;
  RealBuffer ra(p), rb(p), rc(p);
  ComplexBuffer ca(nc), cb(nc);
  std::copy_n(a.begin(), std::min(a.size(), n), ra.ptr);
  std::copy_n(b.begin(), std::min(b.size(), n), rb.ptr);
  {
    Plan pa = forward_plan(ra, ca);
    Plan pb = forward_plan(rb, cb);
    pa.execute();
    pb.execute();
  }
  for (std::size_t k = 0; k < nc; ++k) {
    const std::complex<double> x(ca.ptr[k][0], ca.ptr[k][1]);
    const std::complex<double> y(cb.ptr[k][0], cb.ptr[k][1]);
    const std::complex<double> z = x * y;
    ca.ptr[k][0] = z.real();
    ca.ptr[k][1] = z.imag();
  }
  {
    Plan pc = backward_plan(ca, rc);
    pc.execute();
  }
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(p);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = rc.ptr[i] * scale;
  return out;
}

} // namespace

std::vector<double> power_spectrum(std::span<const double> x, std::size_t padded_length) {
  if (padded_length < x.size() || padded_length < 2)
    throw std::invalid_argument("power_spectrum: padded length too small");
  const std::size_t nc = padded_length / 2 + 1;
  RealBuffer in(padded_length);
  ComplexBuffer out(nc);
  std::copy(x.begin(), x.end(), in.ptr);
  {
    Plan p = forward_plan(in, out);
    p.execute();
  }
  std::vector<double> ps(nc);
  for (std::size_t k = 0; k < nc; ++k)
    ps[k] = out.ptr[k][0] * out.ptr[k][0] + out.ptr[k][1] * out.ptr[k][1];
  return ps;
}

std::vector<double> lower_toeplitz_apply(std::span<const double> col, std::span<const double> x) {
  if (col.size() < x.size())
    throw std::invalid_argument("lower_toeplitz_apply: column shorter than vector");
  return convolve_truncated(col, x, x.size());
}

std::vector<double> upper_toeplitz_apply(std::span<const double> col, std::span<const double> x) {
  if (col.size() < x.size())
    throw std::invalid_argument("upper_toeplitz_apply: column shorter than vector");
  std::vector<double> rev(x.rbegin(), x.rend());
  std::vector<double> y = convolve_truncated(col, rev, x.size());
  std::reverse(y.begin(), y.end());
  return y;
}

} // namespace fracham::fft
