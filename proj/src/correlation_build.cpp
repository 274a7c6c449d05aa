#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <mutex>
#include <vector>

#include "islopt/correlation.hpp"
#include "islopt/kernels.hpp"

namespace islopt {
namespace {

constexpr int kTransformMinLength = 256;

std::vector<int32_t> doubled_column(const SequenceSet& x, int c) {
  const int length = x.length();
  std::vector<int32_t> out(2 * static_cast<std::size_t>(length));
  for (int t = 0; t < 2 * length; ++t) out[t] = x.at(t % length, c);
  return out;
}

void direct_row(const std::vector<std::vector<int32_t>>& cols, int i, int j, int length, int32_t* out) {
  const auto& kt = kernels::active();
  for (int k = 0; k < length; ++k) {
    out[k] = static_cast<int32_t>(kt.dot_sign(cols[i].data(), cols[j].data() + k, length));
  }
}

bool plausible_row(const int32_t* row, int length, bool autocorrelation) {
  if (autocorrelation && row[0] != length) return false;
  for (int k = 0; k < length; ++k) {
    if (std::abs(row[k]) > length) return false;
    if (((row[k] - length) & 1) != 0) return false;
  }
  return true;
}

// FFTW's planner is not reentrant; execution with new-array calls is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlans {
 public:
  explicit FftPlans(int length) : length_(length) {
    std::vector<double> real(length);
    std::vector<fftw_complex> spec(length / 2 + 1);
    std::lock_guard lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(length, real.data(), spec.data(), FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(length, spec.data(), real.data(), FFTW_ESTIMATE);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
  ~FftPlans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }

  void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(forward_, in, out); }
  void inverse(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(inverse_, in, out); }

 private:
  int length_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

}  // namespace

void for_each_correlation_row(const SequenceSet& x, CorrelationMethod method, const RowVisitor& visit) {
  const int length = x.length();
  const int count = x.count();

  std::vector<std::vector<int32_t>> cols;
  cols.reserve(count);
  for (int c = 0; c < count; ++c) cols.push_back(doubled_column(x, c));
  std::vector<int32_t> out(length);

  const bool transform =
      method == CorrelationMethod::kTransform || (method == CorrelationMethod::kAuto && length >= kTransformMinLength);

  if (!transform) {
    for (int i = 0; i < count; ++i) {
      for (int j = i; j < count; ++j) {
        direct_row(cols, i, j, length, out.data());
        visit(i, j, out);
      }
    }
    return;
  }

  // (X_i * X_j)_k = IDFT(conj(F_i) F_j)_k
  const int bins = length / 2 + 1;
  FftPlans plans(length);
  std::vector<std::vector<std::complex<double>>> spectra(count, std::vector<std::complex<double>>(bins));
  std::vector<double> real(length);
  for (int c = 0; c < count; ++c) {
    for (int m = 0; m < length; ++m) real[m] = x.at(m, c);
    plans.forward(real.data(), reinterpret_cast<fftw_complex*>(spectra[c].data()));
  }
  std::vector<std::complex<double>> product(bins);
  for (int i = 0; i < count; ++i) {
    for (int j = i; j < count; ++j) {
      for (int f = 0; f < bins; ++f) product[f] = std::conj(spectra[i][f]) * spectra[j][f];
      plans.inverse(reinterpret_cast<fftw_complex*>(product.data()), real.data());
      for (int k = 0; k < length; ++k) out[k] = static_cast<int32_t>(std::lround(real[k] / length));
      if (!plausible_row(out.data(), length, i == j)) direct_row(cols, i, j, length, out.data());
      visit(i, j, out);
    }
  }
}

std::vector<int32_t> correlation_rows(const SequenceSet& x, CorrelationMethod method) {
  const int length = x.length();
  const std::size_t pairs = static_cast<std::size_t>(x.count()) * (x.count() + 1) / 2;
  std::vector<int32_t> rows;
  rows.reserve(pairs * length);
  for_each_correlation_row(x, method, [&](int, int, std::span<const int32_t> row) {
    rows.insert(rows.end(), row.begin(), row.end());
  });
  return rows;
}

}  // namespace islopt
