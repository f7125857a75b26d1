#include "nil3/asymptotic_solver.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nil3 {

namespace {

// cos/sin of 2 pi m / N with exact symmetry m <-> N - m.
double unit_cos(long m, long N) {
  m %= N;
  if (2 * m > N) m = N - m;
  return std::cos(2.0 * std::numbers::pi * m / N);
}

double unit_sin(long m, long N) {
  m %= N;
  if (2 * m > N) return -std::sin(2.0 * std::numbers::pi * (N - m) / N);
  return std::sin(2.0 * std::numbers::pi * m / N);
}

}  // namespace

BoundaryData::BoundaryData(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("BoundaryData: no samples");
  transform();
}

void BoundaryData::transform() {
  const long N = static_cast<long>(samples_.size());
  const long K = N / 2;
  a_.assign(K + 1, 0.0);
  b_.assign(K + 1, 0.0);
  for (long k = 0; k <= K; ++k) {
    double sa = 0.0, sb = 0.0;
    for (long j = 0; j < N; ++j) {
      sa += samples_[j] * unit_cos(k * j, N);
      sb += samples_[j] * unit_sin(k * j, N);
    }
    const bool edge = k == 0 || (N % 2 == 0 && k == K);
    const double scale = edge ? 1.0 / N : 2.0 / N;
    a_[k] = sa * scale;
    b_[k] = edge ? 0.0 : sb * scale;
  }
}

BoundaryData BoundaryData::sine(int ntheta, int n, double eps) {
  std::vector<double> s(ntheta);
  for (int j = 0; j < ntheta; ++j) s[j] = eps * unit_sin(static_cast<long>(n) * j, ntheta);
  return BoundaryData(std::move(s));
}

BoundaryData BoundaryData::fourier(int ntheta, const std::vector<double>& coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("BoundaryData::fourier: empty coefficient list");
  std::vector<double> s(ntheta, coeffs[0]);
  for (std::size_t m = 1; m < coeffs.size(); ++m) {
    const long k = static_cast<long>((m + 1) / 2);
    const bool is_cos = m % 2 == 1;
    for (int j = 0; j < ntheta; ++j) {
      s[j] += coeffs[m] * (is_cos ? unit_cos(k * j, ntheta) : unit_sin(k * j, ntheta));
    }
  }
  return BoundaryData(std::move(s));
}

double BoundaryData::evaluate(double theta) const {
  double v = 0.0;
  for (std::size_t k = 0; k < a_.size(); ++k) {
    v += a_[k] * std::cos(k * theta) + b_[k] * std::sin(k * theta);
  }
  return v;
}

BoundaryData BoundaryData::resampled(int ntheta) const {
  if (ntheta == this->ntheta()) return *this;
  if (ntheta % this->ntheta() == 0) {
    // Exact on the shared nodes, spectral in between.
    const int step = ntheta / this->ntheta();
    std::vector<double> s(ntheta);
    for (int j = 0; j < ntheta; ++j) {
      s[j] = j % step == 0 ? samples_[j / step] : evaluate(2.0 * std::numbers::pi * j / ntheta);
    }
    return BoundaryData(std::move(s));
  }
  return sample(ntheta, [this](double t) { return evaluate(t); });
}

}  // namespace nil3
