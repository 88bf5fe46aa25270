#pragma once

// Sampling oracle for the three-phase scheme, written against plain loops so
// it shares no code with the library's Eigen path.

#include <cmath>
#include <random>
#include <vector>

#include "iia/ratesim.hpp"

namespace iia::testing {

using channels::Complex;
using channels::FloatChannel;
using schemes::AlignmentSolution;
using CM = algebra::Matrix<Complex>;

inline std::vector<Complex> mul(const CM& a, const std::vector<Complex>& v) {
  std::vector<Complex> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) out[i] += a(i, k) * v[k];
  }
  return out;
}

inline std::vector<Complex> diag(const CM& d) {
  std::vector<Complex> out;
  for (std::size_t i = 0; i < d.rows(); ++i) out.push_back(d(i, i));
  return out;
}

struct SampleStats {
  std::vector<double> variance;
  std::vector<double> se;
};

// Residual z_i - c_i x_i of y'_i - lambda_i y_i, sampled.
inline SampleStats sampled_noise(const FloatChannel& ch, const AlignmentSolution<Complex>& sol,
                          double P, double noise, std::size_t draws, std::uint64_t seed) {
  const std::size_t K = ch.dim();
  const auto d1 = diag(sol.coding[0]), d2 = diag(sol.coding[1]), d3 = diag(sol.coding[2]);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto cn = [&](double var) {
    const double a = g(rng), b = g(rng);
    return Complex(a, b) * std::sqrt(var / 2);
  };
  std::vector<double> s(K, 0.0), s2(K, 0.0);
  for (std::size_t t = 0; t < draws; ++t) {
    std::vector<Complex> x(K), n1(K), n2(K), n3(K);
    for (std::size_t k = 0; k < K; ++k) {
      x[k] = cn(P);
      n1[k] = cn(noise);
      n2[k] = cn(noise);
      n3[k] = cn(noise);
    }
    auto y = mul(ch.H, x);
    for (std::size_t k = 0; k < K; ++k) y[k] += n1[k];
    std::vector<Complex> relay(K);
    for (std::size_t k = 0; k < K; ++k) relay[k] = d1[k] * y[k];
    auto f = mul(*ch.G, relay);
    for (std::size_t k = 0; k < K; ++k) f[k] += n2[k];
    std::vector<Complex> s3(K);
    for (std::size_t k = 0; k < K; ++k) s3[k] = d2[k] * x[k] + d3[k] * f[k];
    auto y3 = mul(ch.H, s3);
    for (std::size_t i = 0; i < K; ++i) {
      y3[i] += n3[i];
      const Complex c = sol.B(i, i) - sol.lambda[i] * ch.H(i, i);
      const double e = std::norm(y3[i] - sol.lambda[i] * y[i] - c * x[i]);
      s[i] += e;
      s2[i] += e * e;
    }
  }
  SampleStats out;
  const double N = static_cast<double>(draws);
  for (std::size_t i = 0; i < K; ++i) {
    const double m = s[i] / N;
    out.variance.push_back(m);
    out.se.push_back(std::sqrt((s2[i] / N - m * m) / N));
  }
  return out;
}

}  // namespace iia::testing
