#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "lapdeconv/resolvent.hpp"
#include "lapdeconv/smoother.hpp"

namespace lapdeconv {

struct EstimatorConfig {
  /// Smoothing-kernel order; must exceed r.
  int order = 8;
  /// Lepski settings; lepski.weights also applies with fixed bandwidths.
  LepskiConfig lepski;
  std::size_t grid_size = 1024;
  /// Per-derivative bandwidths lambda_0..lambda_r. Empty: Lepski selection.
  /// A single value is used for every derivative order.
  std::vector<double> fixed_bandwidths;
};

/// The three pieces of f_hat = (derivative - combination - integral) / B_r.
struct DeconvolutionTerms {
  std::vector<double> derivative;   // q^(r)
  std::vector<double> combination;  // sum_j b_j q^(r-1-j)
  std::vector<double> integral;     // int_0^t q(t - x) phi1^(r)(x) dx
};

struct DeconvolutionResult {
  std::vector<double> grid;
  std::vector<double> f_hat;
  /// Selected (or fixed) bandwidth for q^(j), j = 0..r.
  std::vector<double> bandwidths;
  DeconvolutionTerms terms;
  int r = 0;
  double B = 0.0;
  EstimatorConfig config;
};

/// Explicit resolvent-based estimate of f on a uniform grid over [0, T].
/// Throws KernelSpecError when order <= r, EstimatorError from the smoother.
DeconvolutionResult deconvolve(const NoisySample& data, const RationalLaplaceKernel& g,
                               const EstimatorConfig& cfg);
DeconvolutionResult deconvolve(const NoisySample& data, const ResolventDecomposition& d,
                               const EstimatorConfig& cfg);

/// Mean squared error over grid points in [trim T, (1 - trim) T].
double risk_mse(const DeconvolutionResult& result, const std::function<double(double)>& truth,
                double trim = 0.1);

}  // namespace lapdeconv
