#include "lapdeconv/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <tuple>

#include <Eigen/Dense>

#include "lapdeconv/errors.hpp"

namespace lapdeconv {

namespace {

using Real = long double;
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// int_{-1}^{1} u^n du
Real unit_integral(int n) { return n % 2 ? 0 : 2 / static_cast<Real>(n + 1); }

Real binomial(int n, int k) {
  Real out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

Real factorial(int n) {
  Real out = 1;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

void check_orders(int order, int derivative) {
  if (order < 2) throw KernelSpecError("kernel order L must be >= 2, got " + std::to_string(order));
  if (derivative < 0 || derivative >= order) {
    throw KernelSpecError("derivative order j must satisfy 0 <= j < L (L=" + std::to_string(order) +
                          ", j=" + std::to_string(derivative) + ")");
  }
}

// Works in u = (t - c) / h on [-1, 1]. The t-moment targets map onto
// u-moments through a triangular binomial system; K = (1 - u^2)^2 p(u) with
// deg p = L - 1 then solves a square Gram system in p.
std::vector<double> solve_kernel(int order, int derivative, Real lo, Real hi) {
  const Real c = (lo + hi) / 2;
  const Real h = (hi - lo) / 2;

  // mu_m = int u^m K(t) dt
  std::vector<Real> mu(order, 0);
  for (int l = 0; l < order; ++l) {
    Real acc = l == derivative ? (derivative % 2 == 0 ? 1 : -1) * factorial(derivative) : 0;
    for (int m = 0; m < l; ++m) acc -= binomial(l, m) * std::pow(c, l - m) * std::pow(h, m) * mu[m];
    mu[l] = acc / std::pow(h, l);
  }

  const Real w[] = {1, 0, -2, 0, 1};
  MatrixR gram(order, order);
  for (int l = 0; l < order; ++l) {
    for (int k = 0; k < order; ++k) {
      Real acc = 0;
      for (int i = 0; i < 5; ++i) acc += w[i] * unit_integral(l + k + i);
      gram(l, k) = h * acc;
    }
  }
  VectorR rhs(order);
  for (int l = 0; l < order; ++l) rhs(l) = mu[l];
  const VectorR p = gram.fullPivLu().solve(rhs);

  std::vector<Real> k(order + 4, 0);
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < 5; ++b) k[a + b] += p(a) * w[b];
  }
  std::vector<double> local(k.begin(), k.end());
  if (c == 0) {
    // Symmetric support: the solution is even for even j and odd for odd j.
    for (std::size_t d = 0; d < local.size(); ++d) {
      if (static_cast<int>(d % 2) != derivative % 2) local[d] = 0.0;
    }
  }
  while (local.size() > 1 && local.back() == 0.0) local.pop_back();
  return local;
}

}  // namespace

SmoothingKernel::SmoothingKernel(int order, int derivative, double lo, double hi,
                                 std::vector<double> local)
    : order_(order),
      derivative_(derivative),
      lo_(lo),
      hi_(hi),
      centre_((lo + hi) / 2),
      half_width_((hi - lo) / 2),
      local_(std::move(local)) {
  const Real c = centre_;
  const Real h = half_width_;
  std::vector<Real> t(local_.size(), 0);
  for (std::size_t k = 0; k < local_.size(); ++k) {
    // ((t - c) / h)^k
    for (std::size_t m = 0; m <= k; ++m) {
      t[m] += local_[k] * binomial(static_cast<int>(k), static_cast<int>(m)) *
              std::pow(-c, static_cast<Real>(k - m)) / std::pow(h, static_cast<Real>(k));
    }
  }
  coeffs_.assign(t.begin(), t.end());
  primitive_.assign(local_.size() + 1, 0.0);
  for (std::size_t k = 0; k < local_.size(); ++k) primitive_[k + 1] = local_[k] / static_cast<double>(k + 1);
  for (auto it = primitive_.rbegin(); it != primitive_.rend(); ++it) primitive_at_lo_ = primitive_at_lo_ * -1.0 + *it;
}

double SmoothingKernel::moment(int l) const {
  const Real c = centre_;
  const Real h = half_width_;
  Real acc = 0;
  for (std::size_t k = 0; k < local_.size(); ++k) {
    for (int m = 0; m <= l; ++m) {
      acc += local_[k] * binomial(l, m) * std::pow(c, static_cast<Real>(l - m)) * std::pow(h, static_cast<Real>(m)) *
             unit_integral(static_cast<int>(k) + m);
    }
  }
  return static_cast<double>(h * acc);
}

double SmoothingKernel::squared_norm() const {
  Real acc = 0;
  for (std::size_t a = 0; a < local_.size(); ++a) {
    for (std::size_t b = 0; b < local_.size(); ++b) {
      acc += static_cast<Real>(local_[a]) * local_[b] * unit_integral(static_cast<int>(a + b));
    }
  }
  return static_cast<double>(static_cast<Real>(half_width_) * acc);
}

SmoothingKernel make_kernel(int order, int derivative) {
  return make_boundary_kernel(order, derivative, 1.0);
}

SmoothingKernel make_boundary_kernel(int order, int derivative, double rho) {
  check_orders(order, derivative);
  if (!(rho > 0.0) || rho > 1.0) {
    throw KernelSpecError("boundary kernel requires 0 < rho <= 1, got " + std::to_string(rho));
  }
  return SmoothingKernel(order, derivative, -1.0, rho, solve_kernel(order, derivative, -1.0L, rho));
}

SmoothingKernel reflect(const SmoothingKernel& k) {
  // u -> -u under t -> -t
  std::vector<double> c(k.local_coeffs().begin(), k.local_coeffs().end());
  const double sign = (k.derivative() % 2 == 0) ? 1.0 : -1.0;
  for (std::size_t d = 0; d < c.size(); ++d) c[d] *= (d % 2 == 0) ? sign : -sign;
  return SmoothingKernel(k.order(), k.derivative(), -k.hi(), -k.lo(), std::move(c));
}

namespace {

using CacheKey = std::tuple<int, int, long long, bool>;

struct CacheState {
  std::shared_mutex mutex;
  std::map<CacheKey, std::shared_ptr<const SmoothingKernel>> kernels;
};

CacheState& cache_state() {
  static CacheState state;
  return state;
}

}  // namespace

KernelCache& KernelCache::instance() {
  static KernelCache cache;
  return cache;
}

std::shared_ptr<const SmoothingKernel> KernelCache::left(int order, int derivative, double rho) {
  return get(order, derivative, rho, false);
}

std::shared_ptr<const SmoothingKernel> KernelCache::right(int order, int derivative, double rho) {
  return get(order, derivative, rho, true);
}

std::shared_ptr<const SmoothingKernel> KernelCache::get(int order, int derivative, double rho,
                                                        bool reflected) {
  long long ticks = std::llround(std::min(rho, 1.0) * 1e6);
  ticks = std::max(ticks, 1LL);
  if (ticks >= 1000000) reflected = false;  // interior kernel is its own reflection
  const CacheKey key{order, derivative, ticks, reflected};

  auto& state = cache_state();
  {
    std::shared_lock lock(state.mutex);
    if (auto it = state.kernels.find(key); it != state.kernels.end()) return it->second;
  }
  auto base = make_boundary_kernel(order, derivative, static_cast<double>(ticks) / 1e6);
  auto built = std::make_shared<const SmoothingKernel>(reflected ? reflect(base) : std::move(base));
  std::unique_lock lock(state.mutex);
  return state.kernels.emplace(key, std::move(built)).first->second;
}

}  // namespace lapdeconv
