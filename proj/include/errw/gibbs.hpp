#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "errw/stats.hpp"

namespace errw::gibbs {

/// Finite-state stand-in for a one-dimensional Gibbs specification:
/// left states L, slice states S, rung states R, local energies
/// h_left(l, s), h_middle(s, r, s') and a positive right boundary weight.
struct GibbsSpec {
  int left_states = 1;
  int slice_states = 1;
  int rung_states = 1;
  std::vector<double> h_left;    ///< L x S, row-major
  std::vector<double> h_middle;  ///< S x R x S, row-major
  std::vector<double> g_right;   ///< S

  double left(int l, int s) const { return h_left[static_cast<std::size_t>(l) * slice_states + s]; }
  double middle(int s, int r, int t) const {
    return h_middle[(static_cast<std::size_t>(s) * rung_states + r) * slice_states + t];
  }
  /// Throws std::invalid_argument on bad sizes, non-finite energies or a
  /// non-positive boundary weight.
  void validate() const;
};

GibbsSpec spec_from_json_text(const std::string& text);
GibbsSpec spec_from_file(const std::string& path);
std::string spec_to_json_text(const GibbsSpec& spec);

/// Coordinates of the volume [0, l]: the left state, slices 1..l and rungs
/// 1..l (rung i sits between slice i and slice i + 1). Index i - 1 holds
/// slice i / rung i.
struct Configuration {
  int left = 0;
  std::vector<int> slices;
  std::vector<int> rungs;
};

using Observable = std::function<double(const Configuration&)>;
using Event = std::function<bool(const Configuration&)>;

/// An event fixing some coordinates; unset entries are free.
struct Cylinder {
  int left = -1;
  std::vector<int> slices;  ///< -1 = free
  std::vector<int> rungs;   ///< -1 = free
  bool contains(const Configuration& c) const;
  Event event() const {
    return [c = *this](const Configuration& x) { return c.contains(x); };
  }
};

class ReducibleKernel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Nonnegative square matrix with some strictly positive power (checked).
class TransferKernel {
 public:
  TransferKernel(int size, std::vector<double> entries);

  int size() const { return n_; }
  double operator()(int s, int t) const { return k_[static_cast<std::size_t>(s) * n_ + t]; }
  const std::vector<double>& entries() const { return k_; }

  std::vector<double> apply(const std::vector<double>& x) const;       ///< k x
  std::vector<double> apply_left(const std::vector<double>& y) const;  ///< y^T k

 private:
  int n_;
  std::vector<double> k_;
};

/// k(s, s') = sum_r exp(-h_middle(s, r, s')).
TransferKernel kernel_from_spec(const GibbsSpec& spec);

struct Eigenpair {
  double lambda = 0.0;
  std::vector<double> v;       ///< left eigenvector
  std::vector<double> v_star;  ///< right eigenvector, <v, v*> = 1
  double gap = 0.0;            ///< |lambda_2| / lambda
  double residual_right = 0.0;  ///< ||k u - lambda u||_inf, ||u||_inf = 1
  double residual_left = 0.0;
  int iterations = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

Eigenpair leading_eigenpair(const TransferKernel& k, double tol = 1e-13, int max_iter = 1'000'000);

/// g^f_{[0,l]}(b) for every boundary slice state b.
std::vector<double> boundary_weights(const GibbsSpec& spec, int l, const Observable& f);

/// E^(n)[f] for f depending on [0, l], l < n: the measure on left, slices
/// 1..n and rungs 1..n-1 with density exp(-H) g_right(s_n).
double finite_volume_expectation(const GibbsSpec& spec, int n, int l, const Observable& f);
double finite_volume_expectation(const GibbsSpec& spec, const Eigenpair& eig, int n, int l,
                                 const Observable& f);

/// <g^f v*> / <g^1 v*>.
double infinite_volume_expectation(const GibbsSpec& spec, int l, const Observable& f);
double infinite_volume_expectation(const GibbsSpec& spec, const Eigenpair& eig, int l,
                                   const Observable& f);

/// |P(omega_[0,n] in A | slice n+1 = b) - K_[0,n](A, b)|, the left side by
/// enumerating the infinite-volume marginal on [0, n+1].
double dlr_check(const GibbsSpec& spec, int n, const Event& a, int boundary);

/// E^(n)[f] by summing exp(-H) g_right over every configuration of the
/// finite-volume measure. Exponential cost; for verification only.
double brute_force_expectation(const GibbsSpec& spec, int n, int l, const Observable& f);

/// A fixed family of small specs (|S| in 2..4, |R| in 1..3, |L| in 1..2)
/// with energies drawn from `seed`.
std::vector<GibbsSpec> toy_specs(std::uint64_t seed = 2024);

/// The built-in three-state spec used for the thermodynamic-limit check;
/// h_middle is symmetric in the two slices so the spectrum is real.
GibbsSpec default_toy_spec();

struct LimitCurve {
  std::vector<int> depths;
  std::vector<double> gaps;  ///< |E^(n)[f] - E[f]|
  stats::FitResult fit;      ///< ln gap against n
  bool fitted = false;
  double rate = 0.0;         ///< exp(slope)
  double spectral_ratio = 0.0;
};

/// Gaps below `floor` are treated as converged and left out of the fit.
LimitCurve thermodynamic_limit_curve(const GibbsSpec& spec, int l, const Observable& f,
                                     const std::vector<int>& depths, double floor = 1e-12);

}  // namespace errw::gibbs
