#include "errw/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "errw/rng.hpp"

namespace errw::gibbs {

using nlohmann::json;

void GibbsSpec::validate() const {
  if (left_states < 1 || slice_states < 1 || rung_states < 1) {
    throw std::invalid_argument("gibbs spec: state spaces must be nonempty");
  }
  if (h_left.size() != static_cast<std::size_t>(left_states) * slice_states) {
    throw std::invalid_argument("gibbs spec: h_left must be L x S");
  }
  if (h_middle.size() != static_cast<std::size_t>(slice_states) * rung_states * slice_states) {
    throw std::invalid_argument("gibbs spec: h_middle must be S x R x S");
  }
  if (g_right.size() != static_cast<std::size_t>(slice_states)) {
    throw std::invalid_argument("gibbs spec: g_right must have S entries");
  }
  for (double h : h_left) {
    if (!std::isfinite(h)) throw std::invalid_argument("gibbs spec: non-finite h_left");
  }
  for (double h : h_middle) {
    if (!std::isfinite(h)) throw std::invalid_argument("gibbs spec: non-finite h_middle");
  }
  for (double g : g_right) {
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("gibbs spec: g_right must be positive");
  }
}

GibbsSpec spec_from_json_text(const std::string& text) {
  const json j = json::parse(text);
  GibbsSpec s;
  s.left_states = j.at("left_states").get<int>();
  s.slice_states = j.at("slice_states").get<int>();
  s.rung_states = j.at("rung_states").get<int>();
  for (const auto& row : j.at("h_left")) {
    for (const auto& h : row) s.h_left.push_back(h.get<double>());
  }
  for (const auto& a : j.at("h_middle")) {
    for (const auto& b : a) {
      for (const auto& h : b) s.h_middle.push_back(h.get<double>());
    }
  }
  if (j.contains("g_right")) {
    s.g_right = j["g_right"].get<std::vector<double>>();
  } else {
    s.g_right.assign(static_cast<std::size_t>(s.slice_states), 1.0);
  }
  s.validate();
  return s;
}

GibbsSpec spec_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return spec_from_json_text(ss.str());
}

std::string spec_to_json_text(const GibbsSpec& s) {
  json j;
  j["left_states"] = s.left_states;
  j["slice_states"] = s.slice_states;
  j["rung_states"] = s.rung_states;
  json hl = json::array();
  for (int l = 0; l < s.left_states; ++l) {
    json row = json::array();
    for (int t = 0; t < s.slice_states; ++t) row.push_back(s.left(l, t));
    hl.push_back(row);
  }
  j["h_left"] = hl;
  json hm = json::array();
  for (int a = 0; a < s.slice_states; ++a) {
    json mid = json::array();
    for (int r = 0; r < s.rung_states; ++r) {
      json row = json::array();
      for (int b = 0; b < s.slice_states; ++b) row.push_back(s.middle(a, r, b));
      mid.push_back(row);
    }
    hm.push_back(mid);
  }
  j["h_middle"] = hm;
  j["g_right"] = s.g_right;
  return j.dump(2);
}

bool Cylinder::contains(const Configuration& c) const {
  if (left >= 0 && c.left != left) return false;
  for (std::size_t i = 0; i < slices.size() && i < c.slices.size(); ++i) {
    if (slices[i] >= 0 && c.slices[i] != slices[i]) return false;
  }
  for (std::size_t i = 0; i < rungs.size() && i < c.rungs.size(); ++i) {
    if (rungs[i] >= 0 && c.rungs[i] != rungs[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

using BoolMatrix = std::vector<std::vector<char>>;

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t n = a.size();
  BoolMatrix c(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!a[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] |= b[k][j];
    }
  }
  return c;
}

std::string state_list(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? ", " : "") + std::to_string(s[i]);
  return out + "}";
}

/// Throws ReducibleKernel unless some power of the support is all positive.
void check_primitive(int n, const std::vector<double>& k) {
  BoolMatrix b(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b[i][j] = k[static_cast<std::size_t>(i) * n + j] > 0.0;
  }
  // Reachability first, to name a closed block when irreducibility fails.
  BoolMatrix reach = b;
  for (int m = 0; m < n; ++m) {
    for (int i = 0; i < n; ++i) {
      if (!reach[i][m]) continue;
      for (int j = 0; j < n; ++j) reach[i][j] |= reach[m][j];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!reach[i][j]) {
        std::vector<int> block;
        for (int t = 0; t < n; ++t) {
          if (reach[i][t]) block.push_back(t);
        }
        throw ReducibleKernel("transfer kernel is reducible: from state " + std::to_string(i) +
                              " only the block " + state_list(block) + " is reachable (state " +
                              std::to_string(j) + " is not)");
      }
    }
  }
  // Irreducible. Primitive iff the (n-1)^2 + 1 power is positive.
  std::uint64_t e = static_cast<std::uint64_t>(n - 1) * (n - 1) + 1;
  BoolMatrix result(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) result[i][i] = 1;
  BoolMatrix base = b;
  while (e) {
    if (e & 1) result = bool_product(result, base);
    e >>= 1;
    if (e) base = bool_product(base, base);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!result[i][j]) {
        // Period from breadth-first levels: gcd of level(i) + 1 - level(j).
        std::vector<int> level(n, -1);
        std::vector<int> queue{0};
        level[0] = 0;
        for (std::size_t q = 0; q < queue.size(); ++q) {
          const int u = queue[q];
          for (int v = 0; v < n; ++v) {
            if (b[u][v] && level[v] < 0) {
              level[v] = level[u] + 1;
              queue.push_back(v);
            }
          }
        }
        int d = 0;
        for (int u = 0; u < n; ++u) {
          for (int v = 0; v < n; ++v) {
            if (b[u][v]) d = std::gcd(d, std::abs(level[u] + 1 - level[v]));
          }
        }
        throw ReducibleKernel("transfer kernel is irreducible but periodic with period " +
                              std::to_string(d) + "; no power is strictly positive");
      }
    }
  }
}

double inf_norm(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TransferKernel::TransferKernel(int size, std::vector<double> entries) : n_(size), k_(std::move(entries)) {
  if (n_ < 1) throw std::invalid_argument("transfer kernel must be nonempty");
  if (k_.size() != static_cast<std::size_t>(n_) * n_) {
    throw std::invalid_argument("transfer kernel must be square");
  }
  for (double v : k_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("transfer kernel entries must be finite and >= 0");
  }
  check_primitive(n_, k_);
}

std::vector<double> TransferKernel::apply(const std::vector<double>& x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

std::vector<double> TransferKernel::apply_left(const std::vector<double>& y) const {
  std::vector<double> x(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) x[j] += y[i] * (*this)(i, j);
  }
  return x;
}

TransferKernel kernel_from_spec(const GibbsSpec& spec) {
  spec.validate();
  const int n = spec.slice_states;
  std::vector<double> k(static_cast<std::size_t>(n) * n, 0.0);
  for (int s = 0; s < n; ++s) {
    for (int t = 0; t < n; ++t) {
      double sum = 0.0;
      for (int r = 0; r < spec.rung_states; ++r) sum += std::exp(-spec.middle(s, r, t));
      k[static_cast<std::size_t>(s) * n + t] = sum;
    }
  }
  return TransferKernel(n, std::move(k));
}

Eigenpair leading_eigenpair(const TransferKernel& k, double tol, int max_iter) {
  const int n = k.size();
  std::vector<double> u(n, 1.0), w(n, 1.0);
  Eigenpair e;
  double res = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    auto ku = k.apply(u);
    auto wk = k.apply_left(w);
    const double lambda = dot(w, ku) / dot(w, u);
    double rr = 0.0, rl = 0.0;
    for (int i = 0; i < n; ++i) {
      rr = std::max(rr, std::fabs(ku[i] - lambda * u[i]));
      rl = std::max(rl, std::fabs(wk[i] - lambda * w[i]));
    }
    res = std::max(rr, rl);
    if (res <= tol * std::max(1.0, lambda)) {
      e.lambda = lambda;
      e.residual_right = rr;
      e.residual_left = rl;
      e.iterations = it;
      break;
    }
    const double nu = inf_norm(ku), nw = inf_norm(wk);
    for (int i = 0; i < n; ++i) {
      u[i] = ku[i] / nu;
      w[i] = wk[i] / nw;
    }
    if (it == max_iter) {
      throw ConvergenceError("power iteration did not converge in " + std::to_string(max_iter) +
                                 " iterations (residual " + std::to_string(res) + ")",
                             res);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!(u[i] > 0.0) || !(w[i] > 0.0)) throw std::logic_error("leading eigenvector is not positive");
  }
  const double c = dot(w, u);
  e.v = w;
  e.v_star = u;
  for (double& x : e.v_star) x /= c;

  // |lambda_2| / lambda: growth rate of the deflated map x -> K^ x - v* <v, x>.
  auto deflate = [&](std::vector<double> x) {
    const double p = dot(e.v, x);
    for (int i = 0; i < n; ++i) x[i] -= p * e.v_star[i];
    return x;
  };
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.618 * ((i * 7919) % 11) - 0.5 * (i % 2);
  x = deflate(x);
  if (inf_norm(x) == 0.0 || n == 1) {
    e.gap = 0.0;
    return e;
  }
  constexpr int kBurn = 500, kWindow = 4000;
  double log_growth = 0.0;
  for (int it = 0; it < kBurn + kWindow; ++it) {
    const double before = inf_norm(x);
    auto y = k.apply(x);
    for (double& v : y) v /= e.lambda;
    y = deflate(y);
    const double after = inf_norm(y);
    if (after <= 1e-15 * before) {
      e.gap = 0.0;
      return e;
    }
    if (it >= kBurn) log_growth += std::log(after / before);
    for (int i = 0; i < n; ++i) x[i] = y[i] / after;
  }
  e.gap = std::exp(log_growth / kWindow);
  return e;
}

// ---------------------------------------------------------------------------

namespace {

/// Visits every assignment of `radices` in lexicographic order.
template <class F>
void odometer(const std::vector<int>& radices, F&& visit) {
  std::vector<int> digits(radices.size(), 0);
  for (int r : radices) {
    if (r <= 0) return;
  }
  while (true) {
    visit(digits);
    std::size_t i = digits.size();
    while (i > 0) {
      --i;
      if (++digits[i] < radices[i]) break;
      digits[i] = 0;
      if (i == 0) return;
    }
    if (digits.empty()) return;
  }
}

/// Energy of [0, l] with boundary slice l + 1 = b.
double volume_energy(const GibbsSpec& spec, const Configuration& c, int b) {
  const int l = static_cast<int>(c.rungs.size());
  const int s1 = l == 0 ? b : c.slices[0];
  double h = spec.left(c.left, s1);
  for (int i = 0; i < l; ++i) {
    const int next = i + 1 < l ? c.slices[i + 1] : b;
    h += spec.middle(c.slices[i], c.rungs[i], next);
  }
  return h;
}

void check_l(int l) {
  if (l < 0) throw std::invalid_argument("volume [0, l] needs l >= 0");
}

}  // namespace

std::vector<double> boundary_weights(const GibbsSpec& spec, int l, const Observable& f) {
  spec.validate();
  check_l(l);
  std::vector<int> radices{spec.left_states};
  for (int i = 0; i < l; ++i) radices.push_back(spec.slice_states);
  for (int i = 0; i < l; ++i) radices.push_back(spec.rung_states);
  std::vector<double> g(static_cast<std::size_t>(spec.slice_states), 0.0);
  Configuration c;
  c.slices.resize(l);
  c.rungs.resize(l);
  odometer(radices, [&](const std::vector<int>& d) {
    c.left = d[0];
    for (int i = 0; i < l; ++i) {
      c.slices[i] = d[1 + i];
      c.rungs[i] = d[1 + l + i];
    }
    const double fv = f(c);
    if (fv == 0.0) return;
    for (int b = 0; b < spec.slice_states; ++b) g[b] += fv * std::exp(-volume_energy(spec, c, b));
  });
  return g;
}

double finite_volume_expectation(const GibbsSpec& spec, const Eigenpair& eig, int n, int l,
                                 const Observable& f) {
  check_l(l);
  if (l >= n) throw std::invalid_argument("finite_volume_expectation needs l < n");
  const TransferKernel k = kernel_from_spec(spec);
  std::vector<double> w = spec.g_right;
  // P^(n) has slices 1..n; the boundary of [0, l] is slice l + 1, which
  // leaves n - 1 - l kernel steps to slice n.
  for (int step = 0; step < n - 1 - l; ++step) {
    w = k.apply(w);
    for (double& x : w) x /= eig.lambda;
  }
  const auto gf = boundary_weights(spec, l, f);
  const auto g1 = boundary_weights(spec, l, [](const Configuration&) { return 1.0; });
  return dot(gf, w) / dot(g1, w);
}

double finite_volume_expectation(const GibbsSpec& spec, int n, int l, const Observable& f) {
  return finite_volume_expectation(spec, leading_eigenpair(kernel_from_spec(spec)), n, l, f);
}

double infinite_volume_expectation(const GibbsSpec& spec, const Eigenpair& eig, int l,
                                   const Observable& f) {
  const auto gf = boundary_weights(spec, l, f);
  const auto g1 = boundary_weights(spec, l, [](const Configuration&) { return 1.0; });
  return dot(gf, eig.v_star) / dot(g1, eig.v_star);
}

double infinite_volume_expectation(const GibbsSpec& spec, int l, const Observable& f) {
  return infinite_volume_expectation(spec, leading_eigenpair(kernel_from_spec(spec)), l, f);
}

double dlr_check(const GibbsSpec& spec, int n, const Event& a, int boundary) {
  check_l(n);
  if (boundary < 0 || boundary >= spec.slice_states) throw std::invalid_argument("boundary state out of range");
  const Eigenpair eig = leading_eigenpair(kernel_from_spec(spec));
  // Free coordinates on [0, n+1] given slice n+1 = boundary: left,
  // slices 1..n, rungs 1..n+1, slice n+2.
  std::vector<int> radices{spec.left_states};
  for (int i = 0; i < n; ++i) radices.push_back(spec.slice_states);
  for (int i = 0; i < n + 1; ++i) radices.push_back(spec.rung_states);
  radices.push_back(spec.slice_states);
  double in_a = 0.0, total = 0.0;
  Configuration c;
  c.slices.resize(n);
  c.rungs.resize(n);
  std::vector<int> slices(n + 2);
  odometer(radices, [&](const std::vector<int>& d) {
    c.left = d[0];
    for (int i = 0; i < n; ++i) slices[i] = d[1 + i];
    slices[n] = boundary;
    slices[n + 1] = d.back();
    double h = spec.left(c.left, slices[0]);
    for (int i = 0; i < n + 1; ++i) h += spec.middle(slices[i], d[1 + n + i], slices[i + 1]);
    const double w = std::exp(-h) * eig.v_star[slices[n + 1]];
    for (int i = 0; i < n; ++i) {
      c.slices[i] = slices[i];
      c.rungs[i] = d[1 + n + i];
    }
    total += w;
    if (a(c)) in_a += w;
  });
  if (!(total > 0.0)) throw std::invalid_argument("boundary state has zero marginal mass");
  const auto ga = boundary_weights(spec, n, [&](const Configuration& x) { return a(x) ? 1.0 : 0.0; });
  const auto g1 = boundary_weights(spec, n, [](const Configuration&) { return 1.0; });
  return std::fabs(in_a / total - ga[boundary] / g1[boundary]);
}

double brute_force_expectation(const GibbsSpec& spec, int n, int l, const Observable& f) {
  spec.validate();
  check_l(l);
  if (l >= n) throw std::invalid_argument("brute_force_expectation needs l < n");
  // left, slices 1..n, rungs 1..n-1
  std::vector<int> radices{spec.left_states};
  for (int i = 0; i < n; ++i) radices.push_back(spec.slice_states);
  for (int i = 0; i < n - 1; ++i) radices.push_back(spec.rung_states);
  double num = 0.0, den = 0.0;
  Configuration c;
  c.slices.resize(l);
  c.rungs.resize(l);
  odometer(radices, [&](const std::vector<int>& d) {
    const int* s = d.data() + 1;
    const int* r = d.data() + 1 + n;
    double h = spec.left(d[0], s[0]);
    for (int i = 0; i + 1 < n; ++i) h += spec.middle(s[i], r[i], s[i + 1]);
    const double w = std::exp(-h) * spec.g_right[s[n - 1]];
    c.left = d[0];
    for (int i = 0; i < l; ++i) {
      c.slices[i] = s[i];
      c.rungs[i] = r[i];
    }
    den += w;
    num += w * f(c);
  });
  return num / den;
}

std::vector<GibbsSpec> toy_specs(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GibbsSpec> out;
  for (int S = 2; S <= 4; ++S) {
    for (int R = 1; R <= 3; ++R) {
      for (int L = 1; L <= 2; ++L) {
        GibbsSpec s;
        s.left_states = L;
        s.slice_states = S;
        s.rung_states = R;
        for (int i = 0; i < L * S; ++i) s.h_left.push_back(2.0 * rng.uniform() - 0.5);
        for (int i = 0; i < S * R * S; ++i) s.h_middle.push_back(3.0 * rng.uniform() - 1.0);
        for (int i = 0; i < S; ++i) s.g_right.push_back(0.2 + rng.uniform());
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

GibbsSpec default_toy_spec() {
  GibbsSpec s;
  s.left_states = 2;
  s.slice_states = 3;
  s.rung_states = 2;
  s.h_left = {0.3, 1.1, 0.0, 0.8, 0.2, 1.5};
  // Symmetric in (s, s') for each rung state.
  const double a[2][3][3] = {{{0.2, 1.0, 2.1}, {1.0, 0.5, 1.4}, {2.1, 1.4, 0.1}},
                             {{1.3, 0.4, 0.9}, {0.4, 2.0, 0.7}, {0.9, 0.7, 1.2}}};
  for (int x = 0; x < 3; ++x) {
    for (int r = 0; r < 2; ++r) {
      for (int y = 0; y < 3; ++y) s.h_middle.push_back(a[r][x][y]);
    }
  }
  s.g_right = {1.0, 0.2, 2.5};
  return s;
}

LimitCurve thermodynamic_limit_curve(const GibbsSpec& spec, int l, const Observable& f,
                                     const std::vector<int>& depths, double floor) {
  if (depths.size() < 3) throw std::invalid_argument("thermodynamic_limit_curve needs >= 3 depths");
  const Eigenpair eig = leading_eigenpair(kernel_from_spec(spec));
  const double limit = infinite_volume_expectation(spec, eig, l, f);
  LimitCurve out;
  out.depths = depths;
  out.spectral_ratio = eig.gap;
  std::vector<double> xs, ys;
  for (int n : depths) {
    const double gap = std::fabs(finite_volume_expectation(spec, eig, n, l, f) - limit);
    out.gaps.push_back(gap);
    if (gap > floor) {
      xs.push_back(n);
      ys.push_back(std::log(gap));
    }
  }
  if (xs.size() >= 2) {
    out.fit = stats::linear_fit(xs, ys);
    out.fitted = true;
    out.rate = std::exp(out.fit.slope);
  }
  return out;
}

}  // namespace errw::gibbs
