#include "delta_lab/fourier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "delta_lab/error.hpp"
#include "delta_lab/kernels.hpp"
#include "delta_lab/moments.hpp"

namespace delta_lab::fourier {

namespace {

using arith::FactoredInteger;

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// |sum_{j<=a} e^{ijx}|^2 / (a+1).
double prime_power_factor(double x, int a) {
  double s = 1.0;
  for (int m = 1; m <= a; ++m) s += 2.0 * (a + 1 - m) / (a + 1) * std::cos(m * x);
  return s;
}

// Integrand t -> |tau(b, scale t)|^2 / tau(b), evaluated in batches.
class EnergyIntegrand {
 public:
  EnergyIntegrand(const FactoredInteger& b, double scale) {
    for (const auto& [p, a] : b.factors()) {
      const double f = scale * std::log(static_cast<double>(p));
      if (a == 1) {
        squarefree_freqs_.push_back(f);
      } else {
        powers_.emplace_back(f, a);
      }
    }
  }

  void operator()(std::span<const double> t, std::span<double> out) const {
    kernels::cos_product(squarefree_freqs_, t, out);
    for (const auto& [f, a] : powers_) {
      for (std::size_t k = 0; k < t.size(); ++k) out[k] *= prime_power_factor(f * t[k], a);
    }
  }

  double max_frequency() const {
    double s = 0;
    for (double f : squarefree_freqs_) s += f;
    for (const auto& [f, a] : powers_) s += a * f;
    return s;
  }

 private:
  std::vector<double> squarefree_freqs_;
  std::vector<std::pair<double, int>> powers_;
};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const EnergyIntegrand& g, double lo, double hi) {
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  std::array<double, 15> t, v;
  for (int i = 0; i < 7; ++i) {
    t[2 * i] = c - h * kXgk[i];
    t[2 * i + 1] = c + h * kXgk[i];
  }
  t[14] = c;
  g(t, v);
  double kronrod = kWgk[7] * v[14];
  double gauss = kWg[3] * v[14];
  for (int i = 0; i < 7; ++i) {
    const double pair = v[2 * i] + v[2 * i + 1];
    kronrod += kWgk[i] * pair;
    if (i % 2 == 1) gauss += kWg[i / 2] * pair;
  }
  return {lo, hi, kronrod * h, std::fabs((kronrod - gauss) * h)};
}

std::string prime_warning(const FactoredInteger& b, double y) {
  for (const auto& pp : b.factors()) {
    if (static_cast<double>(pp.prime) < y) {
      return "b has prime factor " + std::to_string(pp.prime) + " below y";
    }
  }
  return {};
}

}  // namespace

DirichletEval tau_theta(const FactoredInteger& f, double theta) {
  std::complex<double> value = 1.0;
  for (const auto& [p, a] : f.factors()) {
    const double x = theta * std::log(static_cast<double>(p));
    std::complex<double> s = 0.0;
    for (int j = 0; j <= a; ++j) s += std::polar(1.0, j * x);
    value *= s;
  }
  return {f, theta, value, std::norm(value) / static_cast<double>(f.tau())};
}

QuadratureResult energy_exact(const FactoredInteger& b, double scale, double upper) {
  std::uint64_t terms = 1;
  for (const auto& pp : b.factors()) {
    terms *= static_cast<std::uint64_t>(2 * pp.exponent + 1);
    if (terms > kMaxExpansionTerms) {
      throw ResourceError("exact expansion of |tau|^2 exceeds term budget");
    }
  }
  // |tau(b, x)|^2 / tau(b) = prod_p sum_{|m|<=a} (a+1-|m|)/(a+1) e^{i m x log p};
  // each cosine term integrates in closed form: ∫_0^U cos(F t) dt = U sinc(F U).
  std::vector<double> freq{0.0}, weight{1.0};
  freq.reserve(terms);
  weight.reserve(terms);
  for (const auto& [p, a] : b.factors()) {
    const double base = scale * std::log(static_cast<double>(p));
    const std::size_t prev = freq.size();
    for (int m = -a; m <= a; ++m) {
      if (m == 0) continue;
      const double w = static_cast<double>(a + 1 - std::abs(m)) / (a + 1);
      for (std::size_t i = 0; i < prev; ++i) {
        freq.push_back(freq[i] + m * base);
        weight.push_back(weight[i] * w);
      }
    }
    // m = 0 keeps the existing prefix with weight (a+1)/(a+1) = 1.
  }
  for (double& f : freq) f *= upper;
  QuadratureResult r;
  r.value = upper * kernels::sinc_dot(freq, weight);
  r.abs_error_estimate = 0.0;
  r.evaluations = freq.size();
  r.method = QuadratureMethod::exact_expansion;
  return r;
}

QuadratureResult energy_adaptive(const FactoredInteger& b, double scale, double upper,
                                 double abs_tol, int max_subdivisions) {
  const EnergyIntegrand g(b, scale);
  // Start from panels about half an oscillation of the highest frequency wide.
  const double oscillations = upper * g.max_frequency() / 3.141592653589793;
  const int initial = static_cast<int>(std::clamp(std::ceil(oscillations) + 1, 1.0, 10'000.0));

  std::priority_queue<Panel> heap;
  double total = 0, total_err = 0;
  std::uint64_t evals = 0;
  for (int i = 0; i < initial; ++i) {
    const Panel p = gk15(g, upper * i / initial, upper * (i + 1) / initial);
    evals += 15;
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int splits = 0;
  while (total_err > abs_tol) {
    if (splits++ >= max_subdivisions) {
      throw NumericError("adaptive quadrature did not converge", total, total_err);
    }
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = gk15(g, worst.lo, mid);
    const Panel right = gk15(g, mid, worst.hi);
    evals += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  total = 0;
  total_err = 0;
  for (; !heap.empty(); heap.pop()) {
    total += heap.top().value;
    total_err += heap.top().error;
  }
  QuadratureResult r;
  r.value = total;
  r.abs_error_estimate = total_err;
  r.evaluations = evals;
  r.method = QuadratureMethod::adaptive;
  return r;
}

QuadratureResult energy_integral(const FactoredInteger& b, double scale, double upper) {
  std::uint64_t terms = 1;
  for (const auto& pp : b.factors()) {
    terms *= static_cast<std::uint64_t>(2 * pp.exponent + 1);
    if (terms > kMaxExpansionTerms) return energy_adaptive(b, scale, upper);
  }
  return energy_exact(b, scale, upper);
}

QuadratureResult d_y(const FactoredInteger& b, double y) {
  if (!(y >= 2.0)) throw ConfigError("d_y needs y >= 2");
  QuadratureResult r = energy_integral(b, 1.0 / std::log(y), 1.0);
  r.warning = prime_warning(b, y);
  return r;
}

ParsevalReport parseval_ratio(const FactoredInteger& n) {
  ParsevalReport r;
  r.lhs = static_cast<double>(moments::moment(n, 2) / static_cast<long double>(n.tau()));
  r.rhs = energy_integral(n, 1.0, 1.0).value;
  r.ratio = r.lhs / r.rhs;
  return r;
}

CosineSumReport cosine_sum_check(double psi, double y, const arith::PrimeRange& primes) {
  if (!(psi >= 0.0 && psi <= 1.0)) throw ConfigError("psi must lie in [0, 1]");
  if (!(y >= 2.0)) throw ConfigError("cosine_sum_check needs y >= 2");
  if (primes.lo > 2 || static_cast<double>(primes.hi) <= std::floor(y)) {
    throw ConfigError("prime table does not cover [2, y]");
  }
  std::vector<double> logs, inv;
  for (auto p : primes.primes) {
    if (static_cast<double>(p) > y) break;
    logs.push_back(std::log(static_cast<double>(p)));
    inv.push_back(1.0 / static_cast<double>(p));
  }
  CosineSumReport r;
  r.psi = psi;
  r.y = y;
  r.sum = kernels::cos_dot(psi, logs, inv);
  r.model = std::log(std::log(y) / (1.0 + psi * std::log(y)));
  r.deviation = r.sum - r.model;
  return r;
}

CosineSumReport cosine_sum_check(double psi, double y) {
  if (!(y >= 2.0)) throw ConfigError("cosine_sum_check needs y >= 2");
  return cosine_sum_check(psi, y,
                          arith::primes_in_range(2, static_cast<std::uint64_t>(std::floor(y)) + 1));
}

}  // namespace delta_lab::fourier
