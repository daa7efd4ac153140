#include "sigkit/reliability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

namespace sigkit {

namespace {

constexpr int kMaxDirectComponents = 12;
constexpr int kMaxCheckComponents = 8;
constexpr double kAnalyticTolerance = 1e-12;

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw OutOfRange("time must be finite and >= 0");
}

// Probability of each per-component (x_j, y_j) pattern, indexed x_j | y_j << 1.
using Factors = std::array<double, 4>;

Factors pattern_factors(const Cdf& cdf, double t1, double t2) {
  const double lo = cdf(std::min(t1, t2));
  const double hi = cdf(std::max(t1, t2));
  Factors f{};
  f[0] = lo;
  f[3] = 1.0 - hi;
  if (t1 <= t2) {
    f[1] = std::max(0.0, hi - lo);
  } else {
    f[2] = std::max(0.0, hi - lo);
  }
  return f;
}

int pattern(Subset x, Subset y, int j) { return static_cast<int>(((x >> j) & 1u) | (((y >> j) & 1u) << 1)); }

// Per-term, per-component factors of an analytic model. Products have one
// term with weight 1.
struct AnalyticLaw {
  std::vector<double> weights;
  std::vector<std::vector<Factors>> factors;

  double operator()(Subset x, Subset y) const {
    double total = 0.0;
    for (std::size_t term = 0; term < weights.size(); ++term) {
      double p = weights[term];
      for (std::size_t j = 0; j < factors[term].size() && p != 0.0; ++j) p *= factors[term][j][pattern(x, y, j)];
      total += p;
    }
    return total;
  }
};

std::pair<Subset, Subset> states_at(std::span<const double> times, double t1, double t2) {
  Subset x = 0, y = 0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (times[j] > t1) x |= Subset{1} << j;
    if (times[j] > t2) y |= Subset{1} << j;
  }
  return {x, y};
}

double binomial_double(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double iid_order_stat(int n, int k, int l, const Cdf& cdf, double t1, double t2) {
  const bool ordered = t1 <= t2;
  const double lo = cdf(ordered ? t1 : t2);
  const double hi = cdf(ordered ? t2 : t1);
  const double a = lo, b = std::max(0.0, hi - lo), c = 1.0 - hi;
  // Alive beyond the earlier time: j + m; beyond the later time: m.
  const int need_early = n - (ordered ? k : l) + 1;
  const int need_late = n - (ordered ? l : k) + 1;
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const int m = n - i - j;
      if (j + m < need_early || m < need_late) continue;
      total += binomial_double(n, i) * binomial_double(n - i, j) * std::pow(a, i) * std::pow(b, j) * std::pow(c, m);
    }
  }
  return total;
}

std::vector<int> pattern_counts(Subset x, Subset y, int n) {
  std::vector<int> c(4, 0);
  for (int j = 0; j < n; ++j) ++c[pattern(x, y, j)];
  return c;
}

// A permutation sending (x, y) to (x2, y2) componentwise; both pairs must
// have the same pattern counts.
Permutation matching_permutation(Subset x, Subset y, Subset x2, Subset y2, int n) {
  std::array<std::vector<int>, 4> from, to;
  for (int j = 0; j < n; ++j) {
    from[pattern(x, y, j)].push_back(j);
    to[pattern(x2, y2, j)].push_back(j);
  }
  Permutation sigma(n);
  for (int p = 0; p < 4; ++p) {
    for (std::size_t i = 0; i < from[p].size(); ++i) sigma[from[p][i]] = to[p][i] + 1;
  }
  return sigma;
}

double band_z(double p, double mean, std::uint64_t samples) {
  const double se = std::sqrt(mean * (1.0 - mean) / static_cast<double>(samples));
  if (se == 0.0) return p == mean ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(p - mean) / se;
}

}  // namespace

ComponentStateModel ComponentStateModel::iid_product(int n, Cdf cdf) {
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
  ComponentStateModel m;
  m.n_ = n;
  m.kind_ = StateModelKind::iid_product;
  m.cdfs_ = {std::move(cdf)};
  return m;
}

ComponentStateModel ComponentStateModel::independent_product(std::vector<Cdf> cdfs) {
  const int n = static_cast<int>(cdfs.size());
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
  ComponentStateModel m;
  m.n_ = n;
  m.kind_ = StateModelKind::independent_product;
  m.cdfs_ = std::move(cdfs);
  return m;
}

ComponentStateModel ComponentStateModel::mixture_product(int n, std::vector<std::pair<double, Cdf>> components) {
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
  if (components.empty()) throw InputError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& [w, cdf] : components) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InputError("mixture weight must be finite and > 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("mixture weights must sum to 1");
  ComponentStateModel m;
  m.n_ = n;
  m.kind_ = StateModelKind::mixture_product;
  for (auto& [w, cdf] : components) {
    m.weights_.push_back(w / total);
    m.cdfs_.push_back(std::move(cdf));
  }
  return m;
}

ComponentStateModel ComponentStateModel::from_lifetime_model(const LifetimeModel& model) {
  const auto as_cdf = [](const Marginal& marginal) -> Cdf { return [marginal](double t) { return marginal.cdf(t); }; };
  switch (model.kind()) {
    case LifetimeKind::iid:
      return iid_product(model.n(), as_cdf(model.marginals().front()));
    case LifetimeKind::independent: {
      std::vector<Cdf> cdfs;
      for (const auto& m : model.marginals()) cdfs.push_back(as_cdf(m));
      return independent_product(std::move(cdfs));
    }
    case LifetimeKind::exchangeable_mixture: {
      std::vector<std::pair<double, Cdf>> parts;
      for (const auto& c : model.mixture()) parts.emplace_back(c.weight, as_cdf(c.marginal));
      return mixture_product(model.n(), std::move(parts));
    }
  }
  throw InvariantViolation("unknown lifetime model kind");
}

ComponentStateModel ComponentStateModel::empirical(const LifetimeModel& model, const SamplingConfig& config) {
  const auto draws = sample(model, config);
  auto data = std::make_shared<std::vector<double>>();
  data->reserve(draws.size() * model.n());
  for (const auto& s : draws) data->insert(data->end(), s.times().begin(), s.times().end());
  ComponentStateModel m;
  m.n_ = model.n();
  m.kind_ = StateModelKind::empirical;
  m.samples_ = std::move(data);
  return m;
}

std::uint64_t ComponentStateModel::samples() const { return samples_ ? samples_->size() / n_ : 0; }

const std::vector<double>& ComponentStateModel::sample_data() const {
  if (!samples_) throw InvariantViolation("state model has no samples");
  return *samples_;
}

namespace {

AnalyticLaw analytic_law(const ComponentStateModel& states, double t1, double t2) {
  AnalyticLaw law;
  const int n = states.n();
  const auto& cdfs = states.cdfs();
  switch (states.kind()) {
    case StateModelKind::iid_product:
      law.weights = {1.0};
      law.factors = {std::vector<Factors>(n, pattern_factors(cdfs.front(), t1, t2))};
      break;
    case StateModelKind::independent_product: {
      law.weights = {1.0};
      std::vector<Factors> f;
      for (const auto& cdf : cdfs) f.push_back(pattern_factors(cdf, t1, t2));
      law.factors = {std::move(f)};
      break;
    }
    case StateModelKind::mixture_product:
      law.weights = states.weights();
      for (const auto& cdf : cdfs) law.factors.emplace_back(n, pattern_factors(cdf, t1, t2));
      break;
    case StateModelKind::empirical:
      throw InvariantViolation("empirical state model has no analytic law");
  }
  return law;
}

template <class Visit>
void for_each_sample_state(const ComponentStateModel& states, double t1, double t2, Visit&& visit) {
  const auto& data = states.sample_data();
  const std::size_t n = static_cast<std::size_t>(states.n());
  for (std::size_t off = 0; off < data.size(); off += n) {
    const auto [x, y] = states_at(std::span<const double>(data.data() + off, n), t1, t2);
    visit(x, y);
  }
}

}  // namespace

double ComponentStateModel::probability(Subset x, Subset y, double t1, double t2) const {
  check_time(t1);
  check_time(t2);
  const Subset full = full_set(n_);
  if ((x & ~full) || (y & ~full)) throw SubsetOutOfRange("state vector has bits beyond n");
  if (!analytic()) {
    std::uint64_t hits = 0;
    for_each_sample_state(*this, t1, t2, [&](Subset sx, Subset sy) { hits += (sx == x && sy == y); });
    return static_cast<double>(hits) / static_cast<double>(samples());
  }
  return analytic_law(*this, t1, t2)(x, y);
}

std::vector<double> ComponentStateModel::state_table(double t1, double t2) const {
  check_time(t1);
  check_time(t2);
  if (n_ > kMaxCheckComponents) throw SizeLimitExceeded("state tables need n <= 8");
  const std::size_t side = std::size_t{1} << n_;
  std::vector<double> table(side * side, 0.0);
  if (!analytic()) {
    for_each_sample_state(*this, t1, t2, [&](Subset x, Subset y) { table[x | (std::size_t{y} << n_)] += 1.0; });
    for (auto& v : table) v /= static_cast<double>(samples());
    return table;
  }
  const auto law = analytic_law(*this, t1, t2);
  for (Subset y = 0; y < side; ++y) {
    for (Subset x = 0; x < side; ++x) table[x | (std::size_t{y} << n_)] = law(x, y);
  }
  return table;
}

bool is_nonincreasing_on_grid(const JointReliabilitySurface& surface, const std::vector<double>& t1s,
                              const std::vector<double>& t2s, double slack) {
  auto a = t1s, b = t2s;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double v = surface(a[i], b[j]);
      if (v < -slack || v > 1.0 + slack) return false;
      if (i > 0 && v > surface(a[i - 1], b[j]) + slack) return false;
      if (j > 0 && v > surface(a[i], b[j - 1]) + slack) return false;
    }
  }
  return true;
}

double joint_reliability_direct(const StructureFunction& phi1, const StructureFunction& phi2,
                                const ComponentStateModel& states, double t1, double t2) {
  if (phi1.n() != phi2.n() || phi1.n() != states.n()) throw DimensionMismatch("systems and state model differ in n");
  check_time(t1);
  check_time(t2);
  const int n = states.n();
  if (!states.analytic()) {
    std::uint64_t hits = 0;
    for_each_sample_state(states, t1, t2, [&](Subset x, Subset y) { hits += phi1(x) && phi2(y); });
    return static_cast<double>(hits) / static_cast<double>(states.samples());
  }
  if (n > kMaxDirectComponents) throw SizeLimitExceeded("direct joint reliability needs n <= 12");
  const auto law = analytic_law(states, t1, t2);
  const Subset full = full_set(n);
  // Nonrepairable components: the state at the later time is a subset of the
  // state at the earlier time.
  const bool ordered = t1 <= t2;
  const auto& outer = ordered ? phi1 : phi2;
  const auto& inner = ordered ? phi2 : phi1;
  double total = 0.0;
  for (Subset a = 0;; ++a) {
    if (outer(a)) {
      for (Subset b = a;; b = (b - 1) & a) {
        if (inner(b)) total += ordered ? law(a, b) : law(b, a);
        if (b == 0) break;
      }
    }
    if (a == full) break;
  }
  return total;
}

JointReliabilitySurface joint_reliability_surface(const StructureFunction& phi1, const StructureFunction& phi2,
                                                  const ComponentStateModel& states) {
  return {[phi1, phi2, states](double t1, double t2) { return joint_reliability_direct(phi1, phi2, states, t1, t2); },
          "direct"};
}

double order_stat_joint_reliability(int n, int k, int l, const ComponentStateModel& states, double t1, double t2) {
  if (n != states.n()) throw DimensionMismatch("order statistics and state model differ in n");
  if (k < 1 || k > n || l < 1 || l > n) throw OutOfRange("order statistic index outside [1, n]");
  check_time(t1);
  check_time(t2);
  switch (states.kind()) {
    case StateModelKind::iid_product:
      return iid_order_stat(n, k, l, states.cdfs().front(), t1, t2);
    case StateModelKind::mixture_product: {
      double total = 0.0;
      for (std::size_t i = 0; i < states.weights().size(); ++i) {
        total += states.weights()[i] * iid_order_stat(n, k, l, states.cdfs()[i], t1, t2);
      }
      return total;
    }
    default:
      return joint_reliability_direct(StructureFunction::k_out_of_n(n, k), StructureFunction::k_out_of_n(n, l), states,
                                       t1, t2);
  }
}

OrderStatFactory order_stat_surfaces(const ComponentStateModel& states) {
  return [states](int k, int l) {
    const int n = states.n();
    return JointReliabilitySurface{
        [states, n, k, l](double t1, double t2) { return order_stat_joint_reliability(n, k, l, states, t1, t2); },
        "T" + std::to_string(k) + ":" + std::to_string(n) + ",T" + std::to_string(l) + ":" + std::to_string(n)};
  };
}

double decompose_joint_reliability(const Matrix<double>& s, const OrderStatFactory& orderstats, double t1, double t2) {
  if (s.rows() != s.cols() || s.rows() < 1) throw DimensionMismatch("signature matrix must be square");
  double total = 0.0;
  for (int k = 0; k < s.rows(); ++k) {
    for (int l = 0; l < s.cols(); ++l) {
      if (s(k, l) != 0.0) total += s(k, l) * orderstats(k + 1, l + 1)(t1, t2);
    }
  }
  return total;
}

double decompose_joint_reliability(const Matrix<Rational>& s, const OrderStatFactory& orderstats, double t1,
                                   double t2) {
  validate_joint_signature(s);
  const Matrix<double> sd = s.unaryExpr([](const Rational& r) { return r.to_double(); });
  return decompose_joint_reliability(sd, orderstats, t1, t2);
}

std::vector<ResidualPoint> decomposition_residuals(const StructureFunction& phi1, const StructureFunction& phi2,
                                                   const ComponentStateModel& states, const std::vector<double>& t1s,
                                                   const std::vector<double>& t2s, Parallelism par) {
  if (phi1.n() != phi2.n() || phi1.n() != states.n()) throw DimensionMismatch("systems and state model differ in n");
  for (double t : t1s) check_time(t);
  for (double t : t2s) check_time(t);
  const auto s = joint_structure_signature(phi1, phi2, par);
  validate_joint_signature(s);
  const Matrix<double> sd = s.unaryExpr([](const Rational& r) { return r.to_double(); });
  const auto factory = order_stat_surfaces(states);
  std::vector<ResidualPoint> out(t1s.size() * t2s.size());
  parallel_for(out.size(), par, [&](std::size_t i, std::size_t) {
    const double t1 = t1s[i / t2s.size()];
    const double t2 = t2s[i % t2s.size()];
    const double direct = joint_reliability_direct(phi1, phi2, states, t1, t2);
    const double decomposed = decompose_joint_reliability(sd, factory, t1, t2);
    out[i] = {t1, t2, direct, decomposed, std::abs(decomposed - direct)};
  });
  return out;
}

Subset apply_permutation(const Permutation& sigma, Subset x) {
  Subset out = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if ((x >> i) & 1u) out |= Subset{1} << (sigma[i] - 1);
  }
  return out;
}

Condition12Result check_condition_12(const ComponentStateModel& states, double t1, double t2, double sigmas) {
  const int n = states.n();
  if (n > kMaxCheckComponents) throw SizeLimitExceeded("condition checks need n <= 8");
  const auto table = states.state_table(t1, t2);
  const Subset side = Subset{1} << n;
  // Simultaneous permutations act on (x, y) through the counts of each
  // per-component pattern, so orbits are keyed by those counts.
  std::map<std::vector<int>, std::vector<std::size_t>> orbits;
  for (std::size_t i = 0; i < table.size(); ++i) {
    orbits[pattern_counts(static_cast<Subset>(i & (side - 1)), static_cast<Subset>(i >> n), n)].push_back(i);
  }
  Condition12Result result{true, 0.0, std::nullopt};
  for (const auto& [key, cells] : orbits) {
    const std::size_t rep = cells.front();
    double mean = 0.0;
    for (std::size_t c : cells) mean += table[c];
    mean /= static_cast<double>(cells.size());
    for (std::size_t c : cells) {
      const double dev =
          states.analytic() ? std::abs(table[c] - table[rep]) : band_z(table[c], mean, states.samples());
      result.max_deviation = std::max(result.max_deviation, dev);
      const bool bad = states.analytic() ? dev > kAnalyticTolerance : dev > sigmas;
      if (bad && result.holds) {
        result.holds = false;
        const Subset x = static_cast<Subset>(rep & (side - 1)), y = static_cast<Subset>(rep >> n);
        const Subset x2 = static_cast<Subset>(c & (side - 1)), y2 = static_cast<Subset>(c >> n);
        result.witness = Condition12Witness{x, y, matching_permutation(x, y, x2, y2, n), table[rep], table[c]};
      }
    }
  }
  return result;
}

StateExchangeabilityResult check_state_exchangeability(const ComponentStateModel& states, double t, double sigmas) {
  const int n = states.n();
  if (n > kMaxCheckComponents) throw SizeLimitExceeded("condition checks need n <= 8");
  const auto table = states.state_table(t, t + 1.0);
  const Subset side = Subset{1} << n;
  std::vector<double> marginal(side, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) marginal[i & (side - 1)] += table[i];
  std::vector<std::vector<Subset>> orbits(n + 1);
  for (Subset x = 0; x < side; ++x) orbits[cardinality(x)].push_back(x);
  StateExchangeabilityResult result{true, 0.0, std::nullopt};
  for (const auto& cells : orbits) {
    const Subset rep = cells.front();
    double mean = 0.0;
    for (Subset c : cells) mean += marginal[c];
    mean /= static_cast<double>(cells.size());
    for (Subset c : cells) {
      const double dev =
          states.analytic() ? std::abs(marginal[c] - marginal[rep]) : band_z(marginal[c], mean, states.samples());
      result.max_deviation = std::max(result.max_deviation, dev);
      const bool bad = states.analytic() ? dev > kAnalyticTolerance : dev > sigmas;
      if (bad && result.holds) {
        result.holds = false;
        result.witness = StateExchangeabilityWitness{rep, matching_permutation(rep, 0, c, 0, n), marginal[rep], marginal[c]};
      }
    }
  }
  return result;
}

}  // namespace sigkit
