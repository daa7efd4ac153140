#include "sigkit/lifetimes.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sigkit {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be finite and > 0");
}

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::mt19937_64 partition_engine(std::uint64_t seed, unsigned partition, unsigned partitions) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), partition, partitions};
  return std::mt19937_64(seq);
}

}  // namespace

Marginal::Marginal(Exponential e) : params_(e) { require_positive(e.rate, "exponential rate"); }

Marginal::Marginal(Weibull w) : params_(w) {
  require_positive(w.shape, "weibull shape");
  require_positive(w.scale, "weibull scale");
}

Marginal::Marginal(Uniform u) : params_(u) { require_positive(u.upper, "uniform upper bound"); }

double Marginal::cdf(double t) const {
  if (t <= 0.0) return 0.0;
  return std::visit(Overloaded{[&](const Exponential& e) { return -std::expm1(-e.rate * t); },
                               [&](const Weibull& w) { return -std::expm1(-std::pow(t / w.scale, w.shape)); },
                               [&](const Uniform& u) { return std::min(1.0, t / u.upper); }},
                    params_);
}

double Marginal::mean() const {
  return std::visit(Overloaded{[](const Exponential& e) { return 1.0 / e.rate; },
                               [](const Weibull& w) { return w.scale * std::tgamma(1.0 + 1.0 / w.shape); },
                               [](const Uniform& u) { return u.upper / 2.0; }},
                    params_);
}

double Marginal::draw(std::mt19937_64& engine) const {
  return std::visit(Overloaded{[&](const Exponential& e) { return std::exponential_distribution<double>(e.rate)(engine); },
                               [&](const Weibull& w) { return std::weibull_distribution<double>(w.shape, w.scale)(engine); },
                               [&](const Uniform& u) { return std::uniform_real_distribution<double>(0.0, u.upper)(engine); }},
                    params_);
}

LifetimeModel LifetimeModel::iid(int n, Marginal marginal) {
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
  LifetimeModel m;
  m.n_ = n;
  m.kind_ = LifetimeKind::iid;
  m.marginals_ = {marginal};
  return m;
}

LifetimeModel LifetimeModel::independent(std::vector<Marginal> marginals) {
  const int n = static_cast<int>(marginals.size());
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
  LifetimeModel m;
  m.n_ = n;
  m.kind_ = LifetimeKind::independent;
  m.marginals_ = std::move(marginals);
  return m;
}

LifetimeModel LifetimeModel::exchangeable_mixture(int n, std::vector<MixtureComponent> components) {
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("component count out of range");
  if (components.empty()) throw InputError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    require_positive(c.weight, "mixture weight");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("mixture weights must sum to 1");
  for (auto& c : components) c.weight /= total;
  LifetimeModel m;
  m.n_ = n;
  m.kind_ = LifetimeKind::exchangeable_mixture;
  m.mixture_ = std::move(components);
  return m;
}

void LifetimeModel::draw(std::mt19937_64& engine, std::vector<double>& out) const {
  out.resize(n_);
  switch (kind_) {
    case LifetimeKind::iid:
      for (auto& t : out) t = marginals_.front().draw(engine);
      break;
    case LifetimeKind::independent:
      for (int i = 0; i < n_; ++i) out[i] = marginals_[i].draw(engine);
      break;
    case LifetimeKind::exchangeable_mixture: {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
      std::size_t pick = 0;
      double acc = mixture_.front().weight;
      while (pick + 1 < mixture_.size() && u >= acc) acc += mixture_[++pick].weight;
      for (auto& t : out) t = mixture_[pick].marginal.draw(engine);
      std::shuffle(out.begin(), out.end(), engine);
      break;
    }
  }
}

LifetimeSampler::LifetimeSampler(const LifetimeModel& model, std::uint64_t seed, unsigned partition,
                                 unsigned partitions)
    : model_(&model), engine_(partition_engine(seed, partition, partitions)) {}

LifetimeSample LifetimeSampler::next() {
  for (int attempt = 0; attempt <= kMaxTieRedraws; ++attempt) {
    model_->draw(engine_, buffer_);
    bool valid = std::all_of(buffer_.begin(), buffer_.end(), [](double t) { return t > 0.0 && std::isfinite(t); });
    if (valid) {
      auto sorted = buffer_;
      std::sort(sorted.begin(), sorted.end());
      valid = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }
    if (valid) return LifetimeSample(buffer_);
  }
  throw TieResampleExhausted("lifetime model produced tied or nonpositive lifetimes " +
                             std::to_string(kMaxTieRedraws) + " times in a row");
}

std::uint64_t partition_size(std::uint64_t samples, unsigned partition, unsigned partitions) {
  return samples / partitions + (partition < samples % partitions ? 1 : 0);
}

std::vector<LifetimeSample> sample(const LifetimeModel& model, const SamplingConfig& config) {
  if (config.samples == 0) throw InputError("sample count must be at least 1");
  const unsigned partitions = std::max(1u, config.partitions);
  std::vector<LifetimeSample> out;
  out.reserve(config.samples);
  for (unsigned p = 0; p < partitions; ++p) {
    LifetimeSampler sampler(model, config.seed, p, partitions);
    const auto count = partition_size(config.samples, p, partitions);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(sampler.next());
  }
  return out;
}

namespace {

using Counts = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;

EstimateReport report_from_counts(Counts counts, const SamplingConfig& config) {
  EstimateReport r;
  const double total = static_cast<double>(config.samples);
  r.estimate = counts.cast<double>() / total;
  r.standard_error = (r.estimate.array() * (1.0 - r.estimate.array()) / total).sqrt().matrix();
  r.counts = std::move(counts);
  r.samples = config.samples;
  r.seed = config.seed;
  r.partitions = std::max(1u, config.partitions);
  return r;
}

void check_model_n(const LifetimeModel& model, const StructureFunction& phi) {
  if (model.n() != phi.n()) throw DimensionMismatch("lifetime model and system differ in n");
}

}  // namespace

EstimateReport empirical_joint_signature(const LifetimeModel& model, const StructureFunction& phi1,
                                         const StructureFunction& phi2, const SamplingConfig& config) {
  check_model_n(model, phi1);
  check_model_n(model, phi2);
  const int n = model.n();
  auto counts = accumulate_samples<Counts>(
      model, config, [n] { return Counts::Zero(n, n).eval(); },
      [&](Counts& acc, const LifetimeSample& s) {
        acc(system_lifetime(phi1, s).rank - 1, system_lifetime(phi2, s).rank - 1) += 1;
      },
      [](Counts& into, const Counts& from) { into += from; });
  return report_from_counts(std::move(counts), config);
}

EstimateReport empirical_signature(const LifetimeModel& model, const StructureFunction& phi,
                                   const SamplingConfig& config) {
  check_model_n(model, phi);
  const int n = model.n();
  auto counts = accumulate_samples<Counts>(
      model, config, [n] { return Counts::Zero(n, 1).eval(); },
      [&](Counts& acc, const LifetimeSample& s) { acc(system_lifetime(phi, s).rank - 1, 0) += 1; },
      [](Counts& into, const Counts& from) { into += from; });
  return report_from_counts(std::move(counts), config);
}

PermutationModel<double> empirical_permutation_model(const LifetimeModel& model, const SamplingConfig& config) {
  if (model.n() > kMaxModelComponents) throw SizeLimitExceeded("ordering frequencies need n <= 8");
  using Tally = std::map<Permutation, std::uint64_t>;
  const auto tally = accumulate_samples<Tally>(
      model, config, [] { return Tally{}; },
      [](Tally& acc, const LifetimeSample& s) {
        const auto order = failure_order(s.times());
        Permutation sigma(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) sigma[i] = order[i] + 1;
        ++acc[sigma];
      },
      [](Tally& into, const Tally& from) {
        for (const auto& [k, v] : from) into[k] += v;
      });
  std::map<Permutation, double> probs;
  for (const auto& [sigma, count] : tally) probs[sigma] = static_cast<double>(count) / static_cast<double>(config.samples);
  return PermutationModel<double>::create(model.n(), std::move(probs));
}

}  // namespace sigkit
