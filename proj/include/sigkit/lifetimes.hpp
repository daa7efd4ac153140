#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "sigkit/parallel.hpp"
#include "sigkit/quality.hpp"
#include "sigkit/signature.hpp"
#include "sigkit/structure.hpp"

namespace sigkit {

struct Exponential {
  double rate;
};
struct Weibull {
  double shape;
  double scale;
};
/// Uniform on (0, upper).
struct Uniform {
  double upper;
};

/// A continuous lifetime distribution on (0, ∞).
class Marginal {
 public:
  /// Throws InputError unless every parameter is finite and > 0.
  Marginal(Exponential e);  // NOLINT(google-explicit-constructor)
  Marginal(Weibull w);      // NOLINT(google-explicit-constructor)
  Marginal(Uniform u);      // NOLINT(google-explicit-constructor)

  double cdf(double t) const;
  double survival(double t) const { return 1.0 - cdf(t); }
  double mean() const;
  double draw(std::mt19937_64& engine) const;

  const std::variant<Exponential, Weibull, Uniform>& params() const { return params_; }

 private:
  std::variant<Exponential, Weibull, Uniform> params_;
};

enum class LifetimeKind { iid, independent, exchangeable_mixture };

struct MixtureComponent {
  double weight;
  Marginal marginal;
};

/// Joint law of (T_1, ..., T_n) at the sampling level.
class LifetimeModel {
 public:
  static LifetimeModel iid(int n, Marginal marginal);
  static LifetimeModel independent(std::vector<Marginal> marginals);
  /// Mixture of i.i.d. laws followed by a uniformly random relabeling of
  /// the components. Weights must sum to 1 within 1e-12; they are then
  /// renormalized.
  static LifetimeModel exchangeable_mixture(int n, std::vector<MixtureComponent> components);

  int n() const { return n_; }
  LifetimeKind kind() const { return kind_; }
  /// One marginal per component for `independent`, a single one for `iid`.
  const std::vector<Marginal>& marginals() const { return marginals_; }
  const std::vector<MixtureComponent>& mixture() const { return mixture_; }

  /// One raw draw; may contain ties or zeros, which the sampler rejects.
  void draw(std::mt19937_64& engine, std::vector<double>& out) const;

 private:
  int n_ = 0;
  LifetimeKind kind_ = LifetimeKind::iid;
  std::vector<Marginal> marginals_;
  std::vector<MixtureComponent> mixture_;
};

/// Redraws allowed before TieResampleExhausted.
inline constexpr int kMaxTieRedraws = 100;

/// Reproducibility contract: output depends on (seed, samples, partitions)
/// only. Threads execute partitions and never change the result.
struct SamplingConfig {
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  unsigned partitions = 16;
  unsigned threads = 1;
};

/// Deterministic stream of valid lifetime samples for one partition.
class LifetimeSampler {
 public:
  LifetimeSampler(const LifetimeModel& model, std::uint64_t seed, unsigned partition = 0, unsigned partitions = 1);

  /// Throws TieResampleExhausted after kMaxTieRedraws consecutive rejects.
  LifetimeSample next();

 private:
  const LifetimeModel* model_;
  std::mt19937_64 engine_;
  std::vector<double> buffer_;
};

/// Number of samples assigned to a partition: the first samples % partitions
/// partitions get one extra.
std::uint64_t partition_size(std::uint64_t samples, unsigned partition, unsigned partitions);

/// All samples, partition by partition. Throws InputError if samples == 0.
std::vector<LifetimeSample> sample(const LifetimeModel& model, const SamplingConfig& config);

/// Runs visit(accumulator, sample) over every sample; one accumulator per
/// partition, combined in partition order with merge(into, from).
template <class Acc, class Make, class Visit, class Merge>
Acc accumulate_samples(const LifetimeModel& model, const SamplingConfig& config, Make&& make, Visit&& visit,
                       Merge&& merge) {
  if (config.samples == 0) throw InputError("sample count must be at least 1");
  const unsigned partitions = std::max(1u, config.partitions);
  std::vector<Acc> parts;
  parts.reserve(partitions);
  for (unsigned p = 0; p < partitions; ++p) parts.push_back(make());
  parallel_for(partitions, Parallelism{config.threads}, [&](std::size_t p, std::size_t) {
    LifetimeSampler sampler(model, config.seed, static_cast<unsigned>(p), partitions);
    const auto count = partition_size(config.samples, static_cast<unsigned>(p), partitions);
    for (std::uint64_t i = 0; i < count; ++i) visit(parts[p], sampler.next());
  });
  Acc total = make();
  for (auto& part : parts) merge(total, part);
  return total;
}

/// Point estimates with binomial standard errors sqrt(p(1-p)/N).
struct EstimateReport {
  Matrix<double> estimate;
  Matrix<double> standard_error;
  Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  unsigned partitions = 0;
};

/// Frequencies of the failure-rank pairs (k, l). Approximate by nature.
/// Throws DimensionMismatch, InputError, TieResampleExhausted.
EstimateReport empirical_joint_signature(const LifetimeModel& model, const StructureFunction& phi1,
                                         const StructureFunction& phi2, const SamplingConfig& config);

/// Frequencies of the failure rank of one system (an n x 1 report).
EstimateReport empirical_signature(const LifetimeModel& model, const StructureFunction& phi,
                                   const SamplingConfig& config);

/// Frequencies of each lifetime ordering. Requires n <= 8.
PermutationModel<double> empirical_permutation_model(const LifetimeModel& model, const SamplingConfig& config);

}  // namespace sigkit
