#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sigkit/lifetimes.hpp"
#include "sigkit/parallel.hpp"
#include "sigkit/signature.hpp"
#include "sigkit/structure.hpp"

namespace sigkit {

using Cdf = std::function<double(double)>;

enum class StateModelKind { iid_product, independent_product, mixture_product, empirical };

/// Joint law of the component state vectors X(t1), X(t2), where
/// X_j(t) = 1 iff T_j > t.
class ComponentStateModel {
 public:
  static ComponentStateModel iid_product(int n, Cdf cdf);
  static ComponentStateModel independent_product(std::vector<Cdf> cdfs);
  /// Σ_i w_i · (i.i.d. product with cdf_i); exchangeable by construction.
  static ComponentStateModel mixture_product(int n, std::vector<std::pair<double, Cdf>> components);
  /// Analytic state model of a lifetime model.
  static ComponentStateModel from_lifetime_model(const LifetimeModel& model);
  /// Sample frequencies from config.samples draws of the model.
  static ComponentStateModel empirical(const LifetimeModel& model, const SamplingConfig& config);

  int n() const { return n_; }
  StateModelKind kind() const { return kind_; }
  bool analytic() const { return kind_ != StateModelKind::empirical; }
  std::uint64_t samples() const;

  /// Pr(X(t1) = x and X(t2) = y). Throws OutOfRange for negative or
  /// non-finite times.
  double probability(Subset x, Subset y, double t1, double t2) const;

  /// All 4^n probabilities indexed by x | (y << n). Requires n <= 8.
  std::vector<double> state_table(double t1, double t2) const;

  /// Stored lifetimes of the empirical kind, row-major N x n.
  const std::vector<double>& sample_data() const;
  /// Per-component cdfs of the analytic product kinds, one per mixture
  /// component for mixture_product.
  const std::vector<Cdf>& cdfs() const { return cdfs_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  int n_ = 0;
  StateModelKind kind_ = StateModelKind::iid_product;
  std::vector<Cdf> cdfs_;
  std::vector<double> weights_;
  std::shared_ptr<const std::vector<double>> samples_;
};

/// (t1, t2) -> joint reliability.
struct JointReliabilitySurface {
  std::function<double(double, double)> evaluate;
  std::string label;

  double operator()(double t1, double t2) const { return evaluate(t1, t2); }
};

/// True if the surface is nonincreasing in each argument over the grid,
/// up to `slack`.
bool is_nonincreasing_on_grid(const JointReliabilitySurface& surface, const std::vector<double>& t1s,
                              const std::vector<double>& t2s, double slack = 1e-12);

/// Σ_{x,y} φ1(x) φ2(y) Pr(X(t1) = x and X(t2) = y).
/// Analytic kinds enumerate the 3^n state pairs allowed by nonrepairability
/// and require n <= 12; the empirical kind counts samples.
double joint_reliability_direct(const StructureFunction& phi1, const StructureFunction& phi2,
                                const ComponentStateModel& states, double t1, double t2);

JointReliabilitySurface joint_reliability_surface(const StructureFunction& phi1, const StructureFunction& phi2,
                                                  const ComponentStateModel& states);

/// Pr(T_{k:n} > t1 and T_{l:n} > t2). Closed form for i.i.d. products and
/// their mixtures; exhaustive state sum otherwise.
double order_stat_joint_reliability(int n, int k, int l, const ComponentStateModel& states, double t1, double t2);

using OrderStatFactory = std::function<JointReliabilitySurface(int k, int l)>;

OrderStatFactory order_stat_surfaces(const ComponentStateModel& states);

/// Σ_k Σ_l s_{k,l} F̄_{k:n,l:n}(t1, t2).
double decompose_joint_reliability(const Matrix<double>& s, const OrderStatFactory& orderstats, double t1, double t2);
/// Validates s exactly, then converts each entry to double (truncated
/// toward zero, at most one ulp off).
double decompose_joint_reliability(const Matrix<Rational>& s, const OrderStatFactory& orderstats, double t1,
                                   double t2);

struct ResidualPoint {
  double t1;
  double t2;
  double direct;
  double decomposed;
  double residual;
};

/// Direct and decomposed joint reliability at every (t1, t2) in the grid,
/// t1-major. Grid points are evaluated in parallel.
std::vector<ResidualPoint> decomposition_residuals(const StructureFunction& phi1, const StructureFunction& phi2,
                                                   const ComponentStateModel& states, const std::vector<double>& t1s,
                                                   const std::vector<double>& t2s, Parallelism par = {});

/// σ(x) moves component i to position σ(i); sigma is 1-based.
Subset apply_permutation(const Permutation& sigma, Subset x);

struct Condition12Witness {
  Subset x;
  Subset y;
  Permutation sigma;
  double probability;
  double permuted_probability;
};

struct Condition12Result {
  bool holds;
  /// Largest |Pr(x, y) - Pr(σx, σy)| found; for the empirical kind, the
  /// largest distance from an orbit mean in standard errors.
  double max_deviation;
  std::optional<Condition12Witness> witness;
};

/// Checks Pr(X(t1)=x, X(t2)=y) = Pr(X(t1)=σx, X(t2)=σy) for all x, y, σ.
/// Analytic kinds: within 1e-12. Empirical kind: each cell within
/// `sigmas` binomial standard errors of its permutation-orbit mean.
/// Requires n <= 8.
Condition12Result check_condition_12(const ComponentStateModel& states, double t1, double t2, double sigmas = 3.0);

struct StateExchangeabilityWitness {
  Subset x;
  Permutation sigma;
  double probability;
  double permuted_probability;
};

struct StateExchangeabilityResult {
  bool holds;
  double max_deviation;
  std::optional<StateExchangeabilityWitness> witness;
};

/// Checks Pr(X(t)=x) = Pr(X(t)=σx), with the marginal law obtained by
/// summing the bivariate model at (t, t + 1) over the second state.
StateExchangeabilityResult check_state_exchangeability(const ComponentStateModel& states, double t,
                                                       double sigmas = 3.0);

}  // namespace sigkit
