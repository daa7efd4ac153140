#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sigkit/io.hpp"
#include "sigkit/reliability.hpp"

namespace sigkit::cli {

namespace {

using io::json;

enum class Format { text, json };

constexpr double kDecompositionTolerance = 1e-6;

struct Common {
  unsigned threads = default_thread_count();
  std::string format = "text";

  Format fmt() const { return format == "json" ? Format::json : Format::text; }
};

unsigned resolve_threads(unsigned flag) {
  const char* env = std::getenv("SIGKIT_THREADS");
  if (env == nullptr || *env == '\0') return std::max(1u, flag);
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) throw InputError("SIGKIT_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

std::vector<StructureFunction> load_systems(const std::vector<std::string>& paths) {
  std::vector<StructureFunction> phis;
  for (const auto& p : paths) phis.push_back(io::load_system(p));
  for (const auto& phi : phis) {
    if (phi.n() != phis.front().n()) {
      throw DimensionMismatch("systems differ in n: " + paths.front() + " has " + std::to_string(phis.front().n()) +
                              ", another has " + std::to_string(phi.n()));
    }
  }
  return phis;
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ParseError("grid: \"" + s + "\" is not a number");
    if (!(v >= 0.0) || !std::isfinite(v)) throw OutOfRange("grid: times must be finite and >= 0");
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw ParseError("grid: expected start:stop:count");
    const double lo = number(parts[0]), hi = number(parts[1]);
    const double count = number(parts[2]);
    if (count < 1 || count != std::floor(count) || count > 10000) throw ParseError("grid: count must be an integer >= 1");
    const int c = static_cast<int>(count);
    for (int i = 0; i < c; ++i) out.push_back(c == 1 ? lo : lo + (hi - lo) * i / (c - 1));
    return out;
  }
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(number(item));
  if (out.empty()) throw ParseError("grid: no times given");
  return out;
}

json metadata(int n, bool model) { return {{"n", n}, {"quality", model ? "model" : "q0"}}; }

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

int cmd_signature(const std::string& path, const std::string& model_path, const Common& c, std::ostream& out) {
  const auto phi = io::load_system(path);
  Vector<Rational> s, tail;
  mpz_class den = 1;
  if (model_path.empty()) {
    s = boland_signature(phi);
    tail = structure_tail(phi);
    den = io::structure_denominator(phi.n());
  } else {
    const auto model = io::load_permutation_model(model_path);
    if (model.n() != phi.n()) throw DimensionMismatch("model and system differ in n");
    const auto q = q_from_model(model);
    s = probability_signature(phi, q);
    tail = probability_tail(phi, q);
  }
  if (c.fmt() == Format::json) {
    emit(out, {{"metadata", metadata(phi.n(), !model_path.empty())},
               {"signature", io::to_json(s)},
               {"tail", io::to_json(tail)}});
  } else {
    out << "signature: " << io::format_common_denominator(s, den) << '\n';
    out << "tail: " << io::format_common_denominator(tail, den) << '\n';
  }
  return kExitOk;
}

int cmd_joint(const std::vector<std::string>& paths, const std::string& model_path, const Common& c,
              std::ostream& out) {
  const auto phis = load_systems(paths);
  const int n = phis[0].n();
  Matrix<Rational> tail;
  mpz_class den = 1;
  if (model_path.empty()) {
    tail = joint_structure_tail(phis[0], phis[1], Parallelism{c.threads});
    den = io::joint_structure_denominator(n);
  } else {
    const auto model = io::load_permutation_model(model_path);
    if (model.n() != n) throw DimensionMismatch("model and systems differ in n");
    tail = joint_tail(phis[0], phis[1], q_bivariate_from_model(model));
  }
  const auto s = joint_from_tail(tail);
  if (c.fmt() == Format::json) {
    emit(out, {{"metadata", metadata(n, !model_path.empty())}, {"tail", io::to_json(tail)}, {"signature", io::to_json(s)}});
  } else {
    out << "tail:\n" << io::format_matrix(tail, den) << "signature:\n" << io::format_matrix(s, den);
  }
  return kExitOk;
}

int cmd_multi(const std::vector<std::string>& paths, const std::string& model_path, const Common& c,
              std::ostream& out) {
  const auto phis = load_systems(paths);
  const int n = phis[0].n();
  std::optional<MultiTail> tail;
  if (model_path.empty()) {
    tail = multi_tail_uniform(phis, Parallelism{c.threads});
  } else {
    const auto model = io::load_permutation_model(model_path);
    if (model.n() != n) throw DimensionMismatch("model and systems differ in n");
    tail = multi_tail(phis, model);
  }
  if (c.fmt() == Format::json) {
    json cells = json::array();
    for (std::size_t i = 0; i < tail->size(); ++i) {
      if (!tail->flat()[i].is_zero()) cells.push_back({{"index", tail->index_of(i)}, {"value", io::to_json(tail->flat()[i])}});
    }
    emit(out, {{"metadata", metadata(n, !model_path.empty())}, {"m", tail->m()}, {"nonzero_tail", cells}});
  } else {
    for (std::size_t i = 0; i < tail->size(); ++i) {
      if (tail->flat()[i].is_zero()) continue;
      const auto idx = tail->index_of(i);
      for (std::size_t j = 0; j < idx.size(); ++j) out << (j ? " " : "") << idx[j];
      const auto& v = tail->flat()[i];
      out << " : " << (v.denominator() == 1 ? v.numerator().get_str() : v.str()) << '\n';
    }
  }
  return kExitOk;
}

int cmd_q0(int n, const std::vector<std::string>& sets, const Common& c, std::ostream& out) {
  if (n < 1 || n > kMaxComponents) throw SizeLimitExceeded("n outside [1, 24]");
  std::vector<Subset> masks;
  for (const auto& text : sets) {
    std::vector<int> labels;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
      if (item.empty()) continue;
      try {
        std::size_t used = 0;
        labels.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ParseError("set \"" + text + "\": labels must be integers");
      }
    }
    masks.push_back(subset_from_labels(labels, n));
  }
  const auto v = q0_multi(n, masks);
  if (c.fmt() == Format::json) {
    json js = json::array();
    for (Subset m : masks) js.push_back(labels_of(m));
    emit(out, {{"n", n}, {"sets", js}, {"q0", io::to_json(v)}});
  } else {
    out << (v.denominator() == 1 ? v.numerator().get_str() : v.str()) << '\n';
  }
  return kExitOk;
}

struct SimulateOptions {
  std::vector<std::string> systems;
  std::string lifetimes;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  unsigned partitions = 16;
  bool compare = false;
};

int cmd_simulate(const SimulateOptions& o, const Common& c, std::ostream& out) {
  const auto phis = load_systems(o.systems);
  const auto model = io::load_lifetime_model(o.lifetimes);
  if (o.samples == 0) throw InputError("--samples must be at least 1");
  if (o.partitions == 0) throw InputError("--partitions must be at least 1");
  SamplingConfig cfg{o.seed, o.samples, o.partitions, c.threads};
  const auto r = empirical_joint_signature(model, phis[0], phis[1], cfg);
  std::optional<double> worst_z;
  Matrix<Rational> exact;
  if (o.compare) {
    exact = joint_structure_signature(phis[0], phis[1], Parallelism{c.threads});
    worst_z = 0.0;
    for (Eigen::Index k = 0; k < exact.rows(); ++k) {
      for (Eigen::Index l = 0; l < exact.cols(); ++l) {
        const double p = exact(k, l).to_double();
        const double se = std::sqrt(p * (1 - p) / static_cast<double>(r.samples));
        const double diff = std::abs(r.estimate(k, l) - p);
        *worst_z = std::max(*worst_z, se == 0 ? (diff == 0 ? 0.0 : INFINITY) : diff / se);
      }
    }
  }
  if (c.fmt() == Format::json) {
    json j = {{"metadata", {{"n", model.n()}, {"samples", r.samples}, {"seed", r.seed}, {"partitions", r.partitions}}},
              {"estimate", io::to_json(r.estimate)},
              {"standard_error", io::to_json(r.standard_error)}};
    if (worst_z) {
      j["structure_signature"] = io::to_json(exact);
      j["max_standard_errors_from_structure_signature"] = *worst_z;
    }
    emit(out, j);
  } else {
    out << "samples: " << r.samples << "  seed: " << r.seed << "  partitions: " << r.partitions << '\n';
    out << "estimate:\n" << io::format_matrix(r.estimate) << "standard error:\n" << io::format_matrix(r.standard_error);
    if (worst_z) out << "max standard errors from structure signature: " << io::format_double(*worst_z) << '\n';
  }
  return kExitOk;
}

struct StateOptions {
  std::string lifetimes;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  unsigned partitions = 16;
};

ComponentStateModel load_states(const StateOptions& o, const Common& c) {
  const auto model = io::load_lifetime_model(o.lifetimes);
  if (o.samples == 0) return ComponentStateModel::from_lifetime_model(model);
  if (o.partitions == 0) throw InputError("--partitions must be at least 1");
  return ComponentStateModel::empirical(model, SamplingConfig{o.seed, o.samples, o.partitions, c.threads});
}

int cmd_decompose_check(const std::vector<std::string>& paths, const StateOptions& so, const std::string& grid,
                        const std::string& grid_t2, const Common& c, std::ostream& out) {
  const auto phis = load_systems(paths);
  const auto states = load_states(so, c);
  const auto t1s = parse_grid(grid);
  const auto t2s = grid_t2.empty() ? t1s : parse_grid(grid_t2);
  const auto points = decomposition_residuals(phis[0], phis[1], states, t1s, t2s, Parallelism{c.threads});
  double worst = 0.0;
  for (const auto& p : points) worst = std::max(worst, p.residual);
  const bool fails = worst > kDecompositionTolerance;
  if (c.fmt() == Format::json) {
    json rows = json::array();
    for (const auto& p : points) {
      rows.push_back({{"t1", p.t1}, {"t2", p.t2}, {"direct", p.direct}, {"decomposed", p.decomposed}, {"residual", p.residual}});
    }
    emit(out, {{"metadata", {{"n", states.n()}, {"states", states.analytic() ? "analytic" : "empirical"}}},
               {"points", rows},
               {"max_residual", worst},
               {"tolerance", kDecompositionTolerance},
               {"decomposition_fails", fails}});
  } else {
    std::vector<std::vector<std::string>> rows = {{"t1", "t2", "direct", "decomposed", "residual"}};
    for (const auto& p : points) {
      rows.push_back({io::format_double(p.t1), io::format_double(p.t2), io::format_double(p.direct),
                      io::format_double(p.decomposed), io::format_double(p.residual)});
    }
    std::vector<std::size_t> width(5, 0);
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < 5; ++j) width[j] = std::max(width[j], r[j].size());
    }
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < 5; ++j) out << (j ? "  " : "") << std::string(width[j] - r[j].size(), ' ') << r[j];
      out << '\n';
    }
    out << "max residual: " << io::format_double(worst) << '\n';
    out << (fails ? "decomposition fails" : "decomposition holds") << " (tolerance "
        << io::format_double(kDecompositionTolerance) << ")\n";
  }
  return kExitOk;
}

json permutation_json(const Permutation& sigma) { return sigma; }

int cmd_check_cond12(const StateOptions& so, double t1, double t2, const Common& c, std::ostream& out) {
  const auto states = load_states(so, c);
  const auto r = check_condition_12(states, t1, t2);
  const double early = std::min(t1, t2);
  const auto e = check_state_exchangeability(states, early);
  if (c.fmt() == Format::json) {
    json j = {{"metadata", {{"n", states.n()}, {"states", states.analytic() ? "analytic" : "empirical"}}},
              {"t1", t1},
              {"t2", t2},
              {"joint_invariance", {{"holds", r.holds}, {"max_deviation", r.max_deviation}}},
              {"state_exchangeability", {{"t", early}, {"holds", e.holds}, {"max_deviation", e.max_deviation}}}};
    if (r.witness) {
      const auto& w = *r.witness;
      j["joint_invariance"]["witness"] = {{"x", labels_of(w.x)},
                                      {"y", labels_of(w.y)},
                                      {"sigma", permutation_json(w.sigma)},
                                      {"sigma_x", labels_of(apply_permutation(w.sigma, w.x))},
                                      {"sigma_y", labels_of(apply_permutation(w.sigma, w.y))},
                                      {"probability", w.probability},
                                      {"permuted_probability", w.permuted_probability}};
    }
    if (e.witness) {
      const auto& w = *e.witness;
      j["state_exchangeability"]["witness"] = {{"x", labels_of(w.x)},
                                               {"sigma", permutation_json(w.sigma)},
                                               {"sigma_x", labels_of(apply_permutation(w.sigma, w.x))},
                                               {"probability", w.probability},
                                               {"permuted_probability", w.permuted_probability}};
    }
    emit(out, j);
  } else {
    out << "joint state invariance at (" << io::format_double(t1) << ", " << io::format_double(t2)
        << "): " << (r.holds ? "holds" : "violated") << "  max deviation " << io::format_double(r.max_deviation) << '\n';
    if (r.witness) {
      const auto& w = *r.witness;
      out << "  witness: x=" << format_subset(w.x) << " y=" << format_subset(w.y)
          << " sigma=" << format_permutation(w.sigma) << " -> x=" << format_subset(apply_permutation(w.sigma, w.x))
          << " y=" << format_subset(apply_permutation(w.sigma, w.y)) << "  " << io::format_double(w.probability)
          << " vs " << io::format_double(w.permuted_probability) << '\n';
    }
    out << "state exchangeability at " << io::format_double(early) << ": " << (e.holds ? "holds" : "violated")
        << "  max deviation " << io::format_double(e.max_deviation) << '\n';
    if (e.witness) {
      const auto& w = *e.witness;
      out << "  witness: x=" << format_subset(w.x) << " sigma=" << format_permutation(w.sigma)
          << " -> " << format_subset(apply_permutation(w.sigma, w.x)) << "  " << io::format_double(w.probability)
          << " vs " << io::format_double(w.permuted_probability) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signatures and joint signatures of systems with shared components"};
  app.name("sigkit");
  app.require_subcommand(1);
  Common common;
  app.add_option("--threads", common.threads, "Worker threads (SIGKIT_THREADS overrides)")
      ->check(CLI::Range(1u, 4096u));
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::string system, model;
  auto* signature = app.add_subcommand("signature", "Signature and tail signature of one system");
  signature->add_option("system", system, "System descriptor (JSON)")->required();
  signature->add_option("--model", model, "Permutation model (JSON); default: equally likely orderings");

  std::vector<std::string> pair;
  auto* joint = app.add_subcommand("joint", "Joint tail and joint signature of two systems");
  joint->add_option("systems", pair, "Two system descriptors")->required()->expected(2);
  joint->add_option("--model", model, "Permutation model (JSON); default: equally likely orderings");

  std::vector<std::string> many;
  auto* multi = app.add_subcommand("multi", "m-variate tail signature of m systems");
  multi->add_option("systems", many, "System descriptors")->required()->expected(1, 64);
  multi->add_option("--model", model, "Permutation model (JSON); default: equally likely orderings");

  int q0_n = 0;
  std::vector<std::string> sets;
  auto* q0cmd = app.add_subcommand("q0", "q0 of a list of subsets, e.g. q0 --n 4 1,2 2");
  q0cmd->add_option("--n", q0_n, "Number of components")->required();
  q0cmd->add_option("sets", sets, "Comma-separated component labels; \"\" is the empty set")->required();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo joint signature");
  simulate->add_option("systems", sim.systems, "Two system descriptors")->required()->expected(2);
  simulate->add_option("--lifetimes", sim.lifetimes, "Lifetime model (JSON)")->required();
  simulate->add_option("-N,--n,--samples", sim.samples, "Sample count")->required();
  simulate->add_option("--seed", sim.seed, "Seed")->required();
  simulate->add_option("--partitions", sim.partitions, "Independent sampling streams");
  simulate->add_flag("--compare", sim.compare, "Compare with the structure joint signature");

  StateOptions so;
  std::string grid = "0:2:5", grid_t2;
  std::vector<std::string> dpair;
  auto* decompose = app.add_subcommand("decompose-check", "Direct versus signature-decomposed joint reliability");
  decompose->add_option("systems", dpair, "Two system descriptors")->required()->expected(2);
  decompose->add_option("--lifetimes", so.lifetimes, "Lifetime model (JSON) giving the component states")->required();
  decompose->add_option("--grid", grid, "Times: start:stop:count or a comma list");
  decompose->add_option("--grid-t2", grid_t2, "Separate times for t2");
  decompose->add_option("--samples", so.samples, "Use sample frequencies from this many draws");
  decompose->add_option("--seed", so.seed, "Seed for --samples");
  decompose->add_option("--partitions", so.partitions, "Independent sampling streams");

  double t1 = 1.0, t2 = 2.0;
  auto* cond = app.add_subcommand("check-cond12", "Permutation invariance of component states at two times");
  cond->add_option("--lifetimes", so.lifetimes, "Lifetime model (JSON)")->required();
  cond->add_option("--t1", t1, "First time");
  cond->add_option("--t2", t2, "Second time");
  cond->add_option("--samples", so.samples, "Use sample frequencies from this many draws");
  cond->add_option("--seed", so.seed, "Seed for --samples");
  cond->add_option("--partitions", so.partitions, "Independent sampling streams");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    common.threads = resolve_threads(common.threads);
    if (*signature) return cmd_signature(system, model, common, out);
    if (*joint) return cmd_joint(pair, model, common, out);
    if (*multi) return cmd_multi(many, model, common, out);
    if (*q0cmd) return cmd_q0(q0_n, sets, common, out);
    if (*simulate) return cmd_simulate(sim, common, out);
    if (*decompose) return cmd_decompose_check(dpair, so, grid, grid_t2, common, out);
    if (*cond) return cmd_check_cond12(so, t1, t2, common, out);
  } catch (const InvariantViolation& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}

}  // namespace sigkit::cli
