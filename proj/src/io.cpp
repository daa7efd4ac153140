#include "sigkit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace sigkit::io {

namespace {

[[noreturn]] void fail(std::string_view context, std::string_view where, std::string_view what) {
  std::string msg(context);
  msg += ": ";
  if (!where.empty()) {
    msg += where;
    msg += ": ";
  }
  msg += what;
  throw ParseError(msg);
}

const json& member(const json& doc, const char* key, std::string_view context) {
  if (!doc.is_object()) fail(context, "", "expected a JSON object");
  const auto it = doc.find(key);
  if (it == doc.end()) fail(context, "", std::string("missing \"") + key + "\"");
  return *it;
}

int parse_n(const json& doc, std::string_view context) {
  const auto& n = member(doc, "n", context);
  if (!n.is_number_integer()) fail(context, "/n", "expected an integer");
  const auto v = n.get<long long>();
  if (v < 1 || v > kMaxComponents) {
    throw SizeLimitExceeded(std::string(context) + ": /n: component count " + std::to_string(v) + " outside [1, " +
                            std::to_string(kMaxComponents) + "]");
  }
  return static_cast<int>(v);
}

double positive_number(const json& v, std::string_view context, const std::string& where) {
  if (!v.is_number()) fail(context, where, "expected a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) fail(context, where, "expected a finite number > 0");
  return x;
}

Marginal parse_marginal(const json& v, std::string_view context, const std::string& where) {
  if (!v.is_object() || v.size() != 1) {
    fail(context, where, "a marginal is an object with one key: exponential, weibull or uniform");
  }
  const auto& [name, params] = *v.items().begin();
  if (name == "exponential") return Exponential{positive_number(params, context, where + "/exponential")};
  if (name == "uniform") return Uniform{positive_number(params, context, where + "/uniform")};
  if (name == "weibull") {
    const std::string at = where + "/weibull";
    if (!params.is_object()) fail(context, at, "expected {\"shape\": ..., \"scale\": ...}");
    return Weibull{positive_number(member(params, "shape", context), context, at + "/shape"),
                   positive_number(member(params, "scale", context), context, at + "/scale")};
  }
  fail(context, where, "unknown marginal \"" + name + "\"");
}

Permutation parse_permutation_key(const std::string& key, std::string_view context) {
  const std::string where = "/probs/" + key;
  std::string body = key;
  std::erase_if(body, [](char c) { return c == ' '; });
  if (body.size() < 2 || body.front() != '(' || body.back() != ')') fail(context, where, "expected a key like \"(1,2)\"");
  body = body.substr(1, body.size() - 2);
  Permutation sigma;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty()) {
      fail(context, where, "permutation entries must be integers");
    }
    sigma.push_back(v);
  }
  return sigma;
}

mpz_class lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

template <class Range>
mpz_class common_denominator(const Range& values, const mpz_class& preferred) {
  mpz_class d = preferred;
  for (const Rational& r : values) d = lcm(d, r.denominator());
  return d;
}

std::string over(const Rational& r, const mpz_class& d) {
  if (r.denominator() == 1) return r.numerator().get_str();
  const mpz_class num = r.numerator() * (d / r.denominator());
  return num.get_str() + "/" + d.get_str();
}

std::string aligned_grid(const std::vector<std::vector<std::string>>& cells) {
  std::size_t width = 0;
  for (const auto& row : cells) {
    for (const auto& c : row) width = std::max(width, c.size());
  }
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out += ' ';
      out += std::string(width - row[j].size(), ' ') + row[j];
    }
    out += '\n';
  }
  return out;
}

}  // namespace

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": malformed JSON: " + e.what());
  }
}

StructureFunction parse_system(const json& doc, std::string_view context) {
  const int n = parse_n(doc, context);
  const bool has_paths = doc.contains("path_sets");
  const bool has_table = doc.contains("truth_table");
  if (has_paths == has_table) fail(context, "", "give exactly one of \"path_sets\" or \"truth_table\"");
  if (has_table) {
    const auto& t = doc["truth_table"];
    if (!t.is_string()) fail(context, "/truth_table", "expected a string of 0 and 1");
    return StructureFunction::from_truth_table(n, t.get<std::string>());
  }
  const auto& paths = doc["path_sets"];
  if (!paths.is_array()) fail(context, "/path_sets", "expected an array of arrays");
  std::vector<std::vector<int>> sets;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string where = "/path_sets/" + std::to_string(i);
    if (!paths[i].is_array()) fail(context, where, "expected an array of component labels");
    std::vector<int> set;
    for (std::size_t j = 0; j < paths[i].size(); ++j) {
      if (!paths[i][j].is_number_integer()) fail(context, where + "/" + std::to_string(j), "expected an integer");
      set.push_back(paths[i][j].get<int>());
    }
    sets.push_back(std::move(set));
  }
  return StructureFunction::from_min_path_sets(n, sets);
}

StructureFunction load_system(const std::filesystem::path& path) { return parse_system(read_json(path), path.string()); }

PermutationModel<Rational> parse_permutation_model(const json& doc, std::string_view context) {
  const int n = parse_n(doc, context);
  if (n > kMaxModelComponents) throw SizeLimitExceeded(std::string(context) + ": permutation models need n <= 8");
  const auto& probs = member(doc, "probs", context);
  if (!probs.is_object()) fail(context, "/probs", "expected an object keyed by permutations");
  std::map<Permutation, Rational> table;
  for (const auto& [key, value] : probs.items()) {
    if (!value.is_string()) fail(context, "/probs/" + key, "probabilities must be exact rational strings like \"3/10\"");
    Rational p;
    try {
      p = Rational::parse(value.get<std::string>());
    } catch (const InputError& e) {
      fail(context, "/probs/" + key, e.what());
    }
    const auto sigma = parse_permutation_key(key, context);
    if (!table.emplace(sigma, p).second) fail(context, "/probs/" + key, "duplicate permutation");
  }
  return PermutationModel<Rational>::create(n, std::move(table));
}

PermutationModel<Rational> load_permutation_model(const std::filesystem::path& path) {
  return parse_permutation_model(read_json(path), path.string());
}

LifetimeModel parse_lifetime_model(const json& doc, std::string_view context) {
  const int n = parse_n(doc, context);
  const auto& kind = member(doc, "kind", context);
  if (!kind.is_string()) fail(context, "/kind", "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "iid") return LifetimeModel::iid(n, parse_marginal(member(doc, "marginal", context), context, "/marginal"));
  if (k == "independent") {
    const auto& ms = member(doc, "marginals", context);
    if (!ms.is_array()) fail(context, "/marginals", "expected an array");
    if (ms.size() != static_cast<std::size_t>(n)) {
      throw DimensionMismatch(std::string(context) + ": /marginals: expected " + std::to_string(n) + " marginals, got " +
                              std::to_string(ms.size()));
    }
    std::vector<Marginal> marginals;
    for (std::size_t i = 0; i < ms.size(); ++i) marginals.push_back(parse_marginal(ms[i], context, "/marginals/" + std::to_string(i)));
    return LifetimeModel::independent(std::move(marginals));
  }
  if (k == "exchangeable-mixture") {
    const auto& cs = member(doc, "components", context);
    if (!cs.is_array() || cs.empty()) fail(context, "/components", "expected a nonempty array");
    std::vector<MixtureComponent> parts;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "/components/" + std::to_string(i);
      if (!cs[i].is_object()) fail(context, where, "expected {\"weight\": ..., \"marginal\": ...}");
      parts.push_back({positive_number(member(cs[i], "weight", context), context, where + "/weight"),
                       parse_marginal(member(cs[i], "marginal", context), context, where + "/marginal")});
    }
    return LifetimeModel::exchangeable_mixture(n, std::move(parts));
  }
  fail(context, "/kind", "unknown kind \"" + k + "\" (iid, independent, exchangeable-mixture)");
}

LifetimeModel load_lifetime_model(const std::filesystem::path& path) {
  return parse_lifetime_model(read_json(path), path.string());
}

json to_json(const Rational& r) { return r.str(); }

json to_json(const Vector<Rational>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

json to_json(const Matrix<Rational>& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

json to_json(const Matrix<double>& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

mpz_class structure_denominator(int n) {
  mpz_class d = 1;
  for (int j = 0; j <= n; ++j) d = lcm(d, binomial(n, j));
  return d;
}

mpz_class joint_structure_denominator(int n) {
  mpz_class d = 1;
  const mpz_class nf = factorial(n);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) d = lcm(d, nf / (factorial(i) * factorial(j) * factorial(n - i - j)));
  }
  return d;
}

std::string format_common_denominator(const Vector<Rational>& v, const mpz_class& denominator) {
  const mpz_class d = common_denominator(std::vector<Rational>(v.data(), v.data() + v.size()), denominator);
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += over(v(i), d);
  }
  return out;
}

std::string format_matrix(const Matrix<Rational>& m, const mpz_class& denominator) {
  std::vector<Rational> values(m.data(), m.data() + m.size());
  const mpz_class d = common_denominator(values, denominator);
  bool whole = true;
  for (const auto& r : values) whole = whole && r.denominator() == 1;
  std::vector<std::vector<std::string>> cells(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Rational& r = m(i, j);
      cells[i].push_back(whole ? r.numerator().get_str() : mpz_class(r.numerator() * (d / r.denominator())).get_str());
    }
  }
  const std::string grid = aligned_grid(cells);
  return whole ? grid : "(1/" + d.get_str() + ") x\n" + grid;
}

std::string format_matrix(const Matrix<double>& m) {
  std::vector<std::vector<std::string>> cells(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) cells[i].push_back(format_double(m(i, j)));
  }
  return aligned_grid(cells);
}

}  // namespace sigkit::io
