#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "sigkit/lifetimes.hpp"
#include "sigkit/quality.hpp"
#include "sigkit/signature.hpp"
#include "sigkit/structure.hpp"

namespace sigkit::io {

using nlohmann::json;

/// Reads and parses a JSON file. Throws ParseError naming the file.
json read_json(const std::filesystem::path& path);

/// {"n": 4, "path_sets": [[1,2]]} or {"n": 2, "truth_table": "0001"}.
/// `context` prefixes ParseError messages.
StructureFunction parse_system(const json& doc, std::string_view context = "system");
StructureFunction load_system(const std::filesystem::path& path);

/// {"n": 2, "probs": {"(1,2)": "3/10", "(2,1)": "7/10"}}; probabilities must
/// be exact rational strings.
PermutationModel<Rational> parse_permutation_model(const json& doc, std::string_view context = "model");
PermutationModel<Rational> load_permutation_model(const std::filesystem::path& path);

/// {"n": 2, "kind": "independent", "marginals": [{"exponential": 1.0}, ...]},
/// {"n": 4, "kind": "iid", "marginal": {"weibull": {"shape": 2, "scale": 1}}},
/// {"n": 3, "kind": "exchangeable-mixture",
///  "components": [{"weight": 0.5, "marginal": {"uniform": 2.0}}, ...]}.
LifetimeModel parse_lifetime_model(const json& doc, std::string_view context = "lifetime model");
LifetimeModel load_lifetime_model(const std::filesystem::path& path);

/// "num/den".
json to_json(const Rational& r);
json to_json(const Vector<Rational>& v);
json to_json(const Matrix<Rational>& m);
json to_json(const Matrix<double>& m);

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);

/// lcm over j of C(n, j), the denominator of any structure signature.
mpz_class structure_denominator(int n);
/// lcm over i + j + m = n of n!/(i! j! m!), the denominator of any joint
/// structure signature.
mpz_class joint_structure_denominator(int n);

/// Space-separated entries over the lcm of `denominator` and the entries'
/// own denominators; whole numbers print without a denominator.
std::string format_common_denominator(const Vector<Rational>& v, const mpz_class& denominator = 1);

/// "(1/D) x" followed by a right-aligned integer grid, or a plain grid when
/// every entry is whole.
std::string format_matrix(const Matrix<Rational>& m, const mpz_class& denominator = 1);
std::string format_matrix(const Matrix<double>& m);

}  // namespace sigkit::io
