#pragma once

// JSON forms of laws, law assignments, tensors and kernels. Field names are
// fixed; docs/SCHEMAS.md lists them. Malformed input raises ArgumentError.

#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "freeinv/errors.hpp"
#include "freeinv/homsum.hpp"
#include "freeinv/laws.hpp"
#include "freeinv/wigner.hpp"
#include "freeinv/word_engine.hpp"

namespace freeinv {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ArgumentError("'" + path + "': " + e.what());
  }
}

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ArgumentError(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ArgumentError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ArgumentError(std::string("field '") + key + "' has the wrong type");
  }
}

inline std::vector<Atom> atoms_from_json(const json& arr) {
  if (!arr.is_array()) throw ArgumentError("'atoms' must be an array");
  std::vector<Atom> atoms;
  for (const auto& a : arr) atoms.push_back({require<double>(a, "position"), require<double>(a, "weight")});
  return atoms;
}

}  // namespace detail

/// {"name", "kind": semicircular|rademacher|atoms|moments, "params", "max_order"?}
inline Law law_from_json(const json& j) {
  if (!j.is_object()) throw ArgumentError("law must be a JSON object");
  const auto kind = detail::require<std::string>(j, "kind");
  const auto K = detail::get_or<std::size_t>(j, "max_order", kDefaultMaxOrder);
  const json params = j.contains("params") ? j.at("params") : json::object();
  if (kind == "semicircular") return Law::semicircular(detail::get_or<double>(params, "variance", 1.0), K);
  if (kind == "rademacher") return Law::rademacher(K);
  const auto name = detail::get_or<std::string>(j, "name", kind);
  if (kind == "atoms") {
    auto atoms = detail::atoms_from_json(params.contains("atoms") ? params.at("atoms") : json());
    if (detail::get_or<bool>(params, "standardize", false)) return standardized_atoms(std::move(atoms), K, name);
    return Law::from_atoms(std::move(atoms), K, name);
  }
  if (kind == "moments") return Law::from_moments(MomentSequence(detail::require<std::vector<double>>(params, "moments")), name);
  throw ArgumentError("unknown law kind '" + kind + "'");
}

inline json law_to_json(const Law& law) {
  json j;
  j["name"] = law.name();
  j["kind"] = to_string(law.kind());
  j["max_order"] = law.max_order();
  switch (law.kind()) {
    case LawKind::semicircular:
      j["params"] = {{"variance", law.variance_parameter()}};
      break;
    case LawKind::rademacher:
      j["params"] = json::object();
      break;
    case LawKind::atoms: {
      json arr = json::array();
      for (const auto& a : law.atoms()) arr.push_back({{"position", a.position}, {"weight", a.weight}});
      j["params"] = {{"atoms", arr}};
      break;
    }
    case LawKind::moments: {
      const auto v = law.moments().values();
      j["params"] = {{"moments", std::vector<double>(v.begin(), v.end())}};
      break;
    }
  }
  return j;
}

/// A single law (used for every index) or {"default": law, "per_index": {"i": law}}.
/// `min_order` raises the stored order of every law that is built here.
inline Assignment laws_from_json(const json& j, int N, std::size_t min_order = 0) {
  if (N < 1) throw ArgumentError("laws: N must be positive");
  auto build = [&](const json& lj) {
    json copy = lj;
    if (min_order > 0 && detail::get_or<std::size_t>(copy, "max_order", kDefaultMaxOrder) < min_order)
      copy["max_order"] = min_order;
    return std::make_shared<const Law>(law_from_json(copy));
  };
  Assignment a;
  if (j.is_object() && j.contains("kind")) {
    auto law = build(j);
    for (int i = 1; i <= N; ++i) a.assign(i, law);
    return a;
  }
  if (!j.is_object()) throw ArgumentError("laws must be a JSON object");
  if (j.contains("default")) {
    auto law = build(j.at("default"));
    for (int i = 1; i <= N; ++i) a.assign(i, law);
  }
  if (j.contains("per_index")) {
    const auto& per = j.at("per_index");
    if (!per.is_object()) throw ArgumentError("'per_index' must be an object");
    for (const auto& [key, lj] : per.items()) {
      int i = 0;
      try {
        i = std::stoi(key);
      } catch (const std::exception&) {
        throw ArgumentError("per_index key '" + key + "' is not an integer");
      }
      if (i < 1 || i > N) throw ArgumentError("per_index key '" + key + "' outside 1..N");
      a.assign(i, build(lj));
    }
  }
  for (int i = 1; i <= N; ++i)
    if (!a.contains(i)) throw ArgumentError("laws: no law for index " + std::to_string(i));
  return a;
}

/// Family constructor by name; `params` holds N and the family's own fields.
inline CoefficientTensor make_family(const std::string& name, const json& params) {
  const int N = detail::require<int>(params, "N");
  if (name == "constant_linear") return constant_linear(N);
  if (name == "quadratic_star") return quadratic_star(N);
  if (name == "mirror_counterexample") return mirror_counterexample(N);
  if (name == "sliding_window") {
    auto f = sliding_window(N, detail::get_or<int>(params, "k", 1));
    return detail::get_or<bool>(params, "normalize", false) ? normalized(f) : f;
  }
  if (name == "random_symmetric_band")
    return random_symmetric_band(N, detail::get_or<int>(params, "d", 2), detail::get_or<int>(params, "width", 2),
                                 detail::get_or<std::uint64_t>(params, "seed", 1));
  if (name == "random_tensor") {
    RandomTensorSpec s;
    s.N = N;
    s.d = detail::get_or<int>(params, "d", s.d);
    s.orbits = detail::get_or<std::size_t>(params, "orbits", s.orbits);
    s.mirror = detail::get_or<bool>(params, "mirror", s.mirror);
    s.full = detail::get_or<bool>(params, "full", s.full);
    s.vanish_diagonals = detail::get_or<bool>(params, "vanish_diagonals", s.vanish_diagonals);
    std::mt19937_64 rng(detail::get_or<std::uint64_t>(params, "seed", 1));
    return random_tensor(s, rng);
  }
  throw ArgumentError("unknown family '" + name + "'");
}

namespace detail {

template <class Array>
void fill_entries(Array& out, const json& entries) {
  if (!entries.is_array()) throw ArgumentError("'entries' must be an array");
  std::set<SparseArray::Index> seen;
  for (const auto& e : entries) {
    auto idx = require<SparseArray::Index>(e, "idx");
    if (!seen.insert(idx).second) throw ArgumentError("duplicate idx in entries");
    out.set(idx, require<double>(e, "val"));
  }
}

inline json entries_to_json(const SparseArray& a) {
  json arr = json::array();
  for (const auto& [idx, v] : a.entries()) arr.push_back({{"idx", idx}, {"val", v}});
  return arr;
}

}  // namespace detail

/// {"N", "d", "entries": [{"idx", "val"}]} or {"family", "params"}.
inline CoefficientTensor tensor_from_json(const json& j) {
  if (!j.is_object()) throw ArgumentError("tensor must be a JSON object");
  if (j.contains("family")) {
    const json params = j.contains("params") ? j.at("params") : json::object();
    return make_family(detail::require<std::string>(j, "family"), params);
  }
  CoefficientTensor f(detail::require<int>(j, "N"), detail::require<int>(j, "d"));
  detail::fill_entries(f, j.contains("entries") ? j.at("entries") : json::array());
  return f;
}

inline json tensor_to_json(const CoefficientTensor& f) {
  return {{"N", f.N()}, {"d", f.degree()}, {"entries", detail::entries_to_json(f)}};
}

inline DiscreteKernel kernel_from_json(const json& j) {
  if (!j.is_object()) throw ArgumentError("kernel must be a JSON object");
  DiscreteKernel g(detail::require<int>(j, "N"), detail::require<int>(j, "q"));
  detail::fill_entries(g, j.contains("entries") ? j.at("entries") : json::array());
  return g;
}

inline json kernel_to_json(const DiscreteKernel& g) {
  return {{"N", g.N()}, {"q", g.degree()}, {"entries", detail::entries_to_json(g)}};
}

}  // namespace freeinv
