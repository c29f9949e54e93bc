#pragma once

// Batch experiments. Each runner takes a JSON spec (missing fields fall back
// to the defaults returned by default_spec) and returns an ExperimentReport in
// which every asserted inequality is a named check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "freeinv/errors.hpp"
#include "freeinv/homsum.hpp"
#include "freeinv/hyper.hpp"
#include "freeinv/io.hpp"
#include "freeinv/laws.hpp"
#include "freeinv/report.hpp"
#include "freeinv/rmt.hpp"
#include "freeinv/wigner.hpp"
#include "freeinv/word_engine.hpp"

namespace freeinv {

struct TelescopeResult {
  std::vector<double> steps;  // steps[i-1] = phi(Q(Z^(i))^m) - phi(Q(Z^(i+1))^m)
  double moment_x = 0.0;      // Z^(1) = X
  double moment_y = 0.0;      // Z^(N+1) = Y
  double sum() const {
    double s = 0.0;
    for (double x : steps) s += x;
    return s;
  }
};

/// Lindeberg replacement: Z^(i) uses Y_j for j < i and X_j for j >= i.
/// Indices outside the support of f leave the moment unchanged, so their
/// step is recorded as exactly zero without re-evaluation.
inline TelescopeResult lindeberg_telescope(const CoefficientTensor& f, const Assignment& x, const Assignment& y,
                                           unsigned m, const ExpansionOptions& opt = {}, MomentCache* cache = nullptr) {
  MomentCache local;
  MomentCache& c = cache ? *cache : local;
  std::vector<char> used(static_cast<std::size_t>(f.N()) + 1, 0);
  for (const auto& [idx, v] : f.entries())
    for (int i : idx) used[static_cast<std::size_t>(i)] = 1;

  TelescopeResult out;
  Assignment z = x;
  double prev = qn_moment(f, z, m, opt, &c);
  out.moment_x = prev;
  for (int i = 1; i <= f.N(); ++i) {
    if (!used[static_cast<std::size_t>(i)]) {
      out.steps.push_back(0.0);
      continue;
    }
    z.assign(i, y.shared(i));
    const double next = qn_moment(f, z, m, opt, &c);
    out.steps.push_back(prev - next);
    prev = next;
  }
  out.moment_y = prev;
  return out;
}

struct RunOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// phi(S^k) for a standard semicircular S.
inline double semicircular_moment(unsigned k) {
  return k % 2 != 0 ? 0.0 : static_cast<double>(catalan(k / 2));
}

namespace detail {

inline json merged(const json& defaults, const json& spec) {
  if (spec.is_null()) return defaults;
  if (!spec.is_object()) throw ArgumentError("spec must be a JSON object");
  json out = defaults;
  for (const auto& [k, v] : spec.items()) out[k] = v;
  return out;
}

inline std::vector<int> n_grid(const json& spec, const char* key) {
  const auto grid = require<std::vector<int>>(spec, key);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) throw ArgumentError(std::string("'") + key + "' must be strictly increasing");
  return grid;
}

inline std::vector<unsigned> orders(const json& spec) {
  const auto ms = require<std::vector<int>>(spec, "moments");
  std::vector<unsigned> out;
  for (int m : ms) {
    if (m < 1) throw ArgumentError("moment orders must be positive");
    out.push_back(static_cast<unsigned>(m));
  }
  return out;
}

inline CoefficientTensor family_at(const json& family, int N, bool normalize) {
  if (!family.is_object()) throw ArgumentError("'family' must be an object");
  json params = family.contains("params") ? family.at("params") : json::object();
  params["N"] = N;
  auto f = make_family(require<std::string>(family, "name"), params);
  return normalize ? normalized(f) : f;
}

inline ExpansionOptions expansion(const json& spec, const RunOptions& run) {
  ExpansionOptions opt;
  opt.tuple_cap = static_cast<std::uint64_t>(get_or<double>(spec, "tuple_cap", static_cast<double>(opt.tuple_cap)));
  opt.threads = run.threads;
  return opt;
}

inline std::string join(const std::vector<std::string>& parts, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

inline std::string num(double x) { return format_double(x); }

inline std::string mkey(const char* prefix, unsigned m) { return prefix + std::to_string(m); }

}  // namespace detail

inline json default_spec(const std::string& experiment) {
  if (experiment == "clt")
    return {{"family", {{"name", "constant_linear"}, {"params", json::object()}}},
            {"N", {2, 4, 8, 16, 32}},
            {"laws", {{"kind", "rademacher"}}},
            {"moments", {4}},
            {"normalize", false},
            {"bands", {{"4", 4.0}}},
            {"check_monotone", false},
            {"tuple_cap", 5e7}};
  if (experiment == "invariance")
    return {{"family", {{"name", "sliding_window"}, {"params", {{"k", 1}, {"normalize", true}}}}},
            {"N", {4, 8, 16, 32}},
            {"laws_x", {{"kind", "rademacher"}}},
            {"laws_y", {{"kind", "semicircular"}}},
            {"moments", {4}},
            {"normalize", false},
            {"telescope", true},
            {"ratio_factor", 2.0},
            {"tolerance", 1e-9},
            {"tuple_cap", 5e7}};
  if (experiment == "counterexamples")
    return {{"star_rademacher_N", {2, 4, 8, 16, 32}},
            {"star_semicircular_N", {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}},
            {"mirror_N", {5, 10, 20, 40}},
            {"star_gap_threshold", 0.2},
            {"tolerance", 1e-12},
            {"tuple_cap", 5e7}};
  if (experiment == "hyper")
    return {{"trials", 100},         {"d_max", 3},           {"r_max", 2},
            {"N_max", 6},            {"orbits_max", 4},      {"laws", {"rademacher", "semicircular", "atoms"}},
            {"contraction_trials", 200}, {"contraction_max_total", 10}, {"word_trials", 200},
            {"word_r_max", 3},    {"tolerance", 1e-10}};
  if (experiment == "rmt")
    return {{"n", 512},
            {"samples", 100},
            {"bias_constant", 1.0},
            {"determinism_check", true},
            {"scenarios",
             {{{"name", "gue"},
               {"family", {{"name", "constant_linear"}, {"params", {{"N", 1}}}}},
               {"laws", {{"kind", "semicircular"}}},
               {"moments", {2, 3, 4}}},
              {{"name", "free_clt_rademacher"},
               {"family", {{"name", "constant_linear"}, {"params", {{"N", 4}}}}},
               {"laws", {{"kind", "rademacher"}}},
               {"moments", {4}}},
              {{"name", "tetilla"},
               {"family", {{"name", "quadratic_star"}, {"params", {{"N", 8}}}}},
               {"laws", {{"kind", "semicircular"}}},
               {"moments", {4}}}}}};
  throw ArgumentError("unknown experiment '" + experiment + "'");
}

/// Moments of Q_N under one law assignment across an N grid, against the
/// standard semicircular targets. Bands |gap_m| <= c/N apply only to the
/// orders listed in "bands".
inline ExperimentReport run_clt_sweep(const json& user_spec, const RunOptions& run = {}) {
  const json spec = detail::merged(default_spec("clt"), user_spec);
  const auto grid = detail::n_grid(spec, "N");
  const auto ms = detail::orders(spec);
  const bool normalize = detail::get_or<bool>(spec, "normalize", false);
  const auto opt = detail::expansion(spec, run);
  std::map<unsigned, double> bands;
  for (const auto& [k, v] : spec.at("bands").items()) bands[static_cast<unsigned>(std::stoi(k))] = v.get<double>();

  ExperimentReport rep;
  rep.experiment = "clt";
  std::map<unsigned, std::vector<std::string>> band_fail;
  std::map<unsigned, std::vector<double>> gaps;
  for (int N : grid) {
    const auto f = detail::family_at(spec.at("family"), N, normalize);
    const std::size_t K = std::max<std::size_t>(kDefaultMaxOrder, static_cast<std::size_t>(f.degree()) * *std::max_element(ms.begin(), ms.end()));
    const auto laws = laws_from_json(spec.at("laws"), N, K);
    const auto prof = influence_profile(f);
    MomentCache cache;
    ojson row;
    row["N"] = N;
    row["norm_sq"] = f.norm_sq();
    row["tau"] = prof.tau;
    row["sqrt_tau"] = std::sqrt(prof.tau);
    for (unsigned m : ms) {
      const double v = qn_moment(f, laws, m, opt, &cache);
      const double target = semicircular_moment(m);
      row[detail::mkey("m", m)] = v;
      row[detail::mkey("target", m)] = target;
      row[detail::mkey("gap", m)] = v - target;
      gaps[m].push_back(std::abs(v - target));
      if (auto it = bands.find(m); it != bands.end()) {
        const bool ok = std::abs(v - target) <= it->second / N;
        row[detail::mkey("within_band", m)] = ok;
        if (!ok) band_fail[m].push_back(std::to_string(N));
      }
    }
    rep.rows.push_back(std::move(row));
  }
  for (const auto& [m, c] : bands) {
    if (std::find(ms.begin(), ms.end(), m) == ms.end()) continue;
    rep.check(detail::mkey("band_m", m), band_fail[m].empty(),
              "|m" + std::to_string(m) + " - target| <= " + detail::num(c) + "/N" +
                  (band_fail[m].empty() ? "" : "; fails at N = " + detail::join(band_fail[m])));
  }
  if (detail::get_or<bool>(spec, "check_monotone", false)) {
    for (unsigned m : ms) {
      const auto& g = gaps[m];
      bool ok = true;
      for (std::size_t i = 1; i < g.size(); ++i) ok = ok && g[i] <= g[i - 1] + 1e-12;
      rep.check(detail::mkey("monotone_gap_m", m), ok, "|gap| non-increasing over the N grid");
    }
  }
  if (!normalize && !grid.empty()) {
    const auto f = detail::family_at(spec.at("family"), grid.front(), false);
    if (std::abs(f.norm_sq() - 1.0) > 1e-12) rep.notes.push_back("family is not normalized; targets refer to a standard semicircular");
  }
  return rep;
}

/// Gap Delta_m = phi(Q(X)^m) - phi(Q(Y)^m) against tau_N^{1/2}, with the
/// telescoping decomposition checked at every grid point.
inline ExperimentReport run_invariance_sweep(const json& user_spec, const RunOptions& run = {}) {
  const json spec = detail::merged(default_spec("invariance"), user_spec);
  const auto grid = detail::n_grid(spec, "N");
  const auto ms = detail::orders(spec);
  const bool normalize = detail::get_or<bool>(spec, "normalize", false);
  const bool telescope = detail::get_or<bool>(spec, "telescope", true);
  const double factor = detail::get_or<double>(spec, "ratio_factor", 2.0);
  const double tol = detail::get_or<double>(spec, "tolerance", 1e-9);
  const auto opt = detail::expansion(spec, run);

  ExperimentReport rep;
  rep.experiment = "invariance";
  std::map<unsigned, std::vector<double>> ratios;
  std::map<unsigned, double> worst_telescope;
  std::vector<double> taus;
  for (int N : grid) {
    const auto f = detail::family_at(spec.at("family"), N, normalize);
    const std::size_t K = std::max<std::size_t>(kDefaultMaxOrder, static_cast<std::size_t>(f.degree()) * *std::max_element(ms.begin(), ms.end()));
    const auto lx = laws_from_json(spec.at("laws_x"), N, K);
    const auto ly = laws_from_json(spec.at("laws_y"), N, K);
    const auto prof = influence_profile(f);
    taus.push_back(prof.tau);
    MomentCache cache;
    ojson row;
    row["N"] = N;
    row["norm_sq"] = f.norm_sq();
    row["tau"] = prof.tau;
    row["sqrt_tau"] = std::sqrt(prof.tau);
    for (unsigned m : ms) {
      double vx = 0.0;
      double vy = 0.0;
      double tsum = 0.0;
      if (telescope) {
        const auto t = lindeberg_telescope(f, lx, ly, m, opt, &cache);
        vx = t.moment_x;
        vy = t.moment_y;
        tsum = t.sum();
      } else {
        vx = qn_moment(f, lx, m, opt, &cache);
        vy = qn_moment(f, ly, m, opt, &cache);
      }
      const double delta = vx - vy;
      const double st = std::sqrt(prof.tau);
      const double ratio = st > 0.0 ? std::abs(delta) / st : (delta == 0.0 ? 0.0 : INFINITY);
      ratios[m].push_back(ratio);
      row[detail::mkey("x_m", m)] = vx;
      row[detail::mkey("y_m", m)] = vy;
      row[detail::mkey("delta_m", m)] = delta;
      row[detail::mkey("ratio_m", m)] = ratio;
      if (telescope) {
        const double err = std::abs(tsum - delta);
        row[detail::mkey("telescope_sum_m", m)] = tsum;
        row[detail::mkey("telescope_err_m", m)] = err;
        row[detail::mkey("telescope_ok_m", m)] = err <= tol;
        worst_telescope[m] = std::max(worst_telescope[m], err);
      }
    }
    rep.rows.push_back(std::move(row));
  }
  for (unsigned m : ms) {
    const auto& r = ratios[m];
    if (r.empty()) continue;
    const double mx = *std::max_element(r.begin(), r.end());
    const bool ok = r.back() <= factor * mx;
    rep.check(detail::mkey("bounded_ratio_m", m), ok,
              "ratio at largest N = " + detail::num(r.back()) + ", max over grid = " + detail::num(mx) +
                  ", factor = " + detail::num(factor));
    rep.notes.push_back("empirical constant for m = " + std::to_string(m) + ": max |Delta|/sqrt(tau) = " + detail::num(mx));
    if (telescope)
      rep.check(detail::mkey("telescope_m", m), worst_telescope[m] <= tol,
                "max |sum of steps - Delta| = " + detail::num(worst_telescope[m]) + ", tolerance " + detail::num(tol));
  }
  if (taus.size() >= 2 && taus.back() >= taus.front() - 1e-12)
    rep.notes.push_back("uninformative: tau does not vanish over the grid");
  return rep;
}

/// The quadratic star under Rademacher and semicircular laws, and the
/// mirror-symmetric degree-3 family whose contractions vanish while tau stays 1.
inline ExperimentReport run_counterexample_suite(const json& user_spec = json(), const RunOptions& run = {}) {
  const json spec = detail::merged(default_spec("counterexamples"), user_spec);
  const double tol = detail::get_or<double>(spec, "tolerance", 1e-12);
  const double threshold = detail::get_or<double>(spec, "star_gap_threshold", 0.2);
  const auto opt = detail::expansion(spec, run);
  ExperimentReport rep;
  rep.experiment = "counterexamples";

  const auto rad_grid = detail::n_grid(spec, "star_rademacher_N");
  std::vector<double> rad_gaps;
  {
    const auto law = std::make_shared<const Law>(Law::rademacher());
    MomentCache cache;
    for (int N : rad_grid) {
      Assignment a;
      for (int i = 1; i <= N; ++i) a.assign(i, law);
      const double v = qn_moment(quadratic_star(N), a, 4, opt, &cache);
      rad_gaps.push_back(std::abs(v - 2.0));
      rep.rows.push_back({{"part", "star_rademacher"}, {"N", N}, {"m4", v}, {"abs_gap", std::abs(v - 2.0)}});
    }
  }
  if (!rad_grid.empty()) {
    bool dec = true;
    for (std::size_t i = 1; i < rad_gaps.size(); ++i) dec = dec && rad_gaps[i] < rad_gaps[i - 1];
    rep.check("star_rademacher_gap_decreasing", dec, "|m4 - 2| strictly decreasing in N");
    rep.check("star_rademacher_gap_small", rad_gaps.back() < threshold,
              "|m4 - 2| = " + detail::num(rad_gaps.back()) + " at N = " + std::to_string(rad_grid.back()) +
                  ", threshold " + detail::num(threshold));
  }

  const auto sc_grid = detail::n_grid(spec, "star_semicircular_N");
  if (!sc_grid.empty()) {
    const auto law = std::make_shared<const Law>(Law::semicircular());
    MomentCache cache;
    double worst = 0.0;
    for (int N : sc_grid) {
      Assignment a;
      for (int i = 1; i <= N; ++i) a.assign(i, law);
      const double v = qn_moment(quadratic_star(N), a, 4, opt, &cache);
      worst = std::max(worst, std::abs(v - 2.5));
      rep.rows.push_back({{"part", "star_semicircular"}, {"N", N}, {"m4", v}, {"abs_gap", std::abs(v - 2.0)}});
    }
    rep.check("star_semicircular_constant", worst <= tol,
              "max |m4 - 5/2| = " + detail::num(worst) + ", tolerance " + detail::num(tol));
  }

  const auto mirror_grid = detail::n_grid(spec, "mirror_N");
  if (!mirror_grid.empty()) {
    double worst_norm = 0.0;
    double worst_tau = 0.0;
    double worst_pair = 0.0;
    bool influ = true;
    std::vector<double> c1;
    std::vector<double> c2;
    for (int N : mirror_grid) {
      const auto f = mirror_counterexample(N);
      const auto prof = influence_profile(f);
      const auto fm = fourth_moment_report(f);
      worst_norm = std::max(worst_norm, std::abs(f.norm_sq() - 1.0));
      worst_tau = std::max(worst_tau, std::abs(prof.tau - 1.0));
      worst_pair = std::max(worst_pair, std::abs(fm.contraction_norms[0] - fm.contraction_norms[1]));
      influ = influ && fm.inequality_holds;
      c1.push_back(fm.contraction_norms[0]);
      c2.push_back(fm.contraction_norms[1]);
      rep.rows.push_back({{"part", "mirror"},
                          {"N", N},
                          {"norm_sq", f.norm_sq()},
                          {"tau", prof.tau},
                          {"star1_norm", fm.contraction_norms[0]},
                          {"star2_norm", fm.contraction_norms[1]},
                          {"m4", fm.fourth_moment},
                          {"influence_bound", fm.influence_bound},
                          {"influ1_holds", fm.inequality_holds}});
    }
    bool dec = true;
    for (std::size_t i = 1; i < c1.size(); ++i) dec = dec && c1[i] < c1[i - 1] && c2[i] < c2[i - 1];
    rep.check("mirror_norm_one", worst_norm <= tol, "max |sum f^2 - 1| = " + detail::num(worst_norm));
    rep.check("mirror_tau_one", worst_tau <= tol, "max |tau - 1| = " + detail::num(worst_tau));
    rep.check("mirror_contractions_equal", worst_pair <= tol, "max |star1 - star2| = " + detail::num(worst_pair));
    rep.check("mirror_contractions_decreasing", dec, "star1 and star2 norms strictly decreasing in N");
    rep.check("mirror_influ1", influ, "|g *_{d-1} g| >= max_i sum_k f(i,k)^2 at every N");
    rep.notes.push_back("mirror family: contractions vanish while tau stays 1, so vanishing contractions do not force vanishing influence without full symmetry");
  }
  return rep;
}

namespace detail {

inline std::shared_ptr<const Law> random_law(const std::string& kind, std::size_t K, std::mt19937_64& rng) {
  if (kind == "rademacher") return std::make_shared<const Law>(Law::rademacher(K));
  if (kind == "semicircular") return std::make_shared<const Law>(Law::semicircular(1.0, K));
  if (kind == "atoms") {
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    std::uniform_real_distribution<double> wt(0.2, 1.0);
    std::vector<Atom> atoms(3);
    double total = 0.0;
    for (auto& a : atoms) {
      a.position = pos(rng);
      a.weight = wt(rng);
      total += a.weight;
    }
    for (auto& a : atoms) a.weight /= total;
    // Renormalize so the weights sum to one up to rounding of a single term.
    double rest = 0.0;
    for (std::size_t j = 1; j < atoms.size(); ++j) rest += atoms[j].weight;
    atoms[0].weight = 1.0 - rest;
    return std::make_shared<const Law>(standardized_atoms(std::move(atoms), K, "random_atoms"));
  }
  throw ArgumentError("unknown law type '" + kind + "'");
}

inline std::string to_text(const std::vector<int>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

inline std::string to_text(const BlockGraph& g) {
  std::string s = "{";
  for (std::size_t b = 0; b < g.blocks().size(); ++b) {
    std::vector<int> one;
    for (int x : g.blocks()[b]) one.push_back(x + 1);
    s += (b ? "," : "") + to_text(one);
  }
  return s + "}";
}

}  // namespace detail

/// Randomized checks of the moment-growth bound, of the contraction norm
/// inequality |C_gamma(f_1 x ... x f_r)| <= prod |f_i| and of the word bound.
inline ExperimentReport run_hyper_suite(const json& user_spec, const RunOptions& run = {}) {
  const json spec = detail::merged(default_spec("hyper"), user_spec);
  const int trials = detail::get_or<int>(spec, "trials", 0);
  const int d_max = detail::get_or<int>(spec, "d_max", 3);
  const int r_max = detail::get_or<int>(spec, "r_max", 2);
  const int N_max = detail::get_or<int>(spec, "N_max", 6);
  const int orbits_max = detail::get_or<int>(spec, "orbits_max", 4);
  const auto law_types = detail::require<std::vector<std::string>>(spec, "laws");
  const int contraction_count = detail::get_or<int>(spec, "contraction_trials", 0);
  const int contraction_total = detail::get_or<int>(spec, "contraction_max_total", 10);
  const int word_count = detail::get_or<int>(spec, "word_trials", 0);
  const int word_r = detail::get_or<int>(spec, "word_r_max", 3);
  const double tol = detail::get_or<double>(spec, "tolerance", 1e-10);
  if (d_max < 1 || r_max < 1 || N_max < 1 || orbits_max < 1 || word_r < 1 || contraction_total < 1)
    throw ArgumentError("hyper: d_max, r_max, N_max, orbits_max, contraction_max_total and word_r_max must be positive");
  if (law_types.empty() && (trials > 0 || word_count > 0)) throw ArgumentError("hyper: empty law list");
  for (const auto& t : law_types)
    if (t != "rademacher" && t != "semicircular" && t != "atoms") throw ArgumentError("hyper: unknown law type '" + t + "'");
  ExpansionOptions opt = detail::expansion(spec, run);

  ExperimentReport rep;
  rep.experiment = "hyper";
  std::mt19937_64 rng(run.seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  double worst_ratio = 0.0;
  bool prop_ok = true;
  for (int t = 0; t < trials; ++t) {
    const int d = uniform(1, d_max);
    const int r = uniform(1, r_max);
    const int N = uniform(std::max(d, 2), std::max({d, 2, N_max}));
    const auto& kind = law_types[static_cast<std::size_t>(uniform(0, static_cast<int>(law_types.size()) - 1))];
    RandomTensorSpec ts;
    ts.N = N;
    ts.d = d;
    ts.orbits = static_cast<std::size_t>(uniform(1, orbits_max));
    const auto f = random_tensor(ts, rng);
    const std::size_t K = std::max<std::size_t>(kDefaultMaxOrder, std::size_t{1} << (r * d));
    Assignment laws;
    for (int i = 1; i <= N; ++i) laws.assign(i, detail::random_law(kind, K, rng));
    const auto h = hypercontractivity_check(f, laws, r, opt);
    prop_ok = prop_ok && h.holds;
    worst_ratio = std::max(worst_ratio, h.ratio);
    rep.rows.push_back({{"part", "moment_bound"},
                        {"trial", t},
                        {"d", d},
                        {"r", r},
                        {"N", N},
                        {"law", kind},
                        {"moment", h.moment},
                        {"mu", h.mu},
                        {"constant", h.constant},
                        {"norm_power", h.norm_power},
                        {"bound", h.bound},
                        {"ratio", h.ratio},
                        {"holds", h.holds}});
  }
  if (trials > 0)
    rep.check("moment_bound_ratio_le_1", prop_ok, "max ratio phi(Q^{2r}) / bound = " + detail::num(worst_ratio));

  bool contraction_ok = true;
  double contraction_worst = 0.0;
  for (int t = 0; t < contraction_count; ++t) {
    const int r = uniform(1, 4);
    std::vector<int> shape;
    int total = 0;
    for (int s = 0; s < r; ++s) {
      const int n = uniform(1, 3);
      if (total + n > contraction_total) break;
      shape.push_back(n);
      total += n;
    }
    if (shape.empty()) shape.push_back(1);
    const auto graphs = enumerate_graphs(shape, false, std::max(contraction_total, kDefaultGraphCap));
    const auto& gamma = graphs[static_cast<std::size_t>(uniform(0, static_cast<int>(graphs.size()) - 1))];
    const int N = uniform(2, 3);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<DiscreteKernel> factors;
    double rhs = 1.0;
    for (int n : shape) {
      DiscreteKernel k(N, n);
      SparseArray::Index idx(static_cast<std::size_t>(n), 1);
      while (true) {
        k.set(idx, g(rng));
        std::size_t p = 0;
        while (p < idx.size() && idx[p] == N) idx[p++] = 1;
        if (p == idx.size()) break;
        ++idx[p];
      }
      rhs *= k.norm();
      factors.push_back(std::move(k));
    }
    const double lhs = contract_graph(gamma, factors).norm();
    const bool ok = lhs <= rhs * (1.0 + tol) + tol;
    contraction_ok = contraction_ok && ok;
    contraction_worst = std::max(contraction_worst, rhs > 0.0 ? lhs / rhs : 0.0);
    rep.rows.push_back({{"part", "contraction_norm"},
                        {"trial", t},
                        {"shape", detail::to_text(shape)},
                        {"graph", detail::to_text(gamma)},
                        {"N", N},
                        {"lhs", lhs},
                        {"rhs", rhs},
                        {"holds", ok}});
  }
  if (contraction_count > 0)
    rep.check("contraction_norm_bound", contraction_ok, "max |C_gamma| / prod |f_i| = " + detail::num(contraction_worst));

  bool word_ok = true;
  for (int t = 0; t < word_count; ++t) {
    const int r = uniform(1, word_r);
    const std::size_t K = std::max<std::size_t>(kDefaultMaxOrder, std::size_t{1} << r);
    Assignment a;
    for (int v = 1; v <= 3; ++v)
      a.assign(v, detail::random_law(law_types[static_cast<std::size_t>(uniform(0, static_cast<int>(law_types.size()) - 1))], K, rng));
    Word w(static_cast<std::size_t>(2 * r));
    for (auto& x : w) x = uniform(1, 3);
    const auto c = word_bound_check(w, a);
    word_ok = word_ok && c.holds;
    rep.rows.push_back({{"part", "word_bound"},
                        {"trial", t},
                        {"word", detail::to_text(w)},
                        {"value", c.value},
                        {"mu", c.mu},
                        {"holds", c.holds}});
  }
  if (word_count > 0) rep.check("word_bound", word_ok, "|phi(word)| <= mu over " + std::to_string(word_count) + " random words");
  return rep;
}

/// Monte Carlo estimates against exact moments. The allowance
/// 3 stderr + C/n is a heuristic for finite-n bias.
inline ExperimentReport run_rmt_validation(const json& user_spec, const RunOptions& run = {}) {
  const json spec = detail::merged(default_spec("rmt"), user_spec);
  const int n = detail::require<int>(spec, "n");
  const int samples = detail::require<int>(spec, "samples");
  const double C = detail::get_or<double>(spec, "bias_constant", 1.0);
  const bool determinism = detail::get_or<bool>(spec, "determinism_check", false);
  if (n < 1) throw ArgumentError("rmt: n must be positive");
  if (samples < 1) throw ArgumentError("rmt: samples must be positive");
  const auto& scenarios = spec.at("scenarios");
  if (!scenarios.is_array()) throw ArgumentError("rmt: 'scenarios' must be an array");

  ExperimentReport rep;
  rep.experiment = "rmt";
  bool all_ok = true;
  bool any_degenerate = false;
  std::size_t idx = 0;
  for (const auto& sc : scenarios) {
    const auto name = detail::get_or<std::string>(sc, "name", "scenario" + std::to_string(idx));
    const auto& fam = sc.at("family");
    json params = fam.contains("params") ? fam.at("params") : json::object();
    const auto f = make_family(detail::require<std::string>(fam, "name"), params);
    const auto ms = detail::orders(sc);
    const auto laws = laws_from_json(sc.at("laws"), f.N(), std::max<std::size_t>(kDefaultMaxOrder, static_cast<std::size_t>(f.degree()) * *std::max_element(ms.begin(), ms.end())));
    std::vector<MatrixModel> models;
    for (int i = 1; i <= f.N(); ++i) models.push_back(MatrixModel::for_law(laws.law(i), n));

    McOptions mc;
    mc.samples = static_cast<std::size_t>(samples);
    mc.seed = run.seed + 1'000'003ULL * idx;
    mc.threads = run.threads;
    const auto est = estimate_qn_moments(f, models, ms, mc);
    MomentCache cache;
    for (std::size_t j = 0; j < ms.size(); ++j) {
      const double exact = qn_moment(f, laws, ms[j], detail::expansion(spec, run), &cache);
      const bool ok = mc_consistent(est[j], exact, n, C);
      all_ok = all_ok && ok;
      any_degenerate = any_degenerate || est[j].degenerate;
      rep.rows.push_back({{"scenario", name},
                          {"m", ms[j]},
                          {"n", n},
                          {"samples", samples},
                          {"seed", mc.seed},
                          {"exact", exact},
                          {"mean", est[j].mean},
                          {"stderr", est[j].std_error},
                          {"abs_err", std::abs(est[j].mean - exact)},
                          {"allowance", 3.0 * est[j].std_error + C / n},
                          {"consistent", ok},
                          {"degenerate", est[j].degenerate}});
    }
    if (determinism && idx == 0) {
      const auto again = estimate_qn_moments(f, models, ms, mc);
      bool same = true;
      for (std::size_t j = 0; j < ms.size(); ++j)
        same = same && again[j].mean == est[j].mean && again[j].std_error == est[j].std_error;
      rep.check("determinism", same, "rerun of scenario '" + name + "' with the same seed is bit-identical");
    }
    ++idx;
  }
  if (!scenarios.empty()) {
    rep.check("mc_consistency", all_ok, "|mean - exact| <= 3 stderr + " + detail::num(C) + "/n for every row");
    rep.notes.push_back("the C/n bias allowance is a heuristic for finite-dimension effects, not a proven bound");
  }
  if (any_degenerate) rep.notes.push_back("samples = 1: standard errors reported as 0");
  return rep;
}

}  // namespace freeinv
