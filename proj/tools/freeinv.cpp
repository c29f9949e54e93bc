// Command-line front end. Exit status: 0 when every check passes, 1 when a
// check fails, 2 on configuration or input errors.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "freeinv/freeinv.hpp"

namespace {

using namespace freeinv;

struct Common {
  std::string spec_path;
  std::string out_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--spec", c.spec_path, "Experiment spec (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out_path, "Output path (default: stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", c.seed, "Random seed (overrides the spec)");
  cmd->add_option("--threads", c.threads, "Worker threads (overrides the spec)")->check(CLI::PositiveNumber);
}

json load_spec(const Common& c) { return c.spec_path.empty() ? json::object() : read_json_file(c.spec_path); }

RunOptions run_options(const Common& c, const json& spec) {
  RunOptions r;
  r.seed = c.seed ? *c.seed : detail::get_or<std::uint64_t>(spec, "seed", 1);
  r.threads = c.threads ? *c.threads : detail::get_or<unsigned>(spec, "threads", 1);
  if (r.threads < 1) throw ArgumentError("threads must be positive");
  return r;
}

int emit(const ExperimentReport& rep, const Common& c) {
  const std::string text = c.format == "csv" ? to_csv_text(rep) : to_json_text(rep);
  if (c.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.out_path);
    if (!out) throw ArgumentError("cannot write '" + c.out_path + "'");
    out << text;
  }
  for (const auto& ch : rep.checks)
    if (!ch.pass) std::cerr << "FAIL " << ch.name << ": " << ch.detail << "\n";
  return rep.all_pass() ? 0 : 1;
}

ExperimentReport analyze(const std::string& path, const json& spec) {
  const auto f = tensor_from_json(read_json_file(path));
  const double tol = detail::get_or<double>(spec, "tolerance", 1e-12);
  const auto pred = predicates(f, tol);
  const auto free = influence_profile(f, InfluenceKind::free);
  const auto cls = influence_profile(f, InfluenceKind::classical);
  ExperimentReport rep;
  rep.experiment = "analyze";
  ojson summary{{"part", "summary"},
                {"N", f.N()},
                {"d", f.degree()},
                {"nnz", f.nnz()},
                {"norm_sq", pred.norm_sq},
                {"mirror_symmetric", pred.mirror_symmetric},
                {"fully_symmetric", pred.fully_symmetric},
                {"vanishes_on_diagonals", pred.vanishes_on_diagonals},
                {"tau_free", free.tau},
                {"tau_classical", cls.tau}};
  if (pred.mirror_symmetric && pred.vanishes_on_diagonals) {
    const auto fm = fourth_moment_report(f, tol);
    summary["contraction_norms"] = fm.contraction_norms;
    summary["m4_semicircular"] = fm.fourth_moment;
    summary["influence_bound"] = fm.influence_bound;
    summary["influ1_slack"] = fm.slack;
    rep.check("influ1", fm.inequality_holds, "|g *_{d-1} g| >= max_i sum_k f(i,k)^2, slack " + format_double(fm.slack));
  } else {
    rep.notes.push_back("tensor is not mirror-symmetric or does not vanish on diagonals; chaos diagnostics skipped");
  }
  rep.rows.push_back(std::move(summary));
  for (int i = 1; i <= f.N(); ++i)
    rep.rows.push_back({{"part", "influence"},
                        {"i", i},
                        {"influence_free", free.per_index[static_cast<std::size_t>(i - 1)]},
                        {"influence_classical", cls.per_index[static_cast<std::size_t>(i - 1)]}});
  return rep;
}

ExperimentReport moments(const std::string& tensor_path, const std::string& laws_path, int m, const json& spec,
                         const RunOptions& run) {
  if (m < 1) throw ArgumentError("-m must be positive");
  const auto f = tensor_from_json(read_json_file(tensor_path));
  const auto K = std::max<std::size_t>(kDefaultMaxOrder, static_cast<std::size_t>(f.degree() * m));
  const auto laws = laws_from_json(read_json_file(laws_path), f.N(), K);
  std::set<std::string> warned;
  for (const auto& [i, law] : laws.entries())
    for (const auto& w : law->warnings())
      if (warned.insert(law->name() + w).second) std::cerr << "warning: law '" << law->name() << "': " << w << "\n";
  ExpansionOptions opt;
  opt.tuple_cap = static_cast<std::uint64_t>(detail::get_or<double>(spec, "tuple_cap", static_cast<double>(opt.tuple_cap)));
  opt.threads = run.threads;
  MomentCache cache;
  const double v = qn_moment(f, laws, static_cast<unsigned>(m), opt, &cache);
  ExperimentReport rep;
  rep.experiment = "moments";
  rep.rows.push_back({{"N", f.N()}, {"d", f.degree()}, {"m", m}, {"value", v}, {"patterns", cache.size()}});
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact moments and invariance experiments for homogeneous sums of free random variables"};
  app.require_subcommand(1);

  Common common;
  std::string tensor_path;
  std::string laws_path;
  int order = 0;
  std::string experiment_name;

  auto* analyze_cmd = app.add_subcommand("analyze", "Predicates, influences and chaos diagnostics of a tensor");
  analyze_cmd->add_option("tensor", tensor_path, "Tensor JSON")->required()->check(CLI::ExistingFile);
  add_common(analyze_cmd, common);

  auto* moments_cmd = app.add_subcommand("moments", "Exact phi(Q^m) for a tensor and a law assignment");
  moments_cmd->add_option("tensor", tensor_path, "Tensor JSON")->required()->check(CLI::ExistingFile);
  moments_cmd->add_option("--laws", laws_path, "Laws JSON")->required()->check(CLI::ExistingFile);
  moments_cmd->add_option("-m", order, "Moment order")->required();
  add_common(moments_cmd, common);

  const char* experiments[] = {"clt", "invariance", "counterexamples", "hyper", "rmt"};
  const char* blurbs[] = {"Moment sweep against semicircular targets", "Invariance gaps and telescoping",
                          "Counterexample families", "Randomized moment-growth and contraction bounds",
                          "Monte Carlo validation with random matrices"};
  std::vector<CLI::App*> exp_cmds;
  for (std::size_t k = 0; k < 5; ++k) {
    auto* cmd = app.add_subcommand(experiments[k], blurbs[k]);
    add_common(cmd, common);
    exp_cmds.push_back(cmd);
  }

  auto* defaults_cmd = app.add_subcommand("defaults", "Print the default spec of an experiment");
  defaults_cmd->add_option("experiment", experiment_name, "Experiment name")
      ->required()
      ->check(CLI::IsMember({"clt", "invariance", "counterexamples", "hyper", "rmt"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (defaults_cmd->parsed()) {
      std::cout << default_spec(experiment_name).dump(2) << "\n";
      return 0;
    }
    const json spec = load_spec(common);
    const RunOptions run = run_options(common, spec);
    if (analyze_cmd->parsed()) return emit(analyze(tensor_path, spec), common);
    if (moments_cmd->parsed()) return emit(moments(tensor_path, laws_path, order, spec, run), common);
    json exp_spec = spec;
    if (exp_spec.is_object()) {
      exp_spec.erase("seed");
      exp_spec.erase("threads");
    }
    if (exp_cmds[0]->parsed()) return emit(run_clt_sweep(exp_spec, run), common);
    if (exp_cmds[1]->parsed()) return emit(run_invariance_sweep(exp_spec, run), common);
    if (exp_cmds[2]->parsed()) return emit(run_counterexample_suite(exp_spec, run), common);
    if (exp_cmds[3]->parsed()) return emit(run_hyper_suite(exp_spec, run), common);
    if (exp_cmds[4]->parsed()) return emit(run_rmt_validation(exp_spec, run), common);
  } catch (const SizeLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
