// Command line front end: instance generation, routing, single solves,
// batch benchmarks, and the verification suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvrp/bench.hpp"
#include "qvrp/env.hpp"
#include "qvrp/instance_gen.hpp"
#include "qvrp/shortcut.hpp"

using namespace qvrp;

namespace {

OmissionAssignment omission_from_json(const Instance& inst, const nlohmann::json& j) {
  OmissionAssignment a;
  for (int x : j.at("keep").get<std::vector<int>>())
    a.keep.push_back(static_cast<std::uint8_t>(x ? 1 : 0));
  if (a.keep.size() != static_cast<std::size_t>(inst.d))
    throw std::invalid_argument("assignment: keep must have size d");
  return a;
}

VehicleAssignment vehicle_from_json(const Instance& inst, const nlohmann::json& j) {
  VehicleAssignment a;
  a.assign = j.at("assign").get<std::vector<int>>();
  if (a.assign.size() != static_cast<std::size_t>(inst.d))
    throw std::invalid_argument("assignment: assign must have size d");
  for (int v : a.assign)
    if (v < kOmitted || v >= static_cast<int>(inst.fleet.size()))
      throw std::invalid_argument("assignment: vehicle index out of range");
  return a;
}

int cmd_gen(int d, std::uint64_t seed, int count, const std::string& out_dir, bool keep_all_flag,
            bool unit_q, std::optional<double> quota, double plane_side,
            std::int64_t filter_budget) {
  std::filesystem::create_directories(out_dir);
  LocalSearchConfig ls;
  ls.max_evaluations = filter_budget;
  int written = 0;
  std::uint64_t s = seed;
  for (; written < count && s < seed + 200ull * static_cast<std::uint64_t>(count); ++s) {
    GenConfig cfg;
    cfg.d = d;
    cfg.seed = s;
    cfg.unit_quantities = unit_q;
    cfg.plane_side = plane_side;
    if (quota) cfg.quota_override = quota;
    const Instance inst = gen_synthetic(cfg);
    if (!keep_all_flag && !filter_nontrivial(inst, make_penalty_params(inst), ls)) continue;
    const std::string path =
        out_dir + "/inst_d" + std::to_string(d) + "_s" + std::to_string(s) + ".json";
    save_instance(inst, path);
    ++written;
  }
  std::printf("wrote %d instance(s) to %s (last seed tried: %llu)\n", written, out_dir.c_str(),
              static_cast<unsigned long long>(s - 1));
  return written == count ? 0 : 1;
}

int cmd_route(const std::string& instance_path, const std::string& assignment_path,
              std::int64_t budget, std::uint64_t seed, double lambda) {
  const Instance inst = load_instance(instance_path);
  const auto pp = make_penalty_params(inst, lambda);
  std::ifstream in(assignment_path);
  if (!in) throw std::runtime_error("cannot open assignment file: " + assignment_path);
  nlohmann::json j;
  in >> j;

  Routing routing;
  if (j.contains("keep")) {
    LocalSearchConfig cfg;
    cfg.max_evaluations = budget;
    cfg.seed = seed;
    routing = solve_vrp_local_search(inst, omission_from_json(inst, j), pp, cfg);
  } else if (j.contains("assign")) {
    routing = route_for_vehicle_assignment(inst, vehicle_from_json(inst, j), pp);
  } else {
    throw std::invalid_argument("assignment file needs a \"keep\" or \"assign\" array");
  }
  std::printf("%s\n", routing_to_json(inst, routing).c_str());
  return 0;
}

int cmd_solve(const std::string& method_name_arg, const std::string& instance_path,
              const std::string& routing_path, const std::string& trace_path, BenchConfig cfg) {
  const auto method = parse_method(method_name_arg);
  if (!method) {
    std::fprintf(stderr, "unknown method '%s' (expected dp, greedy, oa-sa, va-sa, exp3, lri)\n",
                 method_name_arg.c_str());
    return 2;
  }
  NamedInstance named{std::filesystem::path(instance_path).stem().string(),
                      load_instance(instance_path)};

  if (!routing_path.empty() &&
      (*method == Method::kDp || *method == Method::kGreedy)) {
    // Solve on an explicit fixed routing instead of the keep-all construction.
    std::ifstream in(routing_path);
    if (!in) throw std::runtime_error("cannot open routing file: " + routing_path);
    std::stringstream ss;
    ss << in.rdbuf();
    const Routing fixed = routing_from_json(named.instance, ss.str());
    const auto pp = make_penalty_params(named.instance, cfg.lambda);
    const auto t0 = std::chrono::steady_clock::now();
    const ShortcutResult res = *method == Method::kDp
                                   ? solve_shortcut_multitype(named.instance, fixed)
                                   : greedy_removal(named.instance, fixed, pp);
    SolveReport rep;
    rep.method = method_name_arg;
    rep.instance_id = named.id;
    rep.seed = cfg.seed;
    rep.oq = res.oq;
    rep.cost = res.cost;
    rep.emission = res.emission;
    rep.admissible = is_admissible(named.instance, res.routing);
    rep.reward = terminal_reward(named.instance, pp, res.routing);
    rep.runtime_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    std::printf("%s\n", report_to_json(rep).c_str());
    return 0;
  }

  const SolveReport rep = run_method(*method, named, cfg);
  std::printf("%s\n", report_to_json(rep).c_str());

  if (!trace_path.empty() && (*method == Method::kExp3 || *method == Method::kLri)) {
    const auto pp = make_penalty_params(named.instance, cfg.lambda);
    BanditConfig bc = cfg.bandit;
    bc.seed = cfg.seed;
    const BanditResult res = *method == Method::kExp3 ? exp3_run(named.instance, pp, bc)
                                                      : lri_run(named.instance, pp, bc);
    std::ofstream out(trace_path);
    out << "step,best_reward,emission,oq\n";
    for (const TraceRow& row : res.trace)
      out << row.step << ',' << row.best_reward << ',' << row.emission << ',' << row.oq << '\n';
    std::printf("trace written to %s\n", trace_path.c_str());
  }
  return 0;
}

int cmd_bench(const std::string& dir, const std::string& methods_csv, const std::string& out_path,
              BenchConfig cfg) {
  std::vector<Method> methods;
  std::stringstream ss(methods_csv);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const auto m = parse_method(token);
    if (!m) {
      std::fprintf(stderr, "unknown method '%s'\n", token.c_str());
      return 2;
    }
    methods.push_back(*m);
  }
  const auto instances = load_instance_dir(dir);
  if (instances.empty()) {
    std::fprintf(stderr, "no instances found in %s\n", dir.c_str());
    return 2;
  }
  const auto rows = run_batch(methods, instances, cfg);
  emit_csv(rows, out_path);
  std::printf("%s", summary_table(summarize(rows)).c_str());
  std::printf("%d rows written to %s\n", static_cast<int>(rows.size()), out_path.c_str());
  return 0;
}

int cmd_verify() {
  int failures = 0;

  for (int n : {4, 6, 8}) {
    const auto gap = gen_gap_instance(n);
    const auto res = solve_shortcut_multitype(gap.instance, gap.star);
    const Routing alt = gap_alternative_routing(gap.instance);
    const bool ok = res.feasible && static_cast<int>(res.removed.size()) == n / 2 &&
                    is_admissible(gap.instance, res.routing) &&
                    is_admissible(gap.instance, alt) && omitted_quantity(gap.instance, alt) == 1;
    std::printf("[%s] gap instance n=%d: fixed-routing optimum removes %d/%d, alternative "
                "omits 1\n",
                ok ? "PASS" : "FAIL", n, static_cast<int>(res.removed.size()), n / 2);
    if (!ok) ++failures;
  }

  const auto cases = gen_knapsack_cases(777, 120, 10, 20);
  int mismatches = 0;
  for (const KnapsackCase& kc : cases)
    if (decide_knapsack_via_shortcut(kc.items, kc.budget, kc.target) !=
        knapsack_brute_force(kc.items, kc.budget, kc.target))
      ++mismatches;
  std::printf("[%s] knapsack reduction: %d/120 decisions match brute force\n",
              mismatches == 0 ? "PASS" : "FAIL", 120 - mismatches);
  if (mismatches > 0) ++failures;

  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QVRP demand-selection solvers and benchmark harness"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate synthetic instances");
  int gen_d = 20, gen_count = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out = "instances";
  bool gen_keep_all = false, gen_unit = false;
  double gen_plane = 12.0;
  double gen_quota = -1.0;
  std::int64_t gen_budget = 50000;
  gen->add_option("--d", gen_d, "destination count");
  gen->add_option("--seed", gen_seed, "first RNG seed");
  gen->add_option("--count", gen_count, "instances to write");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_flag("--keep-all", gen_keep_all, "skip the quota-violation filter");
  gen->add_flag("--unit-quantities", gen_unit, "all quantities 1");
  gen->add_option("--quota", gen_quota, "override the quota");
  gen->add_option("--plane-side", gen_plane, "plane side length");
  gen->add_option("--filter-budget", gen_budget, "routing budget for the filter");

  // route
  auto* route = app.add_subcommand("route", "route one assignment");
  std::string route_instance, route_assignment;
  std::int64_t route_budget = kDeskEvaluations;
  std::uint64_t route_seed = 1;
  double route_lambda = 10000.0;
  route->add_option("--instance", route_instance, "instance JSON")->required();
  route->add_option("--assignment", route_assignment, "assignment JSON")->required();
  route->add_option("--budget", route_budget, "move-evaluation budget");
  route->add_option("--seed", route_seed, "RNG seed");
  route->add_option("--lambda", route_lambda, "emission penalty coefficient");

  // solve
  auto* solve = app.add_subcommand("solve", "run one method on one instance");
  std::string solve_method, solve_instance, solve_routing, solve_trace;
  BenchConfig solve_cfg = desk_config();
  double tau0 = solve_cfg.sa.tau_init, tau_limit = solve_cfg.sa.tau_limit,
         cooling = solve_cfg.sa.cooling;
  solve->add_option("--method", solve_method, "dp|greedy|oa-sa|va-sa|exp3|lri")->required();
  solve->add_option("--instance", solve_instance, "instance JSON")->required();
  solve->add_option("--routing", solve_routing, "fixed routing JSON (dp/greedy)");
  solve->add_option("--seed", solve_cfg.seed, "RNG seed");
  solve->add_option("--lambda", solve_cfg.lambda, "emission penalty coefficient");
  solve->add_option("--budget", solve_cfg.keepall_routing.max_evaluations,
                    "keep-all routing budget");
  solve->add_option("--tau0", tau0, "SA initial temperature");
  solve->add_option("--tau-limit", tau_limit, "SA final temperature");
  solve->add_option("--cooling", cooling, "SA cooling rate");
  solve->add_option("--sa-routing-budget", solve_cfg.sa.routing.max_evaluations,
                    "OA-SA inner routing budget");
  solve->add_option("--horizon", solve_cfg.bandit.horizon, "bandit horizon T");
  solve->add_option("--gamma", solve_cfg.bandit.gamma, "EXP3 exploration");
  solve->add_option("--lri-b", solve_cfg.bandit.lri_b, "LRI learning rate");
  solve->add_option("--trace", solve_trace, "write a bandit trace CSV here");

  // bench
  auto* bench = app.add_subcommand("bench", "batch run over an instance directory");
  std::string bench_dir, bench_methods = "dp,greedy,oa-sa,va-sa,exp3", bench_out = "results.csv";
  BenchConfig bench_cfg = desk_config();
  bench->add_option("--instances", bench_dir, "instance directory")->required();
  bench->add_option("--methods", bench_methods, "comma-separated method list");
  bench->add_option("--out", bench_out, "CSV output path");
  bench->add_option("--seed", bench_cfg.seed, "RNG seed");
  bench->add_option("--workers", bench_cfg.workers, "parallel workers (1 = serial)");
  bench->add_option("--budget", bench_cfg.keepall_routing.max_evaluations,
                    "keep-all routing budget");
  bench->add_option("--horizon", bench_cfg.bandit.horizon, "bandit horizon T");

  // verify
  app.add_subcommand("verify", "gap-instance regression and knapsack reduction checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen(gen_d, gen_seed, gen_count, gen_out, gen_keep_all, gen_unit,
                     gen_quota >= 0 ? std::optional<double>(gen_quota) : std::nullopt, gen_plane,
                     gen_budget);
    if (route->parsed())
      return cmd_route(route_instance, route_assignment, route_budget, route_seed, route_lambda);
    if (solve->parsed()) {
      solve_cfg.sa.tau_init = tau0;
      solve_cfg.sa.tau_limit = tau_limit;
      solve_cfg.sa.cooling = cooling;
      return cmd_solve(solve_method, solve_instance, solve_routing, solve_trace, solve_cfg);
    }
    if (bench->parsed()) return cmd_bench(bench_dir, bench_methods, bench_out, bench_cfg);
    return cmd_verify();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
