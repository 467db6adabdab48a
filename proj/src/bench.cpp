#include "qvrp/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qvrp/env.hpp"
#include "qvrp/shortcut.hpp"

namespace qvrp {

std::optional<Method> parse_method(const std::string& name) {
  if (name == "dp") return Method::kDp;
  if (name == "greedy") return Method::kGreedy;
  if (name == "oa-sa") return Method::kOaSa;
  if (name == "va-sa") return Method::kVaSa;
  if (name == "exp3") return Method::kExp3;
  if (name == "lri") return Method::kLri;
  return std::nullopt;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kDp: return "dp";
    case Method::kGreedy: return "greedy";
    case Method::kOaSa: return "oa-sa";
    case Method::kVaSa: return "va-sa";
    case Method::kExp3: return "exp3";
    case Method::kLri: return "lri";
  }
  return "?";
}

BenchConfig desk_config() {
  BenchConfig cfg;
  cfg.keepall_routing.max_evaluations = kDeskEvaluations;
  cfg.sa.routing.max_evaluations = 2000;  // per-candidate budget inside OA-SA
  return cfg;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

SolveReport run_method(Method method, const NamedInstance& named, const BenchConfig& cfg) {
  const Instance& inst = named.instance;
  const PenaltyParams pp = make_penalty_params(inst, cfg.lambda);

  SolveReport report;
  report.method = method_name(method);
  report.instance_id = named.id;
  report.seed = cfg.seed;

  Routing final_routing;
  bool solver_feasible = true;

  if (method == Method::kDp || method == Method::kGreedy) {
    const Routing initial = solve_vrp_local_search(inst, keep_all(inst), pp, cfg.keepall_routing);
    const auto t0 = Clock::now();
    const ShortcutResult res = method == Method::kDp ? solve_shortcut_multitype(inst, initial)
                                                     : greedy_removal(inst, initial, pp);
    report.runtime_ms = ms_since(t0);
    final_routing = res.routing;
    solver_feasible = res.feasible;
  } else if (method == Method::kOaSa || method == Method::kVaSa) {
    SaConfig sa = cfg.sa;
    sa.seed = cfg.seed;
    const auto t0 = Clock::now();
    if (method == Method::kOaSa) {
      const OaSaResult res = oa_sa(inst, pp, sa);
      report.runtime_ms = ms_since(t0);
      final_routing = res.routing;
      solver_feasible = res.admissible;
    } else {
      const VaSaResult res = va_sa(inst, pp, sa);
      report.runtime_ms = ms_since(t0);
      final_routing = res.routing;
      solver_feasible = res.admissible;
    }
  } else {
    BanditConfig bc = cfg.bandit;
    bc.seed = cfg.seed;
    const auto t0 = Clock::now();
    const BanditResult res =
        method == Method::kExp3 ? exp3_run(inst, pp, bc) : lri_run(inst, pp, bc);
    report.runtime_ms = ms_since(t0);
    final_routing = res.routing;
    solver_feasible = res.admissible;
  }

  report.oq = omitted_quantity(inst, final_routing);
  report.cost = routing_cost(inst, final_routing);
  report.emission = routing_emission(inst, final_routing);
  report.admissible = is_admissible(inst, final_routing);
  report.reward = terminal_reward(inst, pp, final_routing);
  (void)solver_feasible;  // inadmissible finals are reported, not thrown
  return report;
}

namespace {

// Failures are recorded as rows, never thrown: exceptions must not cross the
// OpenMP region, and an unroutable instance should not kill a batch.
SolveReport run_method_guarded(Method method, const NamedInstance& named,
                               const BenchConfig& cfg) {
  try {
    return run_method(method, named, cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s on %s failed: %s\n", method_name(method).c_str(),
                 named.id.c_str(), e.what());
    SolveReport row;
    row.method = method_name(method);
    row.instance_id = named.id;
    row.seed = cfg.seed;
    row.oq = total_quantity(named.instance);
    row.admissible = false;
    return row;
  }
}

}  // namespace

std::vector<SolveReport> run_batch(const std::vector<Method>& methods,
                                   const std::vector<NamedInstance>& instances,
                                   const BenchConfig& cfg) {
  struct Job {
    Method method;
    const NamedInstance* inst;
  };
  std::vector<Job> jobs;
  for (Method m : methods)
    for (const NamedInstance& inst : instances) jobs.push_back(Job{m, &inst});

  std::vector<SolveReport> rows(jobs.size());
  if (cfg.workers > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(cfg.workers)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(jobs.size()); ++i)
      rows[static_cast<std::size_t>(i)] =
          run_method_guarded(jobs[static_cast<std::size_t>(i)].method,
                             *jobs[static_cast<std::size_t>(i)].inst, cfg);
  } else {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      rows[i] = run_method_guarded(jobs[i].method, *jobs[i].inst, cfg);
  }
  std::sort(rows.begin(), rows.end(), [](const SolveReport& a, const SolveReport& b) {
    return a.method != b.method ? a.method < b.method : a.instance_id < b.instance_id;
  });
  return rows;
}

// --- CSV ---

namespace {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string csv_string(const std::vector<SolveReport>& rows) {
  std::ostringstream out;
  out << "method,instance_id,seed,oq,cost,emission,admissible,reward,runtime_ms\n";
  for (const SolveReport& r : rows) {
    out << r.method << ',' << r.instance_id << ',' << r.seed << ',' << r.oq << ','
        << format_double(r.cost) << ',' << format_double(r.emission) << ','
        << (r.admissible ? "true" : "false") << ',' << format_double(r.reward) << ','
        << format_double(r.runtime_ms) << '\n';
  }
  return out.str();
}

void emit_csv(const std::vector<SolveReport>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  out << csv_string(rows);
}

std::vector<SolveReport> parse_csv_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header");
  if (line != "method,instance_id,seed,oq,cost,emission,admissible,reward,runtime_ms")
    throw std::runtime_error("csv: unexpected header: " + line);
  std::vector<SolveReport> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i)
      if (i == line.size() || line[i] == ',') {
        cells.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    if (cells.size() != 9) throw std::runtime_error("csv: bad row: " + line);
    SolveReport r;
    r.method = cells[0];
    r.instance_id = cells[1];
    r.seed = std::stoull(cells[2]);
    r.oq = std::stoi(cells[3]);
    r.cost = std::stod(cells[4]);
    r.emission = std::stod(cells[5]);
    r.admissible = cells[6] == "true";
    r.reward = std::stod(cells[7]);
    r.runtime_ms = std::stod(cells[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string report_to_json(const SolveReport& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["instance_id"] = r.instance_id;
  j["seed"] = r.seed;
  j["oq"] = r.oq;
  j["cost"] = r.cost;
  j["emission"] = r.emission;
  j["admissible"] = r.admissible;
  j["reward"] = r.reward;
  return j.dump();
}

std::vector<MethodSummary> summarize(const std::vector<SolveReport>& rows) {
  std::vector<std::string> methods;
  for (const SolveReport& r : rows)
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
  std::sort(methods.begin(), methods.end());

  // Per-instance DP rewards for the relative metric.
  std::vector<std::pair<std::string, double>> dp_rewards;
  for (const SolveReport& r : rows)
    if (r.method == "dp") dp_rewards.emplace_back(r.instance_id, r.reward);

  std::vector<MethodSummary> out;
  for (const std::string& m : methods) {
    MethodSummary s;
    s.method = m;
    std::vector<double> rewards;
    double rel_sum = 0.0;
    int rel_n = 0;
    for (const SolveReport& r : rows) {
      if (r.method != m) continue;
      ++s.runs;
      rewards.push_back(r.reward);
      s.mean_reward += r.reward;
      s.mean_runtime_ms += r.runtime_ms;
      auto it = std::find_if(dp_rewards.begin(), dp_rewards.end(),
                             [&](const auto& p) { return p.first == r.instance_id; });
      if (it != dp_rewards.end()) {
        rel_sum += r.reward - it->second;
        ++rel_n;
      }
    }
    if (s.runs == 0) continue;
    s.mean_reward /= s.runs;
    s.mean_runtime_ms /= s.runs;
    std::sort(rewards.begin(), rewards.end());
    const std::size_t n = rewards.size();
    s.median_reward = n % 2 ? rewards[n / 2] : 0.5 * (rewards[n / 2 - 1] + rewards[n / 2]);
    s.mean_relative_reward =
        rel_n > 0 ? rel_sum / rel_n : std::numeric_limits<double>::quiet_NaN();
    out.push_back(std::move(s));
  }
  return out;
}

std::string summary_table(const std::vector<MethodSummary>& summaries) {
  std::ostringstream out;
  out << "method  runs  mean_reward  median_reward  mean_runtime_ms  rel_reward_vs_dp\n";
  for (const MethodSummary& s : summaries) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-7s %4d  %11.6f  %13.6f  %15.3f  %16.6f\n",
                  s.method.c_str(), s.runs, s.mean_reward, s.median_reward, s.mean_runtime_ms,
                  s.mean_relative_reward);
    out << line;
  }
  return out.str();
}

std::vector<NamedInstance> load_instance_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<NamedInstance> out;
  for (const fs::path& p : files) {
    try {
      out.push_back(NamedInstance{p.stem().string(), load_instance(p.string())});
    } catch (const std::exception& e) {
      std::fprintf(stderr, "skipping %s: %s\n", p.string().c_str(), e.what());
    }
  }
  return out;
}

}  // namespace qvrp
