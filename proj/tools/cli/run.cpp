#include "run.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "janossy/chain_ensemble.hpp"
#include "janossy/janossy_kernel.hpp"
#include "janossy/oracle.hpp"
#include "janossy/parallel.hpp"
#include "janossy/verify.hpp"

namespace janossy::cli {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw InvalidArgument(what); }

const char* task_name(const Task& t) {
  switch (t.index()) {
    case 0: return "correlations";
    case 1: return "janossy";
    case 2: return "gap";
    case 3: return "extremes";
    default: return "verify";
  }
}

std::vector<Site> parse_sites(const Json& j) {
  if (!j.is_array()) invalid("points: expected a list of [floor, node] pairs");
  std::vector<Site> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
      invalid("points: expected [floor, node] with a 1-based floor and a 0-based node");
    }
    out.push_back({p[0].get<int>() - 1, p[1].get<int>()});
  }
  return out;
}

std::vector<std::vector<Site>> parse_point_sets(const Json& task) {
  std::vector<std::vector<Site>> sets;
  if (task.contains("points")) sets.push_back(parse_sites(task.at("points")));
  if (task.contains("point_sets")) {
    for (const auto& s : task.at("point_sets")) sets.push_back(parse_sites(s));
  }
  return sets;
}

double positive(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number() || !(v.get<double>() > 0.0)) invalid(std::string("tolerances.") + key + " must be positive");
  return v.get<double>();
}

std::vector<double> s_grid(const Json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object() && j.contains("from") && j.contains("to") && j.contains("steps")) {
    const double a = j.at("from").get<double>();
    const double b = j.at("to").get<double>();
    const int steps = j.at("steps").get<int>();
    if (steps < 1) invalid("task.s.steps must be at least 1");
    std::vector<double> out;
    for (int i = 0; i <= steps; ++i) out.push_back(a + (b - a) * i / steps);
    return out;
  }
  invalid("task.s: expected a list or {\"from\", \"to\", \"steps\"}");
}

std::string site_list(std::span<const Site> sites) {
  std::string out;
  for (const auto& s : sites) {
    if (!out.empty()) out += ';';
    out += std::to_string(s.floor + 1) + ":" + std::to_string(s.node);
  }
  return out;
}

void check_sites(const ChainEnsemble& e, std::span<const Site> sites) {
  for (const auto& s : sites) {
    if (s.floor < 0 || s.floor >= e.floors() || s.node < 0 || s.node >= e.nodes()) {
      std::ostringstream os;
      os << "point [" << s.floor + 1 << ", " << s.node << "] outside floors 1.." << e.floors()
         << " and nodes 0.." << e.nodes() - 1;
      invalid(os.str());
    }
  }
}

struct Agreements {
  Json rows = Json::array();
  bool violated = false;

  Json add(const std::string& label, Complex computed, Complex reference, double tolerance) {
    const double err = std::abs(computed - reference);
    const bool pass = err <= tolerance;
    violated = violated || !pass;
    Json row = {{"label", label},
                {"computed", complex_to_json(computed)},
                {"reference", complex_to_json(reference)},
                {"abs_error", err},
                {"rel_error", std::abs(reference) > 0.0 ? err / std::abs(reference) : err},
                {"tolerance", tolerance},
                {"pass", pass}};
    rows.push_back(row);
    return row;
  }
};

std::string csv_value(const Json& row, const char* key) {
  if (!row.contains(key)) return "";
  return format_double(row.at(key).get<double>());
}

class Clock {
 public:
  Clock() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

bool oracle_available(const ChainEnsemble& e, const ExperimentConfig& c, Json& warnings) {
  if (!c.oracle) return false;
  if (e.space().kind() != SpaceKind::discrete) {
    warnings.push_back("enumeration oracle skipped: the space is not exact-discrete");
    return false;
  }
  return true;
}

void run_correlations(const CorrelationsTask& task, const ExperimentConfig& c, RunReport& out,
                      Json& results, Agreements& agree, Json& warnings, std::ostringstream& csv) {
  const ChainEnsemble e = build_model(*c.model, {c.tolerances.max_condition});
  for (const auto& s : task.point_sets) check_sites(e, s);
  const BlockKernel k = correlation_kernel(e);
  std::optional<EnumeratedDistribution> dist;
  if (oracle_available(e, c, warnings)) dist = enumerate_density(e, {c.budget});
  results["gram_condition"] = e.gram_condition();
  results["partition_function"] = complex_to_json(partition_function(e));
  csv << kCsvSchema << ",set,points,re,im,oracle,abs_error\n";
  Json values = Json::array();
  for (std::size_t i = 0; i < task.point_sets.size(); ++i) {
    const auto& pts = task.point_sets[i];
    const Complex v = correlation_function(k, pts);
    Json row = {{"set", i}, {"points", site_list(pts)}, {"rho", complex_to_json(v)}};
    if (dist) row["oracle"] = agree.add("rho " + site_list(pts), v, brute_correlation(*dist, pts), c.tolerances.agreement);
    values.push_back(row);
    csv << "rho," << i << ',' << site_list(pts) << ',' << format_double(v.real()) << ','
        << format_double(v.imag()) << ',' << (dist ? csv_value(row["oracle"], "reference") : "") << ','
        << (dist ? csv_value(row["oracle"], "abs_error") : "") << '\n';
    out.lines.push_back("rho(" + site_list(pts) + ") = " + format_double(v.real()));
  }
  results["correlations"] = values;
  if (c.kernel_csv) {
    out.files.push_back({"kernel.csv", kernel_csv(k)});
    out.files.push_back({"kernel.json", kernel_json(k).dump() + "\n"});
  }
}

void run_janossy(const JanossyTask& task, const ExperimentConfig& c, RunReport& out, Json& results,
                 Agreements& agree, Json& warnings, std::ostringstream& csv) {
  const ChainEnsemble e = build_model(*c.model, {c.tolerances.max_condition});
  const WindowFamily wf = window_family_from_json(e.space(), e.floors(), c.windows);
  for (const auto& s : task.point_sets) check_sites(e, s);
  if (task.counts && task.counts->size() != static_cast<std::size_t>(e.floors())) {
    invalid("task.counts: expected one count per floor");
  }
  const BlockKernel k = correlation_kernel(e);
  const JanossyKernel jk = janossy_kernel_explicit(e, wf);
  const BlockKernel res = resolvent_kernel(k, wf, {c.tolerances.hard_rcond, c.tolerances.warn_rcond});
  for (const auto& w : res.warnings()) warnings.push_back(w);

  std::optional<EnumeratedDistribution> dist;
  if (oracle_available(e, c, warnings)) dist = enumerate_density(e, {c.budget});

  results["windows"] = to_json(wf);
  results["const"] = complex_to_json(jk.normalization);
  results["complement_gram_condition"] = jk.complement_condition;

  // Explicit formula against the resolvent, blockwise on window sites.
  double scale = 0.0, worst = 0.0;
  Complex at_e{}, at_r{};
  const auto sites = wf.sites();
  for (const auto& a : sites) {
    for (const auto& b : sites) scale = std::max(scale, std::abs(res(a, b)));
  }
  for (const auto& a : sites) {
    for (const auto& b : sites) {
      const double d = std::abs(jk.kernel(a, b) - res(a, b));
      if (d > worst || (a == sites.front() && b == sites.front())) {
        worst = d;
        at_e = jk.kernel(a, b);
        at_r = res(a, b);
      }
    }
  }
  if (!sites.empty()) {
    results["explicit_vs_resolvent"] =
        agree.add("L explicit vs resolvent (worst site pair)", at_e, at_r, c.tolerances.agreement * (1.0 + scale));
  }

  csv << kCsvSchema << ",set,points,re,im,oracle,abs_error\n";
  Json values = Json::array();
  for (std::size_t i = 0; i < task.point_sets.size(); ++i) {
    const auto& pts = task.point_sets[i];
    const Complex v = janossy_density(jk, pts);
    Json row = {{"set", i}, {"points", site_list(pts)}, {"janossy", complex_to_json(v)}};
    if (dist) row["oracle"] = agree.add("J " + site_list(pts), v, brute_janossy(*dist, wf, pts), c.tolerances.agreement);
    values.push_back(row);
    csv << "janossy," << i << ',' << site_list(pts) << ',' << format_double(v.real()) << ','
        << format_double(v.imag()) << ',' << (dist ? csv_value(row["oracle"], "reference") : "") << ','
        << (dist ? csv_value(row["oracle"], "abs_error") : "") << '\n';
    out.lines.push_back("J(" + site_list(pts) + ") = " + format_double(v.real()));
  }
  results["janossy"] = values;
  if (task.counts) {
    const Complex pr = count_probability(jk, *task.counts);
    Json row = {{"counts", *task.counts}, {"probability", complex_to_json(pr)}};
    if (dist) row["oracle"] = agree.add("count probability", pr, brute_count_probability(*dist, wf, *task.counts), c.tolerances.agreement);
    results["count_probability"] = row;
    out.lines.push_back("Pr(counts) = " + format_double(pr.real()));
  }
  out.lines.push_back("const = " + format_double(jk.normalization.real()));
  if (c.kernel_csv) {
    out.files.push_back({"kernel.csv", kernel_csv(jk.kernel, wf)});
    out.files.push_back({"kernel.json", kernel_json(jk.kernel).dump() + "\n"});
  }
}

void run_gap(const ExperimentConfig& c, RunReport& out, Json& results, Agreements& agree, Json& warnings,
             std::ostringstream& csv) {
  const ChainEnsemble e = build_model(*c.model, {c.tolerances.max_condition});
  const WindowFamily wf = window_family_from_json(e.space(), e.floors(), c.windows);
  const BlockKernel k = correlation_kernel(e);
  const Complex det = fredholm_det(restrict_to(k, wf));
  results["windows"] = to_json(wf);
  results["const"] = complex_to_json(det);
  csv << kCsvSchema << ",route,re,im\n";
  csv << "fredholm," << format_double(det.real()) << ',' << format_double(det.imag()) << '\n';
  try {
    const JanossyKernel jk = janossy_kernel_explicit(e, wf);
    results["gram_ratio"] = agree.add("det(Id - K_I) vs det(A^c)/det(A)", det, jk.normalization,
                                      c.tolerances.agreement);
    csv << "gram_ratio," << format_double(jk.normalization.real()) << ','
        << format_double(jk.normalization.imag()) << '\n';
  } catch (const SingularMatrixError& err) {
    warnings.push_back(std::string("det(A^c)/det(A) route skipped: ") + err.what());
  }
  if (oracle_available(e, c, warnings)) {
    const auto dist = enumerate_density(e, {c.budget});
    const std::vector<int> zeros(static_cast<std::size_t>(e.floors()), 0);
    const double ref = brute_count_probability(dist, wf, zeros);
    results["oracle"] = agree.add("gap vs enumeration", det, ref, c.tolerances.agreement);
    csv << "enumeration," << format_double(ref) << ",0\n";
  }
  out.lines.push_back("const = " + format_double(det.real()));
}

void run_extremes(const ExtremesTask& task, const ExperimentConfig& c, RunReport& out, Json& results,
                  Agreements& agree, Json& warnings, std::ostringstream& csv) {
  const auto space = model_space(*c.model);
  const bool align = task.align && space && space->kind == SpaceKind::quadrature;
  auto build_at = [&](double s) {
    if (!align || !(s > space->interval.lo && s < space->interval.hi)) {
      return build_model(*c.model, {c.tolerances.max_condition});
    }
    SpaceSpec refined = *space;
    refined.breakpoints.push_back(s);
    std::sort(refined.breakpoints.begin(), refined.breakpoints.end());
    refined.breakpoints.erase(std::unique(refined.breakpoints.begin(), refined.breakpoints.end()),
                              refined.breakpoints.end());
    return build_model(with_space(*c.model, refined), {c.tolerances.max_condition});
  };
  std::optional<ChainEnsemble> fixed;
  if (!align) fixed = build_model(*c.model, {c.tolerances.max_condition});

  csv << kCsvSchema << ",s,cdf,tail";
  for (int j = 0; j < task.k; ++j) csv << ",pr_count_" << j;
  csv << ",oracle_cdf,abs_error\n";
  Json rows = Json::array();
  bool oracle_warned = false;
  for (double s : task.s) {
    const ChainEnsemble e = fixed ? *fixed : build_at(s);
    if (task.floor < 0 || task.floor >= e.floors()) invalid("task.floor outside 1..M");
    const double grid[] = {s};
    const ExtremePoint pt = kth_extreme_distribution(e, task.floor, task.k, grid).front();
    for (const auto& w : pt.warnings) warnings.push_back("s=" + format_double(s) + ": " + w);
    Json row = {{"s", s}, {"cdf", pt.cdf}, {"tail", pt.tail}, {"count_probabilities", pt.count_probabilities}};
    std::optional<double> ref;
    if (c.oracle) {
      if (e.floors() == 1 && e.particles() <= 3) {
        double below = 0.0;
        for (int j = 0; j < task.k; ++j) below += quad_oracle_m1(e, s, j, c.budget);
        ref = below;
        row["oracle"] = agree.add("Pr(lambda_" + std::to_string(task.k) + " < " + format_double(s) + ")", pt.cdf,
                                  below, c.tolerances.extremes);
      } else if (!oracle_warned) {
        warnings.push_back("extremes oracle needs M = 1 and n <= 3; skipped");
        oracle_warned = true;
      }
    }
    csv << "extreme," << format_double(s) << ',' << format_double(pt.cdf) << ',' << format_double(pt.tail);
    for (int j = 0; j < task.k; ++j) csv << ',' << format_double(pt.count_probabilities[static_cast<std::size_t>(j)]);
    csv << ',' << (ref ? format_double(*ref) : "") << ','
        << (ref ? csv_value(row["oracle"], "abs_error") : "") << '\n';
    out.lines.push_back("s=" + format_double(s) + " Pr(lambda_" + std::to_string(task.k) +
                        " < s) = " + format_double(pt.cdf));
    rows.push_back(row);
  }
  results["floor"] = task.floor + 1;
  results["k"] = task.k;
  results["aligned"] = align;
  results["points"] = rows;
}

void run_verify(const VerifyTask& task, const ExperimentConfig& c, RunReport& out, Json& results,
                bool& violated, std::ostringstream& csv) {
  VerifyOptions opts;
  opts.instances = task.instances;
  opts.seed = task.seed.value_or(c.seed);
  opts.budget = c.budget;
  opts.forced_full_windows = task.forced_full_windows;
  const SuiteReport report = verify_suite(task.suite, opts);
  results = to_json(report);
  violated = !report.passed();
  csv << kCsvSchema << ",instance,seed,model,status,computed_re,reference_re,abs_error,rel_error,tolerance\n";
  for (const auto& r : report.results) {
    const char* status = r.status == InstanceStatus::pass   ? "pass"
                         : r.status == InstanceStatus::fail ? "fail"
                                                            : "expected-error";
    csv << task.suite << ',' << r.index << ',' << r.seed << ',' << r.model << ',' << status << ','
        << format_double(r.computed.real()) << ',' << format_double(r.reference.real()) << ','
        << format_double(r.abs_error) << ',' << format_double(r.rel_error) << ','
        << format_double(r.tolerance) << '\n';
    std::ostringstream line;
    line << task.suite << " instance " << r.index << ": " << status << " abs_error=" << format_double(r.abs_error)
         << " tolerance=" << format_double(r.tolerance);
    if (r.status != InstanceStatus::pass && !r.note.empty()) line << " (" << r.note << ")";
    out.lines.push_back(line.str());
  }
  out.lines.push_back(task.suite + ": " + (report.passed() ? "PASS" : "FAIL") +
                      " max_abs_error=" + format_double(report.max_abs_error()));
  if (task.suite == "dyson-mehta") {
    std::ostringstream table;
    table << kCsvSchema << ",instance,k,m,asserted,residual_stated,residual_composition\n";
    for (const auto& row : report.table) {
      table << "dyson-mehta," << row["instance"].get<int>() << ',' << row["k"].get<int>() << ','
            << row["m"].get<int>() << ',' << (row["asserted"].get<bool>() ? 1 : 0) << ','
            << format_double(row["residual_stated"].get<double>()) << ','
            << format_double(row["residual_composition"].get<double>()) << '\n';
    }
    out.files.push_back({"dyson_mehta.csv", table.str()});
  }
}

}  // namespace

ExperimentConfig parse_config(const Json& doc) {
  if (!doc.is_object()) invalid("config: expected a JSON object");
  ExperimentConfig c;
  c.source = doc;
  if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("threads")) c.threads = doc.at("threads").get<int>();
  if (doc.contains("budget")) c.budget = doc.at("budget").get<double>();
  if (doc.contains("windows")) c.windows = doc.at("windows");
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    if (o.contains("oracle")) c.oracle = o.at("oracle").get<bool>();
    if (o.contains("kernel_csv")) c.kernel_csv = o.at("kernel_csv").get<bool>();
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc.at("tolerances");
    c.tolerances.max_condition = positive(t, "max_condition", c.tolerances.max_condition);
    c.tolerances.hard_rcond = positive(t, "hard_rcond", c.tolerances.hard_rcond);
    c.tolerances.warn_rcond = positive(t, "warn_rcond", c.tolerances.warn_rcond);
    c.tolerances.agreement = positive(t, "agreement", c.tolerances.agreement);
    c.tolerances.extremes = positive(t, "extremes", c.tolerances.extremes);
  }
  if (!(c.budget > 0.0)) invalid("budget must be positive");

  if (!doc.contains("task") || !doc.at("task").is_object() || !doc.at("task").contains("type")) {
    invalid("config: missing task.type (known: correlations, janossy, gap, extremes, verify)");
  }
  const Json& t = doc.at("task");
  const std::string type = t.at("type").get<std::string>();
  if (type == "correlations") {
    c.task = CorrelationsTask{parse_point_sets(t)};
  } else if (type == "janossy") {
    JanossyTask task{parse_point_sets(t), std::nullopt};
    if (t.contains("counts")) task.counts = t.at("counts").get<std::vector<int>>();
    c.task = std::move(task);
  } else if (type == "gap") {
    c.task = GapTask{};
  } else if (type == "extremes") {
    ExtremesTask task;
    task.floor = (t.contains("floor") ? t.at("floor").get<int>() : 1) - 1;
    task.k = t.contains("k") ? t.at("k").get<int>() : 1;
    if (!t.contains("s")) invalid("task.s: missing threshold grid");
    task.s = s_grid(t.at("s"));
    if (t.contains("align")) task.align = t.at("align").get<bool>();
    c.task = std::move(task);
  } else if (type == "verify") {
    VerifyTask task;
    task.suite = t.contains("suite") ? t.at("suite").get<std::string>() : "";
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), task.suite) == known.end()) {
      std::string list;
      for (const auto& n : known) list += (list.empty() ? "" : ", ") + n;
      invalid("task.suite: unknown suite '" + task.suite + "' (known: " + list + ")");
    }
    if (t.contains("instances")) task.instances = t.at("instances").get<int>();
    if (task.instances < 1) invalid("task.instances must be positive");
    if (t.contains("seed")) task.seed = t.at("seed").get<std::uint64_t>();
    if (t.contains("forced_full_windows")) task.forced_full_windows = t.at("forced_full_windows").get<std::vector<int>>();
    c.task = std::move(task);
  } else {
    invalid("task.type: unknown task '" + type + "' (known: correlations, janossy, gap, extremes, verify)");
  }

  if (doc.contains("model")) {
    c.model = model_spec_from_json(doc.at("model"));
    if (auto* r = std::get_if<RandomSpec>(&*c.model); r && !doc.at("model").contains("seed")) r->seed = c.seed;
  } else if (!std::holds_alternative<VerifyTask>(c.task)) {
    invalid("config: missing model");
  }
  return c;
}

void apply_seed_override(ExperimentConfig& c, std::uint64_t seed) {
  c.seed = seed;
  c.source["seed"] = seed;
  if (auto* v = std::get_if<VerifyTask>(&c.task)) v->seed = seed;
  if (c.model) {
    if (auto* r = std::get_if<RandomSpec>(&*c.model)) r->seed = seed;
  }
}

RunReport run(const ExperimentConfig& c) {
  set_thread_count(c.threads);
  const Clock clock;
  RunReport out;
  Json results = Json::object();
  Json warnings = Json::array();
  Agreements agree;
  bool violated = false;
  std::ostringstream csv;

  std::visit(
      [&](const auto& task) {
        using T = std::decay_t<decltype(task)>;
        if constexpr (std::is_same_v<T, CorrelationsTask>) {
          run_correlations(task, c, out, results, agree, warnings, csv);
        } else if constexpr (std::is_same_v<T, JanossyTask>) {
          run_janossy(task, c, out, results, agree, warnings, csv);
        } else if constexpr (std::is_same_v<T, GapTask>) {
          run_gap(c, out, results, agree, warnings, csv);
        } else if constexpr (std::is_same_v<T, ExtremesTask>) {
          run_extremes(task, c, out, results, agree, warnings, csv);
        } else {
          run_verify(task, c, out, results, violated, csv);
        }
      },
      c.task);

  violated = violated || agree.violated;
  out.exit_code = violated ? kToleranceViolation : kOk;
  Json config = c.source;
  if (c.model) config["model"] = to_json(*c.model);
  out.report = {{"schema", "jk-report-1"},
                {"task", task_name(c.task)},
                {"config", config},
                {"results", results},
                {"agreements", agree.rows},
                {"warnings", warnings},
                {"status", violated ? "tolerance-violation" : "ok"},
                {"exit_code", out.exit_code}};
  out.files.insert(out.files.begin(), {"results.csv", csv.str()});
  out.timings = {{"task", task_name(c.task)}, {"threads", c.threads}, {"wall_seconds", clock.seconds()}};
  return out;
}

int exit_code_for(const std::exception& err) {
  if (dynamic_cast<const BudgetExceeded*>(&err)) return kBudgetExceeded;
  if (dynamic_cast<const SingularMatrixError*>(&err)) return kNumericalFailure;
  if (dynamic_cast<const InvalidArgument*>(&err)) return kInvalidConfig;
  if (dynamic_cast<const nlohmann::json::exception*>(&err)) return kInvalidConfig;
  return kNumericalFailure;
}

void write_outputs(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : report.files) write_file_atomic(dir / f.name, f.content);
  write_file_atomic(dir / "timings.json", report.timings.dump(2) + "\n");
  write_file_atomic(dir / "report.json", report.report.dump(2) + "\n");
}

}  // namespace janossy::cli
