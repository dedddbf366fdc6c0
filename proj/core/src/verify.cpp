#include "janossy/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "janossy/janossy_kernel.hpp"
#include "janossy/linalg.hpp"
#include "janossy/oracle.hpp"
#include "janossy/parallel.hpp"
#include "janossy/random.hpp"

namespace janossy {

namespace {

struct Dims {
  int max_nodes = 5;
  int max_particles = 2;
  int max_floors = 3;
  int min_floors = 1;
};

struct Instance {
  ChainEnsemble ensemble;
  std::string model;
};

// Tracks the comparison with the largest abs_error / tolerance.
class Tracker {
 public:
  explicit Tracker(InstanceResult& r) : r_(r) {}

  void add(Complex computed, Complex reference, double tolerance) {
    const double err = std::abs(computed - reference);
    const double ratio = err / tolerance;
    ++r_.comparisons;
    if (r_.comparisons == 1 || ratio > worst_ || (std::isnan(ratio) && !std::isnan(worst_))) {
      worst_ = std::isnan(ratio) ? std::numeric_limits<double>::infinity() : ratio;
      r_.computed = computed;
      r_.reference = reference;
      r_.abs_error = err;
      r_.rel_error = std::abs(reference) > 0.0 ? err / std::abs(reference) : err;
      r_.tolerance = tolerance;
    }
    if (!(ratio <= 1.0)) r_.status = InstanceStatus::fail;
  }

 private:
  InstanceResult& r_;
  double worst_ = 0.0;
};

std::string describe(const ChainEnsemble& e) {
  std::ostringstream os;
  os << "P=" << e.nodes() << " n=" << e.particles() << " M=" << e.floors();
  return os.str();
}

// A random discrete instance; ensembles rejected by the Gram gate are redrawn.
Instance random_instance(std::uint64_t seed, const Dims& dims) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    const int n = rng.uniform_int(1, dims.max_particles);
    const int p = rng.uniform_int(n, dims.max_nodes);
    const int m = rng.uniform_int(dims.min_floors, dims.max_floors);
    try {
      ChainEnsemble e = build_random(rng.next(), p, n, m);
      std::string model = describe(e);
      if (attempt) model += " (redraw " + std::to_string(attempt) + ")";
      return {std::move(e), std::move(model)};
    } catch (const SingularMatrixError&) {
      if (attempt > 100) throw;
    }
  }
}

// Each node joins the window with probability 1/2. With min_outside set,
// every floor keeps at least that many complement nodes.
WindowFamily random_windows(Rng& rng, const ChainEnsemble& e, int min_outside) {
  std::vector<Window> windows;
  const auto p = static_cast<std::size_t>(e.nodes());
  for (int l = 0; l < e.floors(); ++l) {
    for (;;) {
      std::vector<bool> mask(p);
      int outside = 0;
      for (std::size_t i = 0; i < p; ++i) {
        mask[i] = rng.bernoulli(0.5);
        outside += mask[i] ? 0 : 1;
      }
      if (outside >= min_outside) {
        windows.emplace_back(e.space(), std::move(mask));
        break;
      }
    }
  }
  return WindowFamily(std::move(windows));
}

void for_each_subset(const std::vector<int>& pool, int k,
                     const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(chosen.size()) == k) {
      visit(chosen);
      return;
    }
    for (std::size_t i = start; i < pool.size(); ++i) {
      chosen.push_back(pool[i]);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
}

// Every site list with k_l <= min(n, |pool_l|) distinct nodes on floor l and
// sum k_l <= max_total, nodes on a floor in increasing order.
void for_each_point_set(const std::vector<std::vector<int>>& pools, int n, int max_total,
                        const std::function<void(const std::vector<Site>&)>& visit) {
  std::vector<Site> sites;
  const int floors = static_cast<int>(pools.size());
  std::function<void(int, int)> rec = [&](int floor, int left) {
    if (floor == floors) {
      visit(sites);
      return;
    }
    const auto& pool = pools[static_cast<std::size_t>(floor)];
    const int top = std::min({n, left, static_cast<int>(pool.size())});
    for (int k = 0; k <= top; ++k) {
      for_each_subset(pool, k, [&](const std::vector<int>& chosen) {
        for (int x : chosen) sites.push_back({floor, x});
        rec(floor + 1, left - k);
        sites.resize(sites.size() - chosen.size());
      });
    }
  };
  rec(0, max_total);
}

std::vector<std::vector<int>> all_nodes(const ChainEnsemble& e) {
  std::vector<int> nodes(static_cast<std::size_t>(e.nodes()));
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = static_cast<int>(i);
  return std::vector<std::vector<int>>(static_cast<std::size_t>(e.floors()), nodes);
}

std::vector<std::vector<int>> window_nodes(const WindowFamily& wf) {
  std::vector<std::vector<int>> out;
  for (int l = 0; l < wf.floors(); ++l) out.push_back(wf[l].indices());
  return out;
}

double restricted_condition(const BlockKernel& k, const WindowFamily& wf) {
  const RestrictedOperator op = restrict_to(k, wf);
  const auto size = static_cast<Eigen::Index>(op.size());
  return condition_number(CMatrix::Identity(size, size) - op.matrix());
}

using InstanceCheck = std::function<void(int index, std::uint64_t seed, InstanceResult&, Json& table)>;

SuiteReport run_instances(const std::string& suite, const VerifyOptions& opts, std::string rule,
                          const InstanceCheck& check) {
  if (opts.instances < 1) throw InvalidArgument("verify: instances must be positive");
  SuiteReport report;
  report.suite = suite;
  report.instances = opts.instances;
  report.seed = opts.seed;
  report.tolerance_rule = std::move(rule);
  report.results.resize(static_cast<std::size_t>(opts.instances));
  std::vector<Json> tables(static_cast<std::size_t>(opts.instances), Json::array());
  parallel_for(static_cast<std::size_t>(opts.instances), [&](std::size_t i) {
    InstanceResult& r = report.results[i];
    r.index = static_cast<int>(i);
    r.seed = derive_seed(opts.seed, i);
    try {
      check(r.index, r.seed, r, tables[i]);
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const Error& err) {
      r.status = InstanceStatus::fail;
      r.note = err.what();
    }
  });
  for (auto& t : tables) {
    for (auto& row : t) report.table.push_back(std::move(row));
  }
  return report;
}

SuiteReport heine_suite(const VerifyOptions& opts) {
  return run_instances("heine", opts, "abs <= 1e-10", [&](int, std::uint64_t seed, InstanceResult& r, Json&) {
    Rng rng(seed);
    const int n = rng.uniform_int(1, 3);
    const int p = rng.uniform_int(n, 5);
    std::vector<double> points(static_cast<std::size_t>(p));
    std::vector<double> masses(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
      points[static_cast<std::size_t>(i)] = i;
      masses[static_cast<std::size_t>(i)] = rng.uniform(0.2, 1.2);
    }
    const auto space = DiscretizedSpace::discrete(points, masses);
    CMatrix psi(p, n), chi(p, n);
    for (auto* m : {&psi, &chi}) {
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) (*m)(i, j) = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
      }
    }
    std::ostringstream os;
    os << "P=" << p << " n=" << n;
    r.model = os.str();
    Tracker t(r);
    t.add(determinant(pairing_matrix(space, psi, chi)), heine_enumeration(space, psi, chi, opts.budget), 1e-10);
  });
}

SuiteReport partition_suite(const VerifyOptions& opts) {
  return run_instances("partition", opts, "abs <= 1e-10 * |Z|", [&](int, std::uint64_t seed, InstanceResult& r, Json&) {
    const Instance inst = random_instance(seed, {});
    r.model = inst.model;
    const auto dist = enumerate_density(inst.ensemble, {opts.budget});
    Tracker t(r);
    t.add(partition_function(inst.ensemble), dist.raw_partition(), 1e-10 * std::abs(dist.raw_partition()));
  });
}

SuiteReport correlations_suite(const VerifyOptions& opts) {
  return run_instances("correlations", opts, "abs <= 1e-10", [&](int, std::uint64_t seed, InstanceResult& r, Json&) {
    const Instance inst = random_instance(seed, {});
    r.model = inst.model;
    const auto dist = enumerate_density(inst.ensemble, {opts.budget});
    const BlockKernel k = correlation_kernel(inst.ensemble);
    Tracker t(r);
    for_each_point_set(all_nodes(inst.ensemble), inst.ensemble.particles(), 3,
                       [&](const std::vector<Site>& pts) {
                         t.add(correlation_function(k, pts), brute_correlation(dist, pts), 1e-10);
                       });
  });
}

SuiteReport janossy_suite(const VerifyOptions& opts) {
  return run_instances("janossy", opts, "abs <= 1e-10", [&](int, std::uint64_t seed, InstanceResult& r, Json&) {
    const Instance inst = random_instance(seed, {});
    r.model = inst.model;
    Rng rng(derive_seed(seed, 1000));
    const WindowFamily wf = random_windows(rng, inst.ensemble, inst.ensemble.particles());
    const auto dist = enumerate_density(inst.ensemble, {opts.budget});
    const JanossyKernel jk = janossy_kernel_explicit(inst.ensemble, wf);
    Tracker t(r);
    for_each_point_set(window_nodes(wf), inst.ensemble.particles(), 2, [&](const std::vector<Site>& pts) {
      t.add(janossy_density(jk, pts), brute_janossy(dist, wf, pts), 1e-10);
    });
  });
}

SuiteReport theorem_suite(const VerifyOptions& opts) {
  constexpr double kMaxCondition = 1e6;
  return run_instances(
      "theorem", opts, "blockwise abs <= 1e-8 * (1 + max|resolvent|) on window sites",
      [&](int index, std::uint64_t seed, InstanceResult& r, Json&) {
        const bool forced = std::find(opts.forced_full_windows.begin(), opts.forced_full_windows.end(),
                                      index) != opts.forced_full_windows.end();
        for (std::uint64_t attempt = 0;; ++attempt) {
          const Instance inst = random_instance(derive_seed(seed, attempt), {8, 3, 4, 1});
          const ChainEnsemble& e = inst.ensemble;
          if (forced) {
            r.model = inst.model + " full windows";
            try {
              janossy_kernel_explicit(e, WindowFamily::full(e.space(), e.floors()));
              r.status = InstanceStatus::fail;
              r.note = "full windows did not raise a singular A^c";
            } catch (const SingularMatrixError& err) {
              r.status = InstanceStatus::expected_error;
              r.note = err.what();
            }
            return;
          }
          if (attempt > 50) throw Error("theorem: no well-conditioned window family found");
          // P = n leaves no node for a window
          if (e.nodes() <= e.particles()) continue;
          Rng rng(derive_seed(seed, 1000 + attempt));
          const BlockKernel k = correlation_kernel(e);
          // Redraw windows, then the ensemble, until the windows are nonempty and both gates hold.
          for (int w = 0; w < 20; ++w) {
            const WindowFamily wf = random_windows(rng, e, e.particles());
            if (wf.sites().empty()) continue;
            const double cond_ac = condition_number(gram_entries(e, FloorWeights::complement(wf)));
            if (!(cond_ac <= kMaxCondition) || !(restricted_condition(k, wf) <= kMaxCondition)) continue;
            const JanossyKernel jk = janossy_kernel_explicit(e, wf);
            const BlockKernel res = resolvent_kernel(k, wf);
            const auto sites = wf.sites();
            double scale = 0.0;
            for (const auto& a : sites) {
              for (const auto& b : sites) scale = std::max(scale, std::abs(res(a, b)));
            }
            Tracker t(r);
            for (const auto& a : sites) {
              for (const auto& b : sites) t.add(jk.kernel(a, b), res(a, b), 1e-8 * (1.0 + scale));
            }
            r.model = inst.model;
            std::ostringstream os;
            os << "window sites=" << sites.size() << " cond(A^c)=" << format_double(cond_ac);
            if (attempt || w) os << " redraws=" << attempt << "/" << w;
            r.note = os.str();
            return;
          }
        }
      });
}

SuiteReport dyson_mehta_suite(const VerifyOptions& opts) {
  return run_instances(
      "dyson-mehta", opts, "asserted rows (M=1 or k=m): abs <= 1e-10; k != m rows recorded",
      [&](int index, std::uint64_t seed, InstanceResult& r, Json& table) {
        const Instance inst = random_instance(seed, {});
        r.model = inst.model;
        const BlockKernel k = correlation_kernel(inst.ensemble);
        const int floors = inst.ensemble.floors();
        const int p = static_cast<int>(inst.ensemble.nodes());
        Tracker t(r);
        for (int a = 0; a < floors; ++a) {
          for (int b = 0; b < floors; ++b) {
            double stated = 0.0;
            double composition = 0.0;
            for (int x = 0; x < p; ++x) {
              for (int z = 0; z < p; ++z) {
                stated = std::max(stated, dyson_mehta_check(k, a, b, x, z, DysonMehtaForm::stated));
                composition =
                    std::max(composition, dyson_mehta_check(k, a, b, x, z, DysonMehtaForm::composition));
              }
            }
            const bool asserted = floors == 1 || a == b;
            if (asserted) t.add(stated, 0.0, 1e-10);
            table.push_back({{"instance", index},
                             {"k", a + 1},
                             {"m", b + 1},
                             {"asserted", asserted},
                             {"residual_stated", stated},
                             {"residual_composition", composition}});
          }
        }
      });
}

SuiteReport marginal_suite(const VerifyOptions& opts) {
  return run_instances("marginal", opts, "abs <= 1e-10", [&](int, std::uint64_t seed, InstanceResult& r, Json&) {
    const Instance inst = random_instance(seed, {5, 2, 3, 3});
    r.model = inst.model;
    const ChainEnsemble& e = inst.ensemble;
    const BlockKernel parent = correlation_kernel(e);
    Tracker t(r);
    for (int l = 0; l < e.floors(); ++l) {
      const int floors[] = {l};
      const BlockKernel child = correlation_kernel(marginal_ensemble(e, floors));
      const std::vector<std::vector<int>> pools{all_nodes(e).front()};
      for_each_point_set(pools, e.particles(), 3, [&](const std::vector<Site>& pts) {
        std::vector<Site> lifted = pts;
        for (auto& s : lifted) s.floor = l;
        t.add(correlation_function(child, pts), correlation_function(parent, lifted), 1e-10);
      });
    }
  });
}

SuiteReport gap_suite(const VerifyOptions& opts) {
  return run_instances(
      "gap", opts, "random windows abs <= 1e-10; full windows |det| <= 1e-8; empty windows exactly 1",
      [&](int, std::uint64_t seed, InstanceResult& r, Json&) {
        const Instance inst = random_instance(seed, {});
        const ChainEnsemble& e = inst.ensemble;
        r.model = inst.model;
        Rng rng(derive_seed(seed, 1000));
        const WindowFamily wf = random_windows(rng, e, 0);
        const auto dist = enumerate_density(e, {opts.budget});
        const BlockKernel k = correlation_kernel(e);
        const std::vector<int> zeros(static_cast<std::size_t>(e.floors()), 0);
        Tracker t(r);
        t.add(fredholm_det(restrict_to(k, wf)), brute_count_probability(dist, wf, zeros), 1e-10);
        t.add(fredholm_det(restrict_to(k, WindowFamily::full(e.space(), e.floors()))), 0.0, 1e-8);
        const Complex empty = fredholm_det(restrict_to(k, WindowFamily::empty(e.space(), e.floors())));
        // Exact: any deviation from 1 fails.
        t.add(empty, 1.0, empty == Complex(1.0, 0.0) ? 1.0 : 0.0);
      });
}

SuiteReport counting_suite(const VerifyOptions& opts) {
  return run_instances(
      "counting", opts, "closure |sum - 1| <= 1e-9; each count vs enumeration abs <= 1e-9",
      [&](int, std::uint64_t seed, InstanceResult& r, Json&) {
        const Instance inst = random_instance(seed, {});
        const ChainEnsemble& e = inst.ensemble;
        r.model = inst.model;
        Rng rng(derive_seed(seed, 1000));
        const WindowFamily wf = random_windows(rng, e, 0);
        const auto dist = enumerate_density(e, {opts.budget});
        const int n = e.particles();
        std::vector<int> counts(static_cast<std::size_t>(e.floors()), 0);
        Tracker t(r);
        double total = 0.0;
        for (;;) {
          const double pr = count_probability(e, wf, counts);
          total += pr;
          t.add(pr, brute_count_probability(dist, wf, counts), 1e-9);
          std::size_t l = 0;
          while (l < counts.size() && ++counts[l] > n) counts[l++] = 0;
          if (l == counts.size()) break;
        }
        t.add(total, 1.0, 1e-9);
      });
}

SuiteReport extremes_suite(const VerifyOptions& opts) {
  static const double grid[] = {-1.0, 0.0, 1.0, 2.0};
  VerifyOptions fixed = opts;
  fixed.instances = 4;
  return run_instances(
      "extremes", fixed,
      "Pr(lambda_max < s), GUE n=2, order 64 per panel on [-6, 6] split at s: abs <= 1e-6",
      [&](int index, std::uint64_t, InstanceResult& r, Json&) {
        const double s = grid[index];
        const auto space = DiscretizedSpace::quadrature({-6.0, 6.0}, 64, {s});
        const ChainEnsemble e = build_unitary(Potential::gaussian(), 2, space);
        r.model = "unitary V=x^2 n=2 s=" + format_double(s);
        const WindowFamily wf({Window::at_or_above(space, s)});
        const double oracle = quad_oracle_m1(e, s, 0, opts.budget);
        const double grid_s[] = {s};
        Tracker t(r);
        t.add(fredholm_det(restrict_to(correlation_kernel(e), wf)), oracle, 1e-6);
        t.add(kth_extreme_distribution(e, 0, 1, grid_s).front().cdf, oracle, 1e-6);
      });
}

const char* status_name(InstanceStatus s) {
  switch (s) {
    case InstanceStatus::pass: return "pass";
    case InstanceStatus::fail: return "fail";
    case InstanceStatus::expected_error: return "expected-error";
  }
  return "fail";
}

}  // namespace

bool SuiteReport::passed() const {
  return std::none_of(results.begin(), results.end(),
                      [](const InstanceResult& r) { return r.status == InstanceStatus::fail; });
}

double SuiteReport::max_abs_error() const {
  double m = 0.0;
  for (const auto& r : results) {
    if (r.status != InstanceStatus::expected_error) m = std::max(m, r.abs_error);
  }
  return m;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"heine",   "partition",   "correlations", "janossy",
                                              "theorem", "dyson-mehta", "marginal",     "gap",
                                              "counting", "extremes"};
  return names;
}

SuiteReport verify_suite(const std::string& name, const VerifyOptions& options) {
  if (name == "heine") return heine_suite(options);
  if (name == "partition") return partition_suite(options);
  if (name == "correlations") return correlations_suite(options);
  if (name == "janossy") return janossy_suite(options);
  if (name == "theorem") return theorem_suite(options);
  if (name == "dyson-mehta") return dyson_mehta_suite(options);
  if (name == "marginal") return marginal_suite(options);
  if (name == "gap") return gap_suite(options);
  if (name == "counting") return counting_suite(options);
  if (name == "extremes") return extremes_suite(options);
  std::string known;
  for (const auto& n : suite_names()) known += (known.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown verify suite '" + name + "' (known: " + known + ")");
}

Json to_json(const SuiteReport& report) {
  int pass = 0, fail = 0, expected = 0;
  Json rows = Json::array();
  for (const auto& r : report.results) {
    (r.status == InstanceStatus::pass ? pass : r.status == InstanceStatus::fail ? fail : expected)++;
    Json row = {{"instance", r.index},
                {"seed", r.seed},
                {"model", r.model},
                {"status", status_name(r.status)},
                {"comparisons", r.comparisons},
                {"computed", complex_to_json(r.computed)},
                {"reference", complex_to_json(r.reference)},
                {"abs_error", r.abs_error},
                {"rel_error", r.rel_error},
                {"tolerance", r.tolerance}};
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(std::move(row));
  }
  Json out = {{"suite", report.suite},
              {"seed", report.seed},
              {"instances", report.instances},
              {"tolerance_rule", report.tolerance_rule},
              {"passed", report.passed()},
              {"summary",
               {{"pass", pass},
                {"fail", fail},
                {"expected_error", expected},
                {"max_abs_error", report.max_abs_error()}}},
              {"results", rows}};
  if (!report.table.empty()) out["table"] = report.table;
  return out;
}

}  // namespace janossy
