#include "janossy/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace janossy {

namespace {

const char* const kModelTypes = "unitary, coupled-chain, karlin-mcgregor, random, explicit";

[[noreturn]] void fail(const std::string& what) { throw InvalidArgument(what); }

const Json& require(const Json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) fail(std::string(where) + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const char* where) {
  if (!j.is_number()) fail(std::string(where) + ": expected a number");
  return j.get<double>();
}

int integer(const Json& j, const char* where) {
  if (!j.is_number_integer()) fail(std::string(where) + ": expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const Json& j, const char* where) {
  if (!j.is_array()) fail(std::string(where) + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, where));
  return out;
}

Potential potential_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "gaussian") return Potential::gaussian();
    fail("potential: unknown name '" + j.get<std::string>() + "' (known: gaussian)");
  }
  if (j.is_object()) return Potential{numbers(require(j, "coefficients", "potential"), "potential")};
  return Potential{numbers(j, "potential")};
}

CVector complex_vector(const Json& j, const char* where) {
  if (!j.is_array()) fail(std::string(where) + ": expected an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

CMatrix complex_matrix(const Json& j, const char* where) {
  if (!j.is_array() || j.empty()) fail(std::string(where) + ": expected a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const CVector row = complex_vector(j[static_cast<std::size_t>(r)], where);
    if (row.size() != cols) fail(std::string(where) + ": ragged matrix");
    m.row(r) = row.transpose();
  }
  return m;
}

Json complex_vector_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

Json potential_json(const Potential& v) { return v.coefficients; }

}  // namespace

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail("expected a number or [re, im]");
}

Json complex_to_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

SpaceSpec space_spec_from_json(const Json& j) {
  const std::string kind = require(j, "kind", "space").get<std::string>();
  if (kind == "discrete") {
    return SpaceSpec::discrete(numbers(require(j, "points", "space"), "space.points"),
                               numbers(require(j, "masses", "space"), "space.masses"));
  }
  if (kind == "quadrature") {
    const auto iv = numbers(require(j, "interval", "space"), "space.interval");
    if (iv.size() != 2) fail("space.interval: expected [a, b]");
    std::vector<double> breaks;
    if (j.contains("breakpoints")) breaks = numbers(j.at("breakpoints"), "space.breakpoints");
    return SpaceSpec::quadrature({iv[0], iv[1]}, integer(require(j, "order", "space"), "space.order"),
                                 std::move(breaks));
  }
  fail("space: unknown kind '" + kind + "' (known: discrete, quadrature)");
}

Json to_json(const SpaceSpec& spec) {
  if (spec.kind == SpaceKind::discrete) {
    return {{"kind", "discrete"}, {"points", spec.points}, {"masses", spec.masses}};
  }
  Json out = {{"kind", "quadrature"},
              {"interval", {spec.interval.lo, spec.interval.hi}},
              {"order", spec.order}};
  if (!spec.breakpoints.empty()) out["breakpoints"] = spec.breakpoints;
  return out;
}

ChainModelSpec model_spec_from_json(const Json& j) {
  if (!j.is_object()) fail("model: expected an object");
  const std::string type = require(j, "type", "model").get<std::string>();
  if (type == "unitary") {
    UnitarySpec s;
    if (j.contains("potential")) s.potential = potential_from_json(j.at("potential"));
    s.n = integer(require(j, "n", "model"), "model.n");
    s.space = space_spec_from_json(require(j, "space", "model"));
    return s;
  }
  if (type == "coupled-chain") {
    CoupledChainSpec s;
    s.n = integer(require(j, "n", "model"), "model.n");
    for (const auto& v : require(j, "potentials", "model")) s.potentials.push_back(potential_from_json(v));
    s.couplings = numbers(require(j, "couplings", "model"), "model.couplings");
    s.space = space_spec_from_json(require(j, "space", "model"));
    return s;
  }
  if (type == "karlin-mcgregor") {
    KarlinMcGregorSpec s;
    if (j.contains("transition")) s.transition = j.at("transition").get<std::string>();
    s.times = numbers(require(j, "times", "model"), "model.times");
    s.start = numbers(require(j, "start", "model"), "model.start");
    s.end = numbers(require(j, "end", "model"), "model.end");
    if (j.contains("order")) s.order = integer(j.at("order"), "model.order");
    if (j.contains("space")) s.space = space_spec_from_json(j.at("space"));
    return s;
  }
  if (type == "random") {
    RandomSpec s;
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    s.nodes = integer(require(j, "P", "model"), "model.P");
    s.n = integer(require(j, "n", "model"), "model.n");
    s.floors = integer(require(j, "M", "model"), "model.M");
    if (j.contains("positive")) s.positive = j.at("positive").get<bool>();
    return s;
  }
  if (type == "explicit") {
    ExplicitSpec s;
    s.space = space_spec_from_json(require(j, "space", "model"));
    for (const auto& v : require(j, "f", "model")) s.f.push_back(complex_vector(v, "model.f"));
    for (const auto& v : require(j, "phi", "model")) s.phi.push_back(complex_vector(v, "model.phi"));
    if (j.contains("links")) {
      for (const auto& g : j.at("links")) s.links.push_back(complex_matrix(g, "model.links"));
    }
    return s;
  }
  fail("model: unknown type '" + type + "' (known: " + kModelTypes + ")");
}

Json to_json(const ChainModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UnitarySpec>) {
          return {{"type", "unitary"}, {"potential", potential_json(s.potential)}, {"n", s.n},
                  {"space", to_json(s.space)}};
        } else if constexpr (std::is_same_v<T, CoupledChainSpec>) {
          Json pots = Json::array();
          for (const auto& v : s.potentials) pots.push_back(potential_json(v));
          return {{"type", "coupled-chain"}, {"n", s.n}, {"potentials", pots},
                  {"couplings", s.couplings}, {"space", to_json(s.space)}};
        } else if constexpr (std::is_same_v<T, KarlinMcGregorSpec>) {
          Json out = {{"type", "karlin-mcgregor"}, {"transition", s.transition}, {"times", s.times},
                      {"start", s.start}, {"end", s.end}, {"order", s.order}};
          if (s.space) out["space"] = to_json(*s.space);
          return out;
        } else if constexpr (std::is_same_v<T, RandomSpec>) {
          return {{"type", "random"}, {"seed", s.seed}, {"P", s.nodes}, {"n", s.n},
                  {"M", s.floors}, {"positive", s.positive}};
        } else {
          Json f = Json::array();
          Json phi = Json::array();
          Json links = Json::array();
          for (const auto& v : s.f) f.push_back(complex_vector_json(v));
          for (const auto& v : s.phi) phi.push_back(complex_vector_json(v));
          for (const auto& g : s.links) {
            Json rows = Json::array();
            for (Eigen::Index r = 0; r < g.rows(); ++r) rows.push_back(complex_vector_json(g.row(r).transpose()));
            links.push_back(rows);
          }
          return {{"type", "explicit"}, {"space", to_json(s.space)}, {"f", f}, {"phi", phi},
                  {"links", links}};
        }
      },
      spec);
}

Window window_from_json(const DiscretizedSpace& space, const Json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "empty") return Window::empty(space);
    if (name == "full") return Window::full(space);
    fail("window: unknown name '" + name + "' (known: empty, full)");
  }
  if (!j.is_object()) fail("window: expected \"empty\", \"full\" or an object");
  if (j.contains("intervals")) {
    std::vector<Interval> intervals;
    for (const auto& iv : j.at("intervals")) {
      const auto ab = numbers(iv, "window.intervals");
      if (ab.size() != 2 || !(ab[0] <= ab[1])) fail("window.intervals: expected [a, b] with a <= b");
      intervals.push_back({ab[0], ab[1]});
    }
    return Window::from_intervals(space, std::move(intervals));
  }
  if (j.contains("at_or_above")) return Window::at_or_above(space, number(j.at("at_or_above"), "window"));
  if (j.contains("nodes")) {
    std::vector<bool> mask(space.size(), false);
    for (const auto& v : j.at("nodes")) {
      const int i = integer(v, "window.nodes");
      if (i < 0 || static_cast<std::size_t>(i) >= space.size()) fail("window.nodes: index out of range");
      mask[static_cast<std::size_t>(i)] = true;
    }
    return Window(space, std::move(mask));
  }
  if (j.contains("mask")) {
    const auto& m = j.at("mask");
    if (!m.is_array() || m.size() != space.size()) fail("window.mask: expected one entry per node");
    std::vector<bool> mask;
    for (const auto& v : m) mask.push_back(v.is_boolean() ? v.get<bool>() : integer(v, "window.mask") != 0);
    return Window(space, std::move(mask));
  }
  fail("window: expected one of intervals, at_or_above, nodes, mask");
}

WindowFamily window_family_from_json(const DiscretizedSpace& space, int floors, const Json& j) {
  if (j.is_array()) {
    if (j.size() != static_cast<std::size_t>(floors)) {
      std::ostringstream os;
      os << "windows: expected " << floors << " entries (one per floor), got " << j.size();
      fail(os.str());
    }
    std::vector<Window> windows;
    for (const auto& w : j) windows.push_back(window_from_json(space, w));
    return WindowFamily(std::move(windows));
  }
  return WindowFamily::uniform(window_from_json(space, j), floors);
}

Json to_json(const Window& window) {
  if (window.intervals()) {
    Json iv = Json::array();
    for (const auto& i : *window.intervals()) iv.push_back({i.lo, i.hi});
    return {{"intervals", iv}, {"nodes", window.indices()}};
  }
  return {{"nodes", window.indices()}};
}

Json to_json(const WindowFamily& windows) {
  Json out = Json::array();
  for (const auto& w : windows.windows()) out.push_back(to_json(w));
  return out;
}

Json kernel_json(const BlockKernel& kernel) {
  const auto& space = kernel.ensemble().space();
  Json blocks = Json::array();
  for (int l = 0; l < kernel.floors(); ++l) {
    for (int m = 0; m < kernel.floors(); ++m) {
      const CMatrix& b = kernel.block(l, m);
      Json re = Json::array(), im = Json::array();
      for (Eigen::Index x = 0; x < b.rows(); ++x) {
        Json r = Json::array(), i = Json::array();
        for (Eigen::Index y = 0; y < b.cols(); ++y) {
          r.push_back(b(x, y).real());
          i.push_back(b(x, y).imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(i));
      }
      blocks.push_back({{"l", l + 1}, {"m", m + 1}, {"re", std::move(re)}, {"im", std::move(im)}});
    }
  }
  const char* kind = kernel.kind() == KernelKind::correlation        ? "K"
                     : kernel.kind() == KernelKind::janossy_explicit ? "L_explicit"
                                                                     : "L_resolvent";
  return {{"schema", kKernelSchema}, {"kind", kind},           {"floors", kernel.floors()},
          {"nodes", space.nodes()},  {"weights", space.weights()}, {"blocks", std::move(blocks)}};
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string kernel_csv(const BlockKernel& kernel, const std::optional<WindowFamily>& windows) {
  std::ostringstream os;
  os << kCsvSchema << ",l,x_index,x,m,y_index,y,re,im\n";
  const auto& space = kernel.ensemble().space();
  const char* kind = kernel.kind() == KernelKind::correlation ? "K"
                     : kernel.kind() == KernelKind::janossy_explicit ? "L_explicit"
                                                                     : "L_resolvent";
  std::vector<Site> sites;
  if (windows) {
    sites = windows->sites();
  } else {
    for (int l = 0; l < kernel.floors(); ++l) {
      for (Eigen::Index x = 0; x < kernel.nodes(); ++x) sites.push_back({l, static_cast<int>(x)});
    }
  }
  for (const auto& a : sites) {
    for (const auto& b : sites) {
      const Complex v = kernel(a, b);
      os << kind << ',' << a.floor + 1 << ',' << a.node << ','
         << format_double(space.node(static_cast<std::size_t>(a.node))) << ',' << b.floor + 1 << ','
         << b.node << ',' << format_double(space.node(static_cast<std::size_t>(b.node))) << ','
         << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
  }
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace janossy
