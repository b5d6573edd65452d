#include "kahler/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace kahler {

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const ExperimentConfig&)>;

struct Key {
  std::string path;
  const char* type;
  Getter show;
  Setter set;
  const char* meaning;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double x = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty() || !std::isfinite(x))
    throw SchemaError(key, "expected a real number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long long x = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw SchemaError(key, "expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw SchemaError(key, "expected true or false, got '" + v + "'");
}

template <class F>
auto to_list(const std::string& key, const std::string& v, F item) {
  std::vector<decltype(item(key, v))> out;
  std::stringstream ss(v);
  std::string piece;
  while (std::getline(ss, piece, ',')) out.push_back(item(key, piece));
  if (out.empty()) throw SchemaError(key, "expected a comma-separated list");
  return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  return os.str();
}

std::string show_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

int to_count(const std::string& key, const std::string& v, long long lo) {
  const long long x = to_int(key, v);
  if (x < lo || x > 1 << 20) throw SchemaError(key, "must be an integer in [" + std::to_string(lo) + ", 2^20]");
  return static_cast<int>(x);
}

std::vector<int> to_ladder(const std::string& key, const std::string& v) {
  auto raw = to_list(key, v, to_int);
  std::vector<int> out;
  for (long long x : raw) {
    if (x < 8 || x > 1 << 16) throw SchemaError(key, "levels must lie in [8, 65536]");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k{
        {"experiment.name", "string", [](const ExperimentConfig& c) { return c.name.empty() ? "<subcommand>" : c.name; },
         [](ExperimentConfig& c, const std::string&, const std::string& v) { c.name = trim(v); },
         "name of the output subdirectory"},
        {"experiment.output", "path", [](const ExperimentConfig& c) { return c.output.string(); },
         [](ExperimentConfig& c, const std::string&, const std::string& v) { c.output = trim(v); },
         "output root; artifacts go to <output>/<name>/"},
        {"experiment.seed", "uint", [](const ExperimentConfig& c) { return std::to_string(c.suite.seed); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           const long long s = to_int(key, v);
           if (s < 0) throw SchemaError(key, "must be nonnegative");
           c.suite.seed = static_cast<std::uint64_t>(s);
         },
         "seed of every random sample (range nodes, superposition families)"},
        {"experiment.plots", "bool", [](const ExperimentConfig& c) { return std::string(c.plots ? "true" : "false"); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.plots = to_bool(key, v); },
         "write SVG plots next to the CSV data"},
        {"resolution.ladder", "int list", [](const ExperimentConfig& c) { return join(c.suite.ladder); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.suite.ladder = to_ladder(key, v); },
         "cp1 cells per level, strictly increasing, at least three levels"},
        {"resolution.product_ladder", "int list", [](const ExperimentConfig& c) { return join(c.suite.product_ladder); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           c.suite.product_ladder = to_ladder(key, v);
         },
         "per-factor cells on CP^1 x CP^1, strictly increasing, at least two levels"},
        {"resolution.torus_cells", "int", [](const ExperimentConfig& c) { return std::to_string(c.suite.torus_cells); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           const int n = to_count(key, v, 16);
           if (n & (n - 1)) throw SchemaError(key, "must be a power of two");
           c.suite.torus_cells = n;
         },
         "torus grid side (power of two >= 16)"},
        {"resolution.superposition_grid", "int",
         [](const ExperimentConfig& c) { return std::to_string(c.suite.superposition_grid); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           c.suite.superposition_grid = to_count(key, v, 32);
         },
         "nodes per side of the disk grid"},
        {"geodesic.dilation", "real", [](const ExperimentConfig& c) { return show_real(c.suite.dilation); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           const double a = to_real(key, v);
           if (!(a > 0.0)) throw SchemaError(key, "must be > 0");
           c.suite.dilation = a;
         },
         "a in V = a z d/dz on CP^1"},
        {"geodesic.torus_eps", "real", [](const ExperimentConfig& c) { return show_real(c.suite.torus_eps); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           const double e = to_real(key, v);
           if (!(std::abs(e) < 1.0) || e == 0.0) throw SchemaError(key, "must satisfy 0 < |eps| < 1");
           c.suite.torus_eps = e;
         },
         "torus density 1 + eps cos(2 pi x1)"},
        {"dh.kind", "cp1|torus", [](const ExperimentConfig& c) { return c.dh_kind; },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           const auto t = trim(v);
           if (t != "cp1" && t != "torus") throw SchemaError(key, "must be cp1 or torus");
           c.dh_kind = t;
         },
         "cp1: invariance on cp1 and the product; torus: flat-torus point mass"},
        {"dh.bins", "int", [](const ExperimentConfig& c) { return std::to_string(c.suite.bins); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.suite.bins = to_count(key, v, 8); },
         "histogram bins on [-a, a]"},
        {"dh.times", "real list", [](const ExperimentConfig& c) { return join(c.suite.dh_times); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           c.suite.dh_times = to_list(key, v, to_real);
         },
         "times t compared against t = 0"},
        {"sets.samples", "int", [](const ExperimentConfig& c) { return std::to_string(c.suite.range_samples); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           c.suite.range_samples = to_count(key, v, 1);
         },
         "sampled non-fixed points x for B_x"},
        {"sets.horizon", "real", [](const ExperimentConfig& c) { return show_real(c.suite.horizon); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           const double t = to_real(key, v);
           if (!(t > 0.0)) throw SchemaError(key, "must be > 0");
           c.suite.horizon = t;
         },
         "T of the asymptotic slope u_T/T"},
        {"kenergy.toric_bump", "real", [](const ExperimentConfig& c) { return show_real(c.suite.toric_bump); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           const double b = to_real(key, v);
           if (!(b > 0.0 && b < 4.0)) throw SchemaError(key, "must lie in (0, 4) so that w_1 stays convex");
           c.suite.toric_bump = b;
         },
         "c in w_1 = w_0 + c m^2 (1-m)^2"},
        {"superposition.families", "int", [](const ExperimentConfig& c) { return std::to_string(c.suite.families); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) { c.suite.families = to_count(key, v, 1); },
         "randomized families"},
        {"superposition.members", "int", [](const ExperimentConfig& c) { return std::to_string(c.suite.family_size); },
         [](ExperimentConfig& c, const std::string& key, const std::string& v) {
           c.suite.family_size = to_count(key, v, 1);
         },
         "scaled Poincare metrics per family"},
    };
    for (const auto& t : tolerance_keys()) {
      const auto member = t.member;
      k.push_back({std::string("tolerances.") + t.key, "real > 0",
                   [member](const ExperimentConfig& c) { return show_real(c.suite.tol.*member); },
                   [member](ExperimentConfig& c, const std::string& key, const std::string& v) {
                     const double x = to_real(key, v);
                     if (!(x > 0.0)) throw SchemaError(key, "tolerances must be > 0");
                     c.suite.tol.*member = x;
                   },
                   t.meaning});
    }
    return k;
  }();
  return table;
}

void check_ladder(const std::string& key, const std::vector<int>& v, std::size_t levels) {
  if (v.size() < levels) throw SchemaError(key, "needs at least " + std::to_string(levels) + " levels");
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] <= v[k - 1]) throw SchemaError(key, "must be strictly increasing");
}

}  // namespace

void validate(const ExperimentConfig& c) {
  check_ladder("resolution.ladder", c.suite.ladder, 3);
  check_ladder("resolution.product_ladder", c.suite.product_ladder, 2);
  for (const auto& t : tolerance_keys())
    if (!(c.suite.tol.*t.member > 0.0)) throw SchemaError(std::string("tolerances.") + t.key, "tolerances must be > 0");
}

ExperimentConfig parse_config(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw SchemaError("line " + std::to_string(e.line()), e.message());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw SchemaError(section, "keys must live inside a [section]");
    for (const auto& [name, value] : body) {
      const std::string path = section + "." + name;
      const auto k = std::find_if(keys().begin(), keys().end(), [&](const Key& x) { return x.path == path; });
      if (k == keys().end()) throw SchemaError(path, "unknown key");
      k->set(c, path, value.data());
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError(file.string(), "cannot open config");
  return parse_config(in);
}

void apply_resolution_override(ExperimentConfig& c, int finest) {
  if (finest < 8) throw SchemaError("--resolution-override", "must be >= 8");
  const double f = static_cast<double>(finest) / c.suite.ladder.back();
  auto scale = [f](std::vector<int>& v, const char* key) {
    for (int& x : v) x = static_cast<int>(std::lround(x * f));
    if (v.front() < 8) throw SchemaError(key, "override makes the coarsest level smaller than 8");
  };
  scale(c.suite.ladder, "resolution.ladder");
  scale(c.suite.product_ladder, "resolution.product_ladder");
  validate(c);
}

std::string schema_text() {
  const ExperimentConfig defaults;
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    const auto dot = k.path.find('.');
    if (k.path.substr(0, dot) != section) {
      section = k.path.substr(0, dot);
      os << "[" << section << "]\n";
    }
    os << "  " << k.path.substr(dot + 1) << " (" << k.type << ", default " << k.show(defaults) << "): " << k.meaning
       << "\n";
  }
  return os.str();
}

}  // namespace kahler
