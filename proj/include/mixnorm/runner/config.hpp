#pragma once

// Flat key=value configuration with command-line overrides, and its
// validation into a typed experiment description.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mixnorm/core/error.hpp"
#include "mixnorm/grid.hpp"

namespace mixnorm::runner {

/// Raw key/value pairs. Later assignments override earlier ones.
class KeyValues {
public:
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& all() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  /// Parses "key = value" lines; '#' starts a comment.
  static KeyValues parse(std::istream& in, const std::string& origin = "config") {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ValidationError("config", origin + ":" + std::to_string(lineno) + ": expected key = value");
      auto key = trim(line.substr(0, eq));
      auto value = trim(line.substr(eq + 1));
      if (key.empty()) throw ValidationError("config", origin + ":" + std::to_string(lineno) + ": empty key");
      kv.set(key, value);
    }
    return kv;
  }

  static KeyValues load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    return parse(in, path);
  }

  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

private:
  std::map<std::string, std::string> values_;
};

enum class Experiment { norm, equiv, algebra, moser, localize, nikolskij, peetre, trace, embed, report };

inline const std::vector<std::pair<std::string, Experiment>>& experiment_names() {
  static const std::vector<std::pair<std::string, Experiment>> names{
      {"norm", Experiment::norm},           {"equiv", Experiment::equiv},     {"algebra", Experiment::algebra},
      {"moser", Experiment::moser},         {"localize", Experiment::localize}, {"nikolskij", Experiment::nikolskij},
      {"peetre", Experiment::peetre},       {"trace", Experiment::trace},     {"embed", Experiment::embed},
      {"report", Experiment::report}};
  return names;
}

inline std::string to_string(Experiment e) {
  for (const auto& [n, v] : experiment_names())
    if (v == e) return n;
  return "?";
}

inline Experiment parse_experiment(const std::string& s) {
  for (const auto& [n, v] : experiment_names())
    if (n == s) return v;
  throw ValidationError("experiment", "unknown experiment '" + s + "'");
}

/// Every key a config may carry, with its default.
inline const std::vector<std::pair<std::string, std::string>>& config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys{
      {"experiment", ""},
      {"family", "random"},   // random | dilated | oscillatory | zero | bump
      {"space", "besov"},     // besov | sobolev | cmix
      {"p", "2"},
      {"r", "1"},
      {"m", "1"},
      {"m_diff", "2"},
      {"t_max", "1"},
      {"d", "2"},
      {"resolution", "64"},
      {"box_lower", "0"},
      {"box_upper", "1"},
      {"extension", "periodic"},
      {"n_min", "0"},
      {"n_max", "8"},
      {"fit_min", "2"},
      {"epsilon", "1.6"},
      {"ramp", "linear"},
      {"companion_plateau", "2"},
      {"seed", "1"},
      {"count", "10"},
      {"kmax", "4"},
      {"kmax_max", "64"},
      {"alpha", "1"},
      {"p0", "2"},
      {"a", "1"},
      {"width", "0.25"},
      {"system", "smooth"},
      {"realization", "spectral"},
      {"beta", "1,0"},
      {"split", "1"},
      {"h_min", "0.0625"},
      {"h_octaves", "4"},
      {"output", ""},
      {"format", "csv"},
  };
  return keys;
}

/// Typed, validated experiment parameters.
struct ExperimentConfig {
  Experiment experiment = Experiment::norm;
  std::string family = "random";
  std::string space = "besov";
  double p = 2.0, r = 1.0;
  int m = 1, m_diff = 2;
  double t_max = 1.0;
  std::size_t d = 2;
  std::size_t resolution = 64;
  double box_lower = 0.0, box_upper = 1.0;
  Extension extension = Extension::periodic;
  int n_min = 0, n_max = 8, fit_min = 2;
  double epsilon = 1.6;
  std::string ramp = "linear";
  double companion_plateau = 2.0;
  std::uint64_t seed = 1;
  std::size_t count = 10;
  int kmax = 4, kmax_max = 64;
  int alpha = 1;
  double p0 = 2.0, a = 1.0, width = 0.25;
  std::string system = "smooth";
  std::string realization = "spectral";
  std::vector<int> beta{1, 0};
  std::size_t split = 1;
  double h_min = 0.0625;
  int h_octaves = 4;
  std::string output;
  std::string format = "csv";

  /// The resolved key/value snapshot, in key order, written into every row.
  std::vector<std::pair<std::string, std::string>> snapshot;
};

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return kInf;
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError(key, "expected a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError(key, "expected an integer, got '" + v + "'");
  }
}

inline std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(to_int(key, KeyValues::trim(item))));
  if (out.empty()) throw ValidationError(key, "expected a comma-separated integer list");
  return out;
}

inline void one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw ValidationError(key, "'" + v + "' is not one of {" + list + "}");
}

}  // namespace detail

/// Applies defaults, rejects unknown keys and checks every precondition the
/// selected experiment reaches.
inline ExperimentConfig validate(const KeyValues& kv) {
  std::set<std::string> known;
  for (const auto& [k, v] : config_keys()) known.insert(k);
  for (const auto& [k, v] : kv.all())
    if (!known.count(k)) throw ValidationError(k, "unknown configuration key");

  ExperimentConfig c;
  for (const auto& [k, def] : config_keys()) c.snapshot.emplace_back(k, kv.get(k, def));
  auto get = [&](const std::string& k) {
    for (const auto& [key, v] : c.snapshot)
      if (key == k) return v;
    return std::string();
  };
  using detail::to_double;
  using detail::to_int;

  const auto exp = get("experiment");
  if (exp.empty()) throw ValidationError("experiment", "no experiment selected");
  c.experiment = parse_experiment(exp);
  c.family = get("family");
  detail::one_of("family", c.family, {"random", "dilated", "oscillatory", "zero", "bump"});
  c.space = get("space");
  detail::one_of("space", c.space, {"besov", "sobolev", "cmix"});
  c.p = to_double("p", get("p"));
  c.r = to_double("r", get("r"));
  c.m = static_cast<int>(to_int("m", get("m")));
  c.m_diff = static_cast<int>(to_int("m_diff", get("m_diff")));
  c.t_max = to_double("t_max", get("t_max"));
  c.d = static_cast<std::size_t>(to_int("d", get("d")));
  auto res = to_int("resolution", get("resolution"));
  c.box_lower = to_double("box_lower", get("box_lower"));
  c.box_upper = to_double("box_upper", get("box_upper"));
  const auto ext = get("extension");
  detail::one_of("extension", ext, {"zero", "periodic"});
  c.extension = ext == "zero" ? Extension::zero : Extension::periodic;
  c.n_min = static_cast<int>(to_int("n_min", get("n_min")));
  c.n_max = static_cast<int>(to_int("n_max", get("n_max")));
  c.fit_min = static_cast<int>(to_int("fit_min", get("fit_min")));
  c.epsilon = to_double("epsilon", get("epsilon"));
  c.ramp = get("ramp");
  detail::one_of("ramp", c.ramp, {"linear", "smooth"});
  c.companion_plateau = to_double("companion_plateau", get("companion_plateau"));
  auto seed = to_int("seed", get("seed"));
  auto count = to_int("count", get("count"));
  c.kmax = static_cast<int>(to_int("kmax", get("kmax")));
  c.kmax_max = static_cast<int>(to_int("kmax_max", get("kmax_max")));
  c.alpha = static_cast<int>(to_int("alpha", get("alpha")));
  c.p0 = to_double("p0", get("p0"));
  c.a = to_double("a", get("a"));
  c.width = to_double("width", get("width"));
  c.system = get("system");
  detail::one_of("system", c.system, {"smooth", "sharp"});
  c.realization = get("realization");
  detail::one_of("realization", c.realization, {"spectral", "central"});
  c.beta = detail::to_int_list("beta", get("beta"));
  auto split = to_int("split", get("split"));
  c.h_min = to_double("h_min", get("h_min"));
  c.h_octaves = static_cast<int>(to_int("h_octaves", get("h_octaves")));
  c.output = get("output");
  c.format = get("format");
  detail::one_of("format", c.format, {"csv", "json"});

  // ranges shared by every experiment
  require(c.p >= 1.0 && !std::isnan(c.p), "p", "integrability exponent must lie in [1, inf]");
  require(c.p0 >= 1.0 && !std::isnan(c.p0), "p0", "integrability exponent must lie in [1, inf]");
  require(c.d >= 1 && c.d <= kMaxDim, "d", "dimension must be 1, 2 or 3");
  require(res >= 16 && res <= (1 << 20), "resolution", "must lie in [16, 2^20]");
  c.resolution = static_cast<std::size_t>(res);
  require((c.resolution & (c.resolution - 1)) == 0, "resolution", "must be a power of two");
  require(std::isfinite(c.box_lower) && std::isfinite(c.box_upper) && c.box_lower < c.box_upper, "box_lower",
          "box_lower < box_upper violated");
  require(c.n_min >= 0 && c.n_max >= c.n_min, "n_max", "need 0 <= n_min <= n_max");
  require(c.fit_min >= 0, "fit_min", "must be nonnegative");
  require(seed >= 0, "seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  require(count >= 1 && count <= 100000, "count", "must lie in [1, 100000]");
  c.count = static_cast<std::size_t>(count);
  require(c.kmax >= 1, "kmax", "must be at least 1");
  require(c.t_max > 0, "t_max", "must be positive");
  require(split >= 1, "split", "must be at least 1");
  c.split = static_cast<std::size_t>(split);

  // space preconditions
  if (c.space == "besov") {
    require(c.r > 0, "r", "smoothness must be positive");
    require(c.m_diff >= 1 && c.m_diff > c.r, "m_diff", "difference order must exceed r");
  } else {
    require(c.m >= 0 && c.m <= 4, "m", "order must lie in [0, 4]");
    if (c.space == "sobolev")
      require(c.p > 1.0 && !std::isinf(c.p), "p", "Sobolev norms require 1 < p < inf");
  }

  // family preconditions
  if (c.family == "random") {
    require(c.kmax * 8 <= static_cast<int>(c.resolution), "kmax", "band exceeds the lowest quarter of Nyquist");
  }
  if (c.family == "oscillatory") {
    require(c.epsilon > 0, "epsilon", "must be positive");
    require(c.n_min >= 1, "n_min", "oscillatory members start at n = 1");
  }

  switch (c.experiment) {
    case Experiment::norm:
      if (c.family == "dilated" || c.family == "oscillatory")
        require(c.d == 1, "d", "dilated and oscillatory members are one-dimensional");
      break;
    case Experiment::equiv:
      require(c.family == "random", "family", "equivalence brackets run on the random family");
      require(c.p > 1.0 && !std::isinf(c.p), "p", "equivalence needs 1 < p < inf");
      require(c.m_diff > c.r && c.r > 0, "r", "need 0 < r < m_diff");
      require(c.m >= 0 && c.m <= 4, "m", "order must lie in [0, 4]");
      break;
    case Experiment::algebra:
    case Experiment::moser:
      require(c.family == "dilated" || c.family == "oscillatory" || c.family == "random", "family",
              "ratio experiments take dilated, oscillatory or random families");
      if (c.family != "random") require(c.d == 2 || c.d == 3, "d", "tensor pairs need d in {2, 3}");
      if (c.family != "random")
        require(c.n_max - std::max(c.n_min, c.fit_min) + 1 >= 4, "n_max", "rate fits need at least 4 members");
      break;
    case Experiment::localize:
      require(c.family == "random", "family", "localization runs on the random family");
      require(c.space == "besov", "space", "localization ratios use the Besov norm");
      require(c.width > 0, "width", "lattice spacing must be positive");
      break;
    case Experiment::nikolskij:
    case Experiment::peetre:
      require(c.family == "random", "family", "sweeps run on the random family");
      require(c.kmax_max >= c.kmax, "kmax_max", "must be at least kmax");
      require(c.kmax_max * 8 <= static_cast<int>(c.resolution), "kmax_max", "band exceeds the lowest quarter of Nyquist");
      require(c.alpha >= 0 && c.alpha <= 4, "alpha", "derivative order must lie in [0, 4]");
      require(c.p0 <= c.p, "p0", "p0 must not exceed p");
      require(c.a > 0, "a", "Peetre exponent must be positive");
      require(c.h_octaves >= 0, "h_octaves", "must be nonnegative");
      require(c.h_min > 0, "h_min", "must be positive");
      break;
    case Experiment::trace:
      require(c.family == "random", "family", "trace constants run on the random family");
      require(c.split <= c.d, "split", "split index must lie in [1, d]");
      require(c.beta.size() == c.d, "beta", "one order per axis required");
      for (int b : c.beta) require(b >= 0 && b <= 4, "beta", "orders must lie in [0, 4]");
      require(c.p > 1.0 && !std::isinf(c.p), "p", "Sobolev norms require 1 < p < inf");
      break;
    case Experiment::embed:
      require(c.family == "dilated", "family", "embedding rates run on the dilated family");
      break;
    case Experiment::report: break;
  }
  return c;
}

}  // namespace mixnorm::runner
