#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "mixnorm/runner/config.hpp"
#include "mixnorm/runner/experiments.hpp"
#include "mixnorm/runner/table.hpp"

using namespace mixnorm;
using namespace mixnorm::runner;

namespace fs = std::filesystem;

namespace {

KeyValues kv_of(const std::string& text) {
  std::istringstream in(text);
  return KeyValues::parse(in);
}

std::string field_of(const KeyValues& kv) {
  try {
    (void)validate(kv);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

// Splits one CSV line, honouring double-quoted fields.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MIXNORM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("mixnorm_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Config, ParsesCommentsAndWhitespace) {
  auto kv = kv_of("# header\n  experiment = norm  \n\np=3 # trailing\n");
  EXPECT_EQ(kv.get("experiment", ""), "norm");
  EXPECT_EQ(kv.get("p", ""), "3");
  EXPECT_EQ(kv.all().size(), 2u);
}

TEST(Config, MalformedLineNamesConfig) {
  try {
    kv_of("experiment norm\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "config");
  }
}

TEST(Config, ValidationNamesTheOffendingKey) {
  EXPECT_EQ(field_of(kv_of("experiment = norm\nbogus = 1\n")), "bogus");
  EXPECT_EQ(field_of(kv_of("p = 2\n")), "experiment");
  EXPECT_EQ(field_of(kv_of("experiment = norm\np = 0.5\n")), "p");
  EXPECT_EQ(field_of(kv_of("experiment = norm\nresolution = 48\n")), "resolution");
  EXPECT_EQ(field_of(kv_of("experiment = norm\nr = 3\nm_diff = 2\n")), "m_diff");
  EXPECT_EQ(field_of(kv_of("experiment = norm\nbox_lower = 1\nbox_upper = 0\n")), "box_lower");
  EXPECT_EQ(field_of(kv_of("experiment = norm\nkmax = 16\nresolution = 64\n")), "kmax");
  EXPECT_EQ(field_of(kv_of("experiment = norm\nfamily = dilated\nd = 2\n")), "d");
  EXPECT_EQ(field_of(kv_of("experiment = moser\nfamily = dilated\nd = 2\nn_max = 4\n")), "n_max");
  EXPECT_EQ(field_of(kv_of("experiment = trace\nbeta = 1\n")), "beta");
  EXPECT_EQ(field_of(kv_of("experiment = norm\np = abc\n")), "p");
  EXPECT_EQ(field_of(kv_of("experiment = nope\n")), "experiment");
  EXPECT_EQ(field_of(kv_of("experiment = norm\n")), "");
}

TEST(Config, SnapshotCarriesDefaultsInKeyOrder) {
  auto c = validate(kv_of("experiment = norm\np = 3\n"));
  ASSERT_EQ(c.snapshot.size(), config_keys().size());
  for (std::size_t i = 0; i < c.snapshot.size(); ++i) EXPECT_EQ(c.snapshot[i].first, config_keys()[i].first);
  EXPECT_EQ(c.p, 3.0);
}

TEST(Table, FormatsFullPrecision) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_THROW(format_double(std::nan("")), NumericalAnomaly);
  EXPECT_THROW(format_double(kInf), NumericalAnomaly);
}

TEST(Table, EmptyTableIsNoResults) {
  Table t;
  t.columns = {"a"};
  try {
    render(t, "csv");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "rows");
    EXPECT_NE(std::string(e.what()).find("no results"), std::string::npos);
  }
}

TEST(Table, CsvAndJsonRoundTrip) {
  auto c = validate(kv_of("experiment = norm\nd = 1\nresolution = 64\ncount = 3\nkmax = 4\n"));
  auto t = run(c);
  ASSERT_EQ(t.rows.size(), 3u);
  auto j = nlohmann::json::parse(to_json(t));
  ASSERT_EQ(j.size(), t.rows.size());
  std::istringstream csv(to_csv(t));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(split_csv(line), t.columns);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::getline(csv, line);
    auto cells = split_csv(line);
    ASSERT_EQ(cells.size(), t.columns.size());
    for (std::size_t k = 0; k < t.columns.size(); ++k) {
      const auto& cell = t.rows[r][k];
      const auto& jv = j[r][t.columns[k]];
      if (auto d = std::get_if<double>(&cell)) {
        EXPECT_EQ(jv.get<double>(), *d);
        EXPECT_EQ(std::strtod(cells[k].c_str(), nullptr), *d);
      } else if (auto i = std::get_if<long long>(&cell)) {
        EXPECT_EQ(jv.get<long long>(), *i);
        EXPECT_EQ(std::stoll(cells[k]), *i);
      } else if (auto s = std::get_if<std::string>(&cell)) {
        EXPECT_EQ(jv.get<std::string>(), *s);
        EXPECT_EQ(cells[k], *s);
      } else {
        EXPECT_TRUE(jv.is_null());
        EXPECT_EQ(cells[k], "");
      }
    }
  }
}

TEST(Experiments, ZeroFunctionNormsVanish) {
  auto c = validate(kv_of("experiment = norm\nfamily = zero\nd = 2\nresolution = 32\n"));
  auto t = run(c);
  ASSERT_EQ(t.rows.size(), 1u);
  const auto cols = result_columns(Experiment::norm);
  const std::size_t first = t.columns.size() - cols.size();
  for (std::size_t k = first + 2; k < t.columns.size(); ++k) EXPECT_EQ(std::get<double>(t.rows[0][k]), 0.0) << t.columns[k];
}

TEST(Experiments, ColumnsMatchDescription) {
  for (const auto& [name, e] : experiment_names()) {
    auto cols = result_columns(e);
    EXPECT_FALSE(cols.empty()) << name;
  }
  EXPECT_NE(describe_columns().find("ratio_diff_fourier"), std::string::npos);
}

TEST(Experiments, DeterministicAcrossWorkerCounts) {
  auto c = validate(kv_of("experiment = equiv\nresolution = 32\ncount = 4\nkmax = 2\n"));
  ::setenv("MIXNORM_WORKERS", "1", 1);
  const auto a = render(run(c), "csv");
  ::setenv("MIXNORM_WORKERS", "5", 1);
  const auto b = render(run(c), "csv");
  ::unsetenv("MIXNORM_WORKERS");
  EXPECT_EQ(a, b);
}

TEST(Cli, WritesOutputAndSidecar) {
  const auto out = scratch("norm.csv");
  fs::remove(out);
  EXPECT_EQ(run_cli("norm --d 1 --resolution 64 --count 2 --output " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out));
  auto meta = nlohmann::json::parse(slurp(out.string() + ".meta.json"));
  EXPECT_EQ(meta["experiment"], "norm");
  EXPECT_EQ(meta["rows"], 2);
  EXPECT_TRUE(meta.contains("wall_seconds"));
  EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
}

TEST(Cli, ConfigFileAndOverrides) {
  const auto cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "experiment = norm\nd = 1\nresolution = 64\ncount = 2\nformat = json\n";
  }
  const auto out = scratch("run.json");
  EXPECT_EQ(run_cli("--config " + cfg.string() + " --count=3 --output " + out.string()), 0);
  auto j = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["count"], "3");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("norm --bogus 1"), 2);
  EXPECT_EQ(run_cli("norm --p 0.5"), 2);
  EXPECT_EQ(run_cli("unknown_experiment"), 2);
  EXPECT_EQ(run_cli("--config /nonexistent/dir/x.cfg"), 4);
  EXPECT_EQ(run_cli("norm --d 1 --resolution 64 --count 1 --output /nonexistent/dir/out.csv"), 4);
  EXPECT_EQ(run_cli("--describe"), 0);
}
