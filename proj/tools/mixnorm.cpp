// mixnorm <experiment> --config <path> [--key value]...

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixnorm/core/parallel.hpp"
#include "mixnorm/runner/config.hpp"
#include "mixnorm/runner/experiments.hpp"
#include "mixnorm/runner/table.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 2, kAnomaly = 3, kIo = 4 };

// Remaining "--key value" / "--key=value" tokens become config overrides; a
// bare token names the experiment.
void apply_overrides(const std::vector<std::string>& extras, mixnorm::runner::KeyValues& kv) {
  bool named = false;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const auto& tok = extras[i];
    if (tok.rfind("--", 0) != 0) {
      if (named) throw mixnorm::ValidationError(tok, "unexpected argument");
      kv.set("experiment", tok);
      named = true;
      continue;
    }
    auto body = tok.substr(2);
    if (auto eq = body.find('='); eq != std::string::npos) {
      kv.set(body.substr(0, eq), body.substr(eq + 1));
    } else {
      if (i + 1 >= extras.size()) throw mixnorm::ValidationError(body, "missing value");
      kv.set(body, extras[++i]);
    }
  }
}

std::string meta_json(const mixnorm::runner::Table& t, double seconds) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", seconds);
  std::string out = "{\n  \"experiment\": \"" + t.experiment + "\",\n  \"rows\": " + std::to_string(t.rows.size()) +
                    ",\n  \"workers\": " + std::to_string(mixnorm::worker_count()) + ",\n  \"wall_seconds\": " + buf +
                    ",\n  \"notes\": [";
  for (std::size_t i = 0; i < t.notes.size(); ++i) out += (i ? ", " : "") + mixnorm::runner::detail::json_escape(t.notes[i]);
  return out + "]\n}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Norms of dominating mixed smoothness on sampled functions"};
  app.allow_extras();
  app.footer("Usage: mixnorm <norm|equiv|algebra|moser|localize|nikolskij|peetre|trace|embed|report> [--config FILE] [--key value]...");
  std::string config_path;
  bool describe = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_flag("--describe", describe, "print the output columns of every experiment");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }
  if (describe) {
    std::cout << mixnorm::runner::describe_columns();
    return kOk;
  }

  try {
    mixnorm::runner::KeyValues kv;
    if (!config_path.empty()) kv = mixnorm::runner::KeyValues::load(config_path);
    apply_overrides(app.remaining(), kv);
    auto cfg = mixnorm::runner::validate(kv);

    const auto t0 = std::chrono::steady_clock::now();
    auto table = mixnorm::runner::run(cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& n : table.notes) std::cerr << "note: " << n << "\n";

    const auto text = mixnorm::runner::render(table, cfg.format);
    if (cfg.output.empty()) {
      std::cout << text;
    } else {
      mixnorm::runner::write_file(cfg.output, text);
      mixnorm::runner::write_file(cfg.output + ".meta.json", meta_json(table, seconds));
    }
    return kOk;
  } catch (const mixnorm::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const mixnorm::NumericalAnomaly& e) {
    std::cerr << "numerical anomaly: " << e.what() << "\n";
    return kAnomaly;
  } catch (const mixnorm::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnomaly;
  }
}
