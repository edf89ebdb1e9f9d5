// bpdrive: run, scan and validate driven-chain scenarios.
#include "bpdrive/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace bpdrive;

namespace {

enum Exit { ok = 0, usage = 1, invalid = 2, partial = 3, failure = 4 };

ScenarioConfig resolve(const std::string& ref, bool validate) {
  if (fs::exists(ref)) return load_scenario(ref, validate);
  if (auto c = bundled_scenario(ref)) return *c;
  throw ConfigError({"'" + ref + "' is neither a config file nor a bundled scenario id (see list-scenarios)"});
}

void report(const ConfigError& e) {
  std::cerr << "error: invalid config\n";
  for (const auto& m : e.errors()) std::cerr << "  - " << m << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven XXZ chain: bound-pair and magnon transport scenarios"};
  app.set_version_flag("--version", std::string(code_version));
  app.require_subcommand(1);

  std::string config;
  std::string out;
  double dt = 0.0;
  int threads = 1;

  auto add_run_opts = [&](CLI::App* sub) {
    sub->add_option("config", config, "Config file or bundled scenario id")->required();
    sub->add_option("--out", out, "Output directory (default: output_dir from the config)");
    sub->add_option("--dt", dt, "Step size in scaled time; must divide 2 pi and be <= 2 pi/200");
    sub->add_option("--threads", threads, "Worker threads for grid points (1 = sequential)")
        ->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "Run every grid point, writing series and summary tables");
  add_run_opts(run);
  auto* scan = app.add_subcommand("scan", "Run the grid, writing summary tables only");
  add_run_opts(scan);
  auto* validate = app.add_subcommand("validate", "Check a config and report every problem");
  validate->add_option("config", config, "Config file or bundled scenario id")->required();
  auto* list = app.add_subcommand("list-scenarios", "List bundled scenario ids");
  bool print_yaml = false;
  list->add_flag("--yaml", print_yaml, "Print each bundled config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Exit::ok : Exit::usage;
  }

  try {
    if (*list) {
      for (const auto& id : scenario_ids()) {
        auto c = bundled_scenario(id);
        if (!c) continue;
        if (print_yaml) std::cout << "# " << id << "\n" << to_yaml(*c) << "\n";
        else std::cout << id << "\t" << c->description << "\n";
      }
      return Exit::ok;
    }
    if (*validate) {
      ScenarioConfig c = resolve(config, false);
      const auto v = c.violations();
      if (v.empty()) {
        std::cout << "ok: " << c.id << " (" << c.scan.points().size() << " grid points)\n";
        return Exit::ok;
      }
      report(ConfigError(v));
      return Exit::invalid;
    }

    ScenarioConfig c = resolve(config, true);
    if (dt > 0.0) {
      c.propagator.dt = dt;
      if (auto v = c.propagator.violations(); !v.empty()) throw ConfigError({"--dt: " + v.front()});
      c.propagator.dt = two_pi / c.propagator.steps_per_period();
    }
    RunOptions opts;
    opts.out_dir = out;
    opts.threads = threads;
    opts.summary_only = static_cast<bool>(*scan);
    const RunManifest m = run_scenario(c, opts);
    const fs::path dir = out.empty() ? fs::path(c.output_dir) : fs::path(out);
    std::cout << m.scenario_id << ": " << m.points << " point(s), " << m.outputs.size() << " file(s) in " << dir.string()
              << ", max norm drift " << detail::format_double(m.max_norm_drift) << ", "
              << detail::fmt(m.wall_time_s) << " s\n";
    if (!m.complete) {
      std::cerr << "error: run incomplete (partial outputs flagged in manifest)\n";
      for (const auto& f : m.failures) std::cerr << "  - " << f << "\n";
      return Exit::partial;
    }
    return Exit::ok;
  } catch (const ConfigError& e) {
    report(e);
    return Exit::invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::failure;
  }
}
