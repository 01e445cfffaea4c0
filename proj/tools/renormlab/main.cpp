#include <chrono>
#include <fstream>
#include <sstream>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <renormlab/errors.hpp>
#include <renormlab/library.hpp>

#include "config.hpp"
#include "output.hpp"
#include "scenarios.hpp"

#ifndef RENORMLAB_VERSION
#define RENORMLAB_VERSION "0.0.0"
#endif

namespace {

enum Exit { Ok = 0, Failure = 1, BadConfig = 2, BadPrecondition = 3, NumericFailure = 4 };

struct Flags {
  std::string config;
  std::string out;
  long long seed = -1;
  bool verbose = false;
};

int run(const Flags& flags, const std::string& forced_kind) {
  using namespace rltool;
  const auto started = std::chrono::steady_clock::now();
  try {
    Section cfg = load_config(flags.config);
    std::string kind = cfg.has("kind") ? cfg.string("kind") : forced_kind;
    if (kind.empty()) cfg.fail("kind", "missing key 'kind'");
    if (!forced_kind.empty() && kind != forced_kind)
      cfg.fail("kind", "config kind '" + kind + "' does not match subcommand '" + forced_kind + "'");
    const std::string name = cfg.string_or("name", std::filesystem::path(flags.config).stem().string());
    const long seed_cfg = cfg.integer_or("seed", 0);
    if (seed_cfg < 0) cfg.fail("seed", "seed must be nonnegative");
    std::string dir = ".";
    bool csv = true;
    if (auto o = cfg.optional_section("output")) {
      dir = o->string_or("dir", dir);
      csv = o->boolean_or("csv", csv);
      o->finish();
    }
    if (!flags.out.empty()) dir = flags.out;

    RunContext ctx;
    ctx.seed = flags.seed >= 0 ? static_cast<std::uint64_t>(flags.seed) : static_cast<std::uint64_t>(seed_cfg);
    ctx.verbose = flags.verbose;

    ScenarioOutput res = run_scenario(kind, cfg, ctx);

    std::ifstream in(flags.config);
    std::stringstream text;
    text << in.rdbuf();
    renormlab::Json doc;
    doc["scenario"] = {{"kind", kind}, {"name", name}, {"config", text.str()}};
    doc["status"] = res.status;
    doc["report"] = std::move(res.report);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    doc["provenance"] = {{"tool", "renormlab"}, {"version", RENORMLAB_VERSION}, {"seed", ctx.seed},
                         {"wall_time_seconds", wall}};

    const std::filesystem::path base = std::filesystem::path(dir) / name;
    write_atomic(base.string() + ".json", doc.dump(2) + "\n");
    if (csv)
      for (const auto& [suffix, table] : res.csv) write_atomic(base.string() + "_" + suffix + ".csv", to_csv(table));
    if (flags.verbose) std::cerr << "wrote " << base.string() << ".json (status " << doc["status"].get<std::string>()
                                 << ")\n";
    return Ok;
  } catch (const ConfigError& e) {
    std::cerr << flags.config << ":" << e.line() << ":" << e.column() << ": error: " << e.what() << "\n";
    return BadConfig;
  } catch (const renormlab::ParseError& e) {
    std::cerr << flags.config << ":" << e.line() << ":" << e.column() << ": error: " << e.what() << "\n";
    return BadConfig;
  } catch (const renormlab::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return BadPrecondition;
  } catch (const renormlab::DimensionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return BadPrecondition;
  } catch (const renormlab::SelectionIncomplete& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return NumericFailure;
  } catch (const renormlab::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return NumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Failure;
  }
}

void list_library(bool json) {
  if (json) {
    renormlab::Json out = renormlab::Json::array();
    for (const auto& e : renormlab::catalog())
      out.push_back({{"name", e.name}, {"kind", e.kind}, {"text", e.text}, {"description", e.description}});
    std::cout << out.dump(2) << "\n";
    return;
  }
  for (const auto& e : renormlab::catalog())
    std::cout << e.kind << "\t" << e.name << "\t" << e.description << "\n\t" << e.text << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Renormalization experiments for harmonic functions, tube domains and group targets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RENORMLAB_VERSION);

  Flags flags;
  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config,-c", flags.config, "Scenario config (YAML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Seed overriding the config")->check(CLI::NonNegativeNumber);
    sub->add_option("--out,-o", flags.out, "Output directory");
    sub->add_flag("--verbose,-v", flags.verbose, "Progress on stderr");
  };

  auto* run_cmd = app.add_subcommand("run", "Run the scenario named by the config's kind");
  add_run_flags(run_cmd);
  std::vector<std::pair<CLI::App*, std::string>> kind_cmds;
  for (const auto& k : rltool::scenario_kinds()) {
    auto* sub = app.add_subcommand(k, "Run a " + k + " scenario");
    add_run_flags(sub);
    kind_cmds.emplace_back(sub, k);
  }
  bool json = false;
  auto* list_cmd = app.add_subcommand("list", "Print the built-in catalog");
  list_cmd->alias("library");
  list_cmd->add_flag("--json", json, "Print as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : BadConfig;
  }

  if (list_cmd->parsed()) {
    list_library(json);
    return Ok;
  }
  if (run_cmd->parsed()) return run(flags, "");
  for (const auto& [sub, k] : kind_cmds)
    if (sub->parsed()) return run(flags, k);
  return Failure;
}
