#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "dmx/runner.hpp"

namespace {

int do_run(const std::string& path, bool oracle_mode) {
  dmx::ScenarioConfig cfg = dmx::parse_config_file(path);
  if (oracle_mode) cfg.mode = dmx::RunMode::oracle;
  return dmx::run_scenario(cfg);
}

int do_compare(const std::string& a, const std::string& b, const std::string& tolspec) {
  const dmx::CsvSeries sa = dmx::read_csv(a);
  const dmx::CsvSeries sb = dmx::read_csv(b);
  const dmx::CompareSpec spec = dmx::CompareSpec::parse(tolspec);
  const dmx::CompareReport rep = dmx::compare_runs(sa, sb, spec);
  for (std::size_t c = 1; c < rep.columns.size(); ++c)
    std::printf("%s,%.6e\n", rep.columns[c].c_str(), rep.max_rel[c]);
  std::printf("RESULT,%s\n", rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-species disparate-mass kinetic solver"};
  app.require_subcommand(1);

  std::string cfg_path, cmp_a, cmp_b, tolspec = "rel=1e-6";

  CLI::App* run = app.add_subcommand("run", "run a scenario from a config file");
  run->add_option("config", cfg_path, "config file")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "run the macroscopic relaxation oracle");
  oracle->add_option("config", cfg_path, "config file")->required();

  CLI::App* cmp = app.add_subcommand("compare", "compare two CSV time series");
  cmp->add_option("a", cmp_a, "first series")->required();
  cmp->add_option("b", cmp_b, "second series")->required();
  cmp->add_option("tolspec", tolspec, "e.g. rel=1e-3,abs=1e-12,interp,col:T_L=5e-2");

  CLI::App* st = app.add_subcommand("selftest", "run the built-in invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 1 : 0;
  }

  try {
    if (run->parsed()) return do_run(cfg_path, false);
    if (oracle->parsed()) return do_run(cfg_path, true);
    if (cmp->parsed()) return do_compare(cmp_a, cmp_b, tolspec);
    if (st->parsed()) return dmx::selftest();
  } catch (const dmx::validation_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const dmx::invalid_parameter& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const dmx::mismatched_series& e) {
    std::fprintf(stderr, "comparison error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  }
  return 1;
}
