// srmca: run, sweep and validate conferencing scenarios.

#include "srmca/run.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace srmca;

int
main(int argc, char** argv)
{
  CLI::App app{"Pre-fetching real-time conferencing over a simulated CCN edge"};
  app.require_subcommand(1);

  RunRequest req;
  std::uint64_t seed = 0;
  std::vector<std::string> formats;

  auto addCommon = [&] (CLI::App* cmd) {
    cmd->add_option("-s,--scenario", req.scenario, "scenario INI file or preset name")->required();
    cmd->add_option("--seed", seed, "random seed (overrides the scenario)");
    cmd->add_option("--set", req.overrides, "override, section.key=value (repeatable)");
    cmd->add_option("-o,--out", req.outDir, "output directory");
    cmd->add_option("--format", formats, "report formats: csv, json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->delimiter(',');
  };

  auto* run = app.add_subcommand("run", "run one scenario");
  addCommon(run);
  run->add_flag("--strict", req.strict, "exit 3 when an acceptance assertion fails");

  std::vector<std::uint32_t> participants;
  std::vector<std::uint64_t> seeds;
  auto* sweep = app.add_subcommand("sweep", "run a scenario over participant counts and seeds");
  addCommon(sweep);
  sweep->add_option("-p,--participants", participants, "participant counts, e.g. 3,6,9")->required()->delimiter(',');
  sweep->add_option("--seeds", seeds, "seeds, e.g. 1,2,3")->delimiter(',');

  std::string validateTarget;
  std::vector<std::string> validateOverrides;
  auto* validateCmd = app.add_subcommand("validate", "check a scenario without running it");
  validateCmd->add_option("-s,--scenario,scenario", validateTarget, "scenario INI file or preset name")->required();
  validateCmd->add_option("--set", validateOverrides, "override, section.key=value (repeatable)");

  std::string presetName;
  auto* presetCmd = app.add_subcommand("preset", "list presets, or print one as INI");
  presetCmd->add_option("name", presetName, "preset to print");

  try {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? EXIT_OK : EXIT_VALIDATION;
  }

  if (!formats.empty())
    req.formats = {formats.begin(), formats.end()};

  try {
    if (*run) {
      if (run->count("--seed"))
        req.seed = seed;
      return cmdRun(req, std::cout, std::cerr);
    }
    if (*sweep) {
      if (seeds.empty())
        seeds.push_back(sweep->count("--seed") ? seed : resolveScenario(req).seed);
      return cmdSweep(req, participants, seeds, std::cout, std::cerr);
    }
    if (*validateCmd)
      return cmdValidate(validateTarget, validateOverrides, std::cout, std::cerr);
    if (*presetCmd) {
      if (presetName.empty()) {
        for (const auto& n : presetNames())
          std::cout << n << '\n';
        return EXIT_OK;
      }
      std::cout << toIni(preset(presetName));
      return EXIT_OK;
    }
  }
  catch (const ConfigError& e) {
    for (const auto& v : e.violations())
      std::cerr << "error: " << v << '\n';
    return EXIT_VALIDATION;
  }
  catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_RUNTIME;
  }
  return EXIT_OK;
}
