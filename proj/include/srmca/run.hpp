#ifndef SRMCA_RUN_HPP
#define SRMCA_RUN_HPP

#include "srmca/metrics.hpp"

#include <iosfwd>

namespace srmca {

enum ExitCode : int {
  EXIT_OK = 0,
  EXIT_VALIDATION = 1,
  EXIT_RUNTIME = 2,
  EXIT_STRICT = 3,
};

struct RunRequest
{
  std::string scenario;                  ///< INI path or preset name
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;    ///< "section.key=value"
  std::string outDir;                    ///< empty: no artifacts
  std::set<std::string> formats{"csv", "json"};
  bool strict = false;
};

/// File if it exists, else a preset name; then seed and overrides.
/// \throw ConfigError
ScenarioConfig
resolveScenario(const RunRequest& req);

/// Same scenario with n participants. Fan-in shapes keep their consumers and
/// make every other UE a producer; all joins move to the earliest join time.
ScenarioConfig
withParticipants(ScenarioConfig cfg, std::uint32_t n);

struct StrictCheck
{
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Assertions checked under --strict.
std::vector<StrictCheck>
strictChecks(const RunResult& run);

/** \brief Runs one scenario and writes its artifacts.
 *
 *  Artifacts are staged in a hidden directory and moved into place only after
 *  the run succeeds; on failure the output directory holds only error.txt.
 */
int
cmdRun(const RunRequest& req, std::ostream& out, std::ostream& err);

int
cmdSweep(const RunRequest& base, const std::vector<std::uint32_t>& participants,
         const std::vector<std::uint64_t>& seeds, std::ostream& out, std::ostream& err);

int
cmdValidate(const std::string& scenario, const std::vector<std::string>& overrides, std::ostream& out,
            std::ostream& err);

} // namespace srmca

#endif // SRMCA_RUN_HPP
