#include "srmca/config.hpp"

#include <doctest.h>

using namespace srmca;

namespace {

bool
mentions(const std::vector<std::string>& problems, const std::string& text)
{
  return std::any_of(problems.begin(), problems.end(),
                     [&text] (const std::string& p) { return p.find(text) != std::string::npos; });
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("every preset validates")
{
  for (const auto& name : presetNames()) {
    CAPTURE(name);
    CHECK(validate(preset(name)).empty());
  }
  CHECK_THROWS_AS(preset("baseline-4p"), ConfigError);
}

TEST_CASE("preset shapes")
{
  CHECK(preset("baseline-15p").topology.ues == 15);
  const auto fanin = preset("fanin-46p");
  CHECK(fanin.topology.ues == 46);
  CHECK(fanin.topology.consumers.size() == 1);
  CHECK(fanin.topology.producers.size() == 45);
  const auto fr = preset("failure-recovery");
  CHECK(std::count_if(fr.script.begin(), fr.script.end(),
                      [] (const auto& e) { return e.kind == ScriptEventKind::linkDown; }) == 1);
}

TEST_CASE("omega outside (0,1) is reported")
{
  auto cfg = preset("baseline-3p");
  applyOverride(cfg, "producer.omega=1.5");
  CHECK(mentions(validate(cfg), "ω must be in (0,1)"));
}

TEST_CASE("every violation is listed")
{
  auto cfg = preset("baseline-3p");
  cfg.producer.xi = 0.5;
  cfg.consumer.beta = 2.0;
  cfg.topology.homing["ue1"] = "csr9";
  const auto problems = validate(cfg);
  CHECK(mentions(problems, "ξ must be > 1"));
  CHECK(mentions(problems, "beta must be in (0,1)"));
  CHECK(mentions(problems, "unknown VSER 'csr9'"));
}

TEST_CASE("script referencing an unknown UE")
{
  auto cfg = preset("baseline-3p");
  cfg.script.push_back({1000.0, ScriptEventKind::leave, "ue7", ""});
  CHECK(mentions(validate(cfg), "unknown UE"));
}

TEST_CASE("bad override names the key")
{
  auto cfg = preset("baseline-3p");
  try {
    applyOverride(cfg, "producer.bogus=3");
    FAIL("no error");
  }
  catch (const ConfigError& e) {
    CHECK(mentions(e.violations(), "producer.bogus"));
  }
  CHECK_THROWS_AS(applyOverride(cfg, "novalue"), ConfigError);
  CHECK_THROWS_AS(applyOverride(cfg, "producer.theta=abc"), ConfigError);
}

TEST_CASE("INI round trip")
{
  for (const auto& name : presetNames()) {
    CAPTURE(name);
    const auto cfg = preset(name);
    const auto text = toIni(cfg);
    CHECK(toIni(parseScenario(text)) == text);
  }
}

TEST_CASE("parse errors are collected")
{
  const std::string text = "[producer]\ntheta = 1000\nbogus = 1\n[nowhere]\nx = 1\n";
  try {
    parseScenario(text);
    FAIL("no error");
  }
  catch (const ConfigError& e) {
    CHECK(e.violations().size() == 2);
  }
}

TEST_CASE("derived per-media parameters")
{
  const auto cfg = preset("baseline-3p");
  const auto video = producerConfigFor(cfg, MediaType::video);
  CHECK(video.nTheta() == 25);
  CHECK(video.notifyInterval() == doctest::Approx(1000.0));
  const auto audio = producerConfigFor(cfg, MediaType::audio);
  CHECK(audio.frameInterval() == doctest::Approx(20.0));
  CHECK(audio.notifyInterval() == doctest::Approx(1000.0));
  const auto c = consumerConfigFor(cfg, MediaType::audio);
  CHECK(c.e2eTarget == doctest::Approx(150.0));
  CHECK(interestLifetime(cfg) == doctest::Approx(1000.0 + 4000.0 + 400.0));
}

}
