#include <catch_amalgamated.hpp>

#include <sstream>

#include "swlb/error.hpp"
#include "swlb/scenario_file.hpp"

using namespace swlb;
using namespace swlb::io;

namespace {

ScenarioFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "fallback");
}

std::string message_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  FAIL("expected a configuration error");
  return {};
}

}  // namespace

TEST_CASE("scenario defaults and overrides", "[scenario]") {
  const auto s = parse("# comment\nsimulation = 1\nrho = 0.8  # trailing\nb1 = 0.1\n\nreplications = 7\n");
  CHECK(s.name == "fallback");
  const auto& c = std::get<Sim1Config>(s.config);
  CHECK(c.rho == 0.8);
  CHECK(c.b1 == 0.1);
  CHECK(c.replications == 7);
  CHECK(c.population_size == 20000);
  CHECK(c.sigma_x == 4.0);
  CHECK(s.bootstrap_replicates == 2000);
  CHECK(s.level == 0.95);
}

TEST_CASE("simulation 2 keys", "[scenario]") {
  const auto s = parse("name = probit-case\nsimulation = 2\nbeta = 0.25\nsigma_v2 = 2\nbootstrap_replicates = 500\n");
  CHECK(s.name == "probit-case");
  const auto& c = std::get<Sim2Config>(s.config);
  CHECK(c.beta == 0.25);
  CHECK(c.sigma_v2 == 2.0);
  CHECK(c.mu_x == 1.0);
  CHECK(s.bootstrap_replicates == 500);
}

TEST_CASE("scenario errors name the offending key", "[scenario]") {
  CHECK_THAT(message_of("simulation = 1\nsigma_q = 3\n"), Catch::Matchers::ContainsSubstring("sigma_q"));
  CHECK_THAT(message_of("simulation = 1\nbeta = 0.3\n"), Catch::Matchers::ContainsSubstring("beta"));
  CHECK_THAT(message_of("rho = 0.2\n"), Catch::Matchers::ContainsSubstring("simulation"));
  CHECK_THAT(message_of("simulation = 3\n"), Catch::Matchers::ContainsSubstring("simulation"));
  CHECK_THAT(message_of("simulation = 1\nrho = 0.2\nrho = 0.3\n"), Catch::Matchers::ContainsSubstring("rho"));
  CHECK_THAT(message_of("simulation = 1\nrho = abc\n"), Catch::Matchers::ContainsSubstring("rho"));
  CHECK_THAT(message_of("simulation = 1\nreplications = 0\n"), Catch::Matchers::ContainsSubstring("replications"));
  CHECK_THAT(message_of("simulation = 1\njust text\n"), Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("shipped scenario files parse", "[scenario]") {
  for (const char* name : {"sim1-representative", "sim1-high-representativeness", "sim1-low-representativeness",
                           "sim2-representative", "sim2-high-representativeness", "sim2-low-representativeness"}) {
    INFO(name);
    const auto s = load_scenario(std::string(SWLB_SOURCE_DIR) + "/scenarios/" + name + ".scenario");
    CHECK(s.name == name);
    std::visit([](const auto& c) { CHECK(c.population_size == 20000); }, s.config);
  }
}
