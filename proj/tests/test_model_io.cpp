#include <doctest.h>

#include "lathop/model_io.hpp"
#include "lathop/synthesis.hpp"
#include "test_support.hpp"

using namespace lathop;
using nlohmann::json;

TEST_CASE("model JSON round trip is bit exact") {
  testing::Rng rng(83);
  for (int t = 0; t < 10; ++t) {
    const auto mdl = t % 2 ? testing::random_model(Lattice(2, {5, 6, 1}, 0.37), 1, rng)
                           : testing::random_model(Lattice(1, 11, 0.1), 2, rng);
    const std::string text = model_to_json(mdl).dump(2);
    const auto back = model_from_json(parse_json_text(text));
    CHECK(back.lattice() == mdl.lattice());
    CHECK(back.kernel().amplitudes() == mdl.kernel().amplitudes());
    CHECK(back.zfield() == mdl.zfield());
    CHECK(back.onsite_im() == mdl.onsite_im());
    CHECK(model_to_json(back).dump(2) == text);
  }
}

TEST_CASE("provenance is written and tolerated on read") {
  const auto mdl = synthesize_free(1.0, Lattice(1, 8, 0.5));
  const json j = model_to_json(mdl, {{"tool_version", "x"}});
  CHECK(j.at("provenance").at("tool_version") == "x");
  CHECK_NOTHROW(model_from_json(j));
  CHECK_FALSE(model_to_json(mdl).contains("provenance"));
}

TEST_CASE("strict model parsing") {
  const json good = model_to_json(synthesize_free(1.0, Lattice(1, 8, 0.5)));
  auto broken = [&](auto edit) {
    json j = good;
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["extra"] = 1; })), InputError);
  CHECK_THROWS_AS(model_from_json(broken([](json& j) { j.erase("spacing"); })), InputError);
  CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["version"] = 2; })), InputError);
  CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["extents"] = {8, 8}; })), InputError);
  CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["kernel"][0]["offset"] = {0.5}; })),
                  InputError);
  CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["kernel"][0]["bogus"] = 0; })), InputError);
  CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["kernel"][0].erase("im"); })), InputError);
  CHECK_THROWS_AS(model_from_json(broken([](json& j) {
                    j["zfield"] = json::array({{{"site", {9}}, {"offset", {1}}, {"re", 0.0}, {"im", 0.0}}});
                  })),
                  InputError);
  CHECK_THROWS_AS(model_from_json(broken([](json& j) { j["kernel"].push_back(j["kernel"][0]); })),
                  InputError);
  CHECK_THROWS_AS(parse_json_text("{not json"), InputError);
  CHECK_THROWS_AS(read_text_file("/nonexistent/model.json"), InputError);
}
