#include <doctest.h>

#include <cmath>

#include "dseq/report.hpp"

using namespace dseq;
using report::Json;

TEST_CASE("float formatting uses 17 significant digits") {
    CHECK(report::format_double(0.1) == "0.10000000000000001");
    CHECK(report::format_double(1.0) == "1");
    CHECK(report::format_double(1.0 / 3) == "0.33333333333333331");
}

TEST_CASE("dump layout") {
    Json j;
    j["b"] = 1;
    j["a"] = Json::array({1.5, 2});
    j["nested"] = Json::array({Json::array({1, 2}), Json::array({3, 4})});
    j["objects"] = Json::array({Json{{"x", 0.25}}});
    j["empty"] = Json::object();
    j["none"] = Json::array();
    j["bad"] = NAN;
    j["inf"] = INFINITY;
    j["text"] = "q\"uote";
    CHECK(report::dump(j) == R"({
  "b": 1,
  "a": [1.5, 2],
  "nested": [[1, 2], [3, 4]],
  "objects": [
    {
      "x": 0.25
    }
  ],
  "empty": {},
  "none": [],
  "bad": null,
  "inf": null,
  "text": "q\"uote"
}
)");
}

TEST_CASE("window samples and verdicts") {
    const WindowSample s{Window(10, 20), Defect{0.5, Witness{IndexPair(11, 11), IndexPair(11, 12), 0.5}}};
    const auto j = report::to_json(s);
    CHECK(j.dump() == R"({"lo":10,"hi":20,"defect":0.5,"witness":[[11,11],[11,12]],"value":0.5})");

    const WindowSample none{Window(0, 2), Defect{}};
    CHECK(report::to_json(none)["witness"].is_null());

    ConvergenceVerdict v;
    v.report.property = Property::p_limit(0.5);
    v.tag = VerdictTag::ConsistentUpTo;
    v.horizon = 7;
    v.epsilon = 0.1;
    const auto jv = report::to_json(v);
    CHECK(jv["property"] == "p-limit(0.5)");
    CHECK(jv["tag"] == "consistent-up-to");
    std::vector<std::string> keys;
    for (const auto& [k, _] : jv.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"property", "tag", "horizon", "epsilon", "falsifier", "spot_checked", "windows",
                                           "worst_witness"});
}

TEST_CASE("defect csv") {
    const std::vector<WindowSample> samples{{Window(1, 4), Defect{0.75, std::nullopt}}, {Window(4, 16), Defect{}}};
    CHECK(report::defect_csv(samples) == "window_lo,window_hi,defect\n1,4,0.75\n4,16,0\n");
}
