#include <catch_amalgamated.hpp>

#include "test_support.hpp"

#include <dgla/io.hpp>

using namespace dgla;

namespace {

Source mem(const std::string& text) { return {text, {}}; }

std::shared_ptr<Dgla> doc(const std::string& text)
{
    Source s = mem(text);
    return parse_dgla(s, parse_json(s));
}

} // namespace

TEST_CASE("quasi-free documents round trip")
{
    auto a = doc(R"({"generators": [{"name": "x", "degree": 1}, {"name": "y", "degree": 1},
                                    {"name": "w", "degree": 4}],
                    "differential": {"w": "[x,[x,y]]"}})");
    Json j = dgla_to_json(*a);
    CHECK(j["differential"]["w"] == "1/2*[[x,x],y]"); // [x,[x,y]] = 1/2 [[x,x],y] for odd x
    auto b = doc(j.dump());
    CHECK(dgla_to_json(*b) == j);
    b->set_degree_bound(4);
    a->set_degree_bound(4);
    for (int k = 1; k <= 4; ++k)
        CHECK(a->homology(k).dim() == b->homology(k).dim());
}

TEST_CASE("finite documents round trip")
{
    // Truncation of L(a), |a| = 1: e1_0 = a, e2_0 = [a,a].
    auto a = doc(R"({"dims": {"1": 1, "2": 1}, "brackets": [[[1, 0], [1, 0], ["1"]]]})");
    a->set_degree_bound(3);
    CHECK(a->homology(1).dim() == 1);
    CHECK(a->homology(2).dim() == 1);
    CHECK(a->homology(3).dim() == 0);
    Json j = dgla_to_json(*a);
    CHECK(dgla_to_json(*doc(j.dump())) == j);

    auto cone = doc(R"({"dims": {"1": 1, "2": 1}, "differential": {"2": [["1"]]}})");
    cone->set_degree_bound(2);
    CHECK(cone->homology(1).dim() == 0);
    CHECK(cone->homology(2).dim() == 0);
}

TEST_CASE("finite documents are checked")
{
    CHECK_THROWS_AS(doc(R"({"dims": {"1": 1}, "differential": {"2": [["1"]]}})"), Error);
    CHECK_THROWS_AS(doc(R"({"dims": {"0": 1}})"), Error);
    CHECK_THROWS_AS(doc(R"({"dims": {"1": 1}, "brackets": [[[1, 0], [1, 0]]]})"), ParseError);
}

TEST_CASE("parse errors carry document positions")
{
    try {
        doc("{\"generators\": [{\"name\": \"x\", \"degree\": 1}],\n \"differential\": {\"x\": \"[x,\"}}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() > 18);
    }
    try {
        doc("{\n  \"generators\": [,]\n}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    try {
        doc(R"({"generators": [{"name": "x", "degree": 1}], "differential": {"x": "[q,x]"}})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownGenerator);
    }
    try {
        doc(R"({"generators": [{"name": "x", "degree": 0}]})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotSimplyConnected);
    }
}

TEST_CASE("model documents round trip")
{
    auto base = FreeDgla::from_polys({{"x", 1}}, {});
    auto target = FreeDgla::from_polys({{"x", 1}, {"y", 1}}, {});
    auto m = build_minimal_model(base, target, {target->free_algebra().generator(0).coords}, 3);
    Json j = model_to_json(m);
    Source s = mem(j.dump(2));
    auto back = parse_model(s, parse_json(s));
    CHECK(model_to_json(back) == j);
    CHECK(back.base_count == 1);
    REQUIRE(back.structure_map);
    CHECK(verify_model(back, 3).ok());

    Source bad = mem(R"({"generators": [{"name": "w", "degree": 2}, {"name": "x", "degree": 1}], "base": ["x"]})");
    CHECK_THROWS_AS(parse_model(bad, parse_json(bad)), Error);
}
