#include <catch_amalgamated.hpp>

#include "test_support.hpp"

#include <dgla/cli.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dgla;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir;

    Workspace()
    {
        dir = fs::temp_directory_path() / ("dgla_cli_" + std::to_string(::getpid()) + "_"
                                           + std::to_string(counter()++));
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    static int& counter()
    {
        static int n = 0;
        return n;
    }

    std::string put(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    }
};

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

const char* s2 = R"({"generators": [{"name": "a", "degree": 1}]})";
const char* cone = R"({"generators": [{"name": "x", "degree": 1}, {"name": "y", "degree": 2}],
                      "differential": {"y": "x"}})";
const char* lx = R"({"generators": [{"name": "x", "degree": 1}]})";
const char* lxy = R"({"generators": [{"name": "x", "degree": 1}, {"name": "y", "degree": 1}]})";

} // namespace

TEST_CASE("validate")
{
    Workspace ws;
    CHECK(run({"validate", ws.put("s2.json", s2)}).code == 0);

    auto bad = run({"validate", ws.put("bad.json", R"({"generators": [{"name": "x", "degree": 1},
        {"name": "y", "degree": 1}], "differential": {"y": "x"}})")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("y") != std::string::npos);

    auto malformed = run({"validate", ws.put("m.json", "{\"generators\": [{\"name\": \"x\", \"degree\": 1}],\n"
                                                       "  \"differential\": {\"x\": \"[x,,x]\"}}")});
    CHECK(malformed.code == 1);
    CHECK(malformed.err.find("line 2") != std::string::npos);

    auto dsq = run({"validate", ws.put("d2.json", R"({"generators": [{"name": "x", "degree": 1},
        {"name": "y", "degree": 2}, {"name": "z", "degree": 3}], "differential": {"y": "x", "z": "y"}})")});
    CHECK(dsq.code == 2);
    CHECK(dsq.out.find("\"z\"") != std::string::npos);

    auto zero = run({"validate", ws.put("z.json", R"({"generators": [{"name": "t", "degree": 0}]})")});
    CHECK(zero.code == 2);
    CHECK(zero.err.find("NotSimplyConnected") != std::string::npos);
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 1);
    CHECK(run({"homology", "missing.json"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"homology", "/nonexistent/x.json", "--max-degree", "2"}).code == 2);
}

TEST_CASE("homology")
{
    Workspace ws;
    auto r = run({"homology", ws.put("s2.json", s2), "--max-degree", "3"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["homology"][0]["dim"] == 1);
    CHECK(j["homology"][1]["dim"] == 1);
    CHECK(j["homology"][2]["dim"] == 0);

    auto e = Json::parse(run({"homology", ws.put("e.json", R"({"generators": []})"), "--max-degree", "3"}).out);
    for (const auto& row : e["homology"])
        CHECK(row["dim"] == 0);

    auto c = Json::parse(run({"homology", ws.put("c.json", cone), "--max-degree", "3"}).out);
    for (const auto& row : c["homology"])
        CHECK(row["dim"] == 0);

    auto t = run({"homology", ws.put("t.json", s2), "--max-degree", "2", "--format", "table"});
    CHECK(t.code == 0);
    CHECK(t.out.find("dim H") != std::string::npos);
}

TEST_CASE("minimal-model")
{
    Workspace ws;
    auto base = ws.put("lx.json", lx);
    auto id = run({"minimal-model", base, base, ws.put("id.json", R"({"images": {"x": "x"}})"), "--max-degree", "3"});
    REQUIRE(id.code == 0);
    auto j = Json::parse(id.out);
    CHECK(j["generators"].size() == 1);
    for (const auto& st : j["stages"]) {
        CHECK(st["A"].empty());
        CHECK(st["B"].empty());
    }

    auto out = (ws.dir / "wedge_model.json").string();
    auto wedge = run({"minimal-model", base, ws.put("lxy.json", lxy), ws.put("inc.json", R"({"images": {"x": "x"}})"),
                      "--max-degree", "3", "--out", out});
    REQUIRE(wedge.code == 0);
    CHECK(wedge.out.empty());
    auto m = load_model(out);
    CHECK(m.stages.at(0).a.size() == 1);
    std::size_t bs = 0;
    for (const auto& st : m.stages)
        bs += st.b.size();
    CHECK(bs == 0);
    CHECK(verify_model(m, 3).ok());

    auto bad = run({"minimal-model", ws.put("b0.json", R"({"generators": [{"name": "x", "degree": 0}]})"),
                    ws.put("t.json", lxy), ws.put("f.json", R"({"images": {"x": "x"}})"), "--max-degree", "3"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("NotSimplyConnected") != std::string::npos);
}

TEST_CASE("minimal-model output round trips through verification")
{
    dgla::testing::Rng rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        Workspace ws;
        auto inst = dgla::testing::random_map(rng);
        Json images = Json::object();
        const auto& gens = inst.base->generators();
        for (std::size_t g = 0; g < gens.size(); ++g)
            images[gens[g].name] = expr_string(inst.target->algebra(), {gens[g].degree, inst.images[g]});
        auto out = (ws.dir / "model.json").string();
        auto r = run({"minimal-model", ws.put("b.json", dgla_to_json(*inst.base).dump()),
                      ws.put("t.json", dgla_to_json(*inst.target).dump()),
                      ws.put("f.json", Json{{"images", images}}.dump()), "--max-degree", "4", "--out", out});
        REQUIRE(r.code == 0);
        auto m = load_model(out);
        CHECK(verify_model(m, 4, inst.images).ok());
    }
}

namespace {

const char* model = R"({"generators": [{"name": "x", "degree": 1}, {"name": "a", "degree": 2},
                                       {"name": "b", "degree": 4}],
                       "differential": {"b": "[x,a]"}, "base": ["x"]})";

} // namespace

TEST_CASE("invert")
{
    Workspace ws;
    auto m = ws.put("m.json", model);
    auto r = run({"invert", m, ws.put("f.json", R"({"images": {"a": "2*a", "b": "2*b"}})"), "--max-degree", "5"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["inverse"]["images"]["a"] == "1/2*a");
    CHECK(j["inverse"]["images"]["x"] == "x");
    CHECK(j["transcript"].size() == 6);

    auto bad = run({"invert", m, ws.put("g.json", R"({"images": {"a": "0", "b": "0"}})"), "--max-degree", "5"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("NotQuasiIso") != std::string::npos);
}

TEST_CASE("equivalent")
{
    Workspace ws;
    auto m = ws.put("m.json", model);
    auto id = ws.put("id.json", R"({"images": {}})");
    auto inner = ws.put("inner.json", R"({"images": {"b": "b - [x,[x,a]]"}})");
    auto r = run({"equivalent", m, id, inner, "--max-degree", "5"});
    CHECK(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["verdict"] == "equivalent");
    CHECK(j["witness"].contains("b"));

    auto s = run({"equivalent", m, id, ws.put("s.json", R"({"images": {"a": "2*a", "b": "2*b"}})"), "--max-degree",
                  "5"});
    CHECK(s.code == 3);
    CHECK(Json::parse(s.out)["verdict"] == "notEquivalent");
}

TEST_CASE("pi0")
{
    Workspace ws;
    auto r = run({"pi0", ws.put("m.json", R"({"generators": [{"name": "x", "degree": 1}, {"name": "w", "degree": 2}],
                                              "base": ["x"]})"),
                  "--max-degree", "3"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["dims"]["h0"] == 2);
    CHECK(j["truncationDegree"] == 2);
}

TEST_CASE("outputs are deterministic")
{
    Workspace ws;
    auto m = ws.put("m.json", model);
    auto f = ws.put("f.json", R"({"images": {"a": "2*a + [x,x]", "b": "2*b"}})");
    std::vector<std::vector<std::string>> calls = {
        {"validate", m},
        {"homology", m, "--max-degree", "5"},
        {"minimal-model", ws.put("lx.json", lx), ws.put("lxy.json", lxy), ws.put("i.json", R"({"images": {"x": "x"}})"),
         "--max-degree", "5"},
        {"invert", m, f, "--max-degree", "5"},
        {"equivalent", m, f, f, "--max-degree", "5"},
        {"pi0", m, "--max-degree", "5"},
    };
    for (const auto& c : calls) {
        auto a = run(c), b = run(c);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
        CHECK_FALSE(a.out.empty());
    }
}
