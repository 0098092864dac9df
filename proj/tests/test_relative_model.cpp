#include <catch_amalgamated.hpp>

#include "test_support.hpp"

#include <dgla/relative_model.hpp>

using namespace dgla;
using dgla::testing::Rng;

namespace {

std::shared_ptr<FreeDgla> free_dgla(std::vector<GradedGenerator> g, std::map<std::string, std::string> d = {})
{
    std::map<std::string, LiePoly> p;
    for (auto& [k, v] : d)
        p.emplace(k, parse_lie_poly(v));
    return FreeDgla::from_polys(std::move(g), p);
}

const CheckResult* failed(const VerificationReport& r, const std::string& prefix)
{
    for (const auto& c : r.checks)
        if (!c.passed && c.name.rfind(prefix, 0) == 0)
            return &c;
    return nullptr;
}

} // namespace

TEST_CASE("minimality test")
{
    auto m = dgla::testing::hand_model({{"x", 1}, {"w", 3}}, {{"w", "[x,x]"}}, 1);
    CHECK(is_minimal(m).is_minimal);

    auto base_linear = dgla::testing::hand_model({{"v", 1}, {"w", 2}}, {{"w", "v"}}, 1);
    CHECK(is_minimal(base_linear).is_minimal);

    auto linear = dgla::testing::hand_model({{"v", 1}, {"w1", 1}, {"w2", 2}}, {{"w2", "w1"}}, 1);
    auto r = is_minimal(linear);
    CHECK_FALSE(r.is_minimal);
    REQUIRE(r.witnesses.size() == 1);
    CHECK(r.witnesses[0].first == "w2");
    CHECK(to_string(r.witnesses[0].second) == "w1");
}

TEST_CASE("model of the identity has no fiber")
{
    auto a = free_dgla({{"x", 1}, {"y", 3}}, {{"y", "[x,x]"}});
    std::vector<Vector> id;
    for (std::size_t g = 0; g < 2; ++g)
        id.push_back(a->free_algebra().generator(g).coords);
    auto m = build_minimal_model(a, a, id, 4);
    CHECK(m.fiber().empty());
    CHECK(verify_model(m, 4, id).ok());
}

TEST_CASE("wedge example: L(x) into L(x,y)")
{
    auto base = free_dgla({{"x", 1}});
    auto target = free_dgla({{"x", 1}, {"y", 1}});
    std::vector<Vector> f = {target->free_algebra().generator(0).coords};
    auto m = build_minimal_model(base, target, f, 3);
    REQUIRE(m.fiber().size() == 1);
    auto a = m.fiber()[0];
    CHECK(m.generators()[a].name == "a_1_1");
    CHECK(m.generators()[a].degree == 1);
    CHECK(m.structure_map->image(a) == target->free_algebra().generator(1).coords);
    for (const auto& st : m.stages)
        CHECK(st.b.empty());
    for (int k = 1; k <= 3; ++k) {
        Matrix h = induced_map_on_homology(*m.structure_map, k);
        CHECK(h.rows() == h.cols());
        CHECK(rank(h) == h.rows());
    }
    CHECK(verify_model(m, 3, f).ok());
}

TEST_CASE("map to the zero algebra")
{
    auto base = free_dgla({{"x", 1}});
    auto zero = free_dgla({});
    auto m = build_minimal_model(base, zero, {Vector{}}, 2);
    REQUIRE(m.stages.size() == 2);
    REQUIRE(m.stages[0].b.size() == 1);
    auto b = m.stages[0].b[0];
    CHECK(m.generators()[b].name == "b_1_1");
    CHECK(m.generators()[b].degree == 2);
    CHECK(to_string(m.lie().to_poly(m.algebra->differential().image(b))) == "x");
    CHECK(verify_model(m, 2, std::vector<Vector>{Vector{}}).ok());
}

TEST_CASE("B generators map to primitives of boundaries")
{
    // x is a boundary in the cone, so b_1_1 (d b = x) must map to y, not 0.
    auto base = free_dgla({{"x", 1}});
    auto cone = free_dgla({{"x", 1}, {"y", 2}}, {{"y", "x"}});
    std::vector<Vector> f = {cone->free_algebra().generator(0).coords};
    auto m = build_minimal_model(base, cone, f, 3);
    REQUIRE(m.stages.at(0).b.size() == 1);
    auto b = m.stages[0].b[0];
    CHECK(to_string(cone->algebra().to_poly({2, m.structure_map->image(b)})) == "y");
    CHECK(verify_model(m, 3, f).ok());
}

TEST_CASE("builder errors")
{
    auto base = free_dgla({{"x", 1}});
    auto target = free_dgla({{"x", 1}});
    std::vector<Vector> f = {target->free_algebra().generator(0).coords};
    try {
        build_minimal_model(base, target, f, 0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegreeBoundTooSmall);
    }
    auto cone = free_dgla({{"x", 1}, {"y", 2}}, {{"y", "x"}});
    auto abel = free_dgla({{"x", 1}, {"y", 2}});
    std::vector<Vector> bad = {abel->free_algebra().generator(0).coords, abel->free_algebra().generator(1).coords};
    try {
        build_minimal_model(cone, abel, bad, 2);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotAChainMap);
    }
}

TEST_CASE("verification catches broken models")
{
    auto base = free_dgla({{"x", 1}});
    auto zero = free_dgla({});
    auto m = build_minimal_model(base, zero, {Vector{}}, 2);

    // d(b) = 0 for b in B^1 violates (f).
    auto broken = m;
    {
        std::vector<Element> d;
        for (std::size_t g = 0; g < m.generators().size(); ++g)
            d.push_back(m.algebra->differential().image(g));
        d[m.stages[0].b[0]] = m.lie().zero(1);
        broken.algebra = std::make_shared<const FreeDgla>(m.algebra->algebra_ptr(), d);
        std::vector<std::optional<Vector>> q = m.structure_map->images();
        broken.structure_map.emplace(broken.algebra, m.target, q);
    }
    auto r = verify_model(broken, 2);
    CHECK_FALSE(r.ok());
    CHECK(failed(r, "d(b) != 0") != nullptr);

    // Dropping the A-generator of the wedge model loses H_1 surjectivity.
    auto target = free_dgla({{"x", 1}, {"y", 1}});
    std::vector<Vector> f = {target->free_algebra().generator(0).coords};
    RelativeModel cut;
    cut.algebra = base;
    cut.base_count = 1;
    cut.stages = {{}, {}, {}};
    cut.target = target;
    cut.structure_map.emplace(base, target, dgla::testing::full_images(f));
    auto r2 = verify_model(cut, 3, f);
    auto* c = failed(r2, "H_1");
    REQUIRE(c != nullptr);
    CHECK(c->detail == "H_1(q) not surjective");
}

TEST_CASE("minimal-model contract on random inputs")
{
    Rng rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        auto inst = dgla::testing::random_map(rng);
        int n = dgla::testing::uniform(rng, 2, 4);
        auto m = build_minimal_model(inst.base, inst.target, inst.images, n);
        auto r = verify_model(m, n, inst.images);
        INFO(inst.description << ", trial " << trial);
        for (const auto& c : r.checks)
            if (!c.passed)
                UNSCOPED_INFO(c.name << ": " << c.detail);
        CHECK(r.ok());
        // Stage monotonicity: stage-k generators never occur in d of earlier stages.
        for (std::size_t s = 0; s < m.stages.size(); ++s) {
            std::set<std::size_t> later;
            for (std::size_t t = s; t < m.stages.size(); ++t) {
                later.insert(m.stages[t].a.begin(), m.stages[t].a.end());
                later.insert(m.stages[t].b.begin(), m.stages[t].b.end());
            }
            for (std::size_t t = 0; t < s; ++t)
                for (auto g : m.stages[t].b)
                    CHECK(avoids(m.lie(), m.algebra->differential().image(g), later));
        }
    }
}

TEST_CASE("building is deterministic")
{
    Rng r1(9), r2(9);
    auto i1 = dgla::testing::random_map(r1);
    auto i2 = dgla::testing::random_map(r2);
    auto m1 = build_minimal_model(i1.base, i1.target, i1.images, 3);
    auto m2 = build_minimal_model(i2.base, i2.target, i2.images, 3);
    REQUIRE(m1.generators() == m2.generators());
    for (std::size_t g = 0; g < m1.generators().size(); ++g) {
        CHECK(m1.algebra->differential().image(g) == m2.algebra->differential().image(g));
        CHECK(m1.structure_map->image(g) == m2.structure_map->image(g));
    }
}
