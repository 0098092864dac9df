// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include "test_support.hpp"

#include <dgla/cli.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace dgla;
using dgla::testing::Rng;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr double oracle_seconds = 10.0;
constexpr double model_seconds = 60.0;
constexpr int oracle_profiles = 24;
constexpr int identity_triples = 200;
constexpr int model_trials = 12;
constexpr int inversion_trials = 10;
constexpr int equivalence_trials = 10;
constexpr int round_trips = 50;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool ok = true;
    std::string note;

    void fail(const std::string& why)
    {
        if (ok)
            note = why;
        ok = false;
    }
};

bool report(int id, const std::string& title, const std::function<Outcome()>& body)
{
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << id << ". " << title;
    if (!o.note.empty())
        std::cout << " -- " << o.note;
    std::cout << "\n" << std::flush;
    return o.ok;
}

Outcome oracle()
{
    Outcome o;
    Rng rng(101);
    auto t0 = Clock::now();
    std::size_t degrees = 0;
    for (int trial = 0; trial < oracle_profiles; ++trial) {
        auto gens = dgla::testing::random_profile(rng, 3, 3, "g");
        int n = dgla::testing::uniform(rng, 4, 6);
        FreeLieAlgebra a(gens);
        for (int k = 1; k <= n; ++k, ++degrees)
            if (a.dim(k) != dim_oracle(gens, k))
                o.fail("profile " + std::to_string(trial) + ", degree " + std::to_string(k));
    }
    double s = seconds_since(t0);
    if (s >= oracle_seconds)
        o.fail("took " + std::to_string(s) + " s");
    if (o.ok)
        o.note = std::to_string(oracle_profiles) + " profiles, " + std::to_string(degrees) + " degrees, "
                 + std::to_string(s) + " s";
    return o;
}

Outcome identities()
{
    Outcome o;
    Rng rng(202);
    std::vector<GradedGenerator> gens = {{"x", 1}, {"y", 2}, {"z", 1}, {"u", 3}};
    FreeLieAlgebra a(gens);
    int checked = 0;
    while (checked < identity_triples) {
        auto [p, dp] = dgla::testing::random_monomial(rng, gens, 2);
        auto [q, dq] = dgla::testing::random_monomial(rng, gens, 2);
        auto [r, dr] = dgla::testing::random_monomial(rng, gens, 2);
        if (dp + dq + dr > 9)
            continue;
        Rational s = koszul_sign(dp, dq);
        if (!is_zero(a.normalize(lie_bracket(p, q) + s * lie_bracket(q, p), dp + dq).coords))
            o.fail("antisymmetry fails for " + to_string(p) + ", " + to_string(q));
        LiePoly jac = lie_bracket(p, lie_bracket(q, r)) - lie_bracket(lie_bracket(p, q), r)
                      - s * lie_bracket(q, lie_bracket(p, r));
        if (!is_zero(a.normalize(jac, dp + dq + dr).coords))
            o.fail("Jacobi fails for " + to_string(p) + ", " + to_string(q) + ", " + to_string(r));
        ++checked;
    }
    if (o.ok)
        o.note = std::to_string(checked) + " triples";
    return o;
}

Outcome homology()
{
    Outcome o;
    auto s2 = FreeDgla::from_polys({{"a", 1}}, {});
    s2->set_degree_bound(3);
    std::vector<std::size_t> want = {1, 1, 0};
    for (int k = 1; k <= 3; ++k)
        if (s2->homology(k).dim() != want[static_cast<std::size_t>(k - 1)])
            o.fail("L(a): dim H_" + std::to_string(k) + " = " + std::to_string(s2->homology(k).dim()));
    auto cone = FreeDgla::from_polys({{"x", 1}, {"y", 2}}, {{"y", parse_lie_poly("x")}});
    cone->set_degree_bound(3);
    for (int k = 1; k <= 3; ++k)
        if (cone->homology(k).dim() != 0)
            o.fail("cone: dim H_" + std::to_string(k) + " = " + std::to_string(cone->homology(k).dim()));
    return o;
}

Outcome model_contract()
{
    Outcome o;
    Rng rng(303);
    auto t0 = Clock::now();
    std::size_t fiber = 0;
    for (int trial = 0; trial < model_trials; ++trial) {
        auto inst = dgla::testing::random_map(rng);
        int n = dgla::testing::uniform(rng, 3, 5);
        auto m = build_minimal_model(inst.base, inst.target, inst.images, n);
        fiber += m.fiber().size();
        auto r = verify_model(m, n, inst.images);
        if (auto bad = r.first_failure())
            o.fail(inst.description + ", N = " + std::to_string(n) + ": " + bad->name + " " + bad->detail);
    }
    double s = seconds_since(t0);
    if (s >= model_seconds)
        o.fail("took " + std::to_string(s) + " s");
    if (o.ok)
        o.note = std::to_string(model_trials) + " inputs, " + std::to_string(fiber) + " fiber generators, "
                 + std::to_string(s) + " s";
    return o;
}

Outcome wedge()
{
    Outcome o;
    auto base = FreeDgla::from_polys({{"x", 1}}, {});
    auto target = FreeDgla::from_polys({{"x", 1}, {"y", 1}}, {});
    auto m = build_minimal_model(base, target, {target->free_algebra().generator(0).coords}, 3);
    std::size_t a1 = m.stages.empty() ? 0 : m.stages[0].a.size(), as = 0, bs = 0;
    for (const auto& st : m.stages) {
        as += st.a.size();
        bs += st.b.size();
    }
    if (a1 != 1 || as != 1 || bs != 0)
        o.fail("A^1 = " + std::to_string(a1) + ", A = " + std::to_string(as) + ", B = " + std::to_string(bs));
    for (const auto& c : verify_model(m, 3, std::vector<Vector>{target->free_algebra().generator(0).coords}).checks)
        if (!c.passed)
            o.fail(c.name + " " + c.detail);
    return o;
}

Outcome inversion()
{
    Outcome o;
    Rng rng(404);
    int done = 0;
    for (int trial = 0; trial < 200 && done < inversion_trials; ++trial) {
        auto inst = dgla::testing::random_map(rng);
        auto m = build_minimal_model(inst.base, inst.target, inst.images, 4);
        if (m.fiber().empty())
            continue;
        int n = m.max_degree();
        auto f = dgla::testing::random_relative_automorphism(rng, m, n);
        auto g = invert_relative_quasi_iso(m, f, n);
        if (!dgla::testing::is_identity_on(m, compose(f, g), n))
            o.fail("f o g != id (" + inst.description + ")");
        if (!dgla::testing::is_identity_on(m, compose(g, f), n))
            o.fail("g o f != id (" + inst.description + ")");
        ++done;
    }
    if (done < inversion_trials)
        o.fail("only " + std::to_string(done) + " models with a fiber");
    return o;
}

Outcome equivalence()
{
    Outcome o;
    Rng rng(505);
    int done = 0, scalings = 0, nontrivial = 0;
    for (int trial = 0; trial < 400 && done < equivalence_trials; ++trial) {
        auto inst = dgla::testing::random_map(rng);
        auto m = build_minimal_model(inst.base, inst.target, inst.images, 4);
        if (m.fiber().empty())
            continue;
        int n = m.max_degree() + 1;
        auto f = dgla::testing::random_relative_automorphism(rng, m, n);
        auto G = dgla::testing::random_admissible_g(rng, m, n);
        auto dG = der_differential(m, G);
        bool zero = true;
        for (auto w : m.fiber())
            zero = zero && dG.image(w).is_zero();
        nontrivial += zero ? 0 : 1;
        auto g = compose(f, exp_derivation(m, dG, n));
        auto v = are_homotopic_rel(m, f, g, n);
        if (!v.equivalent) {
            o.fail("f vs f o exp([d,G]) judged not equivalent: " + v.reason);
        } else if (!v.witness || !v.theta) {
            o.fail("missing witness");
        } else {
            auto expected = log_unipotent(m, compose(f, invert_relative_quasi_iso(m, g, n)), n);
            if (!dgla::testing::same_derivation(*v.theta, expected))
                o.fail("theta differs from log(f o g^-1)");
            if (!dgla::testing::same_derivation(der_differential(m, *v.witness), expected))
                o.fail("[d, witness] != log(f o g^-1)");
        }
        for (auto w : m.fiber()) {
            if (!dgla::testing::scalable(m, w))
                continue;
            ++scalings;
            auto s = are_homotopic_rel(m, f, compose(f, dgla::testing::scaling(m, w, 2)), n);
            if (s.equivalent)
                o.fail("f o scale(" + m.generators()[w].name + ", 2) judged equivalent to f");
        }
        ++done;
    }
    if (done < equivalence_trials)
        o.fail("only " + std::to_string(done) + " models with a fiber");
    if (scalings == 0)
        o.fail("no scalable fiber generator met");
    if (o.ok)
        o.note = std::to_string(done) + " derivations G (" + std::to_string(nontrivial) + " with [d,G] != 0), "
                 + std::to_string(scalings) + " scalings";
    return o;
}

Outcome exp_log()
{
    Outcome o;
    Rng rng(606);
    std::vector<RelativeModel> models = {
        dgla::testing::hand_model({{"x", 1}, {"w", 2}}, {}, 1),
        dgla::testing::hand_model({{"x", 1}, {"a", 2}, {"b", 4}}, {{"b", "[x,a]"}}, 1),
        dgla::testing::hand_model({{"x", 1}, {"y", 1}, {"a", 2}, {"c", 3}}, {}, 2),
        dgla::testing::hand_model({{"x", 1}, {"a", 1}, {"b", 3}, {"c", 3}}, {{"b", "[x,a]"}, {"c", "[a,a]"}}, 1),
    };
    int nonzero = 0;
    for (int trial = 0; trial < round_trips; ++trial) {
        const auto& m = models[static_cast<std::size_t>(trial) % models.size()];
        int n = m.max_degree() + 1;
        auto delta = dgla::testing::random_wlr_derivation(rng, m, n);
        bool zero = true;
        for (auto w : m.fiber())
            zero = zero && delta.image(w).is_zero();
        nonzero += zero ? 0 : 1;
        auto u = exp_derivation(m, delta, n);
        if (!dgla::testing::same_derivation(log_unipotent(m, u, n), delta))
            o.fail("log(exp(delta)) != delta, trial " + std::to_string(trial));
        if (!dgla::testing::same_images(exp_derivation(m, log_unipotent(m, u, n), n), u, n))
            o.fail("exp(log(u)) != u, trial " + std::to_string(trial));
    }
    if (o.ok)
        o.note = std::to_string(round_trips) + " derivations, " + std::to_string(nonzero) + " nonzero";
    return o;
}

struct Scratch {
    fs::path dir = fs::temp_directory_path() / ("dgla_acceptance_" + std::to_string(::getpid()));
    Scratch() { fs::create_directories(dir); }
    ~Scratch() { fs::remove_all(dir); }
    std::string put(const std::string& name, const std::string& text) const
    {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    }
};

std::pair<int, std::string> invoke(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str()};
}

Outcome determinism()
{
    Outcome o;
    Scratch s;
    auto lx = s.put("lx.json", R"({"generators": [{"name": "x", "degree": 1}]})");
    auto lxy = s.put("lxy.json", R"({"generators": [{"name": "x", "degree": 1}, {"name": "y", "degree": 1}]})");
    auto inc = s.put("inc.json", R"({"images": {"x": "x"}})");
    auto model = s.put("m.json", R"({"generators": [{"name": "x", "degree": 1}, {"name": "a", "degree": 2},
        {"name": "b", "degree": 4}], "differential": {"b": "[x,a]"}, "base": ["x"]})");
    auto f = s.put("f.json", R"({"images": {"a": "2*a + [x,x]", "b": "2*b"}})");
    auto u = s.put("u.json", R"({"images": {"b": "b - [x,[x,a]]"}})");
    std::vector<std::vector<std::string>> calls = {
        {"validate", model},
        {"homology", model, "--max-degree", "5"},
        {"minimal-model", lx, lxy, inc, "--max-degree", "4"},
        {"invert", model, f, "--max-degree", "5"},
        {"equivalent", model, f, u, "--max-degree", "5"},
        {"equivalent", model, inc, u, "--max-degree", "5"},
        {"pi0", model, "--max-degree", "5"},
    };
    std::size_t runs = 0;
    for (auto c : calls) {
        for (const char* format : {"canonical", "table"}) {
            auto args = c;
            args.insert(args.end(), {"--format", format});
            auto a = invoke(args), b = invoke(args);
            ++runs;
            if (a != b)
                o.fail(c[0] + " (" + format + ") differs between runs");
            if (a.first != cli::Ok && a.first != cli::Negative)
                o.fail(c[0] + " (" + format + ") exited with " + std::to_string(a.first));
        }
    }
    if (o.ok)
        o.note = std::to_string(runs) + " invocations repeated";
    return o;
}

Outcome gates()
{
    Outcome o;
    Scratch s;
    struct Case {
        const char* what;
        std::string doc;
    };
    std::vector<Case> cases = {
        {"d^2 != 0", R"({"generators": [{"name": "x", "degree": 1}, {"name": "y", "degree": 2},
            {"name": "z", "degree": 3}], "differential": {"y": "x", "z": "y"}})"},
        {"degree-0 generator", R"({"generators": [{"name": "t", "degree": 0}]})"},
        {"degree-preserving differential", R"({"generators": [{"name": "x", "degree": 1},
            {"name": "y", "degree": 1}], "differential": {"y": "x"}})"},
    };
    int i = 0;
    for (const auto& c : cases) {
        auto path = s.put("gate" + std::to_string(i++) + ".json", c.doc);
        auto [code, out] = invoke({"validate", path});
        if (code != cli::Invalid)
            o.fail(std::string(c.what) + " exited with " + std::to_string(code));
    }
    auto [code, out] = invoke({"validate", s.put("malformed.json", R"({"generators": [}")")});
    if (code != cli::ParseFailure)
        o.fail("malformed document exited with " + std::to_string(code));
    if (o.ok)
        o.note = "exit 2 for each gate, exit 1 for malformed input";
    return o;
}

} // namespace

int main()
{
    bool ok = true;
    ok &= report(1, "free-algebra basis matches the dimension oracle", oracle);
    ok &= report(2, "graded antisymmetry and Jacobi vanish", identities);
    ok &= report(3, "homology of L(a) and of the acyclic cone", homology);
    ok &= report(4, "minimal-model contract on random inputs", model_contract);
    ok &= report(5, "wedge example L(x) -> L(x,y)", wedge);
    ok &= report(6, "inversion contract on random relative automorphisms", inversion);
    ok &= report(7, "equivalence decision soundness", equivalence);
    ok &= report(8, "exp/log round trip", exp_log);
    ok &= report(9, "CLI determinism", determinism);
    ok &= report(10, "validation gates", gates);
    return ok ? 0 : 1;
}
