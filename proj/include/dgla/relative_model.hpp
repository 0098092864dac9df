#pragma once

// Relative dg Lie algebras L(V + W) with base L(V), the minimality test and
// the staged construction of minimal relative models for a map
// f: L(V) -> g.  Stage k adjoins
//   A^k (degree k, d = 0) mapping onto coker H_k(q_{k-1}), and
//   B^k (degree k+1) whose boundaries kill ker H_k(q_{k-1}).
// Every section involved is the pivot-rule section of linalg.hpp.

#include <dgla/dgla.hpp>
#include <dgla/error.hpp>
#include <dgla/free_gla.hpp>
#include <dgla/linalg.hpp>

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace dgla {

struct Stage {
    std::vector<std::size_t> a; // generator indices of A^n, degree n
    std::vector<std::size_t> b; // generator indices of B^n, degree n+1
};

struct RelativeModel {
    std::shared_ptr<const FreeDgla> algebra; // L(V + W); base generators come first
    std::size_t base_count = 0;
    std::vector<Stage> stages;               // stages[n-1] is stage n
    std::shared_ptr<const Dgla> target;      // may be null for a bare relative algebra
    std::optional<Morphism> structure_map;   // q: L(V + W) -> target

    const FreeLieAlgebra& lie() const { return algebra->free_algebra(); }
    const std::shared_ptr<const FreeLieAlgebra>& lie_ptr() const { return algebra->algebra_ptr(); }
    const std::vector<GradedGenerator>& generators() const { return algebra->generators(); }

    bool is_base(std::size_t g) const noexcept { return g < base_count; }

    std::vector<std::size_t> fiber() const
    {
        std::vector<std::size_t> out;
        for (std::size_t g = base_count; g < generators().size(); ++g)
            out.push_back(g);
        return out;
    }

    int max_degree() const
    {
        int m = 0;
        for (const auto& g : generators())
            m = std::max(m, g.degree);
        return m;
    }

    int max_fiber_degree() const
    {
        int m = 0;
        for (auto g : fiber())
            m = std::max(m, generators()[g].degree);
        return m;
    }
};

/// True iff no basis element with a nonzero coordinate in e involves any of `gens`.
inline bool avoids(const FreeLieAlgebra& alg, const Element& e, const std::set<std::size_t>& gens)
{
    if (e.degree < 1)
        return true;
    for (std::size_t i = 0; i < e.coords.size(); ++i) {
        if (sgn(e.coords[i]) == 0)
            continue;
        for (char c : alg.basis(e.degree)[i].word)
            if (gens.count(static_cast<unsigned char>(c)))
                return false;
    }
    return true;
}

struct MinimalityReport {
    bool is_minimal = true;
    std::vector<std::pair<std::string, LiePoly>> witnesses; // (w, linear fiber part of d w)
};

/// pi_W(d w) for each fiber generator w: the coefficients of d w on fiber
/// generators (base-linear terms are ignored).
inline MinimalityReport is_minimal(const RelativeModel& m)
{
    MinimalityReport r;
    const auto& alg = m.lie();
    const auto& gens = m.generators();
    for (auto w : m.fiber()) {
        const Element& dw = m.algebra->differential().image(w);
        LiePoly linear;
        for (auto u : m.fiber()) {
            if (gens[u].degree != dw.degree)
                continue;
            const Rational& c = dw.coords[alg.generator_basis_index(u)];
            if (sgn(c) != 0)
                linear = linear + lie_gen(gens[u].name, c);
        }
        if (!linear.empty())
            r.witnesses.emplace_back(gens[w].name, std::move(linear));
    }
    r.is_minimal = r.witnesses.empty();
    return r;
}

namespace detail {

using SparseWords = std::vector<std::pair<Word, Rational>>;

inline SparseWords to_words(const FreeLieAlgebra& alg, const Element& e)
{
    SparseWords out;
    if (e.degree < 1)
        return out;
    for (std::size_t i = 0; i < e.coords.size(); ++i)
        if (sgn(e.coords[i]) != 0)
            out.emplace_back(alg.basis(e.degree)[i].word, e.coords[i]);
    return out;
}

// Basis words of L(S) stay basis words of L(S + T) when T's generators come
// after S's, because the greedy selection runs per multiset of letters.
inline Element from_words(const FreeLieAlgebra& alg, int degree, const SparseWords& w)
{
    Element e = alg.zero(degree);
    for (const auto& [word, c] : w) {
        auto idx = alg.basis_index_of_word(word);
        if (!idx)
            throw Error(ErrorKind::InvalidInput, "basis word lost while extending the algebra");
        e.coords[*idx] += c;
    }
    return e;
}

} // namespace detail

/// Extends a free dgla by new generators, carrying differentials across.
inline std::shared_ptr<const FreeDgla> extend(const FreeDgla& a, const std::vector<GradedGenerator>& new_gens,
                                              const std::vector<Element>& new_diffs_in_a)
{
    auto gens = a.generators();
    gens.insert(gens.end(), new_gens.begin(), new_gens.end());
    auto alg = std::make_shared<const FreeLieAlgebra>(gens);
    std::vector<Element> diffs;
    for (std::size_t g = 0; g < a.generators().size(); ++g) {
        const Element& dx = a.differential().image(g);
        diffs.push_back(detail::from_words(*alg, dx.degree, detail::to_words(a.free_algebra(), dx)));
    }
    for (std::size_t i = 0; i < new_gens.size(); ++i) {
        const Element& dx = new_diffs_in_a[i];
        diffs.push_back(detail::from_words(*alg, dx.degree, detail::to_words(a.free_algebra(), dx)));
    }
    return std::make_shared<const FreeDgla>(std::move(alg), std::move(diffs));
}

inline void require_simply_connected(const Dgla& g)
{
    if (auto* fin = dynamic_cast<const FiniteDgla*>(&g)) {
        const auto& alg = fin->finite_algebra();
        if (!alg.dims().empty() && alg.bottom_degree() < 1)
            throw Error(ErrorKind::NotSimplyConnected, "target has elements in degree " +
                                                           std::to_string(alg.bottom_degree()));
    } else if (auto* fr = dynamic_cast<const FreeDgla*>(&g)) {
        if (!fr->free_algebra().simply_connected())
            throw Error(ErrorKind::NotSimplyConnected, "target has a generator of degree < 1");
    }
}

/// Minimal relative model of f: L(V) -> target, valid through degree n.
inline RelativeModel build_minimal_model(std::shared_ptr<const FreeDgla> base, std::shared_ptr<const Dgla> target,
                                         const std::vector<Vector>& f_images, int n)
{
    if (n < 1)
        throw Error(ErrorKind::DegreeBoundTooSmall, "degree bound must be at least 1");
    if (!base->free_algebra().simply_connected())
        throw Error(ErrorKind::NotSimplyConnected, "base has a generator of degree < 1");
    require_simply_connected(*target);
    {
        std::vector<std::optional<Vector>> imgs(f_images.begin(), f_images.end());
        Morphism(base, target, imgs).require_chain_map();
    }

    std::set<std::string> taken;
    for (const auto& g : base->generators())
        taken.insert(g.name);

    std::shared_ptr<const FreeDgla> m = base;
    std::vector<std::optional<Vector>> q_images(f_images.begin(), f_images.end());
    std::vector<Stage> stages;

    for (int k = 1; k <= n; ++k) {
        Morphism q(m, target, q_images);
        Matrix hq = induced_map_on_homology(q, k);
        const HomologyData& hm = m->homology(k);
        const HomologyData& hg = target->homology(k);

        std::vector<GradedGenerator> new_gens;
        std::vector<Element> new_diffs;
        Stage stage;
        std::size_t next = m->generators().size();

        // A^k = coker H_k(q_{k-1}), sent to cycles by tau o sigma.
        QuotientData coker = quotient_data(hg.dim(), column_space(hq));
        for (std::size_t i = 0; i < coker.complement.size(); ++i) {
            std::string name = "a_" + std::to_string(k) + "_" + std::to_string(i + 1);
            if (!taken.insert(name).second)
                throw Error(ErrorKind::InvalidInput, "generator name '" + name + "' is already in use");
            new_gens.push_back({name, k});
            new_diffs.push_back(m->algebra().zero(k - 1));
            q_images.emplace_back(hg.reps[coker.complement[i]]);
            stage.a.push_back(next++);
        }

        // B^k = s ker H_k(q_{k-1}), with d = nu (lift of the class to a cycle).
        Subspace ker = kernel_basis(hq);
        for (std::size_t j = 0; j < ker.dim(); ++j) {
            std::string name = "b_" + std::to_string(k) + "_" + std::to_string(j + 1);
            if (!taken.insert(name).second)
                throw Error(ErrorKind::InvalidInput, "generator name '" + name + "' is already in use");
            Element cycle = m->algebra().zero(k);
            for (std::size_t i = 0; i < hm.dim(); ++i)
                axpy(cycle.coords, ker.basis()[j][i], hm.reps[i]);
            // q(cycle) is a boundary; q(b) is its pivot-rule primitive (0 when q(cycle) = 0).
            auto primitive = solve(target->differential_matrix(k + 1), q.apply(cycle).coords);
            if (!primitive)
                throw Error(ErrorKind::InvalidInput, "q(d " + name + ") is not a boundary in the target");
            new_gens.push_back({name, k + 1});
            new_diffs.push_back(std::move(cycle));
            q_images.emplace_back(std::move(*primitive));
            stage.b.push_back(next++);
        }

        stages.push_back(std::move(stage));
        if (!new_gens.empty())
            m = extend(*m, new_gens, new_diffs);
    }

    RelativeModel model;
    model.algebra = m;
    model.base_count = base->generators().size();
    model.stages = std::move(stages);
    model.target = target;
    model.structure_map.emplace(m, target, q_images);
    return model;
}

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool ok() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
    }

    const CheckResult* first_failure() const
    {
        for (const auto& c : checks)
            if (!c.passed)
                return &c;
        return nullptr;
    }
};

/// Re-checks a relative model from scratch: stage structure, the KS chain
/// condition, d(A^n) = 0, the support condition on d(B^n), injectivity of d
/// on B^n, minimality, q a chain map, q o iota = f, H_i(q) iso for i <= n.
inline VerificationReport verify_model(const RelativeModel& m, int n,
                                       const std::optional<std::vector<Vector>>& f_images = std::nullopt)
{
    VerificationReport rep;
    auto add = [&rep](std::string name, bool ok, std::string detail = {}) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    const auto& alg = m.lie();
    const auto& gens = m.generators();
    const auto& d = m.algebra->differential();
    auto name_of = [&gens](std::size_t g) { return gens[g].name; };

    // Stage structure (condition (c)).
    std::vector<int> stage_of(gens.size(), 0);
    {
        std::string problem;
        std::vector<int> seen(gens.size(), 0);
        for (std::size_t s = 0; s < m.stages.size(); ++s) {
            int deg = static_cast<int>(s) + 1;
            for (auto g : m.stages[s].a) {
                if (g < m.base_count || g >= gens.size()) {
                    problem = "stage generator index out of range";
                    continue;
                }
                ++seen[g];
                stage_of[g] = deg;
                if (gens[g].degree != deg)
                    problem = "A-generator " + name_of(g) + " of stage " + std::to_string(deg) + " has degree "
                              + std::to_string(gens[g].degree);
            }
            for (auto g : m.stages[s].b) {
                if (g < m.base_count || g >= gens.size()) {
                    problem = "stage generator index out of range";
                    continue;
                }
                ++seen[g];
                stage_of[g] = deg;
                if (gens[g].degree != deg + 1)
                    problem = "B-generator " + name_of(g) + " of stage " + std::to_string(deg) + " has degree "
                              + std::to_string(gens[g].degree);
            }
        }
        for (auto w : m.fiber())
            if (seen[w] != 1 && problem.empty())
                problem = "fiber generator " + name_of(w) + " is not in exactly one stage";
        add("stage decomposition", problem.empty(), problem);
    }

    // KS chain: d(V) in L(V); d(stage n) in L(V + W(n-1)) and consists of cycles.
    {
        std::string problem;
        for (std::size_t g = 0; g < gens.size() && problem.empty(); ++g) {
            std::set<std::size_t> forbidden;
            for (std::size_t u = m.base_count; u < gens.size(); ++u)
                if (g < m.base_count || stage_of[u] >= stage_of[g])
                    forbidden.insert(u);
            const Element& dg = d.image(g);
            if (!avoids(alg, dg, forbidden))
                problem = "d(" + name_of(g) + ") leaves the previous stage";
            else if (dg.degree >= 1 && !m.algebra->d(dg).is_zero())
                problem = "d(" + name_of(g) + ") is not a cycle";
        }
        add("KS-extension chain", problem.empty(), problem);
    }

    // (d) d(A^n) = 0.
    {
        std::string problem;
        for (const auto& st : m.stages)
            for (auto g : st.a)
                if (g < gens.size() && !d.image(g).is_zero() && problem.empty())
                    problem = "d(" + name_of(g) + ") != 0";
        add("d(A^n) = 0", problem.empty(), problem);
    }

    // (e) d(B^n) has no component on B^{n-1} or W^n.
    {
        std::string problem;
        for (std::size_t s = 0; s < m.stages.size(); ++s) {
            std::set<std::size_t> forbidden;
            if (s > 0)
                forbidden.insert(m.stages[s - 1].b.begin(), m.stages[s - 1].b.end());
            forbidden.insert(m.stages[s].a.begin(), m.stages[s].a.end());
            forbidden.insert(m.stages[s].b.begin(), m.stages[s].b.end());
            for (auto g : m.stages[s].b)
                if (g < gens.size() && !avoids(alg, d.image(g), forbidden) && problem.empty())
                    problem = "d(" + name_of(g) + ") involves B^{n-1} or W^n";
        }
        add("d(B^n) in L(V + W(n-2) + A^{n-1})", problem.empty(), problem);
    }

    // (f) d is injective on B^n.
    {
        std::string problem;
        for (std::size_t s = 0; s < m.stages.size(); ++s) {
            const auto& bs = m.stages[s].b;
            if (bs.empty())
                continue;
            std::vector<Vector> cols;
            for (auto g : bs)
                if (g < gens.size())
                    cols.push_back(d.image(g).coords);
            int deg = static_cast<int>(s) + 1;
            if (rank(Matrix::from_columns(alg.dim(deg), cols)) != cols.size() && problem.empty())
                problem = "d vanishes on a nonzero element of B^" + std::to_string(deg);
        }
        add("d(b) != 0 on B^n", problem.empty(), problem);
    }

    {
        auto mr = is_minimal(m);
        add("minimality", mr.is_minimal,
            mr.is_minimal ? "" : "pi_W(d " + mr.witnesses.front().first + ") = " + to_string(mr.witnesses.front().second));
    }

    if (!m.structure_map || !m.target) {
        add("structure map present", false, "model has no structure map");
        return rep;
    }
    const Morphism& q = *m.structure_map;
    {
        auto v = q.chain_violation();
        add("q is a chain map", !v, v.value_or(""));
        if (v)
            return rep;
    }

    if (f_images) {
        std::string problem;
        if (f_images->size() != m.base_count)
            problem = "reference map has the wrong number of generators";
        for (std::size_t g = 0; g < m.base_count && problem.empty(); ++g)
            if (q.image(g) != (*f_images)[g])
                problem = "q(" + name_of(g) + ") != f(" + name_of(g) + ")";
        add("q o iota = f", problem.empty(), problem);
    }

    for (int k = 1; k <= n; ++k) {
        Matrix h = induced_map_on_homology(q, k);
        std::size_t r = rank(h);
        std::string problem;
        if (r < h.rows())
            problem = "H_" + std::to_string(k) + "(q) not surjective";
        else if (r < h.cols())
            problem = "H_" + std::to_string(k) + "(q) not injective";
        add("H_" + std::to_string(k) + "(q) iso", problem.empty(), problem);
    }
    return rep;
}

} // namespace dgla
