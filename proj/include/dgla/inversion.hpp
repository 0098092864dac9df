#pragma once

// Inverting a quasi-isomorphism f of a minimal relative model that restricts
// to an automorphism of the base, degree by degree.  With g defined on
// V + W_{<j} and f o g = id there, each w in W_j gets
//     g(w) = xi(w) - g(a),   f(xi(w)) = w + a,  a in M<j-1>,
// where xi lifts W_j back into M_j modulo g(M<j-1>_j) via pivot-rule sections.

#include <dgla/dgla.hpp>
#include <dgla/error.hpp>
#include <dgla/linalg.hpp>
#include <dgla/relative_model.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dgla {

namespace detail {

/// Basis indices of M_k whose words only use base generators (a basis of L(V)_k).
inline std::vector<std::size_t> base_indices(const RelativeModel& m, int k)
{
    std::vector<std::size_t> out;
    const auto& basis = m.lie().basis(k);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        bool ok = true;
        for (char c : basis[i].word)
            ok = ok && static_cast<unsigned char>(c) < m.base_count;
        if (ok)
            out.push_back(i);
    }
    return out;
}

inline Matrix submatrix(const Matrix& a, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols)
{
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = a(rows[i], cols[j]);
    return out;
}

inline std::set<std::size_t> fiber_set(const RelativeModel& m)
{
    auto f = m.fiber();
    return {f.begin(), f.end()};
}

/// Endomorphism of the model's algebra from generator images.
inline Morphism endomorphism(const RelativeModel& m, std::vector<std::optional<Vector>> images)
{
    return Morphism(m.algebra, m.algebra, std::move(images));
}

} // namespace detail

/// g with f o g = id on every generator of degree <= n.  Generators of higher
/// degree are left undefined in g.
inline Morphism invert_relative_quasi_iso(const RelativeModel& m, const Morphism& f, int n)
{
    if (f.source() != m.algebra || f.target().get() != static_cast<const Dgla*>(m.algebra.get()))
        throw Error(ErrorKind::InvalidInput, "endomorphism does not act on the model's algebra");
    if (auto mr = is_minimal(m); !mr.is_minimal)
        throw Error(ErrorKind::NotMinimal, "model is not minimal: d(" + mr.witnesses.front().first
                                               + ") has linear part " + to_string(mr.witnesses.front().second));
    const auto& alg = m.lie();
    const auto& gens = m.generators();
    for (std::size_t x = 0; x < gens.size(); ++x)
        if (gens[x].degree <= n && !f.defined(x))
            throw Error(ErrorKind::InvalidInput, "endomorphism undefined on '" + gens[x].name + "'");
    f.require_chain_map();

    // f restricts to an automorphism of L(V).
    auto fiber = detail::fiber_set(m);
    for (std::size_t v = 0; v < m.base_count; ++v)
        if (gens[v].degree <= n && !avoids(alg, {gens[v].degree, f.image(v)}, fiber))
            throw Error(ErrorKind::BaseNotAutomorphism, "f(" + gens[v].name + ") leaves the base");
    std::vector<std::optional<Vector>> g(gens.size());
    for (int k = 1; k <= n; ++k) {
        auto idx = detail::base_indices(m, k);
        auto inv = inverse(detail::submatrix(f.matrix(k), idx, idx));
        if (!inv)
            throw Error(ErrorKind::BaseNotAutomorphism,
                        "f is not invertible on the base in degree " + std::to_string(k));
        for (std::size_t v = 0; v < m.base_count; ++v) {
            if (gens[v].degree != k)
                continue;
            std::size_t gi = alg.generator_basis_index(v);
            Vector local = *inv * unit_vector(idx.size(), static_cast<std::size_t>(
                                                               std::find(idx.begin(), idx.end(), gi) - idx.begin()));
            Vector full(alg.dim(k));
            for (std::size_t i = 0; i < idx.size(); ++i)
                full[idx[i]] = local[i];
            g[v] = std::move(full);
        }
    }

    for (int k = 1; k <= n; ++k)
        if (rank(induced_map_on_homology(f, k)) != m.algebra->homology(k).dim())
            throw Error(ErrorKind::NotQuasiIso, "H_" + std::to_string(k) + "(f) is singular");

    for (int j = 1; j <= n; ++j) {
        std::vector<std::size_t> wj;
        for (auto w : m.fiber())
            if (gens[w].degree == j)
                wj.push_back(w);
        if (wj.empty())
            continue;

        // g so far, with zero placeholders on W_{>=j} (never reached below).
        std::vector<std::optional<Vector>> partial = g;
        for (std::size_t x = 0; x < gens.size(); ++x)
            if (!partial[x])
                partial[x] = Vector(alg.dim(gens[x].degree));
        Morphism g_prev = detail::endomorphism(m, partial);

        // S = g(M<j-1>_j): image of the basis elements of M_j other than W_j.
        std::size_t dim = alg.dim(j);
        std::vector<std::size_t> wj_index;
        for (auto w : wj)
            wj_index.push_back(alg.generator_basis_index(w));
        std::vector<Vector> s;
        const Matrix& gm = g_prev.matrix(j);
        for (std::size_t i = 0; i < dim; ++i)
            if (std::find(wj_index.begin(), wj_index.end(), i) == wj_index.end())
                s.push_back(gm.column(i));
        QuotientData qd = quotient_data(dim, Subspace::span(dim, s));

        // Phi: complement coordinates -> W_j, e_c |-> pi_{W_j} f(e_c).
        const Matrix& fm = f.matrix(j);
        Matrix phi(wj.size(), qd.complement.size());
        for (std::size_t i = 0; i < qd.complement.size(); ++i)
            for (std::size_t t = 0; t < wj.size(); ++t)
                phi(t, i) = fm(wj_index[t], qd.complement[i]);
        Matrix sigma;
        try {
            sigma = section_of_surjection(phi);
        } catch (const Error&) {
            throw Error(ErrorKind::NotQuasiIso,
                        "W_" + std::to_string(j) + " is not reached modulo g(M<" + std::to_string(j - 1) + ">)");
        }

        for (std::size_t t = 0; t < wj.size(); ++t) {
            Vector xi(dim);
            for (std::size_t i = 0; i < qd.complement.size(); ++i)
                xi[qd.complement[i]] = sigma(i, t);
            Vector a = fm * xi;
            a[wj_index[t]] -= 1;
            g[wj[t]] = xi - gm * a;
        }
    }

    Morphism out = detail::endomorphism(m, g);
    for (std::size_t x = 0; x < gens.size(); ++x) {
        if (!g[x])
            continue;
        if (f.apply({gens[x].degree, *g[x]}).coords != alg.generator(x).coords)
            throw Error(ErrorKind::NotQuasiIso, "f o g != id on '" + gens[x].name + "'");
    }
    if (auto v = out.chain_violation())
        throw Error(ErrorKind::NotAChainMap, "inverse is not a chain map: " + *v);
    return out;
}

/// Fixes the base pointwise, commutes with d, and is invertible in every
/// degree <= n.
inline bool is_relative_automorphism(const RelativeModel& m, const Morphism& f, int n)
{
    if (f.source() != m.algebra || f.target().get() != static_cast<const Dgla*>(m.algebra.get()))
        return false;
    const auto& gens = m.generators();
    for (std::size_t x = 0; x < gens.size(); ++x)
        if (gens[x].degree <= n && !f.defined(x))
            return false;
    for (std::size_t v = 0; v < m.base_count; ++v)
        if (gens[v].degree <= n && f.image(v) != m.lie().generator(v).coords)
            return false;
    if (f.chain_violation())
        return false;
    for (int k = 1; k <= n; ++k)
        if (rank(f.matrix(k)) != m.lie().dim(k))
            return false;
    return true;
}

} // namespace dgla
