#pragma once

// Relative derivations of a minimal model L(V + W) (vanishing on L(V)), the
// complex Der(L(V + W) || L(V)) with differential D = [d, -], nilpotent
// exp/log, and the decision whether two relative automorphisms are
// homotopic rel the base: u = f o g^{-1} must be unipotent with log u in B_0.

#include <dgla/dgla.hpp>
#include <dgla/error.hpp>
#include <dgla/inversion.hpp>
#include <dgla/linalg.hpp>
#include <dgla/relative_model.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dgla {

/// Coordinates on Der_r: for each fiber generator w (in generator order) a
/// block of coordinates in the canonical basis of M_{|w|+r}.
struct DerivationSpace {
    const RelativeModel* model = nullptr;
    int degree = 0;
    std::vector<std::pair<std::size_t, std::size_t>> blocks; // (generator, offset)
    std::size_t dim = 0;

    Derivation to_derivation(const Vector& v) const
    {
        const auto& alg = model->lie();
        std::vector<Element> imgs;
        for (const auto& g : model->generators())
            imgs.push_back(alg.zero(g.degree + degree));
        for (const auto& [g, off] : blocks) {
            auto& e = imgs[g];
            for (std::size_t i = 0; i < e.coords.size(); ++i)
                e.coords[i] = v[off + i];
        }
        return Derivation(model->lie_ptr(), degree, std::move(imgs));
    }

    Vector to_vector(const Derivation& d) const
    {
        Vector v(dim);
        for (const auto& [g, off] : blocks) {
            const auto& c = d.image(g).coords;
            for (std::size_t i = 0; i < c.size(); ++i)
                v[off + i] = c[i];
        }
        return v;
    }

    /// (generator, basis index) of coordinate i.
    std::pair<std::size_t, std::size_t> label(std::size_t i) const
    {
        std::size_t k = blocks.size();
        while (k > 0 && blocks[k - 1].second > i)
            --k;
        return {blocks[k - 1].first, i - blocks[k - 1].second};
    }
};

inline DerivationSpace derivation_basis(const RelativeModel& m, int r, int n)
{
    DerivationSpace s;
    s.model = &m;
    s.degree = r;
    for (auto w : m.fiber()) {
        int target = m.generators()[w].degree + r;
        if (target > n)
            throw Error(ErrorKind::DegreeBoundExceeded, "Der_" + std::to_string(r) + " needs degree "
                                                            + std::to_string(target) + " > bound "
                                                            + std::to_string(n));
        s.blocks.emplace_back(w, s.dim);
        s.dim += target >= 1 ? m.lie().dim(target) : 0;
    }
    return s;
}

/// D(theta) = d o theta - (-1)^r theta o d, a derivation of degree r - 1.
inline Derivation der_differential(const RelativeModel& m, const Derivation& theta)
{
    const auto& alg = m.lie();
    const auto& d = m.algebra->differential();
    int r = theta.degree();
    std::vector<Element> imgs;
    for (std::size_t g = 0; g < m.generators().size(); ++g) {
        int deg = m.generators()[g].degree;
        Element out = alg.zero(deg + r - 1);
        if (!m.is_base(g)) {
            const Element& tw = theta.image(g);
            if (tw.degree >= 1)
                out.coords = d.apply(tw).coords;
            Element tdw = theta.apply(d.image(g));
            if (tdw.degree >= 1)
                axpy(out.coords, -koszul_sign(r, 1), tdw.coords);
        }
        out.coords.resize(out.degree >= 1 ? alg.dim(out.degree) : 0);
        imgs.push_back(std::move(out));
    }
    return Derivation(theta.algebra_ptr(), r - 1, std::move(imgs));
}

/// Matrix of D: Der_r -> Der_{r-1}.
inline Matrix der_differential_matrix(const RelativeModel& m, int r, int n)
{
    auto src = derivation_basis(m, r, n);
    auto dst = derivation_basis(m, r - 1, n);
    std::vector<Vector> cols;
    for (std::size_t i = 0; i < src.dim; ++i)
        cols.push_back(dst.to_vector(der_differential(m, src.to_derivation(unit_vector(src.dim, i)))));
    return Matrix::from_columns(dst.dim, cols);
}

struct DerCycles {
    DerivationSpace der0;
    Subspace z0; // ker D on Der_0
    Subspace b0; // D(Der_1)
    Matrix d1;   // D: Der_1 -> Der_0, for witnesses

    std::size_t h0() const { return z0.dim() - b0.dim(); }
};

inline DerCycles cycles_and_boundaries(const RelativeModel& m, int n)
{
    DerCycles c;
    c.der0 = derivation_basis(m, 0, n);
    c.z0 = kernel_basis(der_differential_matrix(m, 0, n));
    c.d1 = der_differential_matrix(m, 1, n);
    c.b0 = column_space(c.d1);
    return c;
}

namespace detail {

inline bool word_length_raising(const FreeLieAlgebra& alg, const Element& e)
{
    for (std::size_t i = 0; i < e.coords.size(); ++i)
        if (sgn(e.coords[i]) != 0 && alg.basis(e.degree)[i].length() < 2)
            return false;
    return true;
}

} // namespace detail

/// exp(delta) on every generator of degree <= n; delta must vanish on the base
/// and send fiber generators to word length >= 2.
inline Morphism exp_derivation(const RelativeModel& m, const Derivation& delta, int n)
{
    if (delta.degree() != 0)
        throw Error(ErrorKind::InvalidInput, "exp needs a derivation of degree 0");
    const auto& alg = m.lie();
    const auto& gens = m.generators();
    for (std::size_t g = 0; g < gens.size(); ++g) {
        if (m.is_base(g) ? !delta.image(g).is_zero() : !detail::word_length_raising(alg, delta.image(g)))
            throw Error(ErrorKind::NotWordLengthRaising, "delta(" + gens[g].name + ") is not word-length raising");
    }
    std::vector<std::optional<Vector>> imgs(gens.size());
    for (std::size_t g = 0; g < gens.size(); ++g) {
        if (gens[g].degree > n)
            continue;
        Element term = alg.generator(g);
        Vector sum = term.coords;
        for (int k = 1; !term.is_zero(); ++k) {
            term = delta.apply(term);
            term.coords = ratio(1, k) * term.coords;
            sum = sum + term.coords;
        }
        imgs[g] = std::move(sum);
    }
    return detail::endomorphism(m, std::move(imgs));
}

namespace detail {

/// True iff (a - I) is nilpotent.
inline bool unipotent(const Matrix& a)
{
    Matrix nu = a - Matrix::identity(a.rows());
    Matrix p = nu;
    for (std::size_t i = 1; i < a.rows() && !p.is_zero(); ++i)
        p = p * nu;
    return p.is_zero();
}

} // namespace detail

/// log(u) = sum (-1)^{k+1} (u - id)^k / k on generators of degree <= n.
/// u must fix the base and be unipotent in every degree <= n.  Generators
/// above n get the zero image.
inline Derivation log_unipotent(const RelativeModel& m, const Morphism& u, int n)
{
    const auto& alg = m.lie();
    const auto& gens = m.generators();
    for (std::size_t g = 0; g < gens.size(); ++g)
        if (gens[g].degree <= n && !u.defined(g))
            throw Error(ErrorKind::InvalidInput, "endomorphism undefined on '" + gens[g].name + "'");
    for (std::size_t v = 0; v < m.base_count; ++v)
        if (gens[v].degree <= n && u.image(v) != alg.generator(v).coords)
            throw Error(ErrorKind::NotUnipotentRelative, "u moves base generator '" + gens[v].name + "'");
    for (int k = 1; k <= n; ++k)
        if (!detail::unipotent(u.matrix(k)))
            throw Error(ErrorKind::NotUnipotentRelative, "u - id is not nilpotent in degree " + std::to_string(k));
    u.require_chain_map();

    std::vector<Element> imgs;
    for (std::size_t g = 0; g < gens.size(); ++g) {
        int deg = gens[g].degree;
        Element out = alg.zero(deg);
        if (deg <= n && !m.is_base(g)) {
            Matrix nu = u.matrix(deg) - Matrix::identity(alg.dim(deg));
            Vector term = alg.generator(g).coords;
            for (int k = 1;; ++k) {
                term = nu * term;
                if (is_zero(term))
                    break;
                axpy(out.coords, ratio(k % 2 == 1 ? 1 : -1, k), term);
            }
        }
        imgs.push_back(std::move(out));
    }
    return Derivation(m.lie_ptr(), 0, std::move(imgs));
}

struct Verdict {
    bool equivalent = false;
    std::string reason;                 // why not, when not equivalent
    std::optional<Derivation> theta;    // log(f o g^{-1}) when unipotent
    std::optional<Derivation> witness;  // G with [d, G] = theta
};

/// Decides whether f and g are homotopic relative to the base.
inline Verdict are_homotopic_rel(const RelativeModel& m, const Morphism& f, const Morphism& g, int n)
{
    if (auto mr = is_minimal(m); !mr.is_minimal)
        throw Error(ErrorKind::NotMinimal, "model is not minimal: d(" + mr.witnesses.front().first + ")");
    if (!is_relative_automorphism(m, f, n))
        throw Error(ErrorKind::InvalidInput, "first map is not a relative automorphism through degree "
                                                 + std::to_string(n));
    if (!is_relative_automorphism(m, g, n))
        throw Error(ErrorKind::InvalidInput, "second map is not a relative automorphism through degree "
                                                 + std::to_string(n));
    DerCycles dc = cycles_and_boundaries(m, n);

    Verdict v;
    Morphism u = compose(f, invert_relative_quasi_iso(m, g, n));
    for (int k = 1; k <= n; ++k)
        if (!detail::unipotent(u.matrix(k))) {
            v.reason = "f o g^-1 is not unipotent in degree " + std::to_string(k);
            return v;
        }
    Derivation theta = log_unipotent(m, u, n);
    v.theta = theta;
    Vector t = dc.der0.to_vector(theta);
    auto sol = solve(dc.d1, t);
    if (!sol) {
        v.reason = "log(f o g^-1) is not a boundary in Der_0";
        return v;
    }
    Derivation w = derivation_basis(m, 1, n).to_derivation(*sol);
    if (dc.der0.to_vector(der_differential(m, w)) != t)
        throw Error(ErrorKind::InvalidInput, "witness check failed");
    v.equivalent = true;
    v.witness = std::move(w);
    return v;
}

struct Pi0Report {
    int truncation_degree = 0;   // m, the top generator degree
    std::size_t sigma_dim = 0;   // dim L(V + W)_{<= m}
    std::size_t der0 = 0, z0 = 0, b0 = 0, h0 = 0;
    // Scalar equation counts of the conditions cutting out relative
    // automorphisms inside GL(Sigma).
    std::size_t degree_preserving = 0;
    std::size_t commutes_with_d = 0;
    std::size_t bracket_compatible = 0;
    std::size_t fixes_base = 0;
};

inline Pi0Report pi0_report(const RelativeModel& m, int n)
{
    Pi0Report r;
    int top = m.max_degree();
    r.truncation_degree = top;
    std::vector<std::size_t> dims(static_cast<std::size_t>(top) + 1);
    for (int k = 1; k <= top; ++k) {
        dims[k] = m.lie().dim(k);
        r.sigma_dim += dims[k];
    }
    if (!m.fiber().empty()) {
        DerCycles dc = cycles_and_boundaries(m, n);
        r.der0 = dc.der0.dim;
        r.z0 = dc.z0.dim();
        r.b0 = dc.b0.dim();
        r.h0 = dc.h0();
    }
    std::size_t diag = 0;
    for (int k = 1; k <= top; ++k)
        diag += dims[k] * dims[k];
    r.degree_preserving = r.sigma_dim * r.sigma_dim - diag;
    for (int k = 2; k <= top; ++k)
        r.commutes_with_d += dims[k - 1] * dims[k];
    for (int p = 1; p <= top; ++p)
        for (int q = p; p + q <= top; ++q) {
            std::size_t pairs = p == q ? dims[p] * (dims[p] + 1) / 2 : dims[p] * dims[q];
            r.bracket_compatible += pairs * dims[p + q];
        }
    for (int k = 1; k <= top; ++k)
        r.fixes_base += detail::base_indices(m, k).size() * dims[k];
    return r;
}

} // namespace dgla
