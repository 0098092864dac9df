#pragma once

// Differential graded Lie algebras, derivations, morphisms and homology.
//
// Sign convention for the graded Leibniz rule of a derivation D of degree r:
//     D[a,b] = [Da,b] + (-1)^{r|a|} [a,Db]
// so the differential (r = -1) satisfies d[a,b] = [da,b] + (-1)^{|a|}[a,db].
//
// Every algebra can carry a degree bound N.  homology(k) is available for
// k <= N and differential_matrix(k) for k <= N + 1 (needed for B_N).

#include <dgla/error.hpp>
#include <dgla/finite_gla.hpp>
#include <dgla/free_gla.hpp>
#include <dgla/linalg.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dgla {

struct HomologyData {
    int degree = 0;
    Subspace cycles;     // Z_k inside A_k
    Subspace boundaries; // B_k inside A_k
    QuotientData quotient; // H_k as a quotient of Z_k, in Z_k-coordinates
    std::vector<Vector> reps; // chosen cycle for each homology basis vector

    std::size_t dim() const noexcept { return reps.size(); }

    /// Homology class of a cycle, in the canonical basis of H_k.
    Vector class_of(const Vector& cycle) const
    {
        auto z = cycles.coordinates(cycle);
        if (!z)
            throw Error(ErrorKind::NotAChainMap, "element of degree " + std::to_string(degree) + " is not a cycle");
        return quotient.projection * *z;
    }
};

namespace detail {

struct MatrixCache {
    std::recursive_mutex mu;
    std::map<int, Matrix> mats;
};

} // namespace detail

class Dgla {
public:
    virtual ~Dgla() = default;

    virtual const GradedLieAlgebra& algebra() const = 0;

    void set_degree_bound(std::optional<int> n) { bound_ = n; }
    std::optional<int> degree_bound() const noexcept { return bound_; }

    /// Matrix of d: A_k -> A_{k-1} in canonical bases.
    const Matrix& differential_matrix(int k) const
    {
        if (bound_ && k > *bound_ + 1)
            throw Error(ErrorKind::DegreeBoundExceeded,
                        "degree " + std::to_string(k) + " exceeds bound " + std::to_string(*bound_));
        std::lock_guard lock(mu_);
        auto it = dmats_.find(k);
        if (it != dmats_.end())
            return it->second;
        return dmats_.emplace(k, compute_differential(k)).first->second;
    }

    Element d(const Element& e) const
    {
        return {e.degree - 1, differential_matrix(e.degree) * e.coords};
    }

    const HomologyData& homology(int k) const
    {
        if (bound_ && k > *bound_)
            throw Error(ErrorKind::DegreeBoundExceeded,
                        "degree " + std::to_string(k) + " exceeds bound " + std::to_string(*bound_));
        std::lock_guard lock(mu_);
        auto it = homology_.find(k);
        if (it != homology_.end())
            return it->second;
        HomologyData h;
        h.degree = k;
        std::size_t n = algebra().dim(k);
        h.cycles = k <= 1 ? Subspace::full(n) : kernel_basis(differential_matrix(k));
        h.boundaries = n == 0 ? Subspace(0) : column_space(differential_matrix(k + 1));
        std::vector<Vector> bz;
        for (const auto& b : h.boundaries.basis()) {
            auto c = h.cycles.coordinates(b);
            if (!c)
                throw Error(ErrorKind::InvalidInput, "d^2 != 0 in degree " + std::to_string(k + 1));
            bz.push_back(std::move(*c));
        }
        h.quotient = quotient_data(h.cycles.dim(), Subspace::span(h.cycles.dim(), bz));
        for (auto c : h.quotient.complement)
            h.reps.push_back(h.cycles.basis()[c]);
        return homology_.emplace(k, std::move(h)).first->second;
    }

protected:
    virtual Matrix compute_differential(int k) const = 0;

private:
    std::optional<int> bound_;
    mutable std::recursive_mutex mu_;
    mutable std::map<int, Matrix> dmats_;
    mutable std::map<int, HomologyData> homology_;
};

/// A degree-r derivation of a free graded Lie algebra, determined by its
/// values on generators.  Generators without a value are sent to zero.
class Derivation {
public:
    Derivation(std::shared_ptr<const FreeLieAlgebra> alg, int degree, std::vector<Element> images)
        : alg_(std::move(alg)), degree_(degree), images_(std::move(images))
    {
        const auto& gens = alg_->generators();
        if (images_.size() != gens.size())
            throw Error(ErrorKind::InvalidInput, "derivation needs one image per generator");
        for (std::size_t g = 0; g < gens.size(); ++g) {
            if (images_[g].degree != gens[g].degree + degree_)
                throw Error(ErrorKind::InvalidInput, "derivation image of '" + gens[g].name + "' has degree "
                                                         + std::to_string(images_[g].degree) + ", expected "
                                                         + std::to_string(gens[g].degree + degree_));
            images_[g].coords.resize(alg_->dim(images_[g].degree));
        }
    }

    static Derivation zero(std::shared_ptr<const FreeLieAlgebra> alg, int degree)
    {
        std::vector<Element> imgs;
        for (const auto& g : alg->generators())
            imgs.push_back(alg->zero(g.degree + degree));
        return Derivation(std::move(alg), degree, std::move(imgs));
    }

    const FreeLieAlgebra& algebra() const noexcept { return *alg_; }
    const std::shared_ptr<const FreeLieAlgebra>& algebra_ptr() const noexcept { return alg_; }
    int degree() const noexcept { return degree_; }
    const std::vector<Element>& images() const noexcept { return images_; }
    const Element& image(std::size_t g) const { return images_[g]; }

    /// Matrix of L_k -> L_{k+r}.
    const Matrix& matrix(int k) const
    {
        std::lock_guard lock(cache_->mu);
        auto it = cache_->mats.find(k);
        if (it != cache_->mats.end())
            return it->second;
        std::size_t rows = k + degree_ >= 1 ? alg_->dim(k + degree_) : 0;
        const auto& basis = alg_->basis(k);
        Matrix m(rows, basis.size());
        if (rows > 0) {
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const auto& b = basis[j];
                std::size_t last = static_cast<unsigned char>(b.word.back());
                Vector col;
                if (b.length() == 1) {
                    col = images_[last].coords;
                } else {
                    int pd = b.prefix_degree;
                    int gd = alg_->generators()[last].degree;
                    Vector dp = matrix(pd) * b.prefix_coords;
                    Vector g = alg_->generator(last).coords;
                    col = alg_->bracket(pd + degree_, dp, gd, g);
                    axpy(col, koszul_sign(degree_, pd),
                         alg_->bracket(pd, b.prefix_coords, gd + degree_, images_[last].coords));
                }
                for (std::size_t i = 0; i < rows; ++i)
                    m(i, j) = col[i];
            }
        }
        return cache_->mats.emplace(k, std::move(m)).first->second;
    }

    Element apply(const Element& e) const
    {
        if (e.degree + degree_ < 1)
            return {e.degree + degree_, {}};
        return {e.degree + degree_, matrix(e.degree) * e.coords};
    }

private:
    std::shared_ptr<const FreeLieAlgebra> alg_;
    int degree_;
    std::vector<Element> images_;
    std::shared_ptr<detail::MatrixCache> cache_ = std::make_shared<detail::MatrixCache>();
};

/// Quasi-free dg Lie algebra (L(V), d) with d given on generators.
class FreeDgla : public Dgla {
public:
    FreeDgla(std::shared_ptr<const FreeLieAlgebra> alg, std::vector<Element> differential)
        : alg_(alg), d_(std::move(alg), -1, std::move(differential))
    {
    }

    /// Builds from generator list and bracket-expression differentials.
    static std::shared_ptr<FreeDgla> from_polys(std::vector<GradedGenerator> gens,
                                                const std::map<std::string, LiePoly>& differential)
    {
        auto alg = std::make_shared<const FreeLieAlgebra>(std::move(gens));
        if (!alg->simply_connected())
            throw Error(ErrorKind::NotSimplyConnected, "generator of degree < 1");
        for (const auto& [name, p] : differential)
            if (!alg->generator_index(name))
                throw Error(ErrorKind::UnknownGenerator, "differential of unknown generator '" + name + "'");
        std::vector<Element> images;
        for (const auto& g : alg->generators()) {
            auto it = differential.find(g.name);
            if (it == differential.end()) {
                images.push_back(alg->zero(g.degree - 1));
                continue;
            }
            Element e = alg->normalize(it->second, g.degree - 1);
            if (e.degree != g.degree - 1)
                throw Error(ErrorKind::InvalidInput, "differential not degree -1 on generator '" + g.name + "'");
            images.push_back(std::move(e));
        }
        return std::make_shared<FreeDgla>(std::move(alg), std::move(images));
    }

    const GradedLieAlgebra& algebra() const override { return *alg_; }
    const FreeLieAlgebra& free_algebra() const noexcept { return *alg_; }
    const std::shared_ptr<const FreeLieAlgebra>& algebra_ptr() const noexcept { return alg_; }
    const Derivation& differential() const noexcept { return d_; }
    const std::vector<GradedGenerator>& generators() const { return alg_->generators(); }

protected:
    Matrix compute_differential(int k) const override { return d_.matrix(k); }

private:
    std::shared_ptr<const FreeLieAlgebra> alg_;
    Derivation d_;
};

/// Finite-dimensional dg Lie algebra: structure constants plus matrices.
class FiniteDgla : public Dgla {
public:
    FiniteDgla(std::shared_ptr<const FiniteLieAlgebra> alg, std::map<int, Matrix> differential)
        : alg_(std::move(alg)), mats_(std::move(differential))
    {
        for (const auto& [k, m] : mats_)
            if (m.rows() != alg_->dim(k - 1) || m.cols() != alg_->dim(k))
                throw Error(ErrorKind::InvalidInput, "differential matrix in degree " + std::to_string(k)
                                                         + " must be " + std::to_string(alg_->dim(k - 1)) + "x"
                                                         + std::to_string(alg_->dim(k)));
    }

    const GradedLieAlgebra& algebra() const override { return *alg_; }
    const FiniteLieAlgebra& finite_algebra() const noexcept { return *alg_; }
    const std::map<int, Matrix>& matrices() const noexcept { return mats_; }

protected:
    Matrix compute_differential(int k) const override
    {
        auto it = mats_.find(k);
        if (it != mats_.end())
            return it->second;
        return Matrix(alg_->dim(k - 1), alg_->dim(k));
    }

private:
    std::shared_ptr<const FiniteLieAlgebra> alg_;
    std::map<int, Matrix> mats_;
};

/// Map of dg Lie algebras out of a quasi-free source, given on generators.
/// Generators may be left undefined (partial maps defined through a degree).
class Morphism {
public:
    Morphism(std::shared_ptr<const FreeDgla> source, std::shared_ptr<const Dgla> target,
             std::vector<std::optional<Vector>> images)
        : source_(std::move(source)), target_(std::move(target)), images_(std::move(images))
    {
        const auto& gens = source_->generators();
        if (images_.size() != gens.size())
            throw Error(ErrorKind::InvalidInput, "morphism needs one image slot per generator");
        for (std::size_t g = 0; g < gens.size(); ++g)
            if (images_[g] && images_[g]->size() != target_->algebra().dim(gens[g].degree))
                throw Error(ErrorKind::InvalidInput, "image of '" + gens[g].name + "' has the wrong dimension");
    }

    static Morphism identity(std::shared_ptr<const FreeDgla> a)
    {
        std::vector<std::optional<Vector>> imgs;
        for (std::size_t g = 0; g < a->generators().size(); ++g)
            imgs.emplace_back(a->free_algebra().generator(g).coords);
        return Morphism(a, a, std::move(imgs));
    }

    const std::shared_ptr<const FreeDgla>& source() const noexcept { return source_; }
    const std::shared_ptr<const Dgla>& target() const noexcept { return target_; }
    const std::vector<std::optional<Vector>>& images() const noexcept { return images_; }

    bool defined(std::size_t g) const { return images_[g].has_value(); }

    const Vector& image(std::size_t g) const
    {
        if (!images_[g])
            throw Error(ErrorKind::InvalidInput,
                        "morphism undefined on generator '" + source_->generators()[g].name + "'");
        return *images_[g];
    }

    const Matrix& matrix(int k) const
    {
        std::lock_guard lock(cache_->mu);
        auto it = cache_->mats.find(k);
        if (it != cache_->mats.end())
            return it->second;
        const auto& src = source_->free_algebra();
        const auto& tgt = target_->algebra();
        const auto& basis = src.basis(k);
        Matrix m(tgt.dim(k), basis.size());
        if (m.rows() > 0) {
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const auto& b = basis[j];
                std::size_t last = static_cast<unsigned char>(b.word.back());
                Vector col;
                if (b.length() == 1) {
                    col = image(last);
                } else {
                    Vector fp = matrix(b.prefix_degree) * b.prefix_coords;
                    col = tgt.bracket(b.prefix_degree, fp, src.generators()[last].degree, image(last));
                }
                for (std::size_t i = 0; i < m.rows(); ++i)
                    m(i, j) = col[i];
            }
        }
        return cache_->mats.emplace(k, std::move(m)).first->second;
    }

    Element apply(const Element& e) const { return {e.degree, matrix(e.degree) * e.coords}; }

    /// First generator x (defined, with d x in the defined range) where
    /// f(dx) != d f(x).
    std::optional<std::string> chain_violation() const
    {
        const auto& gens = source_->generators();
        for (std::size_t g = 0; g < gens.size(); ++g) {
            if (!images_[g])
                continue;
            const Element& dx = source_->differential().image(g);
            if (!covers(dx))
                continue;
            Vector lhs = dx.degree >= 1 ? apply(dx).coords : Vector{};
            Vector rhs = target_->d({gens[g].degree, *images_[g]}).coords;
            if (lhs != rhs)
                return "f(d " + gens[g].name + ") != d f(" + gens[g].name + ")";
        }
        return std::nullopt;
    }

    void require_chain_map() const
    {
        if (auto v = chain_violation())
            throw Error(ErrorKind::NotAChainMap, *v);
    }

    /// True iff every generator occurring in e has an image.
    bool covers(const Element& e) const
    {
        if (e.degree < 1)
            return true;
        const auto& src = source_->free_algebra();
        for (std::size_t i = 0; i < e.coords.size(); ++i) {
            if (sgn(e.coords[i]) == 0)
                continue;
            for (char c : src.basis(e.degree)[i].word)
                if (!images_[static_cast<unsigned char>(c)])
                    return false;
        }
        return true;
    }

private:
    std::shared_ptr<const FreeDgla> source_;
    std::shared_ptr<const Dgla> target_;
    std::vector<std::optional<Vector>> images_;
    std::shared_ptr<detail::MatrixCache> cache_ = std::make_shared<detail::MatrixCache>();
};

/// g after f.  f's target must be g's source.
inline Morphism compose(const Morphism& g, const Morphism& f)
{
    if (static_cast<const Dgla*>(g.source().get()) != f.target().get())
        throw Error(ErrorKind::InvalidInput, "compose: target of the first map is not the source of the second");
    std::vector<std::optional<Vector>> imgs;
    const auto& gens = f.source()->generators();
    for (std::size_t x = 0; x < gens.size(); ++x) {
        if (!f.defined(x)) {
            imgs.emplace_back();
            continue;
        }
        Element fx{gens[x].degree, f.image(x)};
        if (!g.covers(fx))
            imgs.emplace_back();
        else
            imgs.emplace_back(g.apply(fx).coords);
    }
    return Morphism(f.source(), g.target(), std::move(imgs));
}

/// H_k(f) in the canonical homology bases, after checking f(Z) in Z and f(B) in B.
inline Matrix induced_map_on_homology(const Morphism& f, int k)
{
    f.require_chain_map();
    const auto& hs = f.source()->homology(k);
    const auto& ht = f.target()->homology(k);
    const Matrix& fk = f.matrix(k);
    for (const auto& z : hs.cycles.basis())
        if (!ht.cycles.contains(fk * z))
            throw Error(ErrorKind::NotAChainMap, "f does not preserve cycles in degree " + std::to_string(k));
    for (const auto& b : hs.boundaries.basis())
        if (!ht.boundaries.contains(fk * b))
            throw Error(ErrorKind::NotAChainMap, "f does not preserve boundaries in degree " + std::to_string(k));
    Matrix m(ht.dim(), hs.dim());
    for (std::size_t j = 0; j < hs.dim(); ++j) {
        Vector c = ht.class_of(fk * hs.reps[j]);
        for (std::size_t i = 0; i < ht.dim(); ++i)
            m(i, j) = c[i];
    }
    return m;
}

struct ValidationReport {
    bool ok = true;
    std::string violation; // empty when ok
    std::string subject;   // generator or basis element involved, if any

    static ValidationReport failure(std::string what, std::string who = {})
    {
        return {false, std::move(what), std::move(who)};
    }
};

/// Checks d^2 = 0 (generators and d_k d_{k+1} up to `bound`).
inline ValidationReport validate(const FreeDgla& a, int bound)
{
    const auto& gens = a.generators();
    for (std::size_t g = 0; g < gens.size(); ++g) {
        if (gens[g].degree < 1)
            return ValidationReport::failure("not simply connected", gens[g].name);
        const Element& dx = a.differential().image(g);
        if (dx.degree != gens[g].degree - 1)
            return ValidationReport::failure("differential not degree -1", gens[g].name);
        if (dx.degree >= 1 && !a.d(dx).is_zero())
            return ValidationReport::failure("d^2 != 0", gens[g].name);
    }
    for (int k = 2; k <= bound; ++k)
        if (!(a.differential_matrix(k - 1) * a.differential_matrix(k)).is_zero())
            return ValidationReport::failure("d^2 != 0 in degree " + std::to_string(k));
    return {};
}

/// Checks simple connectivity, antisymmetry, Jacobi, d^2 = 0 and Leibniz.
inline ValidationReport validate(const FiniteDgla& a)
{
    const auto& alg = a.finite_algebra();
    if (!alg.dims().empty() && alg.bottom_degree() < 1)
        return ValidationReport::failure("not simply connected", "degree " + std::to_string(alg.bottom_degree()));
    if (auto err = alg.check_identities())
        return ValidationReport::failure(*err);
    int top = alg.top_degree();
    for (int k = 2; k <= top; ++k)
        if (!(a.differential_matrix(k - 1) * a.differential_matrix(k)).is_zero())
            return ValidationReport::failure("d^2 != 0 in degree " + std::to_string(k));
    for (const auto& [p, np] : alg.dims())
        for (const auto& [q, nq] : alg.dims()) {
            if (alg.dim(p + q) == 0)
                continue;
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t j = 0; j < nq; ++j) {
                    Element x{p, unit_vector(np, i)}, y{q, unit_vector(nq, j)};
                    Vector lhs = a.d(alg.bracket(x, y)).coords;
                    Vector rhs = alg.bracket(a.d(x), y).coords;
                    axpy(rhs, koszul_sign(p, 1), alg.bracket(x, a.d(y)).coords);
                    if (lhs != rhs)
                        return ValidationReport::failure("Leibniz rule fails",
                                                         FiniteLieAlgebra::basis_name(p, i) + ", "
                                                             + FiniteLieAlgebra::basis_name(q, j));
                }
        }
    return {};
}

} // namespace dgla
