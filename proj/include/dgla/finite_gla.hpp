#pragma once

// Finite-dimensional graded Lie algebras given by structure constants.
// Basis element i of degree k is named e<k>_<i>.

#include <dgla/error.hpp>
#include <dgla/free_gla.hpp>
#include <dgla/linalg.hpp>

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace dgla {

class FiniteLieAlgebra : public GradedLieAlgebra {
public:
    using Key = std::tuple<int, std::size_t, int, std::size_t>;

    /// `dims` maps degree -> dimension.  `brackets` lists [e_{p,i}, e_{q,j}];
    /// the mirrored bracket is filled in by graded antisymmetry when absent.
    FiniteLieAlgebra(std::map<int, std::size_t> dims, std::map<Key, Vector> brackets)
        : dims_(std::move(dims)), table_(std::move(brackets))
    {
        std::erase_if(dims_, [](const auto& kv) { return kv.second == 0; });
        for (const auto& [key, value] : table_) {
            auto [p, i, q, j] = key;
            if (i >= dim(p) || j >= dim(q))
                throw Error(ErrorKind::InvalidInput, "bracket references a missing basis element");
            if (value.size() != dim(p + q))
                throw Error(ErrorKind::InvalidInput, "bracket value of e" + std::to_string(p) + "_"
                                                         + std::to_string(i) + ", e" + std::to_string(q)
                                                         + "_" + std::to_string(j) + " has wrong length");
        }
        std::map<Key, Vector> mirrored;
        for (const auto& [key, value] : table_) {
            auto [p, i, q, j] = key;
            Key other{q, j, p, i};
            if (!table_.count(other))
                mirrored.emplace(other, Rational(-koszul_sign(p, q)) * value);
        }
        table_.merge(mirrored);
    }

    const std::map<int, std::size_t>& dims() const noexcept { return dims_; }
    const std::map<Key, Vector>& table() const noexcept { return table_; }

    int top_degree() const { return dims_.empty() ? 0 : dims_.rbegin()->first; }
    int bottom_degree() const { return dims_.empty() ? 1 : dims_.begin()->first; }

    std::size_t dim(int degree) const override
    {
        auto it = dims_.find(degree);
        return it == dims_.end() ? 0 : it->second;
    }

    using GradedLieAlgebra::bracket;

    Vector bracket(int p, const Vector& a, int q, const Vector& b) const override
    {
        Vector out(dim(p + q));
        if (out.empty())
            return out;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (sgn(a[i]) == 0)
                continue;
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (sgn(b[j]) == 0)
                    continue;
                auto it = table_.find(Key{p, i, q, j});
                if (it != table_.end())
                    axpy(out, a[i] * b[j], it->second);
            }
        }
        return out;
    }

    static std::string basis_name(int degree, std::size_t i)
    {
        return "e" + std::to_string(degree) + "_" + std::to_string(i);
    }

    std::optional<Element> lookup(std::string_view name) const override
    {
        for (const auto& [deg, n] : dims_)
            for (std::size_t i = 0; i < n; ++i)
                if (basis_name(deg, i) == name)
                    return Element{deg, unit_vector(n, i)};
        return std::nullopt;
    }

    LiePoly basis_poly(int degree, std::size_t i) const override { return lie_gen(basis_name(degree, i)); }

    /// First violation of graded antisymmetry or Jacobi, if any.
    std::optional<std::string> check_identities() const
    {
        for (const auto& [key, value] : table_) {
            auto [p, i, q, j] = key;
            auto it = table_.find(Key{q, j, p, i});
            if (it == table_.end() || it->second != Rational(-koszul_sign(p, q)) * value)
                return "graded antisymmetry fails for [" + basis_name(p, i) + "," + basis_name(q, j) + "]";
        }
        // [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
        for (const auto& [p, np] : dims_)
            for (const auto& [q, nq] : dims_)
                for (const auto& [r, nr] : dims_) {
                    if (dim(p + q + r) == 0)
                        continue;
                    for (std::size_t i = 0; i < np; ++i)
                        for (std::size_t j = 0; j < nq; ++j)
                            for (std::size_t k = 0; k < nr; ++k) {
                                Element a{p, unit_vector(np, i)}, b{q, unit_vector(nq, j)},
                                    c{r, unit_vector(nr, k)};
                                Element lhs = bracket(a, bracket(b, c));
                                Vector rhs = bracket(bracket(a, b), c).coords;
                                axpy(rhs, koszul_sign(p, q), bracket(b, bracket(a, c)).coords);
                                if (lhs.coords != rhs)
                                    return "Jacobi identity fails for " + basis_name(p, i) + ", "
                                           + basis_name(q, j) + ", " + basis_name(r, k);
                            }
                }
        return std::nullopt;
    }

private:
    std::map<int, std::size_t> dims_;
    std::map<Key, Vector> table_;
};

} // namespace dgla
