#pragma once

// Free graded Lie algebras on finitely many positive-degree generators,
// realized inside the tensor algebra via [a,b] = a*b - (-1)^{|a||b|} b*a.
// In characteristic zero this embedding is faithful, so every identity of
// the free graded Lie algebra reduces to exact linear algebra on words.

#include <dgla/error.hpp>
#include <dgla/lie_poly.hpp>
#include <dgla/linalg.hpp>

#include <algorithm>
#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dgla {

struct GradedGenerator {
    std::string name;
    int degree = 1;

    friend bool operator==(const GradedGenerator&, const GradedGenerator&) = default;
};

/// An element of a graded Lie algebra: a degree and coordinates in the
/// algebra's canonical basis of that degree.
struct Element {
    int degree = 0;
    Vector coords;

    bool is_zero() const { return dgla::is_zero(coords); }
    friend bool operator==(const Element&, const Element&) = default;
};

inline int koszul_sign(long long a, long long b) { return ((a * b) % 2 == 0) ? 1 : -1; }

/// Common surface of the free and the finite-dimensional algebras.
class GradedLieAlgebra {
public:
    virtual ~GradedLieAlgebra() = default;

    virtual std::size_t dim(int degree) const = 0;
    virtual Vector bracket(int p, const Vector& a, int q, const Vector& b) const = 0;
    virtual std::optional<Element> lookup(std::string_view name) const = 0;
    /// Human-readable name of basis element i in the given degree.
    virtual LiePoly basis_poly(int degree, std::size_t i) const = 0;

    Element bracket(const Element& a, const Element& b) const
    {
        return {a.degree + b.degree, bracket(a.degree, a.coords, b.degree, b.coords)};
    }

    Element zero(int degree) const { return {degree, Vector(dim(degree))}; }

    /// Lie polynomial of a coordinate vector, in canonical basis order.
    LiePoly to_poly(const Element& e) const
    {
        LiePoly out;
        for (std::size_t i = 0; i < e.coords.size(); ++i)
            if (sgn(e.coords[i]) != 0)
                out = out + e.coords[i] * basis_poly(e.degree, i);
        return out;
    }
};

namespace detail {

struct PartialElement {
    std::optional<int> degree; // empty for syntactic zero
    Vector coords;
};

inline PartialElement evaluate_partial(const LiePoly& p, const GradedLieAlgebra& alg);

inline PartialElement evaluate_monomial(const Monomial& m, const GradedLieAlgebra& alg)
{
    if (!m.is_bracket()) {
        auto e = alg.lookup(m.name);
        if (!e)
            throw Error(ErrorKind::UnknownGenerator, "unknown generator '" + m.name + "'");
        return {e->degree, std::move(e->coords)};
    }
    auto l = evaluate_partial(*m.left, alg);
    auto r = evaluate_partial(*m.right, alg);
    if (!l.degree || !r.degree)
        return {};
    return {*l.degree + *r.degree, alg.bracket(*l.degree, l.coords, *r.degree, r.coords)};
}

inline PartialElement evaluate_partial(const LiePoly& p, const GradedLieAlgebra& alg)
{
    PartialElement out;
    for (const auto& t : p.terms) {
        if (!t.mono) {
            if (sgn(t.coef) != 0)
                throw Error(ErrorKind::InvalidInput, "nonzero constant in a Lie polynomial");
            continue;
        }
        if (sgn(t.coef) == 0)
            continue;
        auto m = evaluate_monomial(*t.mono, alg);
        if (!m.degree)
            continue;
        if (!out.degree) {
            out.degree = m.degree;
            out.coords = Vector(m.coords.size());
        } else if (*out.degree != *m.degree) {
            throw Error(ErrorKind::MixedDegrees, "terms of degrees " + std::to_string(*out.degree)
                                                     + " and " + std::to_string(*m.degree) + " in '"
                                                     + to_string(p) + "'");
        }
        axpy(out.coords, t.coef, m.coords);
    }
    return out;
}

} // namespace detail

/// Evaluates a bracket expression through the algebra's structure constants.
/// A syntactically zero polynomial takes `zero_degree`.
inline Element evaluate(const LiePoly& p, const GradedLieAlgebra& alg, std::optional<int> zero_degree = {})
{
    auto part = detail::evaluate_partial(p, alg);
    if (part.degree)
        return {*part.degree, std::move(part.coords)};
    if (!zero_degree)
        throw Error(ErrorKind::InvalidInput, "cannot infer the degree of the zero polynomial");
    return alg.zero(*zero_degree);
}

/// Syntactic degree of a bracket expression (nullopt for the zero polynomial).
inline std::optional<int> syntactic_degree(const LiePoly& p, const std::vector<GradedGenerator>& gens);

using Word = std::string; // generator indices, one char each
using TensorVec = std::map<Word, Rational>;

/// Coordinates in the word basis of one degree of the tensor algebra.
struct TensorCoord {
    int degree = 0;
    Vector vector;
};

class FreeLieAlgebra : public GradedLieAlgebra {
public:
    struct BasisElement {
        Word word;              // left-normed bracket [[[w0,w1],w2],...]
        int prefix_degree = 0;  // degree of the bracket of word minus its last letter
        Vector prefix_coords;   // coordinates of that prefix (empty for generators)

        std::size_t length() const noexcept { return word.size(); }
    };

    explicit FreeLieAlgebra(std::vector<GradedGenerator> gens) : gens_(std::move(gens))
    {
        if (gens_.size() > 250)
            throw Error(ErrorKind::InvalidInput, "too many generators");
        for (std::size_t i = 0; i < gens_.size(); ++i) {
            if (!index_.emplace(gens_[i].name, i).second)
                throw Error(ErrorKind::InvalidInput, "duplicate generator '" + gens_[i].name + "'");
        }
    }

    const std::vector<GradedGenerator>& generators() const noexcept { return gens_; }

    std::optional<std::size_t> generator_index(std::string_view name) const
    {
        auto it = index_.find(std::string(name));
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    bool simply_connected() const
    {
        return std::all_of(gens_.begin(), gens_.end(), [](const auto& g) { return g.degree >= 1; });
    }

    std::size_t dim(int degree) const override { return basis(degree).size(); }

    const std::vector<BasisElement>& basis(int degree) const { return degree_data(degree).elems; }

    /// Index of generator g inside the basis of its degree.
    std::size_t generator_basis_index(std::size_t g) const
    {
        const auto& d = degree_data(gens_[g].degree);
        return d.word_to_basis.at(Word(1, static_cast<char>(g)));
    }

    /// Basis index of the left-normed bracket of w, if w is a basis word.
    std::optional<std::size_t> basis_index_of_word(const Word& w) const
    {
        const auto& d = degree_data(word_degree(w));
        auto it = d.word_to_basis.find(w);
        if (it == d.word_to_basis.end())
            return std::nullopt;
        return it->second;
    }

    Element generator(std::size_t g) const
    {
        int deg = gens_[g].degree;
        return {deg, unit_vector(dim(deg), generator_basis_index(g))};
    }

    std::optional<Element> lookup(std::string_view name) const override
    {
        auto g = generator_index(name);
        if (!g)
            return std::nullopt;
        return generator(*g);
    }

    LiePoly basis_poly(int degree, std::size_t i) const override { return word_poly(basis(degree)[i].word); }

    LiePoly word_poly(const Word& w) const
    {
        LiePoly p = lie_gen(gens_[static_cast<unsigned char>(w[0])].name);
        for (std::size_t i = 1; i < w.size(); ++i)
            p = lie_bracket(std::move(p), lie_gen(gens_[static_cast<unsigned char>(w[i])].name));
        return p;
    }

    int word_degree(const Word& w) const
    {
        int d = 0;
        for (char c : w)
            d += gens_[static_cast<unsigned char>(c)].degree;
        return d;
    }

    /// True iff basis element i of `degree` involves generator g.
    bool involves(int degree, std::size_t i, std::size_t g) const
    {
        return basis(degree)[i].word.find(static_cast<char>(g)) != Word::npos;
    }

    /// Word basis of the tensor algebra in one degree, ordered by (length, lex).
    const std::vector<Word>& words(int degree) const { return degree_data(degree).words; }

    TensorVec left_normed_tensor(const Word& w) const
    {
        TensorVec t{{Word(1, w[0]), Rational(1)}};
        int deg = gens_[static_cast<unsigned char>(w[0])].degree;
        for (std::size_t i = 1; i < w.size(); ++i) {
            int gd = gens_[static_cast<unsigned char>(w[i])].degree;
            t = commutator(t, deg, TensorVec{{Word(1, w[i]), Rational(1)}}, gd);
            deg += gd;
        }
        return t;
    }

    static TensorVec commutator(const TensorVec& a, int da, const TensorVec& b, int db)
    {
        TensorVec out;
        Rational s = -koszul_sign(da, db);
        for (const auto& [wa, ca] : a)
            for (const auto& [wb, cb] : b) {
                out[wa + wb] += ca * cb;
                out[wb + wa] += s * ca * cb;
            }
        std::erase_if(out, [](const auto& kv) { return sgn(kv.second) == 0; });
        return out;
    }

    /// Tensor-algebra image of a bracket expression; also returns its degree.
    std::pair<std::optional<int>, TensorVec> tensor_of(const LiePoly& p) const
    {
        std::optional<int> deg;
        TensorVec out;
        for (const auto& t : p.terms) {
            if (!t.mono) {
                if (sgn(t.coef) != 0)
                    throw Error(ErrorKind::InvalidInput, "nonzero constant in a Lie polynomial");
                continue;
            }
            if (sgn(t.coef) == 0)
                continue;
            auto [md, mt] = tensor_of(*t.mono);
            if (!md)
                continue;
            if (deg && *deg != *md)
                throw Error(ErrorKind::MixedDegrees, "terms of degrees " + std::to_string(*deg) + " and "
                                                         + std::to_string(*md) + " in '" + to_string(p) + "'");
            deg = md;
            for (const auto& [w, c] : mt)
                out[w] += t.coef * c;
        }
        std::erase_if(out, [](const auto& kv) { return sgn(kv.second) == 0; });
        return {deg, std::move(out)};
    }

    std::pair<std::optional<int>, TensorVec> tensor_of(const Monomial& m) const
    {
        if (!m.is_bracket()) {
            auto g = generator_index(m.name);
            if (!g)
                throw Error(ErrorKind::UnknownGenerator, "unknown generator '" + m.name + "'");
            return {gens_[*g].degree, TensorVec{{Word(1, static_cast<char>(*g)), Rational(1)}}};
        }
        auto [dl, tl] = tensor_of(*m.left);
        auto [dr, tr] = tensor_of(*m.right);
        if (!dl || !dr)
            return {std::nullopt, {}};
        return {*dl + *dr, commutator(tl, *dl, tr, *dr)};
    }

    /// Dense tensor-algebra coordinates of a homogeneous Lie polynomial.
    TensorCoord embed(const LiePoly& p) const
    {
        auto [deg, t] = tensor_of(p);
        if (!deg)
            return {0, {}};
        require_simply_connected();
        const auto& d = degree_data(*deg);
        TensorCoord out{*deg, Vector(d.words.size())};
        for (const auto& [w, c] : t)
            out.vector[d.word_index.at(w)] = c;
        return out;
    }

    /// Coordinates of a tensor known to be a Lie element of the given degree.
    Vector normalize_tensor(int degree, const TensorVec& t) const
    {
        const auto& d = degree_data(degree);
        Vector coords(d.elems.size());
        TensorVec check;
        for (const auto& [w, c] : t) {
            auto it = d.pivot_row.find(w);
            if (it == d.pivot_row.end())
                continue;
            const auto& row = d.rows[it->second];
            for (const auto& [b, e] : row.expr)
                coords[b] += c * e;
            for (const auto& [rw, rc] : row.tensor)
                check[rw] += c * rc;
        }
        std::erase_if(check, [](const auto& kv) { return sgn(kv.second) == 0; });
        if (check != t)
            throw Error(ErrorKind::InvalidInput, "tensor is not a Lie element of degree " + std::to_string(degree));
        return coords;
    }

    /// Canonical coordinates of a bracket expression; zero iff p = 0 in L.
    Element normalize(const LiePoly& p, std::optional<int> zero_degree = {}) const
    {
        auto [deg, t] = tensor_of(p);
        if (!deg) {
            if (!zero_degree)
                throw Error(ErrorKind::InvalidInput, "cannot infer the degree of the zero polynomial");
            return zero(*zero_degree);
        }
        require_simply_connected();
        return {*deg, normalize_tensor(*deg, t)};
    }

    /// Coordinates of the left-normed bracket of a word.
    Element word_element(const Word& w) const
    {
        int deg = word_degree(w);
        return {deg, normalize_tensor(deg, left_normed_tensor(w))};
    }

    using GradedLieAlgebra::bracket;

    Vector bracket(int p, const Vector& a, int q, const Vector& b) const override
    {
        Vector out(dim(p + q));
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (sgn(a[i]) == 0)
                continue;
            for (std::size_t j = 0; j < b.size(); ++j) {
                if (sgn(b[j]) == 0)
                    continue;
                Rational c = a[i] * b[j];
                for (const auto& [k, v] : basis_bracket(p, i, q, j))
                    out[k] += c * v;
            }
        }
        return out;
    }

    const std::vector<std::pair<std::size_t, Rational>>& basis_bracket(int p, std::size_t i, int q,
                                                                        std::size_t j) const
    {
        std::lock_guard lock(mu_);
        auto key = std::make_tuple(p, i, q, j);
        auto it = brackets_.find(key);
        if (it != brackets_.end())
            return it->second;
        const auto& dp = degree_data(p);
        const auto& dq = degree_data(q);
        Vector c = normalize_tensor(p + q, commutator(dp.tensors[i], p, dq.tensors[j], q));
        std::vector<std::pair<std::size_t, Rational>> sparse;
        for (std::size_t k = 0; k < c.size(); ++k)
            if (sgn(c[k]) != 0)
                sparse.emplace_back(k, c[k]);
        return brackets_.emplace(key, std::move(sparse)).first->second;
    }

private:
    struct Row {
        Word pivot;
        TensorVec tensor;                                // fully reduced, pivot coefficient 1
        std::vector<std::pair<std::size_t, Rational>> expr; // row = sum expr_b * basis_b
    };

    struct DegreeData {
        std::vector<Word> words;
        std::unordered_map<Word, std::size_t> word_index;
        std::vector<BasisElement> elems;
        std::vector<TensorVec> tensors;
        std::unordered_map<Word, std::size_t> word_to_basis;
        std::vector<Row> rows;
        std::unordered_map<Word, std::size_t> pivot_row;
    };

    void require_simply_connected() const
    {
        if (!simply_connected())
            throw Error(ErrorKind::NotSimplyConnected, "free Lie algebra has a generator of degree < 1");
    }

    void enumerate_words(int remaining, Word& prefix, std::vector<Word>& out) const
    {
        if (remaining == 0) {
            out.push_back(prefix);
            return;
        }
        for (std::size_t g = 0; g < gens_.size(); ++g) {
            if (gens_[g].degree > remaining)
                continue;
            prefix.push_back(static_cast<char>(g));
            enumerate_words(remaining - gens_[g].degree, prefix, out);
            prefix.pop_back();
        }
    }

    const DegreeData& degree_data(int degree) const
    {
        std::lock_guard lock(mu_);
        auto it = data_.find(degree);
        if (it != data_.end())
            return it->second;
        if (degree <= 0) {
            require_simply_connected();
            return data_.emplace(degree, DegreeData{}).first->second;
        }
        require_simply_connected();
        DegreeData d;
        Word scratch;
        enumerate_words(degree, scratch, d.words);
        std::sort(d.words.begin(), d.words.end(), [](const Word& a, const Word& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        for (std::size_t i = 0; i < d.words.size(); ++i)
            d.word_index.emplace(d.words[i], i);

        // Greedy selection of left-normed brackets, reduced block by block
        // (the tensor embedding preserves the multiset of letters).
        std::map<Word, std::vector<std::size_t>> block_rows;
        for (const Word& w : d.words) {
            TensorVec t = left_normed_tensor(w);
            if (t.empty())
                continue;
            Word key = w;
            std::sort(key.begin(), key.end());
            auto& rows = block_rows[key];
            TensorVec r = t;
            std::vector<std::pair<std::size_t, Rational>> expr;
            std::map<std::size_t, Rational> acc;
            for (std::size_t ri : rows) {
                const Row& row = d.rows[ri];
                auto f = r.find(row.pivot);
                if (f == r.end())
                    continue;
                Rational c = f->second;
                for (const auto& [rw, rc] : row.tensor)
                    r[rw] -= c * rc;
                std::erase_if(r, [](const auto& kv) { return sgn(kv.second) == 0; });
                for (const auto& [b, e] : row.expr)
                    acc[b] -= c * e;
            }
            if (r.empty())
                continue;
            std::size_t b = d.elems.size();
            acc[b] += 1;
            Word pivot = r.begin()->first;
            Rational inv = 1 / r.begin()->second;
            for (auto& [rw, rc] : r)
                rc *= inv;
            Row row;
            row.pivot = pivot;
            row.tensor = std::move(r);
            for (auto& [bi, e] : acc)
                if (sgn(e) != 0)
                    row.expr.emplace_back(bi, e * inv);
            // Keep the block fully reduced.
            for (std::size_t ri : rows) {
                Row& other = d.rows[ri];
                auto f = other.tensor.find(pivot);
                if (f == other.tensor.end())
                    continue;
                Rational c = f->second;
                for (const auto& [rw, rc] : row.tensor)
                    other.tensor[rw] -= c * rc;
                std::erase_if(other.tensor, [](const auto& kv) { return sgn(kv.second) == 0; });
                std::map<std::size_t, Rational> e(other.expr.begin(), other.expr.end());
                for (const auto& [bi, v] : row.expr)
                    e[bi] -= c * v;
                other.expr.clear();
                for (auto& [bi, v] : e)
                    if (sgn(v) != 0)
                        other.expr.emplace_back(bi, v);
            }
            d.pivot_row.emplace(pivot, d.rows.size());
            rows.push_back(d.rows.size());
            d.rows.push_back(std::move(row));

            BasisElement el;
            el.word = w;
            d.word_to_basis.emplace(w, b);
            d.elems.push_back(std::move(el));
            d.tensors.push_back(std::move(t));
        }
        auto& stored = data_.emplace(degree, std::move(d)).first->second;
        // Prefix coordinates (lower degrees only, so no recursion into this one).
        for (auto& el : stored.elems) {
            if (el.word.size() < 2)
                continue;
            Word prefix = el.word.substr(0, el.word.size() - 1);
            el.prefix_degree = word_degree(prefix);
            el.prefix_coords = normalize_tensor(el.prefix_degree, left_normed_tensor(prefix));
        }
        return stored;
    }

    std::vector<GradedGenerator> gens_;
    std::unordered_map<std::string, std::size_t> index_;
    mutable std::recursive_mutex mu_;
    mutable std::map<int, DegreeData> data_;
    mutable std::map<std::tuple<int, std::size_t, int, std::size_t>, std::vector<std::pair<std::size_t, Rational>>>
        brackets_;
};

inline std::optional<int> syntactic_degree(const LiePoly& p, const std::vector<GradedGenerator>& gens)
{
    FreeLieAlgebra alg(gens);
    return alg.tensor_of(p).first;
}

/// Independent dimension count for L_k: closes the generators under
/// brackets [L_p, L_q] (p + q = k) and takes the rank of the result in the
/// tensor algebra.  Shares nothing with the greedy left-normed basis.
inline std::size_t dim_oracle(const std::vector<GradedGenerator>& gens, int k)
{
    if (k < 1)
        return 0;
    for (const auto& g : gens)
        if (g.degree < 1)
            throw Error(ErrorKind::NotSimplyConnected, "generator of degree < 1");
    std::vector<std::vector<TensorVec>> span(static_cast<std::size_t>(k) + 1);
    for (int d = 1; d <= k; ++d) {
        std::vector<TensorVec> spanning;
        for (std::size_t g = 0; g < gens.size(); ++g)
            if (gens[g].degree == d)
                spanning.push_back(TensorVec{{Word(1, static_cast<char>(g)), Rational(1)}});
        for (int p = 1; 2 * p <= d; ++p) {
            int q = d - p;
            const auto& sp = span[static_cast<std::size_t>(p)];
            const auto& sq = span[static_cast<std::size_t>(q)];
            for (std::size_t i = 0; i < sp.size(); ++i)
                for (std::size_t j = (p == q ? i : 0); j < sq.size(); ++j) {
                    auto c = FreeLieAlgebra::commutator(sp[i], p, sq[j], q);
                    if (!c.empty())
                        spanning.push_back(std::move(c));
                }
        }
        // Rank per multidegree block.
        std::map<Word, std::vector<const TensorVec*>> blocks;
        for (const auto& t : spanning) {
            Word key = t.begin()->first;
            std::sort(key.begin(), key.end());
            blocks[key].push_back(&t);
        }
        for (const auto& [key, members] : blocks) {
            std::map<Word, std::size_t> cols;
            for (const auto* t : members)
                for (const auto& [w, c] : *t)
                    cols.emplace(w, 0);
            std::size_t n = 0;
            std::vector<Word> col_words;
            for (auto& [w, idx] : cols) {
                idx = n++;
                col_words.push_back(w);
            }
            Matrix m(members.size(), n);
            for (std::size_t r = 0; r < members.size(); ++r)
                for (const auto& [w, c] : *members[r])
                    m(r, cols[w]) = c;
            auto [form, pivots] = rref(std::move(m));
            for (std::size_t r = 0; r < pivots.size(); ++r) {
                TensorVec t;
                for (std::size_t c = 0; c < n; ++c)
                    if (sgn(form(r, c)) != 0)
                        t.emplace(col_words[c], form(r, c));
                span[static_cast<std::size_t>(d)].push_back(std::move(t));
            }
        }
    }
    return span[static_cast<std::size_t>(k)].size();
}

} // namespace dgla
