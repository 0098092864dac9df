#pragma once

// Exact dense linear algebra over Q.  Every "choose a section" or "choose a
// complement" step is pinned to the pivot columns of the reduced row echelon
// form so results are reproducible bit for bit.

#include <dgla/error.hpp>

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dgla {

using Rational = mpq_class;
using Vector = std::vector<Rational>;

inline Rational parse_rational(const std::string& s)
{
    Rational q;
    if (q.set_str(s, 10) != 0)
        throw Error(ErrorKind::Parse, "not a rational number: '" + s + "'");
    if (q.get_den() == 0)
        throw Error(ErrorKind::Parse, "zero denominator: '" + s + "'");
    q.canonicalize();
    return q;
}

/// a/b in canonical form (the two-argument mpq_class constructor does not reduce).
inline Rational ratio(long a, long b)
{
    Rational q(a, b);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline bool is_zero(const Vector& v)
{
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

inline Vector unit_vector(std::size_t n, std::size_t i)
{
    Vector v(n);
    v[i] = 1;
    return v;
}

inline void axpy(Vector& y, const Rational& a, const Vector& x)
{
    if (sgn(a) == 0)
        return;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (sgn(x[i]) != 0)
            y[i] += a * x[i];
}

inline Vector operator+(Vector a, const Vector& b)
{
    axpy(a, 1, b);
    return a;
}

inline Vector operator-(Vector a, const Vector& b)
{
    axpy(a, -1, b);
    return a;
}

inline Vector operator*(const Rational& s, Vector v)
{
    for (auto& x : v)
        x *= s;
    return v;
}

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1;
        return m;
    }

    static Matrix from_rows(std::size_t cols, const std::vector<Vector>& rows)
    {
        Matrix m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = rows[i][j];
        return m;
    }

    static Matrix from_columns(std::size_t rows, const std::vector<Vector>& cols)
    {
        Matrix m(rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < rows; ++i)
                m(i, j) = cols[j][i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vector row(std::size_t i) const
    {
        return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                      data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
    }

    Vector column(std::size_t j) const
    {
        Vector v(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            v[i] = (*this)(i, j);
        return v;
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_zero() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return sgn(x) == 0; });
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_)
            throw Error(ErrorKind::InvalidInput, "matrix product: dimension mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Rational& aik = a(i, k);
                if (sgn(aik) == 0)
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (sgn(b(k, j)) != 0)
                        c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Vector operator*(const Matrix& a, const Vector& v)
    {
        if (a.cols_ != v.size())
            throw Error(ErrorKind::InvalidInput, "matrix-vector product: dimension mismatch");
        Vector out(a.rows_);
        for (std::size_t k = 0; k < a.cols_; ++k) {
            if (sgn(v[k]) == 0)
                continue;
            for (std::size_t i = 0; i < a.rows_; ++i)
                if (sgn(a(i, k)) != 0)
                    out[i] += a(i, k) * v[k];
        }
        return out;
    }

    friend Matrix operator-(Matrix a, const Matrix& b)
    {
        for (std::size_t i = 0; i < a.data_.size(); ++i)
            a.data_[i] -= b.data_[i];
        return a;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

struct RrefResult {
    Matrix form;
    std::vector<std::size_t> pivots;
};

inline RrefResult rref(Matrix m)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && sgn(m(p, c)) == 0)
            ++p;
        if (p == m.rows())
            continue;
        if (p != r)
            for (std::size_t j = 0; j < m.cols(); ++j)
                std::swap(m(p, j), m(r, j));
        Rational inv = 1 / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j)
            m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || sgn(m(i, c)) == 0)
                continue;
            Rational f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j)
                if (sgn(m(r, j)) != 0)
                    m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Matrix& m) { return rref(m).pivots.size(); }

/// A linear subspace of Q^ambient held by its reduced row echelon basis.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(std::size_t ambient) : ambient_(ambient) {}

    static Subspace span(std::size_t ambient, const std::vector<Vector>& vectors)
    {
        Subspace s(ambient);
        if (vectors.empty())
            return s;
        auto [form, pivots] = rref(Matrix::from_rows(ambient, vectors));
        for (std::size_t i = 0; i < pivots.size(); ++i)
            s.basis_.push_back(form.row(i));
        s.pivots_ = std::move(pivots);
        return s;
    }

    static Subspace full(std::size_t ambient)
    {
        std::vector<Vector> vs;
        for (std::size_t i = 0; i < ambient; ++i)
            vs.push_back(unit_vector(ambient, i));
        return span(ambient, vs);
    }

    std::size_t ambient_dim() const noexcept { return ambient_; }
    std::size_t dim() const noexcept { return basis_.size(); }
    const std::vector<Vector>& basis() const noexcept { return basis_; }
    const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

    /// Coordinates of v in this subspace's basis, or nullopt if v is outside.
    std::optional<Vector> coordinates(const Vector& v) const
    {
        if (v.size() != ambient_)
            throw Error(ErrorKind::InvalidInput, "membership: dimension mismatch");
        Vector coords(basis_.size());
        Vector residual = v;
        for (std::size_t i = 0; i < basis_.size(); ++i) {
            coords[i] = residual[pivots_[i]];
            axpy(residual, -coords[i], basis_[i]);
        }
        if (!dgla::is_zero(residual))
            return std::nullopt;
        return coords;
    }

    bool contains(const Vector& v) const { return coordinates(v).has_value(); }

    bool contains(const Subspace& other) const
    {
        return std::all_of(other.basis_.begin(), other.basis_.end(),
                           [this](const Vector& v) { return contains(v); });
    }

    friend bool operator==(const Subspace& a, const Subspace& b)
    {
        return a.ambient_ == b.ambient_ && a.basis_ == b.basis_;
    }

private:
    std::size_t ambient_ = 0;
    std::vector<Vector> basis_;
    std::vector<std::size_t> pivots_;
};

inline Subspace kernel_basis(const Matrix& m)
{
    auto [form, pivots] = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots)
        is_pivot[p] = true;
    std::vector<Vector> vs;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f])
            continue;
        Vector v(m.cols());
        v[f] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i)
            v[pivots[i]] = -form(i, f);
        vs.push_back(std::move(v));
    }
    return Subspace::span(m.cols(), vs);
}

inline Subspace column_space(const Matrix& m)
{
    std::vector<Vector> cols;
    for (std::size_t j = 0; j < m.cols(); ++j)
        cols.push_back(m.column(j));
    return Subspace::span(m.rows(), cols);
}

/// Right inverse s of a surjection m (m*s = 1).  Each codomain basis vector
/// is lifted through the pivot columns of rref(m); other coordinates are 0.
inline Matrix section_of_surjection(const Matrix& m)
{
    auto pivots = rref(m).pivots;
    if (pivots.size() < m.rows())
        throw Error(ErrorKind::NotSurjective, "matrix has row rank " + std::to_string(pivots.size())
                                                  + " < " + std::to_string(m.rows()));
    Matrix square(m.rows(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < pivots.size(); ++j)
            square(i, j) = m(i, pivots[j]);
    // Invert the pivot block by reducing [square | I].
    Matrix aug(m.rows(), 2 * m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.rows(); ++j)
            aug(i, j) = square(i, j);
        aug(i, m.rows() + i) = 1;
    }
    auto reduced = rref(std::move(aug)).form;
    Matrix s(m.cols(), m.rows());
    for (std::size_t j = 0; j < pivots.size(); ++j)
        for (std::size_t c = 0; c < m.rows(); ++c)
            s(pivots[j], c) = reduced(j, m.rows() + c);
    return s;
}

struct QuotientData {
    Matrix projection;                   // (ambient - dim sub) x ambient
    std::vector<Vector> coset_reps;      // standard vectors on complement coordinates
    std::vector<std::size_t> complement; // coordinates carrying no pivot of sub
};

inline QuotientData quotient_data(std::size_t ambient, const Subspace& sub)
{
    if (sub.ambient_dim() != ambient)
        throw Error(ErrorKind::InvalidInput, "quotient: subspace lives in a different ambient space");
    std::vector<bool> is_pivot(ambient, false);
    for (auto p : sub.pivots())
        is_pivot[p] = true;
    QuotientData q;
    for (std::size_t c = 0; c < ambient; ++c)
        if (!is_pivot[c])
            q.complement.push_back(c);
    q.projection = Matrix(q.complement.size(), ambient);
    for (std::size_t i = 0; i < q.complement.size(); ++i)
        q.projection(i, q.complement[i]) = 1;
    // A pivot coordinate e_p is congruent to e_p - basis_j, which lives on the complement.
    for (std::size_t j = 0; j < sub.dim(); ++j) {
        std::size_t p = sub.pivots()[j];
        for (std::size_t i = 0; i < q.complement.size(); ++i)
            q.projection(i, p) = -sub.basis()[j][q.complement[i]];
    }
    for (auto c : q.complement)
        q.coset_reps.push_back(unit_vector(ambient, c));
    return q;
}

inline std::optional<Vector> membership(const Vector& v, const Subspace& sub)
{
    return sub.coordinates(v);
}

/// Canonical solution of a*x = b (free variables set to zero), if any.
inline std::optional<Vector> solve(const Matrix& a, const Vector& b)
{
    if (b.size() != a.rows())
        throw Error(ErrorKind::InvalidInput, "solve: dimension mismatch");
    Matrix aug(a.rows(), a.cols() + 1);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j)
            aug(i, j) = a(i, j);
        aug(i, a.cols()) = b[i];
    }
    auto [form, pivots] = rref(std::move(aug));
    if (!pivots.empty() && pivots.back() == a.cols())
        return std::nullopt;
    Vector x(a.cols());
    for (std::size_t i = 0; i < pivots.size(); ++i)
        x[pivots[i]] = form(i, a.cols());
    return x;
}

inline std::optional<Matrix> inverse(const Matrix& m)
{
    if (m.rows() != m.cols())
        return std::nullopt;
    if (m.rows() == 0)
        return Matrix();
    if (rank(m) != m.rows())
        return std::nullopt;
    return section_of_surjection(m);
}

inline Subspace intersect(const Subspace& a, const Subspace& b)
{
    // x = sum s_i a_i = sum t_j b_j  <=>  [A^T | -B^T] (s,t) = 0
    std::size_t n = a.ambient_dim();
    Matrix m(n, a.dim() + b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t r = 0; r < n; ++r)
            m(r, i) = a.basis()[i][r];
    for (std::size_t j = 0; j < b.dim(); ++j)
        for (std::size_t r = 0; r < n; ++r)
            m(r, a.dim() + j) = -b.basis()[j][r];
    std::vector<Vector> vs;
    Subspace ker = kernel_basis(m);
    for (const auto& k : ker.basis()) {
        Vector x(n);
        for (std::size_t i = 0; i < a.dim(); ++i)
            axpy(x, k[i], a.basis()[i]);
        vs.push_back(std::move(x));
    }
    return Subspace::span(n, vs);
}

} // namespace dgla
