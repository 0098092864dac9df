#pragma once

// JSON documents for dg Lie algebras, morphisms and relative models.
//
// Quasi-free:  {"generators": [{"name": "x", "degree": 1}, ...],
//               "differential": {"y": "[x,x]", ...}}          (omitted => 0)
// Finite:      {"dims": {"1": 2, "2": 1},
//               "brackets": [[[p, i], [q, j], ["c0", ...]], ...],
//               "differential": {"2": [["1"], ["0"]], ...}}   (rows x cols)
// Morphism:    {"source": <path|doc>, "target": <path|doc>, "images": {"x": "expr"}}
// Model:       quasi-free fields plus "base": [names], "stages": [{"A": [...], "B": [...]}],
//              "structureMap": {"target": <path|doc>, "images": {...}}
//
// Basis element i of degree k of a finite algebra is named e<k>_<i> in
// bracket expressions.  Rationals are written as strings ("3/4") or integers.

#include <dgla/dgla.hpp>
#include <dgla/error.hpp>
#include <dgla/finite_gla.hpp>
#include <dgla/free_gla.hpp>
#include <dgla/lie_poly.hpp>
#include <dgla/relative_model.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dgla {

using Json = nlohmann::ordered_json;

/// Raw text of a document, kept for error positions.
struct Source {
    std::string text;
    std::filesystem::path path; // empty for in-memory documents

    std::filesystem::path dir() const { return path.empty() ? std::filesystem::path{} : path.parent_path(); }

    std::pair<std::size_t, std::size_t> position(std::size_t offset) const
    {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        return {line, col};
    }

    /// Offset just past the opening quote of the first string literal equal to s.
    std::optional<std::size_t> find_string(const std::string& s) const
    {
        auto at = text.find(Json(s).dump());
        if (at == std::string::npos)
            return std::nullopt;
        return at + 1;
    }

    [[noreturn]] void fail(const std::string& msg, const std::optional<std::string>& near = {}) const
    {
        std::size_t off = 0;
        if (near)
            if (auto at = find_string(*near))
                off = *at - 1;
        auto [line, col] = position(off);
        throw ParseError(label() + msg, line, col);
    }

    std::string label() const { return path.empty() ? std::string{} : path.string() + ": "; }
};

inline Source read_source(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::InvalidInput, "cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return {ss.str(), p};
}

inline Json parse_json(const Source& src)
{
    try {
        return Json::parse(src.text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = src.position(e.byte > 0 ? e.byte - 1 : 0);
        std::string what = e.what();
        auto colon = what.find(": ", what.find("parse error"));
        throw ParseError(src.label() + "malformed JSON" + (colon == std::string::npos ? "" : what.substr(colon)),
                         line, col);
    }
}

/// Parses a bracket expression found inside a document, reporting positions
/// relative to the document.
inline LiePoly parse_expr(const Source& src, const Json& value)
{
    if (!value.is_string())
        src.fail("bracket expression must be a string");
    const std::string s = value.get<std::string>();
    try {
        return parse_lie_poly(s);
    } catch (const ParseError& e) {
        auto at = src.find_string(s);
        std::size_t off = at ? *at + e.column() - 1 : 0;
        auto [line, col] = src.position(off);
        throw ParseError(src.label() + e.bare() + " in \"" + s + "\"", line, col);
    }
}

inline Rational parse_rational_value(const Source& src, const Json& v)
{
    if (v.is_number_integer())
        return Rational(v.dump(), 10);
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const Error&) {
            src.fail("invalid rational \"" + v.get<std::string>() + "\"", v.get<std::string>());
        }
    }
    src.fail("expected a rational (integer or string \"p/q\"), got " + v.dump());
}

inline const Json& require(const Source& src, const Json& obj, const char* key)
{
    if (!obj.is_object())
        src.fail("expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        src.fail(std::string("missing field \"") + key + "\"");
    return *it;
}

inline int parse_int(const Source& src, const Json& v, const std::string& what)
{
    if (v.is_number_integer())
        return v.get<int>();
    if (v.is_string()) {
        try {
            std::size_t used = 0;
            int n = std::stoi(v.get<std::string>(), &used);
            if (used == v.get<std::string>().size())
                return n;
        } catch (const std::exception&) {
        }
    }
    src.fail(what + " must be an integer, got " + v.dump());
}

// ---------------------------------------------------------------- dglas

inline std::vector<GradedGenerator> parse_generators(const Source& src, const Json& arr)
{
    if (!arr.is_array())
        src.fail("\"generators\" must be a list", "generators");
    std::vector<GradedGenerator> gens;
    for (const auto& g : arr) {
        const Json& name = require(src, g, "name");
        if (!name.is_string())
            src.fail("generator name must be a string", "name");
        std::string n = name.get<std::string>();
        if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_')
            || n.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")
                   != std::string::npos)
            src.fail("invalid generator name \"" + n + "\"", n);
        gens.push_back({n, parse_int(src, require(src, g, "degree"), "degree of '" + n + "'")});
    }
    return gens;
}

inline std::shared_ptr<FreeDgla> parse_free_dgla(const Source& src, const Json& doc)
{
    auto gens = parse_generators(src, require(src, doc, "generators"));
    std::map<std::string, LiePoly> diff;
    if (auto it = doc.find("differential"); it != doc.end()) {
        if (!it->is_object())
            src.fail("\"differential\" must be an object", "differential");
        for (const auto& [name, expr] : it->items())
            diff.emplace(name, parse_expr(src, expr));
    }
    for (const auto& g : gens)
        if (g.degree < 1)
            throw Error(ErrorKind::NotSimplyConnected,
                        "generator '" + g.name + "' has degree " + std::to_string(g.degree) + " < 1");
    return FreeDgla::from_polys(std::move(gens), diff);
}

inline std::shared_ptr<FiniteDgla> parse_finite_dgla(const Source& src, const Json& doc)
{
    const Json& dj = require(src, doc, "dims");
    if (!dj.is_object())
        src.fail("\"dims\" must be an object", "dims");
    std::map<int, std::size_t> dims;
    for (const auto& [k, n] : dj.items()) {
        int deg = parse_int(src, Json(k), "degree key");
        int dim = parse_int(src, n, "dimension");
        if (dim < 0)
            throw Error(ErrorKind::InvalidInput, "negative dimension in degree " + k);
        if (dim > 0 && deg < 1)
            throw Error(ErrorKind::NotSimplyConnected, "finite algebra has elements in degree " + k);
        dims[deg] = static_cast<std::size_t>(dim);
    }
    auto dim_of = [&dims](int k) {
        auto it = dims.find(k);
        return it == dims.end() ? std::size_t{0} : it->second;
    };
    std::map<FiniteLieAlgebra::Key, Vector> table;
    if (auto it = doc.find("brackets"); it != doc.end()) {
        if (!it->is_array())
            src.fail("\"brackets\" must be a list", "brackets");
        for (const auto& entry : *it) {
            if (!entry.is_array() || entry.size() != 3 || !entry[0].is_array() || entry[0].size() != 2
                || !entry[1].is_array() || entry[1].size() != 2 || !entry[2].is_array())
                src.fail("bracket entry must be [[p, i], [q, j], [values...]], got " + entry.dump(), "brackets");
            int p = parse_int(src, entry[0][0], "degree"), q = parse_int(src, entry[1][0], "degree");
            int i = parse_int(src, entry[0][1], "index"), j = parse_int(src, entry[1][1], "index");
            if (i < 0 || j < 0)
                throw Error(ErrorKind::InvalidInput, "negative basis index in bracket entry " + entry.dump());
            Vector v;
            for (const auto& c : entry[2])
                v.push_back(parse_rational_value(src, c));
            FiniteLieAlgebra::Key key{p, static_cast<std::size_t>(i), q, static_cast<std::size_t>(j)};
            if (!table.emplace(key, v).second)
                throw Error(ErrorKind::InvalidInput, "duplicate bracket entry " + entry.dump());
        }
    }
    auto alg = std::make_shared<const FiniteLieAlgebra>(dims, std::move(table));
    std::map<int, Matrix> mats;
    if (auto it = doc.find("differential"); it != doc.end()) {
        if (!it->is_object())
            src.fail("\"differential\" must be an object", "differential");
        for (const auto& [k, rows] : it->items()) {
            int deg = parse_int(src, Json(k), "degree key");
            if (!rows.is_array())
                src.fail("differential matrix must be a list of rows", k);
            Matrix m(dim_of(deg - 1), dim_of(deg));
            if (rows.size() != m.rows())
                throw Error(ErrorKind::InvalidInput, "differential in degree " + k + " must have "
                                                         + std::to_string(m.rows()) + " rows");
            for (std::size_t r = 0; r < m.rows(); ++r) {
                if (!rows[r].is_array() || rows[r].size() != m.cols())
                    throw Error(ErrorKind::InvalidInput, "differential in degree " + k + " must have "
                                                             + std::to_string(m.cols()) + " columns");
                for (std::size_t c = 0; c < m.cols(); ++c)
                    m(r, c) = parse_rational_value(src, rows[r][c]);
            }
            mats[deg] = std::move(m);
        }
    }
    return std::make_shared<FiniteDgla>(std::move(alg), std::move(mats));
}

inline std::shared_ptr<Dgla> parse_dgla(const Source& src, const Json& doc)
{
    if (!doc.is_object())
        src.fail("a dg Lie algebra document must be an object");
    if (doc.contains("dims"))
        return parse_finite_dgla(src, doc);
    return parse_free_dgla(src, doc);
}

inline std::shared_ptr<Dgla> load_dgla(const std::filesystem::path& p)
{
    Source src = read_source(p);
    return parse_dgla(src, parse_json(src));
}

/// A field that is either an inline document or a path relative to `src`.
inline std::shared_ptr<Dgla> resolve_dgla(const Source& src, const Json& v)
{
    if (v.is_string())
        return load_dgla(src.dir() / v.get<std::string>());
    return parse_dgla(src, v);
}

// ---------------------------------------------------------------- morphisms

/// Generator images from an "images" object.  Missing names map to
/// themselves when `identity_default` (endomorphisms), and are an error
/// otherwise.
inline std::vector<Vector> parse_images(const Source& src, const Json& images, const FreeLieAlgebra& source,
                                        const Dgla& target, bool identity_default)
{
    if (!images.is_object())
        src.fail("\"images\" must be an object", "images");
    const auto& gens = source.generators();
    for (const auto& [name, _] : images.items())
        if (!source.generator_index(name))
            throw Error(ErrorKind::UnknownGenerator, "image given for unknown generator '" + name + "'");
    std::vector<Vector> out;
    for (std::size_t g = 0; g < gens.size(); ++g) {
        auto it = images.find(gens[g].name);
        if (it == images.end()) {
            if (!identity_default)
                throw Error(ErrorKind::InvalidInput, "no image given for generator '" + gens[g].name + "'");
            out.push_back(source.generator(g).coords);
            continue;
        }
        Element e = evaluate(parse_expr(src, *it), target.algebra(), gens[g].degree);
        if (e.degree != gens[g].degree)
            throw Error(ErrorKind::InvalidInput, "image of '" + gens[g].name + "' has degree "
                                                     + std::to_string(e.degree) + ", expected "
                                                     + std::to_string(gens[g].degree));
        out.push_back(std::move(e.coords));
    }
    return out;
}

inline std::vector<std::optional<Vector>> as_optional(const std::vector<Vector>& v)
{
    return {v.begin(), v.end()};
}

struct MorphismDocument {
    std::shared_ptr<Dgla> source, target; // null when the document omits them
    Json images;
    Source src;
};

inline MorphismDocument load_morphism_document(const std::filesystem::path& p)
{
    MorphismDocument m;
    m.src = read_source(p);
    Json doc = parse_json(m.src);
    m.images = require(m.src, doc, "images");
    if (auto it = doc.find("source"); it != doc.end())
        m.source = resolve_dgla(m.src, *it);
    if (auto it = doc.find("target"); it != doc.end())
        m.target = resolve_dgla(m.src, *it);
    return m;
}

// ---------------------------------------------------------------- models

inline RelativeModel parse_model(const Source& src, const Json& doc)
{
    auto alg = parse_free_dgla(src, doc);
    const auto& gens = alg->generators();
    RelativeModel m;
    m.algebra = alg;

    const Json& base = require(src, doc, "base");
    if (!base.is_array())
        src.fail("\"base\" must be a list of generator names", "base");
    for (const auto& b : base) {
        if (!b.is_string())
            src.fail("\"base\" must be a list of generator names", "base");
        auto idx = alg->free_algebra().generator_index(b.get<std::string>());
        if (!idx)
            throw Error(ErrorKind::UnknownGenerator, "unknown base generator '" + b.get<std::string>() + "'");
        if (*idx != m.base_count)
            throw Error(ErrorKind::InvalidInput, "base generators must be listed first, in order");
        ++m.base_count;
    }

    if (auto it = doc.find("stages"); it != doc.end()) {
        if (!it->is_array())
            src.fail("\"stages\" must be a list", "stages");
        auto names = [&](const Json& st, const char* key) {
            std::vector<std::size_t> out;
            auto f = st.find(key);
            if (f == st.end())
                return out;
            if (!f->is_array())
                src.fail(std::string("stage field \"") + key + "\" must be a list", key);
            for (const auto& n : *f) {
                if (!n.is_string())
                    src.fail("stage entries must be generator names", key);
                auto idx = alg->free_algebra().generator_index(n.get<std::string>());
                if (!idx)
                    throw Error(ErrorKind::UnknownGenerator, "unknown stage generator '" + n.get<std::string>() + "'");
                out.push_back(*idx);
            }
            return out;
        };
        for (const auto& st : *it) {
            if (!st.is_object())
                src.fail("each stage must be an object", "stages");
            m.stages.push_back({names(st, "A"), names(st, "B")});
        }
    }

    if (auto it = doc.find("structureMap"); it != doc.end()) {
        m.target = resolve_dgla(src, require(src, *it, "target"));
        auto imgs = parse_images(src, require(src, *it, "images"), alg->free_algebra(), *m.target, false);
        m.structure_map.emplace(m.algebra, m.target, as_optional(imgs));
    }
    (void)gens;
    return m;
}

inline RelativeModel load_model(const std::filesystem::path& p)
{
    Source src = read_source(p);
    return parse_model(src, parse_json(src));
}

// ---------------------------------------------------------------- output

inline std::string expr_string(const GradedLieAlgebra& alg, const Element& e) { return to_string(alg.to_poly(e)); }

inline Json rational_json(const Rational& q) { return q.get_str(); }

inline Json dgla_to_json(const Dgla& a)
{
    Json out = Json::object();
    if (auto* fr = dynamic_cast<const FreeDgla*>(&a)) {
        out["generators"] = Json::array();
        for (const auto& g : fr->generators())
            out["generators"].push_back({{"name", g.name}, {"degree", g.degree}});
        out["differential"] = Json::object();
        for (std::size_t g = 0; g < fr->generators().size(); ++g) {
            const Element& dx = fr->differential().image(g);
            if (!dx.is_zero())
                out["differential"][fr->generators()[g].name] = expr_string(fr->free_algebra(), dx);
        }
        return out;
    }
    const auto& fin = dynamic_cast<const FiniteDgla&>(a);
    const auto& alg = fin.finite_algebra();
    out["dims"] = Json::object();
    for (const auto& [k, n] : alg.dims())
        out["dims"][std::to_string(k)] = n;
    out["brackets"] = Json::array();
    for (const auto& [key, value] : alg.table()) {
        auto [p, i, q, j] = key;
        if (std::make_pair(p, i) > std::make_pair(q, j) || is_zero(value))
            continue;
        Json vals = Json::array();
        for (const auto& c : value)
            vals.push_back(rational_json(c));
        out["brackets"].push_back(Json::array({Json::array({p, i}), Json::array({q, j}), vals}));
    }
    out["differential"] = Json::object();
    for (const auto& [k, m] : fin.matrices()) {
        if (m.is_zero())
            continue;
        Json rows = Json::array();
        for (std::size_t r = 0; r < m.rows(); ++r) {
            Json row = Json::array();
            for (std::size_t c = 0; c < m.cols(); ++c)
                row.push_back(rational_json(m(r, c)));
            rows.push_back(row);
        }
        out["differential"][std::to_string(k)] = rows;
    }
    return out;
}

inline Json images_to_json(const Morphism& f)
{
    Json out = Json::object();
    const auto& gens = f.source()->generators();
    for (std::size_t g = 0; g < gens.size(); ++g)
        if (f.defined(g))
            out[gens[g].name] = expr_string(f.target()->algebra(), {gens[g].degree, f.image(g)});
    return out;
}

inline Json derivation_to_json(const Derivation& d, const std::vector<std::size_t>& gens)
{
    Json out = Json::object();
    for (auto g : gens)
        out[d.algebra().generators()[g].name] = expr_string(d.algebra(), d.image(g));
    return out;
}

inline Json model_to_json(const RelativeModel& m)
{
    Json out = dgla_to_json(*m.algebra);
    out["base"] = Json::array();
    for (std::size_t v = 0; v < m.base_count; ++v)
        out["base"].push_back(m.generators()[v].name);
    out["stages"] = Json::array();
    for (const auto& st : m.stages) {
        Json s = {{"A", Json::array()}, {"B", Json::array()}};
        for (auto g : st.a)
            s["A"].push_back(m.generators()[g].name);
        for (auto g : st.b)
            s["B"].push_back(m.generators()[g].name);
        out["stages"].push_back(s);
    }
    if (m.structure_map && m.target)
        out["structureMap"] = {{"target", dgla_to_json(*m.target)}, {"images", images_to_json(*m.structure_map)}};
    return out;
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace dgla
