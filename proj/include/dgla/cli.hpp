#pragma once

// The `dgla` command line.  Kept in a header so tests can drive it
// in-process; tools/dgla.cpp only forwards argv.
//
// Exit codes: 0 success / equivalent, 1 parse error (file or command line),
// 2 invalid input, 3 negative verdict.

#include <dgla/dgla.hpp>
#include <dgla/error.hpp>
#include <dgla/homotopy_aut.hpp>
#include <dgla/inversion.hpp>
#include <dgla/io.hpp>
#include <dgla/relative_model.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace dgla::cli {

enum Exit : int { Ok = 0, ParseFailure = 1, Invalid = 2, Negative = 3 };

struct Style {
    bool color = false;

    std::string paint(const std::string& s, const char* code) const
    {
        return color ? std::string("\033[") + code + "m" + s + "\033[0m" : s;
    }
    std::string good(const std::string& s) const { return paint(s, "32"); }
    std::string bad(const std::string& s) const { return paint(s, "31"); }
    std::string bold(const std::string& s) const { return paint(s, "1"); }
};

/// ANSI styling only on a terminal, and never with DGLA_COLOR=0.
inline bool color_enabled(int fd)
{
    if (const char* env = std::getenv("DGLA_COLOR"); env && std::string(env) == "0")
        return false;
    return ::isatty(fd) != 0;
}

namespace detail {

struct Options {
    std::vector<std::string> files;
    int max_degree = 0;
    std::string format = "canonical";
    std::string out;
};

class Runner {
public:
    Runner(std::ostream& out, std::ostream& err, Style out_style, Style err_style)
        : out_(out), err_(err), os_(out_style), es_(err_style)
    {
    }

    int validate(const Options& o)
    {
        auto a = load_dgla(o.files[0]);
        ValidationReport r;
        if (auto* fr = dynamic_cast<const FreeDgla*>(a.get()))
            r = dgla::validate(*fr, o.max_degree);
        else
            r = dgla::validate(dynamic_cast<const FiniteDgla&>(*a));
        if (o.format == "table") {
            std::ostringstream s;
            if (r.ok)
                s << os_.good("valid") << "\n";
            else
                s << os_.bad("invalid") << ": " << r.violation << (r.subject.empty() ? "" : " (" + r.subject + ")")
                  << "\n";
            emit(o, s.str());
        } else {
            Json j = {{"valid", r.ok}};
            if (!r.ok) {
                j["violation"] = r.violation;
                if (!r.subject.empty())
                    j["subject"] = r.subject;
            }
            emit(o, dump(j));
        }
        if (!r.ok) {
            err_ << es_.bad("error") << ": " << r.violation << (r.subject.empty() ? "" : " (" + r.subject + ")")
                 << "\n";
            return Invalid;
        }
        return Ok;
    }

    int homology(const Options& o)
    {
        auto a = load_dgla(o.files[0]);
        a->set_degree_bound(o.max_degree);
        std::vector<std::size_t> dims;
        for (int k = 1; k <= o.max_degree; ++k)
            dims.push_back(a->homology(k).dim());
        if (o.format == "table") {
            std::ostringstream s;
            s << os_.bold("degree  dim H") << "\n";
            for (std::size_t i = 0; i < dims.size(); ++i)
                s << std::setw(6) << i + 1 << "  " << std::setw(5) << dims[i] << "\n";
            emit(o, s.str());
        } else {
            Json j = {{"maxDegree", o.max_degree}, {"homology", Json::array()}};
            for (std::size_t i = 0; i < dims.size(); ++i)
                j["homology"].push_back({{"degree", i + 1}, {"dim", dims[i]}});
            emit(o, dump(j));
        }
        return Ok;
    }

    int minimal_model(const Options& o)
    {
        auto base_any = load_dgla(o.files[0]);
        auto base = std::dynamic_pointer_cast<FreeDgla>(base_any);
        if (!base)
            throw Error(ErrorKind::InvalidInput, "the base must be a quasi-free dg Lie algebra");
        auto target = load_dgla(o.files[1]);
        auto map = load_morphism_document(o.files[2]);
        auto images = parse_images(map.src, map.images, base->free_algebra(), *target, false);
        RelativeModel m = build_minimal_model(base, target, images, o.max_degree);
        auto report = verify_model(m, o.max_degree, images);
        if (!report.ok())
            throw Error(ErrorKind::InvalidInput, "constructed model failed verification: "
                                                     + report.first_failure()->name + " "
                                                     + report.first_failure()->detail);
        if (o.format == "table") {
            std::ostringstream s;
            s << os_.bold("stage  A                     B") << "\n";
            for (std::size_t k = 0; k < m.stages.size(); ++k) {
                auto names = [&](const std::vector<std::size_t>& ix) {
                    std::string r;
                    for (auto g : ix)
                        r += (r.empty() ? "" : " ") + m.generators()[g].name;
                    return r.empty() ? std::string("-") : r;
                };
                s << std::setw(5) << k + 1 << "  " << std::left << std::setw(20) << names(m.stages[k].a) << "  "
                  << names(m.stages[k].b) << std::right << "\n";
            }
            for (auto w : m.fiber()) {
                const Element& dw = m.algebra->differential().image(w);
                s << "d " << m.generators()[w].name << " = " << expr_string(m.lie(), dw) << ",  q "
                  << m.generators()[w].name << " = "
                  << expr_string(target->algebra(), {m.generators()[w].degree, m.structure_map->image(w)}) << "\n";
            }
            emit(o, s.str());
        } else {
            emit(o, dump(model_to_json(m)));
        }
        return Ok;
    }

    int invert(const Options& o)
    {
        RelativeModel m = load_model(o.files[0]);
        Morphism f = load_endomorphism(m, o.files[1]);
        Morphism g = invert_relative_quasi_iso(m, f, o.max_degree);
        std::size_t count = 0;
        for (std::size_t x = 0; x < m.generators().size(); ++x)
            count += g.defined(x) ? 1 : 0;
        std::vector<std::string> transcript = {
            "model is minimal",
            "f is a chain map",
            "f restricts to an automorphism of the base through degree " + std::to_string(o.max_degree),
            "H_k(f) is an isomorphism for k <= " + std::to_string(o.max_degree),
            "f o g = id on " + std::to_string(count) + " generators of degree <= " + std::to_string(o.max_degree),
            "g is a chain map",
        };
        if (o.format == "table") {
            std::ostringstream s;
            for (std::size_t x = 0; x < m.generators().size(); ++x)
                if (g.defined(x))
                    s << "g(" << m.generators()[x].name << ") = "
                      << expr_string(m.lie(), {m.generators()[x].degree, g.image(x)}) << "\n";
            for (const auto& t : transcript)
                s << os_.good("ok") << "  " << t << "\n";
            emit(o, s.str());
        } else {
            Json j = {{"inverse", {{"images", images_to_json(g)}}}, {"transcript", transcript}};
            emit(o, dump(j));
        }
        return Ok;
    }

    int equivalent(const Options& o)
    {
        RelativeModel m = load_model(o.files[0]);
        Morphism f = load_endomorphism(m, o.files[1]);
        Morphism g = load_endomorphism(m, o.files[2]);
        Verdict v = are_homotopic_rel(m, f, g, o.max_degree);
        DerCycles dc = cycles_and_boundaries(m, o.max_degree);
        if (o.format == "table") {
            std::ostringstream s;
            s << (v.equivalent ? os_.good("equivalent") : os_.bad("not equivalent"));
            if (!v.equivalent)
                s << ": " << v.reason;
            s << "\n";
            if (v.witness)
                for (auto w : m.fiber())
                    s << "G(" << m.generators()[w].name << ") = " << expr_string(m.lie(), v.witness->image(w))
                      << "\n";
            s << "dim Der_0 = " << dc.der0.dim << ", Z_0 = " << dc.z0.dim() << ", B_0 = " << dc.b0.dim()
              << ", H_0 = " << dc.h0() << "\n";
            emit(o, s.str());
        } else {
            Json j;
            j["verdict"] = v.equivalent ? "equivalent" : "notEquivalent";
            if (!v.equivalent)
                j["reason"] = v.reason;
            j["witness"] = v.witness ? derivation_to_json(*v.witness, m.fiber()) : Json(nullptr);
            j["dims"] = {{"der0", dc.der0.dim}, {"z0", dc.z0.dim()}, {"b0", dc.b0.dim()}, {"h0", dc.h0()}};
            j["truncationDegree"] = o.max_degree;
            emit(o, dump(j));
        }
        return v.equivalent ? Ok : Negative;
    }

    int pi0(const Options& o)
    {
        RelativeModel m = load_model(o.files[0]);
        if (auto mr = is_minimal(m); !mr.is_minimal)
            throw Error(ErrorKind::NotMinimal, "model is not minimal: d(" + mr.witnesses.front().first + ")");
        Pi0Report r = pi0_report(m, o.max_degree);
        if (o.format == "table") {
            std::ostringstream s;
            s << "truncation degree m     " << r.truncation_degree << "\n"
              << "dim Sigma               " << r.sigma_dim << "\n"
              << "dim Der_0               " << r.der0 << "\n"
              << "dim Z_0                 " << r.z0 << "\n"
              << "dim B_0                 " << r.b0 << "\n"
              << "dim H_0                 " << r.h0 << "\n"
              << "(i)   degree preserving " << r.degree_preserving << " equations\n"
              << "(ii)  commutes with D   " << r.commutes_with_d << " equations\n"
              << "(iii) bracket           " << r.bracket_compatible << " equations\n"
              << "(iv)  fixes the base    " << r.fixes_base << " equations\n";
            emit(o, s.str());
        } else {
            Json j;
            j["truncationDegree"] = r.truncation_degree;
            j["sigmaDim"] = r.sigma_dim;
            j["dims"] = {{"der0", r.der0}, {"z0", r.z0}, {"b0", r.b0}, {"h0", r.h0}};
            j["conditions"] = {{"degreePreserving", r.degree_preserving},
                               {"commutesWithD", r.commutes_with_d},
                               {"bracketCompatible", r.bracket_compatible},
                               {"fixesBase", r.fixes_base}};
            emit(o, dump(j));
        }
        return Ok;
    }

private:
    Morphism load_endomorphism(const RelativeModel& m, const std::string& path)
    {
        auto doc = load_morphism_document(path);
        auto imgs = parse_images(doc.src, doc.images, m.lie(), *m.algebra, true);
        return Morphism(m.algebra, m.algebra, as_optional(imgs));
    }

    void emit(const Options& o, const std::string& text)
    {
        if (o.out.empty()) {
            out_ << text;
            return;
        }
        std::ofstream f(o.out, std::ios::binary);
        if (!f)
            throw Error(ErrorKind::InvalidInput, "cannot write '" + o.out + "'");
        f << text;
    }

    std::ostream& out_;
    std::ostream& err_;
    Style os_, es_;
};

} // namespace detail

/// Runs one invocation.  `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Style out_style = {},
               Style err_style = {})
{
    CLI::App app{"Minimal relative models and relative homotopy automorphisms of dg Lie algebras", "dgla"};
    app.require_subcommand(1);
    detail::Options o;

    auto add_common = [&o](CLI::App* sub, bool needs_degree) {
        auto* opt = sub->add_option("--max-degree", o.max_degree, "Degree bound N (all claims hold up to N)")
                        ->check(CLI::PositiveNumber);
        if (needs_degree)
            opt->required();
        sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"canonical", "table"}));
        sub->add_option("--out", o.out, "Write the output document to this path");
    };

    auto* validate = app.add_subcommand("validate", "Check d^2 = 0, degrees, simple connectivity and identities");
    validate->add_option("file", o.files, "dg Lie algebra document")->required()->expected(1);
    add_common(validate, false);

    auto* homology = app.add_subcommand("homology", "Dimensions of H_k for k = 1..N");
    homology->add_option("file", o.files, "dg Lie algebra document")->required()->expected(1);
    add_common(homology, true);

    auto* minimal = app.add_subcommand("minimal-model", "Minimal relative model of a map L(V) -> g");
    minimal->add_option("files", o.files, "BASE TARGET MAP")->required()->expected(3);
    add_common(minimal, true);

    auto* invert = app.add_subcommand("invert", "Inverse of a relative quasi-isomorphism of a minimal model");
    invert->add_option("files", o.files, "MODEL ENDO")->required()->expected(2);
    add_common(invert, true);

    auto* equivalent = app.add_subcommand("equivalent", "Decide whether two relative automorphisms are homotopic");
    equivalent->add_option("files", o.files, "MODEL ENDO1 ENDO2")->required()->expected(3);
    add_common(equivalent, true);

    auto* pi0 = app.add_subcommand("pi0", "Algebraic-group data of the relative automorphisms");
    pi0->add_option("file", o.files, "minimal model document")->required()->expected(1);
    add_common(pi0, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << err_style.bad("error") << ": " << e.what() << "\n";
        return ParseFailure;
    }

    detail::Runner r(out, err, out_style, err_style);
    try {
        if (validate->parsed())
            return r.validate(o);
        if (homology->parsed())
            return r.homology(o);
        if (minimal->parsed())
            return r.minimal_model(o);
        if (invert->parsed())
            return r.invert(o);
        if (equivalent->parsed())
            return r.equivalent(o);
        return r.pi0(o);
    } catch (const ParseError& e) {
        err << err_style.bad("error") << ": " << e.what() << "\n";
        return ParseFailure;
    } catch (const Error& e) {
        err << err_style.bad("error") << ": " << e.what() << "\n";
        return Invalid;
    }
}

} // namespace dgla::cli
