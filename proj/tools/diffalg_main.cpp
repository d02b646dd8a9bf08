// diffalg command line front end.  Every subcommand reads one problem file,
// prints a JSON report on stdout and exits with
//   0  success / verdict positive
//   1  verdict negative (axiom violation, non-cocycle, obstruction, ...)
//   2  unusable input (bad JSON, missing names, shape mismatches)
//   3  degree budget exceeded

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <diffalg/diffalg.hpp>

namespace {

using json = nlohmann::json;

struct Options {
    std::string command;
    std::string file;
    std::string out;
    std::string cochain;
    std::string c1, c2;
    std::string section;
    std::string deformation;
    int max_degree = 0;
    int degree_budget = 4;
    bool reduced = false;
    bool representatives = false;
    bool les = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw diffalg::invalid_input_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

json violations_json(const diffalg::ValidationReport& r) {
    json out;
    out["pass"] = r.pass;
    json vs = json::array();
    for (const auto& v : r.violations) {
        json one;
        one["identity"] = v.identity;
        one["indices"] = v.indices;
        vs.push_back(std::move(one));
    }
    out["violations"] = std::move(vs);
    return out;
}

template <class K>
json defect_json(const diffalg::CocycleDefect<K>& d) {
    json out;
    out["cocycle"] = false;
    out["equation"] = d.equation;
    out["tuple"] = d.tuple;
    out["coordinate"] = d.coord;
    out["value"] = diffalg::scalar_codec<K>::str(d.value);
    out["message"] = diffalg::defect_message(d);
    return out;
}

template <class K>
const diffalg::TwoCocycle<K>& named_cochain(const diffalg::ProblemFile<K>& pf,
                                            const std::string& name) {
    auto it = pf.cochains.find(name);
    if (it == pf.cochains.end())
        throw diffalg::invalid_input_error("no cochain named \"" + name + "\" in the file");
    return it->second;
}

template <class K>
const diffalg::DeformationData<K>& named_deformation(const diffalg::ProblemFile<K>& pf,
                                                     const std::string& name) {
    auto it = pf.deformations.find(name);
    if (it == pf.deformations.end())
        throw diffalg::invalid_input_error("no deformation named \"" + name + "\" in the file");
    return it->second;
}

template <class K>
int cmd_validate(const diffalg::ProblemFile<K>& pf) {
    json rep;
    diffalg::ValidationReport ra = diffalg::validate_diff_algebra(pf.algebra);
    bool pass = ra.pass;
    rep["algebra"] = violations_json(ra);
    if (pf.module) {
        diffalg::ValidationReport rm = diffalg::validate_diff_bimodule(pf.algebra, *pf.module);
        rep["module"] = violations_json(rm);
        pass = pass && rm.pass;
    }
    rep["pass"] = pass;
    emit(rep);
    return pass ? 0 : 1;
}

template <class K>
int cmd_cohomology(const diffalg::ProblemFile<K>& pf, const Options& opt) {
    diffalg::ComplexAssembler<K> asmb(pf.ctx, diffalg::DegreeBudget{opt.degree_budget});
    json complexes;
    auto one = [&](diffalg::ComplexKind k) {
        json arr = json::array();
        for (int n = 0; n <= opt.max_degree; ++n) {
            diffalg::DegreeHomology<K> h = asmb.homology(k, n, opt.representatives);
            json row;
            row["degree"] = h.degree;
            row["dim_space"] = h.dim_space;
            row["rank_in"] = h.rank_in;
            row["rank_out"] = h.rank_out;
            row["dimension"] = h.dimension;
            if (opt.representatives) {
                json reps = json::array();
                for (const auto& r : h.representatives)
                    reps.push_back(diffalg::vector_json(r));
                row["representatives"] = std::move(reps);
            }
            arr.push_back(std::move(row));
        }
        complexes[diffalg::complex_name(k)] = std::move(arr);
    };
    one(diffalg::ComplexKind::alg);
    one(diffalg::ComplexKind::op);
    one(diffalg::ComplexKind::diff);
    if (opt.reduced)
        one(diffalg::ComplexKind::diff_reduced);
    json rep;
    rep["complexes"] = std::move(complexes);
    if (opt.les) {
        diffalg::LESReport les = diffalg::les_check(asmb, opt.max_degree);
        json nodes = json::array();
        for (const auto& nd : les.nodes) {
            json one_node;
            one_node["at"] = nd.at;
            one_node["degree"] = nd.degree;
            one_node["dim_h"] = nd.dim_h;
            one_node["rank_in"] = nd.rank_in;
            one_node["rank_out"] = nd.rank_out;
            one_node["exact"] = nd.exact;
            nodes.push_back(std::move(one_node));
        }
        json jles;
        jles["pass"] = les.pass;
        jles["nodes"] = std::move(nodes);
        rep["les"] = std::move(jles);
    }
    emit(rep);
    return 0;
}

template <class K>
int cmd_cocycle_check(const diffalg::ProblemFile<K>& pf, const Options& opt) {
    const auto& c = named_cochain(pf, opt.cochain);
    auto d = diffalg::find_cocycle_defect(c);
    if (!d) {
        json rep;
        rep["cocycle"] = true;
        emit(rep);
        return 0;
    }
    emit(defect_json(*d));
    return 1;
}

template <class K>
int cmd_extend(const diffalg::ProblemFile<K>& pf, const Options& opt) {
    const auto& c = named_cochain(pf, opt.cochain);
    if (auto d = diffalg::find_cocycle_defect(c)) {
        emit(defect_json(*d));
        return 1;
    }
    const size_t n = pf.algebra.dim;
    const size_t m = pf.ctx->dim_v();

    diffalg::ProblemFile<K> out;
    out.field = pf.field;
    out.algebra = diffalg::extension_structure(c);

    diffalg::ExtensionBlock<K> ext;
    ext.base = pf.algebra;
    ext.module = pf.module;
    ext.projection = diffalg::Matrix<K>(n, n + m);
    for (size_t i = 0; i < n; ++i)
        ext.projection(i, i) = K(1);
    ext.inclusion = diffalg::Matrix<K>(n + m, m);
    for (size_t a = 0; a < m; ++a)
        ext.inclusion(n + a, a) = K(1);
    out.extension = std::move(ext);

    std::ofstream of(opt.out, std::ios::binary);
    if (!of)
        throw diffalg::invalid_input_error("cannot write " + opt.out);
    of << diffalg::serialize_problem(out);
    of.close();
    if (!of)
        throw diffalg::invalid_input_error("cannot write " + opt.out);

    json rep;
    rep["cocycle"] = true;
    rep["dim"] = n + m;
    rep["written"] = opt.out;
    emit(rep);
    return 0;
}

template <class K>
int cmd_extract_cocycle(const diffalg::ProblemFile<K>& pf, const Options& opt) {
    if (!pf.extension)
        throw diffalg::invalid_input_error(
            "extract-cocycle needs an \"extension\" block describing base, projection and "
            "inclusion");
    const auto& ext = *pf.extension;
    diffalg::DiffBimodule<K> module =
        ext.module ? *ext.module : diffalg::regular_bimodule(ext.base);
    std::optional<diffalg::Matrix<K>> section;
    if (!opt.section.empty()) {
        auto it = pf.sections.find(opt.section);
        if (it == pf.sections.end())
            throw diffalg::invalid_input_error("no section named \"" + opt.section +
                                               "\" in the file");
        section = it->second;
    }
    diffalg::ExtractedCocycle<K> ec = diffalg::extract_cocycle(
        pf.algebra, ext.base, module, ext.projection, ext.inclusion, section);
    const size_t nb = ext.base.dim;
    const size_t m = module.dim;
    json rep;
    rep["psi"] = diffalg::tensor_json(ec.cocycle.psi.coeffs(), {nb, nb, m});
    rep["chi"] = diffalg::tensor_json(ec.cocycle.chi.coeffs(), {nb, m});
    rep["section"] = diffalg::matrix_json(ec.section);
    emit(rep);
    return 0;
}

template <class K>
int cmd_equivalent(const diffalg::ProblemFile<K>& pf, const Options& opt) {
    const auto& c1 = named_cochain(pf, opt.c1);
    const auto& c2 = named_cochain(pf, opt.c2);
    diffalg::ComplexAssembler<K> asmb(pf.ctx, diffalg::DegreeBudget{opt.degree_budget});
    auto phi = diffalg::cocycles_equivalent(asmb, c1, c2);
    json rep;
    if (!phi) {
        rep["equivalent"] = false;
        emit(rep);
        return 1;
    }
    rep["equivalent"] = true;
    rep["phi"] = diffalg::tensor_json(phi->coeffs(), {pf.algebra.dim, pf.ctx->dim_v()});
    emit(rep);
    return 0;
}

template <class K>
int cmd_deform_check(const diffalg::ProblemFile<K>& pf, const Options& opt) {
    const auto& data = named_deformation(pf, opt.deformation);
    auto rctx = diffalg::DiffContext<K>::regular(pf.algebra);
    diffalg::TruncatedDeformation<K> def = diffalg::to_deformation(data, std::move(rctx));
    diffalg::DeformationReport rep = diffalg::check_deformation(def);
    json out;
    out["pass"] = rep.pass;
    if (rep.first_failure >= 0)
        out["first_failure"] = rep.first_failure;
    else
        out["first_failure"] = nullptr;
    json orders = json::array();
    for (const auto& o : rep.orders) {
        json one;
        one["order"] = o.order;
        one["associative"] = o.associative;
        one["leibniz"] = o.leibniz;
        orders.push_back(std::move(one));
    }
    out["orders"] = std::move(orders);
    emit(out);
    return rep.pass ? 0 : 1;
}

template <class K>
int cmd_trivialize(const diffalg::ProblemFile<K>& pf, const Options& opt) {
    const auto& data = named_deformation(pf, opt.deformation);
    auto rctx = diffalg::DiffContext<K>::regular(pf.algebra);
    diffalg::ComplexAssembler<K> asmb(rctx, diffalg::DegreeBudget{opt.degree_budget});
    diffalg::TruncatedDeformation<K> def = diffalg::to_deformation(data, rctx);
    diffalg::TrivializeResult<K> res = diffalg::trivialize(asmb, def);
    json out;
    out["trivial"] = res.trivial;
    if (res.trivial) {
        json corr = json::array();
        for (size_t k = 1; k < res.gauge.phi.size(); ++k)
            corr.push_back(diffalg::matrix_json(res.gauge.phi[k]));
        out["gauge"] = std::move(corr);
        emit(out);
        return 0;
    }
    out["obstruction_order"] = res.obstruction_order;
    out["obstruction_class"] = diffalg::vector_json(res.obstruction_class);
    out["class_dimension"] = res.obstruction_class.size();
    emit(out);
    return 1;
}

template <class K>
int run(const json& root, const Options& opt) {
    diffalg::ProblemFile<K> pf = diffalg::parse_problem<K>(root);
    if (opt.command == "validate")
        return cmd_validate(pf);
    if (opt.command == "cohomology")
        return cmd_cohomology(pf, opt);
    if (opt.command == "cocycle-check")
        return cmd_cocycle_check(pf, opt);
    if (opt.command == "extend")
        return cmd_extend(pf, opt);
    if (opt.command == "extract-cocycle")
        return cmd_extract_cocycle(pf, opt);
    if (opt.command == "equivalent")
        return cmd_equivalent(pf, opt);
    if (opt.command == "deform-check")
        return cmd_deform_check(pf, opt);
    if (opt.command == "trivialize")
        return cmd_trivialize(pf, opt);
    throw diffalg::internal_error("unhandled subcommand " + opt.command);
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"exact cohomology, extensions and deformations of finite-dimensional\n"
                 "differential algebras of any weight"};
    app.require_subcommand(1);

    auto add_file = [&](CLI::App* sub) {
        sub->add_option("file", opt.file, "problem file (JSON)")->required();
    };
    auto add_budget = [&](CLI::App* sub) {
        sub->add_option("--degree-budget", opt.degree_budget,
                        "largest cochain degree the engine may materialize");
    };

    add_file(app.add_subcommand("validate", "check every structure axiom of the file"));

    CLI::App* coh =
        app.add_subcommand("cohomology", "per-degree dimensions, ranks and representatives");
    add_file(coh);
    coh->add_option("--max-degree", opt.max_degree, "top cohomological degree")
        ->required()
        ->check(CLI::NonNegativeNumber);
    coh->add_flag("--reduced", opt.reduced, "also report the reduced combined complex");
    coh->add_flag("--representatives", opt.representatives, "emit representative cocycles");
    coh->add_flag("--les", opt.les, "verify the long exact sequence node by node");
    add_budget(coh);

    CLI::App* cc = app.add_subcommand("cocycle-check", "test a named (psi, chi) pair");
    add_file(cc);
    cc->add_option("--cochain", opt.cochain, "name under \"cochains\"")->required();

    CLI::App* ex = app.add_subcommand("extend", "glue the abelian extension of a 2-cocycle");
    add_file(ex);
    ex->add_option("--cocycle", opt.cochain, "name under \"cochains\"")->required();
    ex->add_option("-o,--output", opt.out, "where to write the extension problem file")
        ->required();

    CLI::App* xc = app.add_subcommand("extract-cocycle",
                                      "read the 2-cocycle of an extension along a section");
    add_file(xc);
    xc->add_option("--section", opt.section,
                   "name under \"sections\" (omitted: use the canonical section)");

    CLI::App* eq = app.add_subcommand("equivalent",
                                      "decide whether two cocycles differ by a coboundary");
    add_file(eq);
    eq->add_option("--c1", opt.c1, "first cochain name")->required();
    eq->add_option("--c2", opt.c2, "second cochain name")->required();
    add_budget(eq);

    CLI::App* dc = app.add_subcommand("deform-check",
                                      "verify a truncated deformation order by order");
    add_file(dc);
    dc->add_option("--deformation", opt.deformation, "name under \"deformations\"")->required();

    CLI::App* tr = app.add_subcommand("trivialize",
                                      "find a gauge flattening a deformation, or the "
                                      "obstruction class that prevents one");
    add_file(tr);
    tr->add_option("--deformation", opt.deformation, "name under \"deformations\"")->required();
    add_budget(tr);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    opt.command = app.get_subcommands().front()->get_name();

    try {
        json root = diffalg::parse_json_text(read_file(opt.file));
        diffalg::FieldDesc fd = diffalg::parse_field_desc(root);
        return fd.rational ? run<diffalg::Rational>(root, opt)
                           : run<diffalg::PrimeField>(root, opt);
    } catch (const diffalg::resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const diffalg::invalid_input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
