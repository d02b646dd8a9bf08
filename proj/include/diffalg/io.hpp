#ifndef DIFFALG_IO_HPP
#define DIFFALG_IO_HPP

#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "deformations.hpp"
#include "prime_field.hpp"
#include "rational.hpp"

namespace diffalg {

/*
 * Problem documents are JSON with schema 1.  Every scalar is a rational
 * written as a string ("-2/3"), so exactness survives any JSON tooling.
 * Nested coefficient arrays index the arguments outermost-first and the
 * value coordinate last, matching the flat cochain layout:
 *
 *   mult[i][j][k]  coefficient of e_k in e_i e_j
 *   psi[i][j][a]   coefficient of f_a in psi(e_i, e_j)
 *   chi[i][a]      coefficient of f_a in chi(e_i)
 *
 * Linear maps (derivation, dV, projection, inclusion, sections, gauge
 * corrections) are row-major matrices with entry [r][c].
 */

struct FieldDesc {
    bool rational = true;
    unsigned long long p = 0;
};

template <class K>
struct scalar_codec;

template <>
struct scalar_codec<Rational> {
    static Rational parse(const std::string& s, const FieldDesc&) {
        return Rational::from_string(s);
    }
    static std::string str(const Rational& x) { return x.to_string(); }
};

template <>
struct scalar_codec<PrimeField> {
    static PrimeField parse(const std::string& s, const FieldDesc& f) {
        return PrimeField::from_string(s, f.p);
    }
    static std::string str(const PrimeField& x) { return x.to_string(); }
};

template <class K>
struct DeformationData {
    std::vector<std::vector<K>> mu;  // flat degree-2 tables, one per order t^1..t^N
    std::vector<std::vector<K>> der; // flat degree-1 tables
};

template <class K>
struct ExtensionBlock {
    DiffAlgebra<K> base;
    std::optional<DiffBimodule<K>> module; // over the base; absent = regular
    Matrix<K> projection;                  // base_dim x total_dim
    Matrix<K> inclusion;                   // total_dim x module_dim
};

template <class K>
struct ProblemFile {
    FieldDesc field;
    DiffAlgebra<K> algebra;
    std::optional<DiffBimodule<K>> module; // absent = regular bimodule
    std::shared_ptr<const DiffContext<K>> ctx;
    std::map<std::string, TwoCocycle<K>> cochains;
    std::map<std::string, Matrix<K>> sections;
    std::map<std::string, DeformationData<K>> deformations;
    std::map<std::string, std::vector<Matrix<K>>> gauges; // corrections t^1..
    std::optional<ExtensionBlock<K>> extension;
};

namespace io_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw invalid_input_error(path + ": " + msg);
}

inline const json& member(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        fail(path, std::string("missing required key \"") + key + "\"");
    return *it;
}

inline const json* opt_member(const json& j, const char* key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

inline void check_object(const json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        fail(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known)
            fail(path, "unknown key \"" + it.key() + "\"");
    }
}

inline const json& element(const json& j, const std::string& path, size_t len, size_t i) {
    if (!j.is_array() || j.size() != len)
        fail(path, "expected an array of length " + std::to_string(len));
    return j[i];
}

inline size_t get_size(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        fail(path, "expected a nonnegative integer");
    return size_t(j.get<long long>());
}

inline bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean())
        fail(path, "expected a boolean");
    return j.get<bool>();
}

inline bool is_prime(unsigned long long p) {
    if (p < 2)
        return false;
    for (unsigned long long d = 2; d * d <= p; ++d)
        if (p % d == 0)
            return false;
    return true;
}

template <class K>
K parse_scalar(const json& j, const std::string& path, const FieldDesc& f) {
    if (!j.is_string())
        fail(path, "expected a rational written as a string");
    try {
        return scalar_codec<K>::parse(j.get<std::string>(), f);
    } catch (const error& e) {
        fail(path, e.what());
    }
}

template <class K>
void parse_tensor_into(const json& j, const std::string& path, std::span<const size_t> dims,
                       const FieldDesc& f, std::vector<K>& out) {
    if (dims.empty()) {
        out.push_back(parse_scalar<K>(j, path, f));
        return;
    }
    if (!j.is_array() || j.size() != dims[0])
        fail(path, "expected an array of length " + std::to_string(dims[0]));
    for (size_t i = 0; i < dims[0]; ++i)
        parse_tensor_into(j[i], path + "[" + std::to_string(i) + "]", dims.subspan(1), f, out);
}

template <class K>
std::vector<K> parse_tensor(const json& j, const std::string& path,
                            std::initializer_list<size_t> dims, const FieldDesc& f) {
    std::vector<K> out;
    size_t total = 1;
    for (size_t d : dims)
        total *= d;
    out.reserve(total);
    parse_tensor_into(j, path, std::span<const size_t>(dims.begin(), dims.size()), f, out);
    return out;
}

template <class K>
Matrix<K> parse_matrix(const json& j, const std::string& path, size_t rows, size_t cols,
                       const FieldDesc& f) {
    std::vector<K> flat = parse_tensor<K>(j, path, {rows, cols}, f);
    Matrix<K> M(rows, cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            M(r, c) = flat[r * cols + c];
    return M;
}

// matrix with caller-unknown shape; must be rectangular and nonempty
template <class K>
Matrix<K> parse_matrix_free(const json& j, const std::string& path, const FieldDesc& f) {
    if (!j.is_array() || j.empty())
        fail(path, "expected a nonempty array of rows");
    if (!j[0].is_array() || j[0].empty())
        fail(path, "expected nonempty rows");
    return parse_matrix<K>(j, path, j.size(), j[0].size(), f);
}

template <class K>
json tensor_json_rec(const std::vector<K>& flat, size_t& pos, std::span<const size_t> dims) {
    if (dims.empty())
        return json(scalar_codec<K>::str(flat[pos++]));
    json arr = json::array();
    for (size_t i = 0; i < dims[0]; ++i)
        arr.push_back(tensor_json_rec(flat, pos, dims.subspan(1)));
    return arr;
}

template <class K>
DiffAlgebra<K> parse_algebra(const json& j, const std::string& path, const K& weight,
                             const FieldDesc& f) {
    check_object(j, path, {"dim", "unital", "unit", "mult"});
    DiffAlgebra<K> A;
    A.dim = get_size(member(j, path, "dim"), path + ".dim");
    if (A.dim == 0)
        fail(path + ".dim", "algebra dimension must be positive");
    A.weight = weight;
    A.unital = get_bool(member(j, path, "unital"), path + ".unital");
    if (A.unital)
        A.unit = parse_tensor<K>(member(j, path, "unit"), path + ".unit", {A.dim}, f);
    else if (opt_member(j, "unit"))
        fail(path + ".unit", "unit given for a non-unital algebra");
    A.mult = parse_tensor<K>(member(j, path, "mult"), path + ".mult", {A.dim, A.dim, A.dim}, f);
    return A;
}

template <class K>
DiffBimodule<K> parse_module(const json& j, const std::string& path, size_t algebra_dim,
                             const FieldDesc& f) {
    check_object(j, path, {"dim", "left", "right", "dV"});
    DiffBimodule<K> V;
    V.dim = get_size(member(j, path, "dim"), path + ".dim");
    if (V.dim == 0)
        fail(path + ".dim", "module dimension must be positive");
    const json& left = member(j, path, "left");
    const json& right = member(j, path, "right");
    for (size_t i = 0; i < algebra_dim; ++i) {
        V.left.push_back(parse_matrix<K>(element(left, path + ".left", algebra_dim, i),
                                         path + ".left[" + std::to_string(i) + "]", V.dim, V.dim,
                                         f));
        V.right.push_back(parse_matrix<K>(element(right, path + ".right", algebra_dim, i),
                                          path + ".right[" + std::to_string(i) + "]", V.dim,
                                          V.dim, f));
    }
    V.dV = parse_matrix<K>(member(j, path, "dV"), path + ".dV", V.dim, V.dim, f);
    return V;
}

} // namespace io_detail

// nested-array emitters, shared by the serializer, the CLI reports and tests

template <class K>
io_detail::json tensor_json(const std::vector<K>& flat, std::initializer_list<size_t> dims) {
    size_t pos = 0;
    return io_detail::tensor_json_rec(flat, pos,
                                      std::span<const size_t>(dims.begin(), dims.size()));
}

template <class K>
io_detail::json matrix_json(const Matrix<K>& M) {
    io_detail::json rows = io_detail::json::array();
    for (size_t r = 0; r < M.rows(); ++r) {
        io_detail::json row = io_detail::json::array();
        for (size_t c = 0; c < M.cols(); ++c)
            row.push_back(scalar_codec<K>::str(M(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class K>
io_detail::json vector_json(const std::vector<K>& v) {
    io_detail::json arr = io_detail::json::array();
    for (const K& x : v)
        arr.push_back(scalar_codec<K>::str(x));
    return arr;
}

inline FieldDesc parse_field_desc(const io_detail::json& root) {
    using namespace io_detail;
    const json& j = member(root, "$", "field");
    check_object(j, "$.field", {"type", "p"});
    const json& t = member(j, "$.field", "type");
    if (!t.is_string())
        fail("$.field.type", "expected \"rational\" or \"prime\"");
    FieldDesc f;
    const std::string type = t.get<std::string>();
    if (type == "rational") {
        if (opt_member(j, "p"))
            fail("$.field.p", "p is only meaningful for prime fields");
        f.rational = true;
        return f;
    }
    if (type == "prime") {
        f.rational = false;
        f.p = get_size(member(j, "$.field", "p"), "$.field.p");
        if (f.p < 2 || f.p >= (1ull << 31))
            fail("$.field.p", "prime modulus must lie in [2, 2^31)");
        if (!is_prime(f.p))
            fail("$.field.p", std::to_string(f.p) + " is not prime");
        return f;
    }
    fail("$.field.type", "expected \"rational\" or \"prime\"");
}

template <class K>
ProblemFile<K> parse_problem(const io_detail::json& root) {
    using namespace io_detail;
    check_object(root, "$",
                 {"schema", "field", "weight", "algebra", "derivation", "module", "cochains",
                  "sections", "deformations", "gauges", "extension"});
    if (get_size(member(root, "$", "schema"), "$.schema") != 1)
        fail("$.schema", "unsupported schema version");

    ProblemFile<K> pf;
    pf.field = parse_field_desc(root);
    const FieldDesc& f = pf.field;

    K weight = parse_scalar<K>(member(root, "$", "weight"), "$.weight", f);
    pf.algebra = parse_algebra<K>(member(root, "$", "algebra"), "$.algebra", weight, f);
    const size_t n = pf.algebra.dim;
    pf.algebra.derivation =
        parse_matrix<K>(member(root, "$", "derivation"), "$.derivation", n, n, f);

    if (const json* jm = opt_member(root, "module"))
        pf.module = parse_module<K>(*jm, "$.module", n, f);

    DiffBimodule<K> mod = pf.module ? *pf.module : regular_bimodule(pf.algebra);
    pf.ctx = DiffContext<K>::make(pf.algebra, std::move(mod));
    const size_t m = pf.ctx->dim_v();

    if (const json* jc = opt_member(root, "cochains")) {
        if (!jc->is_object())
            fail("$.cochains", "expected an object of named cocycle pairs");
        for (auto it = jc->begin(); it != jc->end(); ++it) {
            const std::string path = "$.cochains." + it.key();
            check_object(*it, path, {"psi", "chi"});
            Cochain<K> psi(pf.ctx, 2), chi(pf.ctx, 1);
            std::vector<K> pv =
                parse_tensor<K>(member(*it, path, "psi"), path + ".psi", {n, n, m}, f);
            std::vector<K> cv =
                parse_tensor<K>(member(*it, path, "chi"), path + ".chi", {n, m}, f);
            for (size_t i = 0; i < pv.size(); ++i)
                psi.flat(i) = pv[i];
            for (size_t i = 0; i < cv.size(); ++i)
                chi.flat(i) = cv[i];
            pf.cochains.emplace(it.key(), make_two_cocycle(std::move(psi), std::move(chi)));
        }
    }

    if (const json* js = opt_member(root, "sections")) {
        if (!js->is_object())
            fail("$.sections", "expected an object of named matrices");
        for (auto it = js->begin(); it != js->end(); ++it)
            pf.sections.emplace(it.key(),
                                parse_matrix_free<K>(*it, "$.sections." + it.key(), f));
    }

    if (const json* jd = opt_member(root, "deformations")) {
        if (!jd->is_object())
            fail("$.deformations", "expected an object of named deformations");
        for (auto it = jd->begin(); it != jd->end(); ++it) {
            const std::string path = "$.deformations." + it.key();
            check_object(*it, path, {"order", "mu", "d"});
            const size_t order = get_size(member(*it, path, "order"), path + ".order");
            const json& jmu = member(*it, path, "mu");
            const json& jdd = member(*it, path, "d");
            DeformationData<K> data;
            for (size_t k = 0; k < order; ++k) {
                data.mu.push_back(parse_tensor<K>(element(jmu, path + ".mu", order, k),
                                                  path + ".mu[" + std::to_string(k) + "]",
                                                  {n, n, n}, f));
                data.der.push_back(parse_tensor<K>(element(jdd, path + ".d", order, k),
                                                   path + ".d[" + std::to_string(k) + "]",
                                                   {n, n}, f));
            }
            pf.deformations.emplace(it.key(), std::move(data));
        }
    }

    if (const json* jg = opt_member(root, "gauges")) {
        if (!jg->is_object())
            fail("$.gauges", "expected an object of named gauge series");
        for (auto it = jg->begin(); it != jg->end(); ++it) {
            const std::string path = "$.gauges." + it.key();
            if (!it->is_array())
                fail(path, "expected an array of correction matrices");
            std::vector<Matrix<K>> corr;
            for (size_t k = 0; k < it->size(); ++k)
                corr.push_back(parse_matrix<K>((*it)[k], path + "[" + std::to_string(k) + "]", n,
                                               n, f));
            pf.gauges.emplace(it.key(), std::move(corr));
        }
    }

    if (const json* je = opt_member(root, "extension")) {
        const std::string path = "$.extension";
        check_object(*je, path,
                     {"base", "base_derivation", "module", "projection", "inclusion"});
        ExtensionBlock<K> ext;
        ext.base = parse_algebra<K>(member(*je, path, "base"), path + ".base", weight, f);
        const size_t nb = ext.base.dim;
        ext.base.derivation = parse_matrix<K>(member(*je, path, "base_derivation"),
                                              path + ".base_derivation", nb, nb, f);
        size_t mv;
        if (const json* jm = opt_member(*je, "module")) {
            ext.module = parse_module<K>(*jm, path + ".module", nb, f);
            mv = ext.module->dim;
        } else {
            if (n != 2 * nb)
                fail(path, "without a module block the total dimension must be twice the base");
            mv = nb;
        }
        if (nb + mv != n)
            fail(path, "base and module dimensions must add up to the total");
        ext.projection =
            parse_matrix<K>(member(*je, path, "projection"), path + ".projection", nb, n, f);
        ext.inclusion =
            parse_matrix<K>(member(*je, path, "inclusion"), path + ".inclusion", n, mv, f);
        pf.extension = std::move(ext);
    }

    return pf;
}

template <class K>
ProblemFile<K> parse_problem_text(const std::string& text) {
    io_detail::json root;
    try {
        root = io_detail::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid_input_error(std::string("JSON syntax: ") + e.what());
    }
    return parse_problem<K>(root);
}

inline io_detail::json parse_json_text(const std::string& text) {
    try {
        return io_detail::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid_input_error(std::string("JSON syntax: ") + e.what());
    }
}

inline io_detail::json field_json(const FieldDesc& f) {
    io_detail::json j;
    if (f.rational) {
        j["type"] = "rational";
    } else {
        j["type"] = "prime";
        j["p"] = f.p;
    }
    return j;
}

template <class K>
io_detail::json algebra_json(const DiffAlgebra<K>& A) {
    using namespace io_detail;
    json j;
    j["dim"] = A.dim;
    j["unital"] = A.unital;
    if (A.unital)
        j["unit"] = vector_json(A.unit);
    j["mult"] = tensor_json(A.mult, {A.dim, A.dim, A.dim});
    return j;
}

template <class K>
io_detail::json module_json(const DiffBimodule<K>& V) {
    using namespace io_detail;
    json j;
    j["dim"] = V.dim;
    json left = json::array(), right = json::array();
    for (const auto& L : V.left)
        left.push_back(matrix_json(L));
    for (const auto& R : V.right)
        right.push_back(matrix_json(R));
    j["left"] = std::move(left);
    j["right"] = std::move(right);
    j["dV"] = matrix_json(V.dV);
    return j;
}

template <class K>
io_detail::json problem_json(const ProblemFile<K>& pf) {
    using namespace io_detail;
    const size_t n = pf.algebra.dim;
    json root;
    root["schema"] = 1;
    root["field"] = field_json(pf.field);
    root["weight"] = scalar_codec<K>::str(pf.algebra.weight);
    root["algebra"] = algebra_json(pf.algebra);
    root["derivation"] = matrix_json(pf.algebra.derivation);
    if (pf.module)
        root["module"] = module_json(*pf.module);
    if (!pf.cochains.empty()) {
        const size_t m = pf.module ? pf.module->dim : n;
        json jc;
        for (const auto& [name, c] : pf.cochains) {
            json one;
            one["psi"] = tensor_json(c.psi.coeffs(), {n, n, m});
            one["chi"] = tensor_json(c.chi.coeffs(), {n, m});
            jc[name] = std::move(one);
        }
        root["cochains"] = std::move(jc);
    }
    if (!pf.sections.empty()) {
        json js;
        for (const auto& [name, s] : pf.sections)
            js[name] = matrix_json(s);
        root["sections"] = std::move(js);
    }
    if (!pf.deformations.empty()) {
        json jd;
        for (const auto& [name, d] : pf.deformations) {
            json one;
            one["order"] = d.mu.size();
            json jmu = json::array(), jdd = json::array();
            for (const auto& t : d.mu)
                jmu.push_back(tensor_json(t, {n, n, n}));
            for (const auto& t : d.der)
                jdd.push_back(tensor_json(t, {n, n}));
            one["mu"] = std::move(jmu);
            one["d"] = std::move(jdd);
            jd[name] = std::move(one);
        }
        root["deformations"] = std::move(jd);
    }
    if (!pf.gauges.empty()) {
        json jg;
        for (const auto& [name, g] : pf.gauges) {
            json arr = json::array();
            for (const auto& M : g)
                arr.push_back(matrix_json(M));
            jg[name] = std::move(arr);
        }
        root["gauges"] = std::move(jg);
    }
    if (pf.extension) {
        json je;
        je["base"] = algebra_json(pf.extension->base);
        je["base_derivation"] = matrix_json(pf.extension->base.derivation);
        if (pf.extension->module)
            je["module"] = module_json(*pf.extension->module);
        je["projection"] = matrix_json(pf.extension->projection);
        je["inclusion"] = matrix_json(pf.extension->inclusion);
        root["extension"] = std::move(je);
    }
    return root;
}

template <class K>
std::string serialize_problem(const ProblemFile<K>& pf) {
    return problem_json(pf).dump(2) + "\n";
}

// deformation data -> series over the regular bimodule of the file's algebra
template <class K>
TruncatedDeformation<K> to_deformation(const DeformationData<K>& data,
                                       std::shared_ptr<const DiffContext<K>> regular_ctx) {
    std::vector<Cochain<K>> mus, ders;
    for (const auto& flat : data.mu) {
        Cochain<K> c(regular_ctx, 2);
        for (size_t i = 0; i < flat.size(); ++i)
            c.flat(i) = flat[i];
        mus.push_back(std::move(c));
    }
    for (const auto& flat : data.der) {
        Cochain<K> c(regular_ctx, 1);
        for (size_t i = 0; i < flat.size(); ++i)
            c.flat(i) = flat[i];
        ders.push_back(std::move(c));
    }
    return make_deformation(std::move(regular_ctx), std::move(mus), std::move(ders));
}

} // namespace diffalg

#endif
