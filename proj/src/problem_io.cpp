#include "plabs/problem_io.hpp"
#include "plabs/error.hpp"
#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace plabs {

namespace {

using detail::Json;

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorCode::InvalidDocument, what);
}

const Json& field(const Json& doc, const char* key) {
    if (!doc.contains(key)) invalid(std::string("missing field '") + key + "'");
    return doc.at(key);
}

Eigen::Index dimension(const Json& doc, const char* key) {
    const Json& v = field(doc, key);
    if (!v.is_number_integer() || v.get<long long>() < 0) invalid(std::string("field '") + key + "' must be a nonnegative integer");
    return static_cast<Eigen::Index>(v.get<long long>());
}

double number(const Json& v, const std::string& where) {
    if (!v.is_number()) invalid(where + " must be numeric");
    return v.get<double>();
}

Vector read_vector(const Json& doc, const char* key, Eigen::Index len) {
    const Json& a = field(doc, key);
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != len) {
        invalid(std::string("'") + key + "' must be an array of length " + std::to_string(len));
    }
    Vector v(len);
    for (Eigen::Index i = 0; i < len; ++i) v[i] = number(a[static_cast<std::size_t>(i)], key);
    return v;
}

Matrix read_matrix(const Json& doc, const char* key, Eigen::Index rows, Eigen::Index cols) {
    const Json& a = field(doc, key);
    const std::string shape = std::to_string(rows) + "x" + std::to_string(cols);
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows) {
        invalid(std::string("'") + key + "' must be a " + shape + " row-major array");
    }
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = a[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            invalid(std::string("'") + key + "' must be a " + shape + " row-major array");
        }
        for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = number(row[static_cast<std::size_t>(j)], key);
    }
    return M;
}

} // namespace

ProblemDocument parse_document(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        invalid(std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) invalid("document must be a JSON object");
    const Json& kind = field(doc, "kind");
    if (!kind.is_string()) invalid("'kind' must be a string");

    ProblemDocument out;
    if (kind == "abs-normal") {
        const Eigen::Index n = dimension(doc, "n");
        const Eigen::Index s = dimension(doc, "s");
        const Eigen::Index m = dimension(doc, "m");
        AbsNormalForm f;
        f.c = read_vector(doc, "c", s);
        f.b = read_vector(doc, "b", m);
        f.Z = read_matrix(doc, "Z", s, n);
        f.L = read_matrix(doc, "L", s, s);
        f.J = read_matrix(doc, "J", m, n);
        f.Y = read_matrix(doc, "Y", m, s);
        for (Eigen::Index i = 0; i < s; ++i) {
            for (Eigen::Index j = i; j < s; ++j) {
                if (f.L(i, j) != 0.0) {
                    invalid("L must be strictly lower triangular; L[" + std::to_string(i) + "][" + std::to_string(j) +
                            "] is nonzero");
                }
            }
        }
        out.data = std::move(f);
        if (doc.contains("target")) out.target = read_vector(doc, "target", m);
    } else if (kind == "cpl") {
        const Eigen::Index s = dimension(doc, "s");
        CplSystem sys;
        sys.S = read_matrix(doc, "S", s, s);
        sys.cHat = read_vector(doc, "c_hat", s);
        sys.provenance = Provenance::Direct;
        out.data = std::move(sys);
    } else {
        invalid("unknown kind; expected 'abs-normal' or 'cpl'");
    }
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) invalid("'name' must be a string");
        out.name = doc["name"].get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) invalid("'seed' must be a nonnegative integer");
        out.seed = doc["seed"].get<std::uint64_t>();
    }
    return out;
}

ProblemDocument load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_document(buf.str());
}

std::string dump_document(const ProblemDocument& doc) {
    Json j;
    if (doc.is_form()) {
        const AbsNormalForm& f = doc.form();
        j["kind"] = "abs-normal";
        if (doc.name) j["name"] = *doc.name;
        if (doc.seed) j["seed"] = *doc.seed;
        j["n"] = f.n();
        j["s"] = f.s();
        j["m"] = f.m();
        j["c"] = detail::to_json(f.c);
        j["b"] = detail::to_json(f.b);
        j["Z"] = detail::to_json(f.Z);
        j["L"] = detail::to_json(f.L);
        j["J"] = detail::to_json(f.J);
        j["Y"] = detail::to_json(f.Y);
        if (doc.target) j["target"] = detail::to_json(*doc.target);
    } else {
        const CplSystem& c = doc.cpl();
        j["kind"] = "cpl";
        if (doc.name) j["name"] = *doc.name;
        if (doc.seed) j["seed"] = *doc.seed;
        j["s"] = c.s();
        j["S"] = detail::to_json(c.S);
        j["c_hat"] = detail::to_json(c.cHat);
    }
    return j.dump(2) + "\n";
}

void save_document(const std::string& path, const ProblemDocument& doc) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out << dump_document(doc);
}

} // namespace plabs
