#include "plabs/cli.hpp"
#include "plabs/analysis.hpp"
#include "plabs/core.hpp"
#include "plabs/cpl.hpp"
#include "plabs/error.hpp"
#include "plabs/gallery.hpp"
#include "plabs/graph.hpp"
#include "plabs/lcp.hpp"
#include "plabs/problem_io.hpp"
#include "plabs/solvers.hpp"
#include "json_util.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace plabs {

namespace {

using detail::Json;
using detail::to_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string file;
    std::string format = "text";
    bool regularize = false;
    std::optional<int> limit;
};

Json num(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json norms_json(const std::array<double, 3>& v) {
    Json j;
    for (std::size_t k = 0; k < kAllNorms.size(); ++k) j[to_string(kAllNorms[k])] = num(v[k]);
    return j;
}

Vector parse_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("cannot parse ") + what + " entry '" + item + "'");
        }
    }
    return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int resolve_limit(const Common& c, int fallback, std::ostream& err) {
    int limit = fallback;
    if (c.limit) {
        limit = *c.limit;
    } else if (const char* env = std::getenv("PLABS_LIMIT")) {
        try {
            limit = std::stoi(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("PLABS_LIMIT is not an integer: '") + env + "'");
        }
    }
    if (limit < 0) throw UsageError("limit must be nonnegative");
    if (limit > 20) err << "warning: enumeration limit " << limit << " allows up to 2^" << limit << " cases\n";
    return limit;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string scalar_text(const Json& v) {
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "-";
    return v.dump();
}

bool is_flat(const Json& a) {
    for (const Json& v : a) {
        if (v.is_structured()) return false;
    }
    return true;
}

void render_text(const Json& j, std::ostream& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto& [key, v] : j.items()) {
        if (v.is_object()) {
            out << pad << key << ":\n";
            render_text(v, out, indent + 2);
        } else if (v.is_array() && is_flat(v)) {
            out << pad << key << ": [";
            for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << scalar_text(v[i]);
            out << "]\n";
        } else if (v.is_array()) {
            out << pad << key << ":\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (v[i].is_object()) {
                    out << pad << "  [" << i << "]\n";
                    render_text(v[i], out, indent + 4);
                } else {
                    Json row;
                    row["[" + std::to_string(i) + "]"] = v[i];
                    render_text(row, out, indent + 2);
                }
            }
        } else {
            out << pad << key << ": " << scalar_text(v) << "\n";
        }
    }
}

void emit(Json report, int code, const Common& c, std::ostream& out) {
    report["exit_code"] = code;
    if (c.format == "json") {
        out << report.dump(2) << "\n";
    } else {
        render_text(report, out, 0);
    }
}

Json header(const char* command, const Common& c) {
    Json j;
    j["command"] = command;
    if (!c.file.empty()) j["file"] = c.file;
    return j;
}

// Form with the target folded into b and, on request, a regularized J.
AbsNormalForm effective_form(const ProblemDocument& doc, const Common& c) {
    AbsNormalForm f = doc.target ? with_target(doc.form(), *doc.target) : doc.form();
    if (c.regularize) f = regularize_smooth_part(f);
    return f;
}

CplSystem cpl_of(const ProblemDocument& doc, const Common& c) {
    if (!doc.is_form()) return doc.cpl();
    return CplSystem::from_form(effective_form(doc, c));
}

Json trace_json(const SolveTrace& t) {
    Json j;
    j["status"] = to_string(t.status);
    j["label"] = t.status_text();
    j["exact"] = t.exact;
    j["period"] = t.period;
    j["iterations"] = t.iterations;
    j["flop_count"] = t.flopCount;
    Json res = Json::array();
    for (double r : t.residualNorms) res.push_back(num(r));
    j["residual_norms"] = res;
    Json sig = Json::array();
    for (const Signature& s : t.sigmaHistory) sig.push_back(s.str());
    j["sigma_history"] = sig;
    j["solution"] = to_json(t.solution);
    return j;
}

int cmd_validate(const Common& c, std::ostream& out) {
    const ProblemDocument doc = load_document(c.file);
    Json j = header("validate", c);
    if (doc.is_form()) {
        const ValidationReport r = validate(doc.form());
        j["kind"] = "abs-normal";
        j["n"] = doc.form().n();
        j["s"] = doc.form().s();
        j["m"] = doc.form().m();
        j["ok"] = r.ok;
        j["nu"] = r.nu;
        j["messages"] = r.messages;
        emit(j, r.ok ? kExitOk : kExitInvalidInput, c, out);
        return r.ok ? kExitOk : kExitInvalidInput;
    }
    const CplSystem& sys = doc.cpl();
    const bool ok = all_finite(sys.S) && all_finite(sys.cHat);
    j["kind"] = "cpl";
    j["s"] = sys.s();
    j["ok"] = ok;
    j["nu"] = nullptr;
    j["messages"] = Json::array();
    emit(j, ok ? kExitOk : kExitInvalidInput, c, out);
    return ok ? kExitOk : kExitInvalidInput;
}

int cmd_eval(const Common& c, const std::string& xText, std::ostream& out) {
    const ProblemDocument doc = load_document(c.file);
    const Vector x = parse_list(xText, "--x");
    Json j = header("eval", c);
    if (doc.is_form()) {
        const AbsNormalForm& f = doc.form();
        if (x.size() != f.n()) throw UsageError("--x needs " + std::to_string(f.n()) + " entries");
        const EvalRecord r = evaluate(f, x);
        j["x"] = to_json(r.x);
        j["z"] = to_json(r.z);
        j["z_abs"] = to_json(r.zAbs);
        j["y"] = to_json(r.y);
        j["sigma"] = r.sigma.str();
    } else {
        const CplSystem& sys = doc.cpl();
        if (x.size() != sys.s()) throw UsageError("--x needs " + std::to_string(sys.s()) + " entries");
        j["z"] = to_json(x);
        j["h"] = to_json(h_eval(sys, x));
        j["residual"] = num(inf_norm(h_eval(sys, x) - sys.cHat));
        j["sigma"] = Signature::of(x).str();
    }
    emit(j, kExitOk, c, out);
    return kExitOk;
}

int cmd_diagnose(const Common& c, std::ostream& out, std::ostream& err) {
    const ProblemDocument doc = load_document(c.file);
    const int limit = resolve_limit(c, kDefaultEnumLimit, err);
    Json j = header("diagnose", c);
    CertificateReport r;
    Json likq = "n/a";
    Json sampled = nullptr;
    if (doc.is_form()) {
        const AbsNormalForm f = effective_form(doc, c);
        r = certificates(f, limit);
        try {
            likq = likq_sufficient(f.c, f.Z);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TooLarge) throw;
            likq = "skipped(too many submatrices)";
        }
        if (f.m() == f.n()) {
            const SampledCoherence sc = sample_coherence(f, 64, 1);
            sampled = {{"samples", sc.samples}, {"positive", sc.positive}, {"negative", sc.negative},
                       {"singular", sc.singular}, {"consistent", sc.consistent()}};
        }
    } else {
        r = certificates_for_schur(doc.cpl().S, limit);
    }
    j["s"] = r.s;
    j["nu"] = r.nu;
    j["limit"] = limit;
    j["schur_available"] = r.schurAvailable;
    if (!r.schurAvailable) j["schur_error"] = r.schurError;
    j["norms_L"] = norms_json(r.normsL);
    if (r.schurAvailable) {
        j["norms_S"] = norms_json(r.normsS);
        j["seidel"] = {{"value", num(r.seidel)}, {"p", to_string(r.seidelP)}};
        j["rho_abs"] = num(r.rhoAbs);
        j["irreducible"] = r.irreducible;
        j["equilibrated_inf_norm"] = num(r.equilibratedInf);
        j["smooth_dominance"] = num(r.smoothDominance);
        j["rho_hat"] = {{"value", num(r.rhoHat)}, {"p", to_string(r.rhoHatP)}};
        j["rho_bar"] = num(r.rhoBar);
        j["sign_real_spectral_radius"] = r.signRealRadius ? num(*r.signRealRadius) : Json("skipped(s>limit)");
        j["sigma_coherent"] = r.sigmaCoherent ? Json(*r.sigmaCoherent) : Json("skipped(s>limit)");
        j["coherence_witness"] = r.coherenceWitness ? Json(r.coherenceWitness->str()) : Json(nullptr);
        Json v;
        v["newton_opl"] = r.verdicts.newtonOpl;
        v["newton_cpl"] = r.verdicts.newtonCpl;
        v["signed_ge"] = r.verdicts.signedGe;
        v["signed_ge_boundary"] = r.verdicts.signedGeBoundary;
        v["block_seidel"] = r.verdicts.blockSeidel;
        v["modulus"] = r.verdicts.modulus;
        v["piecewise_newton_cpl"] =
            r.verdicts.piecewiseNewtonCpl ? Json(*r.verdicts.piecewiseNewtonCpl) : Json("skipped(s>limit)");
        j["verdicts"] = v;
    }
    j["likq_sufficient"] = likq;
    j["sampled_coherence"] = sampled;
    const int code = r.schurAvailable ? kExitOk : kExitCapability;
    if (!r.schurAvailable) err << "Schur complement unavailable (" << r.schurError << "); try --regularize\n";
    emit(j, code, c, out);
    return code;
}

int cmd_solve(const Common& c, const std::string& method, const std::string& x0Text, const std::string& z0Text,
              SolveOptions opt, std::ostream& out) {
    const ProblemDocument doc = load_document(c.file);
    Json j = header("solve", c);
    j["method"] = method;
    SolveTrace t;
    std::optional<Vector> x;
    double verified = 0.0;

    auto start = [](const std::string& text, Eigen::Index len, const char* what) {
        if (text.empty()) return Vector(Vector::Zero(len));
        Vector v = parse_list(text, what);
        if (v.size() != len) throw UsageError(std::string(what) + " needs " + std::to_string(len) + " entries");
        return v;
    };

    if (method == "modulus" || method == "newton-cpl" || method == "signed-ge") {
        const CplSystem sys = cpl_of(doc, c);
        const Vector z0 = start(z0Text, sys.s(), "--z0");
        if (method == "modulus") {
            t = modulus(sys, z0, opt);
        } else if (method == "newton-cpl") {
            t = newton_cpl(sys, z0, opt);
        } else {
            t = signed_ge(sys, opt);
        }
        verified = inf_norm(h_eval(sys, t.solution) - sys.cHat);
        if (doc.is_form()) {
            const AbsNormalForm f = effective_form(doc, c);
            x = x_from_z(f, t.solution);
            j["verified_residual_F"] = num(inf_norm(evaluate(f, *x).y));
        }
    } else if (method == "seidel") {
        const AbsNormalForm f = doc.is_form() ? effective_form(doc, c) : as_form(doc.cpl());
        const Vector z0 = start(z0Text, f.s(), "--z0");
        t = block_seidel(f, z0, opt);
        x = x_from_z(f, t.solution);
        verified = inf_norm(evaluate(f, *x).y);
    } else if (method == "newton-opl") {
        const AbsNormalForm f = doc.is_form() ? effective_form(doc, c) : as_form(doc.cpl());
        const Vector x0 = start(x0Text, f.n(), "--x0");
        t = newton_opl(f, x0, opt);
        x = t.solution;
        verified = inf_norm(evaluate(f, *x).y);
    } else {
        throw UsageError("unknown method '" + method + "'");
    }
    j["trace"] = trace_json(t);
    if (x) j["x"] = to_json(*x);
    j["verified_residual"] = num(verified);
    const int code = t.converged() ? kExitOk : kExitNotConverged;
    emit(j, code, c, out);
    return code;
}

int cmd_oracle(const Common& c, std::ostream& out, std::ostream& err) {
    const ProblemDocument doc = load_document(c.file);
    const int limit = resolve_limit(c, kDefaultEnumLimit, err);
    const CplSystem sys = cpl_of(doc, c);
    const std::vector<Vector> sols = brute_force_solutions(sys, limit);
    Json j = header("oracle", c);
    j["limit"] = limit;
    j["count"] = sols.size();
    Json list = Json::array();
    for (const Vector& z : sols) {
        Json e;
        e["z"] = to_json(z);
        e["residual"] = num(inf_norm(h_eval(sys, z) - sys.cHat));
        if (doc.is_form()) e["x"] = to_json(x_from_z(effective_form(doc, c), z));
        list.push_back(e);
    }
    j["solutions"] = list;
    emit(j, kExitOk, c, out);
    return kExitOk;
}

int cmd_lcp(const Common& c, std::ostream& out, std::ostream& err) {
    const ProblemDocument doc = load_document(c.file);
    const CplSystem sys = cpl_of(doc, c);
    const int pLimit = resolve_limit(c, kDefaultGraphLimit, err);
    const int enumLimit = c.limit || std::getenv("PLABS_LIMIT") ? pLimit : kDefaultEnumLimit;
    const LcpData data = to_lcp(sys);
    const bool pm = p_matrix_check(data.M, pLimit);
    const LcpEnumeration en = lcp_solve_enum(data, enumLimit);
    Json j = header("lcp", c);
    j["swapped"] = data.swapped;
    j["q"] = to_json(data.q);
    j["M"] = to_json(data.M);
    j["p_matrix"] = pm;
    j["degenerate_supports"] = en.degenerateSupports;
    j["count"] = en.solutions.size();
    Json list = Json::array();
    for (const LcpSolution& s : en.solutions) {
        list.push_back({{"u", to_json(s.u)}, {"w", to_json(s.w)}, {"z", to_json(s.z)}});
    }
    j["solutions"] = list;
    emit(j, kExitOk, c, out);
    return kExitOk;
}

int cmd_graph(const Common& c, const std::string& dotPath, std::ostream& out, std::ostream& err) {
    const ProblemDocument doc = load_document(c.file);
    const int limit = resolve_limit(c, kDefaultGraphLimit, err);
    const CplSystem sys = cpl_of(doc, c);
    const TransitionGraph g = build_graph(sys, limit);
    const std::vector<GraphComponent> comps = analyze(g);
    Json j = header("graph", c);
    j["s"] = g.s;
    j["vertices"] = g.size();
    int degenerate = 0, singular = 0;
    for (std::size_t v = 0; v < g.size(); ++v) {
        degenerate += g.degenerate[v] ? 1 : 0;
        singular += g.singular[v] ? 1 : 0;
    }
    j["degenerate_vertices"] = degenerate;
    j["singular_vertices"] = singular;
    Json list = Json::array();
    for (const GraphComponent& comp : comps) {
        Json e;
        Json cyc = Json::array();
        for (std::uint32_t v : comp.cycle) cyc.push_back(vertex_label(v, g.s));
        e["cycle"] = cyc;
        e["cycle_length"] = comp.cycle.size();
        e["basin_size"] = comp.basinSize;
        if (comp.cycle.size() == 1 && !g.singular[comp.cycle.front()]) e["fixed_point_z"] = to_json(g.zValues[comp.cycle.front()]);
        list.push_back(e);
    }
    j["components"] = list;
    if (!dotPath.empty()) {
        std::ofstream dot(dotPath);
        if (!dot) throw Error(ErrorCode::InvalidArgument, "cannot write '" + dotPath + "'");
        dot << export_dot(g);
        j["dot"] = dotPath;
    }
    emit(j, kExitOk, c, out);
    return kExitOk;
}

int cmd_gen(const std::string& example, const GalleryParams& p, const std::string& outPath, std::ostream& out) {
    ProblemDocument doc;
    doc.data = std::visit([](auto&& v) -> std::variant<AbsNormalForm, CplSystem> { return v; }, generate(example, p));
    doc.name = example;
    doc.seed = p.seed;
    if (outPath.empty()) {
        out << dump_document(doc);
    } else {
        save_document(outPath, doc);
    }
    return kExitOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDocument: return kExitInvalidInput;
        case ErrorCode::TooLarge:
        case ErrorCode::SingularSmoothPart: return kExitCapability;
        case ErrorCode::SingularPiece:
        case ErrorCode::PivotBreakdown: return kExitNotConverged;
        case ErrorCode::UnknownExample:
        case ErrorCode::BadParams:
        case ErrorCode::DimensionMismatch: return kExitUsage;
        default: return kExitInvalidInput;
    }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Abs-normal piecewise linear systems: diagnostics, solvers and oracles", "plabs"};
    app.require_subcommand(1);
    Common common;

    auto add_common = [&](CLI::App* sub, bool withFile) {
        if (withFile) sub->add_option("file", common.file, "problem document (JSON)")->required();
        sub->add_option("--format", common.format, "output format")->check(CLI::IsMember({"text", "json"}));
        sub->add_flag("--regularize", common.regularize, "shift alpha I into the smooth part first");
        sub->add_option("--limit", common.limit, "brute-force enumeration limit");
    };

    CLI::App* validateCmd = app.add_subcommand("validate", "structural report including switching depth");
    add_common(validateCmd, true);

    CLI::App* evalCmd = app.add_subcommand("eval", "evaluate at a point");
    add_common(evalCmd, true);
    std::string xText;
    evalCmd->add_option("--x", xText, "comma separated point")->required();

    CLI::App* diagnoseCmd = app.add_subcommand("diagnose", "solvability certificates");
    add_common(diagnoseCmd, true);

    CLI::App* solveCmd = app.add_subcommand("solve", "run a solver");
    add_common(solveCmd, true);
    std::string method, x0Text, z0Text;
    SolveOptions opt;
    solveCmd->add_option("--method", method, "solver")
        ->required()
        ->check(CLI::IsMember({"modulus", "seidel", "newton-opl", "newton-cpl", "signed-ge"}));
    solveCmd->add_option("--x0", x0Text, "start for newton-opl");
    solveCmd->add_option("--z0", z0Text, "start for CPL methods");
    solveCmd->add_option("--tol", opt.tol, "tolerance");
    solveCmd->add_option("--maxit", opt.maxit, "iteration cap");
    solveCmd->add_flag("--escape", opt.useEscape, "newton-opl: signatures by polynomial escape");
    solveCmd->add_flag("--equilibrate", opt.equilibrate, "signed-ge: Perron equilibration");

    CLI::App* oracleCmd = app.add_subcommand("oracle", "brute-force CPL solutions");
    add_common(oracleCmd, true);

    CLI::App* lcpCmd = app.add_subcommand("lcp", "LCP reduction, P-matrix test, enumerated solutions");
    add_common(lcpCmd, true);

    CLI::App* graphCmd = app.add_subcommand("graph", "Newton transition graph");
    add_common(graphCmd, true);
    std::string dotPath;
    graphCmd->add_option("--dot", dotPath, "write DOT file");

    CLI::App* genCmd = app.add_subcommand("gen", "generate a gallery instance");
    std::string example, outPath;
    GalleryParams params;
    int n = 0, s = 0;
    double a = 0, zeta = 0, eps = 0, target = 0;
    std::uint64_t seed = 0;
    std::string norm;
    genCmd->add_option("--example", example, "example name")->required();
    auto* nOpt = genCmd->add_option("--n", n);
    auto* sOpt = genCmd->add_option("--s", s);
    auto* aOpt = genCmd->add_option("--a", a);
    auto* zetaOpt = genCmd->add_option("--zeta", zeta);
    auto* epsOpt = genCmd->add_option("--eps", eps);
    auto* seedOpt = genCmd->add_option("--seed", seed);
    auto* targetOpt = genCmd->add_option("--target", target);
    auto* normOpt = genCmd->add_option("--norm", norm)->check(CLI::IsMember({"2", "abs", "inf"}));
    genCmd->add_option("-o,--output", outPath, "output file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*validateCmd) return cmd_validate(common, out);
        if (*evalCmd) return cmd_eval(common, xText, out);
        if (*diagnoseCmd) return cmd_diagnose(common, out, err);
        if (*solveCmd) return cmd_solve(common, method, x0Text, z0Text, opt, out);
        if (*oracleCmd) return cmd_oracle(common, out, err);
        if (*lcpCmd) return cmd_lcp(common, out, err);
        if (*graphCmd) return cmd_graph(common, dotPath, out, err);
        if (*genCmd) {
            if (*nOpt) params.n = n;
            if (*sOpt) params.s = s;
            if (*aOpt) params.a = a;
            if (*zetaOpt) params.zeta = zeta;
            if (*epsOpt) params.eps = eps;
            if (*seedOpt) params.seed = seed;
            if (*targetOpt) params.target = target;
            if (*normOpt) params.norm = norm;
            return cmd_gen(example, params, outPath, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        if (e.code() == ErrorCode::SingularSmoothPart) err << "hint: rerun with --regularize\n";
        return exit_code_for(e.code());
    }
    return kExitUsage;
}

} // namespace plabs
