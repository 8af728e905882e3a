#include "laxforge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <utility>

#include "laxforge/dynamics.hpp"
#include "laxforge/groebner.hpp"
#include "laxforge/laxpair.hpp"
#include "laxforge/poisson.hpp"

namespace laxforge::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kLaxTol = 1e-9;
constexpr double kTraceTol = 1e-10;
constexpr double kInvolutionTol = 1e-9;
constexpr double kOrthogonalityTol = 1e-10;
constexpr double kNondegeneracyTol = 1e-8;
constexpr double kGradientTol = 1e-10;
constexpr double kPoissonMapTol = 1e-9;
constexpr double kHamiltonianTol = 1e-9;
constexpr double kDetRTol = 1e-10;
constexpr double kCrossBracketTol = 1e-10;
constexpr double kDriftTol = 1e-8;
constexpr double kSymplecticTol = 1e-8;
constexpr double kN1Tol = 1e-9;
constexpr std::size_t kSamples = 20;
constexpr int kGroebnerDraws = 10;

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ParseError, std::string("malformed JSON: ") + e.what());
    }
}

double number_of(const json& v, const std::string& where) {
    if (!v.is_number()) throw Error(ErrorKind::ParseError, where + " is not a number");
    return v.get<double>();
}

cplx entry_of(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2) return {number_of(v[0], where), number_of(v[1], where)};
    throw Error(ErrorKind::ParseError, where + " must be a number or [re, im]");
}

std::size_t size_of(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number_unsigned()) {
        throw Error(ErrorKind::ParseError, std::string("matrix field \"") + key + "\" must be a nonnegative integer");
    }
    return obj[key].get<std::size_t>();
}

ComplexMatrix complex_matrix_of(const json& obj, const std::string& name) {
    if (!obj.is_object()) throw Error(ErrorKind::ParseError, name + " must be a matrix object");
    const std::size_t rows = size_of(obj, "rows");
    const std::size_t cols = size_of(obj, "cols");
    if (!obj.contains("entries") || !obj["entries"].is_array()) {
        throw Error(ErrorKind::ParseError, name + ".entries must be an array");
    }
    const auto& entries = obj["entries"];
    if (entries.size() != rows * cols) {
        throw Error(ErrorKind::ParseError, name + " has " + std::to_string(entries.size()) + " entries, expected " +
                                               std::to_string(rows * cols));
    }
    std::vector<cplx> values;
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        values.push_back(entry_of(entries[k], name + ".entries[" + std::to_string(k) + "]"));
    }
    return ComplexMatrix::from_rows(rows, cols, std::move(values));
}

RealMatrix real_matrix_of(const json& obj, const std::string& name) {
    const ComplexMatrix c = complex_matrix_of(obj, name);
    for (std::size_t k = 0; k < c.data().size(); ++k) {
        if (c.data()[k].imag() != 0.0) {
            throw Error(ErrorKind::ParseError, name + ".entries[" + std::to_string(k) + "] has a nonzero imaginary part");
        }
    }
    return real_part(c);
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(std::span<const cplx> v) {
    json a = json::array();
    for (const auto& z : v) a.push_back(to_json(z));
    return a;
}

json to_json(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

json to_json(const RealMatrix& m) {
    json entries = json::array();
    for (double x : m.data()) entries.push_back(x);
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

std::string lambda_label(cplx l) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g%+.6gi", l.real(), l.imag());
    return buf;
}

double tol_or(const RunConfig& c, double fallback) { return c.tol.value_or(fallback); }

void add_upper(Report& r, const RunConfig& c, std::string name, double value, double fallback) {
    const double tol = tol_or(c, fallback);
    r.checks.push_back({std::move(name), value, tol, true, value <= tol});
}

void add_lower(Report& r, std::string name, double value, double bound) {
    r.checks.push_back({std::move(name), value, bound, false, value >= bound});
}

/// Exact checks: value counts failures, tolerance 0.
void add_exact(Report& r, std::string name, bool ok) {
    r.checks.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, true, ok});
}

std::vector<RealVector> sample_points(std::size_t dim, std::size_t count, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<RealVector> xs(count, RealVector(dim));
    for (auto& x : xs)
        for (auto& v : x) v = g(rng);
    return xs;
}

struct Loaded {
    ValidatedSystem sys;
    std::vector<AdmissiblePair> explicit_pairs;
    SpectralData spectrum;
    bool simple = false;
    double min_gap = 0.0;  // relative to the spectral radius
};

double relative_min_gap(std::span<const cplx> ev) {
    double radius = 0.0;
    for (const auto& l : ev) radius = std::max(radius, std::abs(l));
    double gap = INFINITY;
    for (std::size_t i = 0; i < ev.size(); ++i)
        for (std::size_t j = i + 1; j < ev.size(); ++j) gap = std::min(gap, std::abs(ev[i] - ev[j]));
    return radius > 0.0 ? gap / radius : 0.0;
}

Loaded load(const std::string& text) {
    auto in = parse_system_input(text);
    Loaded l{std::move(in.system), std::move(in.pairs), {}, false, 0.0};
    l.spectrum = system_spectrum(l.sys);
    l.simple = is_simple_spectrum(l.spectrum);
    l.min_gap = relative_min_gap(l.spectrum.eigenvalues);
    return l;
}

void require_simple(const Loaded& l, const RunConfig& c) {
    if (!l.simple && !c.force) {
        throw Error(ErrorKind::PreconditionViolation,
                    "spectrum of P*Gamma^-1 is not simple (relative gap " + std::to_string(l.min_gap) +
                        "); rerun with --force to proceed anyway");
    }
}

bool close(cplx a, cplx b) { return std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)); }

/// One pair per positive representative. Explicit pairs win; a genuinely
/// complex λ̄ reuses the conjugate of the λ pair so the integrals split.
std::vector<AdmissiblePair> pair_set(const Loaded& l) {
    const auto reps = positive_representatives(l.spectrum.eigenvalues);
    for (const auto& p : l.explicit_pairs) {
        const bool matched = std::any_of(reps.begin(), reps.end(), [&](cplx r) { return close(r, p.lambda); });
        if (!matched) {
            throw Error(ErrorKind::PreconditionViolation,
                        "explicit pair lambda " + lambda_label(p.lambda) + " is not a representative eigenvalue");
        }
    }
    std::vector<AdmissiblePair> out;
    for (cplx r : reps) {
        auto hit = std::find_if(l.explicit_pairs.begin(), l.explicit_pairs.end(),
                                [&](const AdmissiblePair& p) { return close(p.lambda, r); });
        if (hit != l.explicit_pairs.end()) {
            out.push_back(*hit);
            continue;
        }
        if (classify_lambda(r) == LambdaClass::GenuinelyComplex) {
            const AdmissiblePair* partner = nullptr;
            for (const std::vector<AdmissiblePair>* list : {&l.explicit_pairs, &std::as_const(out)})
                for (const auto& p : *list)
                    if (!partner && close(p.lambda, std::conj(r))) partner = &p;
            if (partner) {
                const auto w = conj(partner->w);
                out.push_back(select_admissible_pair(l.sys, std::conj(partner->lambda), w));
                continue;
            }
        }
        out.push_back(select_admissible_pair(l.sys, r));
    }
    return out;
}

/// Integrals made real: Re/Im of conjugate pairs, the real part otherwise.
std::vector<QuadraticIntegral> real_integrals(std::span<const AdmissiblePair> pairs) {
    std::vector<QuadraticIntegral> out;
    std::vector<bool> used(pairs.size(), false);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const auto& p = pairs[i];
        const std::string name = "I[" + lambda_label(p.lambda) + "]";
        if (p.lambda_class == LambdaClass::GenuinelyComplex) {
            for (std::size_t j = i + 1; j < pairs.size(); ++j) {
                if (!used[j] && close(pairs[j].lambda, std::conj(p.lambda))) {
                    used[j] = true;
                    auto [re, im] = real_imag_split(integral_of_pair(p), integral_of_pair(pairs[j]));
                    re.label = "Re " + name;
                    im.label = "Im " + name;
                    out.push_back(std::move(re));
                    out.push_back(std::move(im));
                    break;
                }
            }
            continue;
        }
        auto integral = integral_of_pair(p, name);
        integral.s = to_complex(real_part(integral.s));
        out.push_back(std::move(integral));
    }
    return out;
}

double lax_residual_at(const LaxPairModel& m, const ValidatedSystem& sys, std::span<const RealVector> xs) {
    double worst = 0.0;
    for (const auto& x : xs) {
        const RealVector xdot = sys.flow_generator() * x;
        const ComplexMatrix lx = m.evaluate(x);
        const double scale = norm_max(lx);
        if (scale == 0.0) continue;
        worst = std::max(worst, norm_max(m.evaluate(xdot) - commutator(m.b, lx)) / scale);
    }
    return worst;
}

double trace_identity_gap(const AdmissiblePair& p, std::span<const RealVector> xs) {
    const auto model = build_lax2(p);
    const auto integral = integral_of_pair(p);
    double worst = 0.0;
    for (const auto& x : xs) {
        const cplx i = integral.evaluate(x);
        worst = std::max(worst, std::abs(trace_square(model.evaluate(x)) - i) / std::max(std::abs(i), 1e-300));
    }
    return worst;
}

json pair_json(const AdmissiblePair& p, const ValidatedSystem& sys, const Loaded& l) {
    const bool given = std::any_of(l.explicit_pairs.begin(), l.explicit_pairs.end(),
                                   [&](const AdmissiblePair& q) { return close(q.lambda, p.lambda); });
    return json{{"lambda", to_json(p.lambda)},
                {"class", std::string(to_string(p.lambda_class))},
                {"source", given ? "input" : "automatic"},
                {"w", to_json(p.w)},
                {"w_hat", to_json(p.w_hat)},
                {"nondegeneracy", std::abs(nondegeneracy_check(sys, p.w)) / std::pow(norm2(p.w), 2)}};
}

double max_drift_row(std::span<const double> d) { return d.empty() ? 0.0 : *std::max_element(d.begin(), d.end()); }

/// Relative drift of every integral at every sample.
std::vector<std::vector<double>> drift_table(std::span<const QuadraticIntegral> integrals, const Trajectory& traj) {
    std::vector<std::vector<double>> out(integrals.size(), std::vector<double>(traj.times.size()));
    for (std::size_t k = 0; k < integrals.size(); ++k) {
        const cplx i0 = integrals[k].evaluate(traj.states.front());
        const double scale = std::max(std::abs(i0), 1e-30);
        for (std::size_t t = 0; t < traj.times.size(); ++t) {
            out[k][t] = std::abs(integrals[k].evaluate(traj.states[t]) - i0) / scale;
        }
    }
    return out;
}

json checks_json(const Report& r) {
    json a = json::array();
    for (const auto& c : r.checks) {
        a.push_back(json{{"name", c.name},
                         {"value", c.value},
                         {"tolerance", c.tol},
                         {"relation", c.upper ? "<=" : ">="},
                         {"status", c.pass ? "PASS" : "FAIL"}});
    }
    return a;
}

Table checks_table(const Report& r) {
    Table t{{"name", "value", "tolerance", "relation", "status"}, {}};
    for (const auto& c : r.checks) {
        t.rows.push_back({c.name, c.value, c.tol, std::string(c.upper ? "<=" : ">="), std::string(c.pass ? "PASS" : "FAIL")});
    }
    return t;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15e", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return csv_escape(*s);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::to_string(std::get<long long>(c));
}

void text_value(std::ostringstream& os, const json& v, int depth, const std::string& key);

std::string scalar_text(const json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

bool is_flat(const json& v) {
    if (!v.is_array()) return !v.is_object();
    return std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_primitive() || (e.is_array() && e.size() <= 2 && std::all_of(e.begin(), e.end(), [](const json& x) { return x.is_primitive(); })); });
}

std::string flat_text(const json& v) {
    if (!v.is_array()) return scalar_text(v);
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += flat_text(v[i]);
    }
    return s + "]";
}

void text_value(std::ostringstream& os, const json& v, int depth, const std::string& key) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    if (is_flat(v)) {
        os << pad << key << ": " << flat_text(v) << '\n';
        return;
    }
    os << pad << key << ":\n";
    if (v.is_object()) {
        for (const auto& [k, e] : v.items()) text_value(os, e, depth + 1, k);
    } else {
        for (std::size_t i = 0; i < v.size(); ++i) text_value(os, v[i], depth + 1, "[" + std::to_string(i) + "]");
    }
}

Report finish(Command cmd, json body, Report r) {
    r.command = cmd;
    body["checks"] = checks_json(r);
    body["status"] = r.all_pass() ? "PASS" : "FAIL";
    r.body = body.dump(2);
    if (r.table.header.empty()) r.table = checks_table(r);
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, "cannot read input file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Rational exact(double v) {
    Rational r(v);
    r.canonicalize();
    return r;
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
        case Command::Analyze: return "analyze";
        case Command::Integrals: return "integrals";
        case Command::Verify: return "verify";
        case Command::Simulate: return "simulate";
        case Command::GroebnerCheck: return "groebner-check";
    }
    return "?";
}

int exit_code_for(ErrorKind kind) {
    if (kind == ErrorKind::ParseError) return kExitParse;
    if (is_validation_error(kind)) return kExitValidation;
    switch (kind) {
        case ErrorKind::PreconditionViolation:
        case ErrorKind::NotAdmissible:
        case ErrorKind::VectorNotInVLambda:
        case ErrorKind::DimensionTooSmall:
            return kExitValidation;
        default:
            return kExitFail;
    }
}

RealMatrix parse_real_matrix(const std::string& json_text) { return real_matrix_of(parse_json(json_text), "matrix"); }

ComplexMatrix parse_complex_matrix(const std::string& json_text) {
    return complex_matrix_of(parse_json(json_text), "matrix");
}

SystemInput parse_system_input(const std::string& json_text) {
    const json doc = parse_json(json_text);
    if (!doc.is_object()) throw Error(ErrorKind::ParseError, "input must be a JSON object");
    if (!doc.contains("gamma")) throw Error(ErrorKind::ParseError, "input lacks \"gamma\"");
    if (!doc.contains("p")) throw Error(ErrorKind::ParseError, "input lacks \"p\"");
    const RealMatrix gamma = real_matrix_of(doc["gamma"], "gamma");
    const RealMatrix p = real_matrix_of(doc["p"], "p");
    SystemInput in{validate_system(gamma, p), {}};
    if (doc.contains("pairs")) {
        const auto& pairs = doc["pairs"];
        if (!pairs.is_array()) throw Error(ErrorKind::ParseError, "\"pairs\" must be an array");
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const std::string where = "pairs[" + std::to_string(k) + "]";
            const auto& e = pairs[k];
            if (!e.is_object() || !e.contains("lambda") || !e.contains("w") || !e["w"].is_array()) {
                throw Error(ErrorKind::ParseError, where + " needs \"lambda\" and an array \"w\"");
            }
            const cplx lambda = entry_of(e["lambda"], where + ".lambda");
            ComplexVector w;
            for (std::size_t i = 0; i < e["w"].size(); ++i) {
                w.push_back(entry_of(e["w"][i], where + ".w[" + std::to_string(i) + "]"));
            }
            in.pairs.push_back(select_admissible_pair(in.system, lambda, w));
        }
    }
    return in;
}

bool Report::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Report cmd_analyze(const RunConfig& config, const std::string& input_text) {
    const Loaded l = load(input_text);
    Report r;
    const auto& s = l.spectrum;
    const auto quads = quadruple_symmetry_check(s, tol_or(config, kPairingTol));

    json orbits = json::array();
    std::vector<long long> orbit_of(s.eigenvalues.size(), -1);
    for (std::size_t k = 0; k < quads.orbits.size(); ++k) {
        orbits.push_back(quads.orbits[k]);
        for (auto i : quads.orbits[k]) orbit_of[i] = static_cast<long long>(k);
    }

    json vl = json::array();
    for (cplx lam : positive_representatives(s.eigenvalues)) {
        const auto basis = v_lambda_basis(l.sys, lam);
        vl.push_back(json{{"lambda", to_json(lam)},
                          {"class", std::string(to_string(classify_lambda(lam)))},
                          {"dimension", basis.size()}});
    }

    json pairs = json::array();
    if (l.simple || config.force) {
        for (const auto& p : pair_set(l)) pairs.push_back(pair_json(p, l.sys, l));
    }

    json body{{"command", "analyze"},
              {"n", l.sys.n()},
              {"dimension", l.sys.dim()},
              {"spectrum",
               {{"eigenvalues", to_json(s.eigenvalues)},
                {"residuals", to_json(s.residuals)},
                {"operator_norm", s.operator_norm}}},
              {"quadruples",
               {{"orbits", orbits},
                {"full_quadruples", quads.full_quadruples()},
                {"max_partner_distance", quads.max_partner_distance}}},
              {"v_lambda", vl},
              {"simple", l.simple},
              {"min_relative_gap", l.min_gap},
              {"pairs", pairs}};

    add_upper(r, config, "eigen_residual", s.max_residual() / std::max(s.operator_norm, 1e-300), kSpectralTol);
    add_upper(r, config, "quadruple_partner_distance", quads.max_partner_distance, kPairingTol);

    r.table.header = {"index", "re", "im", "residual", "orbit", "class"};
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
        r.table.rows.push_back({static_cast<long long>(i), s.eigenvalues[i].real(), s.eigenvalues[i].imag(),
                                s.residuals[i], orbit_of[i], std::string(to_string(classify_lambda(s.eigenvalues[i])))});
    }
    return finish(Command::Analyze, std::move(body), std::move(r));
}

Report cmd_integrals(const RunConfig& config, const std::string& input_text) {
    const Loaded l = load(input_text);
    require_simple(l, config);
    Report r;
    const auto pairs = pair_set(l);
    std::mt19937_64 rng(config.seed);
    json body{{"command", "integrals"}, {"n", l.sys.n()}};

    std::vector<QuadraticIntegral> integrals;
    if (l.sys.n() == 1) {
        auto integral = integral_of_pair(normalize_n1(pairs.front(), l.sys), "I[normalized]");
        const RealMatrix two_p = 2.0 * l.sys.p();
        const double gap = norm_max(integral.s - to_complex(two_p)) / norm_max(l.sys.p());
        add_upper(r, config, "normalized_integral_vs_2P", gap, kN1Tol);
        body["normalized"] = true;
        integral.s = to_complex(real_part(integral.s));
        integrals.push_back(std::move(integral));
    } else {
        integrals = real_integrals(pairs);
    }

    json list = json::array();
    r.table.header = {"integral", "row", "col", "value"};
    for (const auto& q : integrals) {
        const RealMatrix m = real_part(q.s);
        list.push_back(json{{"label", q.label}, {"matrix", to_json(m)}});
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                r.table.rows.push_back({q.label, static_cast<long long>(i), static_cast<long long>(j), m(i, j)});
    }
    body["integrals"] = list;

    json table = json::array();
    const double inv_tol = tol_or(config, kInvolutionTol);
    for (std::size_t i = 0; i < integrals.size(); ++i)
        for (std::size_t j = i + 1; j < integrals.size(); ++j) {
            const double res = involution_check(integrals[i], integrals[j], l.sys);
            table.push_back(json{{"i", i}, {"j", j}, {"residual", res}, {"tolerance", inv_tol}});
            add_upper(r, config, "involution[" + std::to_string(i) + "," + std::to_string(j) + "]", res,
                      kInvolutionTol);
        }
    body["involution"] = table;

    const auto samples = sample_points(l.sys.dim(), kSamples, rng);
    const auto ind = independence_check(integrals, samples);
    body["independence"] = json{{"samples", kSamples}, {"ranks", ind.ranks}, {"min_rank", ind.min_rank},
                                {"expected", l.sys.n()}};
    add_lower(r, "independence_min_rank", static_cast<double>(ind.min_rank), static_cast<double>(l.sys.n()));
    return finish(Command::Integrals, std::move(body), std::move(r));
}

Report cmd_verify(const RunConfig& config, const std::string& input_text) {
    const Loaded l = load(input_text);
    require_simple(l, config);
    Report r;
    const auto& sys = l.sys;
    const auto& s = l.spectrum;
    std::mt19937_64 rng(config.seed);
    const auto samples = sample_points(sys.dim(), kSamples, rng);

    // Spectral structure.
    add_upper(r, config, "eigen_residual", s.max_residual() / std::max(s.operator_norm, 1e-300), kSpectralTol);
    double partner = INFINITY;
    try {
        partner = quadruple_symmetry_check(s, tol_or(config, kPairingTol)).max_partner_distance;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SymmetryViolation) throw;
    }
    add_upper(r, config, "quadruple_partner_distance", partner, kPairingTol);
    add_lower(r, "simple_spectrum_gap", l.min_gap, kGapTol);

    double ortho = 0.0;
    const ComplexMatrix gi = to_complex(sys.gamma_inv());
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
        for (std::size_t j = i + 1; j < s.eigenvalues.size(); ++j) {
            const cplx a = s.eigenvalues[i] * s.eigenvalues[i];
            const cplx b = s.eigenvalues[j] * s.eigenvalues[j];
            if (std::abs(a - b) <= 1e-6 * std::max(std::abs(a), std::abs(b))) continue;
            ortho = std::max(ortho, std::abs(bilinear(s.eigenvectors[i], gi, s.eigenvectors[j])));
        }
    add_upper(r, config, "eigenvector_orthogonality", ortho, kOrthogonalityTol);

    const auto pairs = pair_set(l);
    double nondeg = INFINITY;
    for (const auto& p : pairs) {
        nondeg = std::min(nondeg, std::abs(nondegeneracy_check(sys, p.w)) / std::pow(norm2(p.w), 2));
    }
    add_lower(r, "admissible_nondegeneracy", nondeg, kNondegeneracyTol);

    // Lax pairs.
    double lax2 = 0.0;
    double trace_gap = 0.0;
    double gradient = 0.0;
    for (const auto& p : pairs) {
        lax2 = std::max(lax2, lax_residual_at(build_lax2(p), sys, samples));
        trace_gap = std::max(trace_gap, trace_identity_gap(p, samples));
        for (const auto& x : samples) gradient = std::max(gradient, gradient_formula_check(sys, p, x).formula_residual);
    }
    add_upper(r, config, "lax2_residual", lax2, kLaxTol);
    add_upper(r, config, "trace_square_vs_integral", trace_gap, kTraceTol);
    add_upper(r, config, "gradient_formula", gradient, kGradientTol);
    if (sys.n() == 1) {
        const auto sq = sqrt_lax_n1(sys);
        add_upper(r, config, "sqrt_lax_residual", lax_residual_at(sq.model, sys, samples), kLaxTol);
    } else {
        const auto block = block_lax_2n(pairs);
        add_upper(r, config, "block_lax_residual", lax_residual_at(block, sys, samples), kLaxTol);
        add_upper(r, config, "real_form_lax_residual", lax_residual_at(real_form_lax(pairs), sys, samples), kLaxTol);
        double cond = INFINITY;
        try {
            cond = system_equivalence_check(block, sys);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::RankDeficient) throw;
        }
        r.checks.push_back({"covector_condition_number", cond, 1e12, true, cond <= 1e12});
    }

    // Integrals.
    const auto integrals = real_integrals(pairs);
    double involution = 0.0;
    for (std::size_t i = 0; i < integrals.size(); ++i)
        for (std::size_t j = i + 1; j < integrals.size(); ++j)
            involution = std::max(involution, involution_check(integrals[i], integrals[j], sys));
    add_upper(r, config, "involution", involution, kInvolutionTol);
    add_lower(r, "independence_min_rank", static_cast<double>(independence_check(integrals, samples).min_rank),
              static_cast<double>(sys.n()));

    // Poisson maps.
    double map_res = 0.0;
    double ham_res = 0.0;
    double det_r = 0.0;
    bool hamiltonian = true;
    for (const auto& p : pairs) {
        const auto ts = target_structure(p, sys);
        map_res = std::max(map_res, poisson_map_check(p, sys, ts, 20, config.seed));
        try {
            const auto h = pushforward_hamiltonian_check(sys, p, ts, tol_or(config, kHamiltonianTol));
            ham_res = std::max({ham_res, h.reality_residual, h.symmetry_residual, h.block_residual, h.flow_residual});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NotHamiltonian) throw;
            hamiltonian = false;
        }
        if (ts.kind == TargetCase::Complex) {
            const double want = -0.25 * std::norm(ts.k);
            det_r = std::max(det_r, std::abs(determinant(ts.r) - want) / std::abs(want));
        }
    }
    add_upper(r, config, "poisson_map", map_res, kPoissonMapTol);
    add_upper(r, config, "pushforward_hamiltonian", hamiltonian ? ham_res : INFINITY, kHamiltonianTol);
    add_upper(r, config, "det_r_vs_quarter_k_squared", det_r, kDetRTol);
    std::vector<AdmissiblePair> classes;
    for (const auto& p : pairs) {
        const bool partner_seen = std::any_of(classes.begin(), classes.end(),
                                              [&](const AdmissiblePair& q) { return close(q.lambda, std::conj(p.lambda)); });
        if (!partner_seen) classes.push_back(p);
    }
    if (classes.size() > 1) {
        const auto prod = product_poisson_check(classes, sys);
        add_upper(r, config, "product_cross_brackets", prod.cross_bracket_max, kCrossBracketTol);
        add_upper(r, config, "product_poisson_map", prod.total_residual, kPoissonMapTol);
    }

    // Dynamics on the requested grid.
    const auto times = time_grid(config.t0, config.t1, config.count);
    const auto traj = propagate(sys, samples.front(), times);
    double sympl = 0.0;
    for (double t : times) sympl = std::max(sympl, symplectic_residual(sys, t));
    add_upper(r, config, "symplectic_propagator", sympl, kSymplecticTol);
    const auto drift = conservation_report(integrals, traj);
    add_upper(r, config, "conservation_drift", max_drift_row(drift), kDriftTol);

    json body{{"command", "verify"},
              {"n", sys.n()},
              {"seed", config.seed},
              {"samples", kSamples},
              {"times", {{"t0", config.t0}, {"t1", config.t1}, {"count", config.count}}}};
    json plist = json::array();
    for (const auto& p : pairs) plist.push_back(pair_json(p, sys, l));
    body["pairs"] = plist;
    return finish(Command::Verify, std::move(body), std::move(r));
}

Report cmd_simulate(const RunConfig& config, const std::string& input_text) {
    const Loaded l = load(input_text);
    require_simple(l, config);
    Report r;
    const auto& sys = l.sys;
    std::mt19937_64 rng(config.seed);
    const RealVector x0 = sample_points(sys.dim(), 1, rng).front();
    const auto times = time_grid(config.t0, config.t1, config.count);
    const auto traj = propagate(sys, x0, times);
    const auto integrals = real_integrals(pair_set(l));
    const auto drift = drift_table(integrals, traj);

    double sympl = 0.0;
    for (double t : times) sympl = std::max(sympl, symplectic_residual(sys, t));

    json labels = json::array();
    json max_drift = json::array();
    for (std::size_t k = 0; k < integrals.size(); ++k) {
        labels.push_back(integrals[k].label);
        max_drift.push_back(max_drift_row(drift[k]));
        add_upper(r, config, "drift[" + integrals[k].label + "]", max_drift_row(drift[k]), kDriftTol);
    }
    add_upper(r, config, "symplectic_propagator", sympl, kSymplecticTol);
    add_upper(r, config, "flow_residual", traj.flow_residual, kLaxTol);

    r.table.header.push_back("t");
    for (std::size_t i = 0; i < sys.dim(); ++i) r.table.header.push_back("x" + std::to_string(i + 1));
    for (std::size_t k = 0; k < integrals.size(); ++k) {
        r.table.header.push_back("I" + std::to_string(k + 1));
        r.table.header.push_back("drift" + std::to_string(k + 1));
    }
    json states = json::array();
    for (std::size_t t = 0; t < times.size(); ++t) {
        std::vector<Cell> row{times[t]};
        for (double v : traj.states[t]) row.push_back(v);
        for (std::size_t k = 0; k < integrals.size(); ++k) {
            row.push_back(integrals[k].evaluate(traj.states[t]).real());
            row.push_back(drift[k][t]);
        }
        r.table.rows.push_back(std::move(row));
        states.push_back(to_json(traj.states[t]));
    }

    json body{{"command", "simulate"},
              {"n", sys.n()},
              {"seed", config.seed},
              {"x0", to_json(x0)},
              {"times", to_json(times)},
              {"states", states},
              {"integrals", labels},
              {"max_drift", max_drift},
              {"symplectic_residual", sympl}};
    return finish(Command::Simulate, std::move(body), std::move(r));
}

Report cmd_groebner_check(const RunConfig& config, const std::string& input_text) {
    std::array<Rational, 4> p{Rational(1), Rational(2), Rational(3), Rational(5)};
    if (!input_text.empty()) {
        const json doc = parse_json(input_text);
        if (!doc.is_object() || !doc.contains("p")) throw Error(ErrorKind::ParseError, "input lacks \"p\"");
        const RealMatrix m = real_matrix_of(doc["p"], "p");
        if (m.rows() != 2 || m.cols() != 2) {
            throw Error(ErrorKind::DimensionMismatch, "groebner-check needs a 2x2 p, got " + m.shape());
        }
        p = {exact(m(0, 0)), exact(m(0, 1)), exact(m(1, 0)), exact(m(1, 1))};
    }
    Report r;

    const auto member = basis_element_membership(p);
    add_exact(r, "displayed_element_membership", member.member);

    const auto ids = denominator_identities();
    add_exact(r, "denominator_quadratic_form", ids.quadratic_form);
    add_exact(r, "denominator_cross_form", ids.cross_form);
    add_exact(r, "general_solution_identity", general_solution_identity());

    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 5);
    auto draw = [&] {
        Rational q(num(rng), den(rng));
        q.canonicalize();
        return q;
    };
    int failures = 0;
    int done = 0;
    json draws = json::array();
    while (done < kGroebnerDraws) {
        const Rational p1 = draw(), p2 = draw(), p4 = draw(), b4 = draw();
        const std::array<Rational, 4> y{draw(), draw(), draw(), draw()};
        try {
            const auto rep = verify_general_solution(p1, p2, p4, b4, y);
            if (!rep.ok()) ++failures;
            draws.push_back(json{{"p", {p1.get_str(), p2.get_str(), p4.get_str()}},
                                 {"b4", b4.get_str()},
                                 {"y", {y[0].get_str(), y[1].get_str(), y[2].get_str(), y[3].get_str()}},
                                 {"ok", rep.ok()}});
            ++done;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::DenominatorZero) throw;
        }
    }
    r.checks.push_back({"general_solution_draws", static_cast<double>(failures), 0.0, true, failures == 0});

    const auto deg = degenerate_family_check(Rational(2), Rational(3), Rational(1));
    add_exact(r, "degenerate_l_squared_zero", deg.l_squared_zero);
    add_exact(r, "degenerate_trace_square_zero", deg.trace_square_zero);
    add_exact(r, "degenerate_b_solves", deg.consistent && deg.particular_solves);

    json body{{"command", "groebner-check"},
              {"p", {p[0].get_str(), p[1].get_str(), p[2].get_str(), p[3].get_str()}},
              {"order", "lex b1>b2>b3>b4>a1>a2>a3>a4>y1>y2>y3>y4"},
              {"membership",
               {{"member", member.member},
                {"basis_size", member.basis_size},
                {"pairs_processed", member.pairs_processed},
                {"term_ops", member.term_ops},
                {"element", member.element.to_string()},
                {"remainder", member.remainder.to_string()},
                {"has_y3_y4_element", member.has_y3_y4_element}}},
              {"general_solution_draws", draws},
              {"degenerate_family",
               {{"p", {"2", "3"}},
                {"y2", "1"},
                {"b_basis", deg.b_basis},
                {"particular_b", deg.particular_b}}}};
    return finish(Command::GroebnerCheck, std::move(body), std::move(r));
}

std::string render(const Report& report, Format format) {
    switch (format) {
        case Format::Json: return report.body + "\n";
        case Format::Csv: {
            std::string out;
            for (std::size_t i = 0; i < report.table.header.size(); ++i) {
                out += (i ? "," : "") + csv_escape(report.table.header[i]);
            }
            out += '\n';
            for (const auto& row : report.table.rows) {
                for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
                out += '\n';
            }
            return out;
        }
        case Format::Text: {
            std::ostringstream os;
            json body = json::parse(report.body);
            body.erase("checks");
            body.erase("status");
            for (const auto& [k, v] : body.items()) text_value(os, v, 0, k);
            for (const auto& c : report.checks) {
                os << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value)
                   << (c.upper ? " <= " : " >= ") << "tol=" << format_double(c.tol) << '\n';
            }
            os << "status: " << (report.all_pass() ? "PASS" : "FAIL") << '\n';
            return os.str();
        }
    }
    return {};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lax pair and integrability checks for linear Hamiltonian systems", "laxforge"};
    std::string command;
    std::string input;
    std::string times;
    std::string format = "json";
    RunConfig config;
    double tol = 0.0;
    app.add_option("command", command, "analyze | integrals | verify | simulate | groebner-check")
        ->required()
        ->check(CLI::IsMember({"analyze", "integrals", "verify", "simulate", "groebner-check"}));
    app.add_option("--input", input, "system JSON file");
    app.add_option("--seed", config.seed, "seed for sampled points (default 42)");
    auto* tol_opt = app.add_option("--tol", tol, "override every residual tolerance");
    app.add_option("--times", times, "time grid T0:T1:COUNT (default 0:10:101)");
    app.add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_flag("--force", config.force, "proceed on a repeated spectrum");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    }

    try {
        if (command == "analyze") config.command = Command::Analyze;
        else if (command == "integrals") config.command = Command::Integrals;
        else if (command == "verify") config.command = Command::Verify;
        else if (command == "simulate") config.command = Command::Simulate;
        else config.command = Command::GroebnerCheck;
        config.format = format == "csv" ? Format::Csv : format == "text" ? Format::Text : Format::Json;
        config.input = input;

        if (*tol_opt) {
            if (!(tol > 0.0) || !std::isfinite(tol)) {
                throw Error(ErrorKind::PreconditionViolation, "--tol must be positive");
            }
            config.tol = tol;
        }
        if (!times.empty()) {
            const auto a = times.find(':');
            const auto b = a == std::string::npos ? a : times.find(':', a + 1);
            if (b == std::string::npos) throw Error(ErrorKind::ParseError, "--times must be T0:T1:COUNT");
            try {
                std::size_t used = 0;
                const std::string s0 = times.substr(0, a), s1 = times.substr(a + 1, b - a - 1), s2 = times.substr(b + 1);
                config.t0 = std::stod(s0, &used);
                if (used != s0.size()) throw std::invalid_argument("t0");
                config.t1 = std::stod(s1, &used);
                if (used != s1.size()) throw std::invalid_argument("t1");
                const long long c = std::stoll(s2, &used);
                if (used != s2.size()) throw std::invalid_argument("count");
                if (c < 1) throw Error(ErrorKind::PreconditionViolation, "--times COUNT must be at least 1");
                config.count = static_cast<std::size_t>(c);
            } catch (const std::logic_error&) {
                throw Error(ErrorKind::ParseError, "--times must be T0:T1:COUNT with numeric fields");
            }
            if (config.count > 1 && !(config.t1 > config.t0)) {
                throw Error(ErrorKind::PreconditionViolation, "--times needs T1 > T0");
            }
        }

        std::string text;
        if (!input.empty()) {
            text = read_file(input);
        } else if (config.command != Command::GroebnerCheck) {
            throw Error(ErrorKind::ParseError, "--input is required for " + command);
        }

        Report report;
        switch (config.command) {
            case Command::Analyze: report = cmd_analyze(config, text); break;
            case Command::Integrals: report = cmd_integrals(config, text); break;
            case Command::Verify: report = cmd_verify(config, text); break;
            case Command::Simulate: report = cmd_simulate(config, text); break;
            case Command::GroebnerCheck: report = cmd_groebner_check(config, text); break;
        }
        out << render(report, config.format);
        if (!report.all_pass()) return kExitFail;
        return kExitPass;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFail;
    }
}

}  // namespace laxforge::cli
