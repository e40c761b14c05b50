#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "parse.hpp"
#include "qsemi/bounds.hpp"
#include "qsemi/holevo.hpp"
#include "qsemi/imaging.hpp"
#include "qsemi/oracles.hpp"
#include "qsemi/scenario.hpp"

namespace qsemi::scenario {

using detail::Field;

ScenarioFailure::ScenarioFailure(Status status, std::string module, const std::string& what)
    : Error(what), status_(status), module_(std::move(module)) {}

namespace {

constexpr double kCrosscheckTol = 1e-6;
constexpr double kDisplacementTol = 1e-5;
constexpr int kOracleMaxDim = 5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Runs f and tags library exceptions with the module that raised them.
template <class F>
auto in_module(const char* module, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const ScenarioFailure&) {
        throw;
    } catch (const Error& e) {
        throw ScenarioFailure(status_for(e), module, e.what());
    }
}

/// Evaluates f(i) for i in [0, n) on up to `threads` workers. Results land in
/// index order; the lowest-index exception is rethrown.
template <class T, class F>
std::vector<T> parallel_map(int n, int threads, F f) {
    std::vector<T> out(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                out[static_cast<std::size_t>(i)] = f(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    const int k = std::max(1, std::min(threads, n));
    if (k == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < k; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

Json diagnostics_json(const Diagnostics& d) {
    Json j;
    j["range_ok"] = d.range_ok;
    j["range_residual"] = d.range_residual;
    j["condition"] = d.condition;
    j["pinv_fallback"] = d.pinv_fallback;
    j["notes"] = d.notes;
    return j;
}

Json sandwich_json(const SandwichReport& s) {
    Json j;
    j["ghb"] = s.ghb;
    j["holevo"] = s.x;
    j["d_invariant"] = s.d;
    j["x_over_ghb"] = s.x_over_ghb;
    j["d_over_ghb"] = s.d_over_ghb;
    j["ok"] = s.ok;
    j["violations"] = s.violations;
    return j;
}

struct Context {
    Field root;
    Command command;
    Kind kind;
    std::uint64_t seed = 0;
    int threads = 1;
    Rng rng;
    Json results = Json::object();
    Json diagnostics = Json::object();
    Table table;
    Status status = Status::Ok;

    void flag(Status s) {
        if (static_cast<int>(s) > static_cast<int>(status)) {
            status = s;
        }
    }
    void add_row(std::vector<std::string> row) { table.rows.push_back(std::move(row)); }
};

int copies(const Field& root) { return root.integer_or("copies", 1, 1, 1000000000); }

/// Quantity/value table for scalar scenarios.
void scalar_table(Context& c) {
    c.table.header = {"quantity", "value"};
    for (const auto& [k, v] : c.results.items()) {
        if (v.is_number_integer()) {
            c.add_row({k, std::to_string(v.get<long long>())});
        } else if (v.is_number()) {
            c.add_row({k, fmt(v.get<double>())});
        }
    }
}

/// Crosscheck record: closed form vs brute force, flagged above tol relative.
Json crosscheck_json(Context& c, double closed, double oracle, double tol = kCrosscheckTol) {
    Json j;
    j["closed_form"] = closed;
    j["oracle"] = oracle;
    j["abs_diff"] = std::abs(closed - oracle);
    j["rel_diff"] = rel_diff(oracle, closed);
    j["tolerance"] = tol;
    j["pass"] = rel_diff(oracle, closed) <= tol;
    if (!j["pass"].get<bool>()) {
        c.flag(Status::DiagnosticFailure);
    }
    return j;
}

void scalar_sandwich(Context& c, double ghb) {
    // q = 1: X = D = GHB exactly
    c.diagnostics["sandwich"] = sandwich_json(sandwich_report(ghb, ghb, ghb));
}

void run_single_functional(Context& c) {
    const Field& r = c.root;
    const int n = copies(r);
    const DensityMatrix rho = detail::parse_state(r.at("state"), c.rng);
    Functional f = functionals::Purity{};
    switch (c.kind) {
    case Kind::Expectation:
        f = functionals::Expectation{detail::parse_operator(r.at("observable"), rho.dim(), c.rng)};
        break;
    case Kind::Entropy:
        f = functionals::VonNeumannEntropy{};
        break;
    case Kind::RelativeEntropy: {
        const Field ref = r.at("reference");
        const DensityMatrix sigma = detail::parse_state(ref, c.rng);
        if (sigma.dim() != rho.dim()) {
            ref.fail("reference dimension " + std::to_string(sigma.dim()) + " differs from state " +
                     std::to_string(rho.dim()));
        }
        f = functionals::RelativeEntropy{sigma};
        break;
    }
    default:
        break;
    }
    const bool cross = r.boolean_or("crosscheck", false);
    const BoundReport rep = in_module("bounds", [&] { return ghb_full_dimensional(rho, f, n); });
    c.results["functional"] = functional_name(f);
    c.results["dim"] = rho.dim();
    c.results["copies"] = n;
    c.results["beta"] = in_module("influence", [&] { return functional_value(rho, f); });
    c.results["ghb"] = rep.ghb;
    c.results["ghb_single_copy"] = rep.ghb * n;
    c.diagnostics["range"] = diagnostics_json(rep.diagnostics);
    scalar_sandwich(c, rep.ghb);
    if (cross) {
        const double o = in_module("oracles", [&] { return f0_oracle(rho, f, n); });
        c.diagnostics["crosscheck"] = crosscheck_json(c, rep.ghb, o);
    }
    scalar_table(c);
}

void run_constrained(Context& c) {
    const Field& r = c.root;
    const int n = copies(r);
    const DensityMatrix rho = detail::parse_state(r.at("state"), c.rng);
    const Functional f = detail::parse_functional(r.at("functional"), rho, c.rng);
    const std::vector<Constraint> cs = detail::parse_constraints(r.at("constraints"), rho, c.rng);
    const BoundReport rep = in_module("bounds", [&] { return ghb_constrained(rho, f, cs, n); });
    const double free = in_module("bounds", [&] { return ghb_full_dimensional(rho, f, n).ghb; });
    c.results["functional"] = functional_name(f);
    c.results["dim"] = rho.dim();
    c.results["copies"] = n;
    c.results["constraints"] = static_cast<int>(cs.size());
    c.results["ghb"] = rep.ghb;
    c.results["ghb_unconstrained"] = free;
    c.results["reduction"] = free - rep.ghb;
    c.diagnostics["range"] = diagnostics_json(rep.diagnostics);
    // constraints shrink the tangent space, so the bound can only drop
    const bool monotone = rep.ghb <= free * (1.0 + 1e-9) + 1e-15;
    c.diagnostics["constrained_le_unconstrained"] = monotone;
    if (!monotone) {
        c.flag(Status::DiagnosticFailure);
    }
    scalar_sandwich(c, rep.ghb);
    if (r.boolean_or("crosscheck", false)) {
        const double o = in_module("oracles", [&] { return constrained_oracle(rho, f, cs, n); });
        c.diagnostics["crosscheck"] = crosscheck_json(c, rep.ghb, o);
    }
    scalar_table(c);
}

void run_displacement(Context& c) {
    const Field& r = c.root;
    const int n = copies(r);
    const DensityMatrix rho0 = detail::parse_state(r.at("state"), c.rng);
    const HermitianOp h = detail::parse_operator(r.at("generator"), rho0.dim(), c.rng);
    const std::vector<Constraint> cs = detail::parse_constraints(r.at("constraints"), rho0, c.rng);
    const BoundReport rep = in_module("bounds", [&] { return ghb_displacement(rho0, h, cs, n); });
    c.results["dim"] = rho0.dim();
    c.results["copies"] = n;
    c.results["constraints"] = static_cast<int>(cs.size());
    c.results["ghb"] = rep.ghb;
    c.results["efficient_information"] = 1.0 / (rep.ghb * n);
    c.diagnostics["range"] = diagnostics_json(rep.diagnostics);
    scalar_sandwich(c, rep.ghb);
    if (r.boolean_or("crosscheck", false)) {
        const double o = in_module("oracles", [&] { return displacement_oracle(rho0, h, cs, n); });
        c.diagnostics["crosscheck"] = crosscheck_json(c, rep.ghb, o, kDisplacementTol);
    }
    scalar_table(c);
}

void run_vector_holevo(Context& c) {
    const Field& r = c.root;
    const int n = copies(r);
    const DensityMatrix rho = detail::parse_state(r.at("state"), c.rng);
    const int d = rho.dim();
    const Field fl = r.at("functionals");
    std::vector<Functional> fs;
    for (std::size_t i = 0; i < fl.size(); ++i) {
        fs.push_back(detail::parse_functional(fl.at(i), rho, c.rng));
    }
    const int q = static_cast<int>(fs.size());
    if (q == 0) {
        fl.fail("need at least one functional");
    }
    RMatrix w = RMatrix::Identity(q, q);
    if (r.has("weight")) {
        w = detail::parse_real_matrix(r.at("weight"));
        if (w.rows() != q || w.cols() != q) {
            r.at("weight").fail("weight must be " + std::to_string(q) + "x" + std::to_string(q));
        }
    }

    std::string family = "full";
    std::vector<HermitianOp> scores;
    if (r.has("model")) {
        const Field m = r.at("model");
        m.allow_keys({"family", "directions", "submodel"});
        family = m.at("family").text();
        if (family == "submodel") {
            const int k = m.at("directions").integer(1, d * d - 1);
            const std::string sk = m.has("submodel") ? m.at("submodel").text() : "exponential";
            if (sk != "exponential" && sk != "tanh") {
                m.at("submodel").fail("expected exponential or tanh");
            }
            std::vector<HermitianOp> dirs;
            for (int j = 0; j < k; ++j) {
                dirs.push_back(random_zero_mean(c.rng, rho));
            }
            scores = in_module("models", [&] {
                return model_scores(smooth_family(
                    rho, dirs, sk == "tanh" ? SubmodelKind::Tanh : SubmodelKind::Exponential));
            });
        } else if (family != "full") {
            m.at("family").fail("expected full or submodel");
        }
    }
    if (family == "full") {
        scores = in_module("models", [&] { return model_scores(f0_family(d, rho)); });
    }

    // dbeta_jk = <S_j, Delta_k>: exact for any regular model through rho
    std::vector<HermitianOp> infl;
    for (const auto& f : fs) {
        infl.push_back(in_module("influence", [&] { return influence_operator(rho, f); }));
    }
    RMatrix dbeta(static_cast<Eigen::Index>(scores.size()), q);
    for (std::size_t j = 0; j < scores.size(); ++j) {
        for (int k = 0; k < q; ++k) {
            dbeta(static_cast<Eigen::Index>(j), k) =
                weighted_inner(rho, scores[j], infl[static_cast<std::size_t>(k)]);
        }
    }

    HolevoSolveOptions opts;
    if (r.has("solver")) {
        const Field s = r.at("solver");
        s.allow_keys({"max_iters", "tol", "mu_initial", "mu_final", "mu_factor", "stall_window"});
        opts.max_iters = s.integer_or("max_iters", opts.max_iters, 0, 100000000);
        opts.tol = s.real_or("tol", opts.tol);
        opts.mu_initial = s.real_or("mu_initial", opts.mu_initial);
        opts.mu_final = s.real_or("mu_final", opts.mu_final);
        opts.mu_factor = s.real_or("mu_factor", opts.mu_factor);
        opts.stall_window = s.integer_or("stall_window", opts.stall_window, 1, 100000000);
    }
    const HolevoResult h =
        in_module("holevo", [&] { return holevo_bound(rho, scores, dbeta, w, opts); });
    const double ghb = h.ghb / n;
    const double x = h.value / n;
    const double dd = h.d_invariant / n;
    c.results["dim"] = d;
    c.results["q"] = q;
    c.results["family"] = family;
    c.results["parameters"] = static_cast<int>(scores.size());
    c.results["copies"] = n;
    c.results["ghb"] = ghb;
    c.results["holevo"] = x;
    c.results["d_invariant"] = dd;
    c.results["free_dim"] = h.free_dim;
    c.results["iterations"] = h.iterations;
    c.results["converged"] = h.converged;
    if (family == "full") {
        const double closed = in_module("bounds", [&] { return ghb_vector(rho, fs, w, {}, n).ghb; });
        c.results["ghb_closed_form"] = closed;
        c.diagnostics["crosscheck"] = crosscheck_json(c, closed, ghb);
    }
    const SandwichReport s = sandwich_report(ghb, x, dd);
    c.diagnostics["sandwich"] = sandwich_json(s);
    c.diagnostics["range"] = Json{{"range_ok", true}};
    if (!h.converged) {
        c.diagnostics["notes"] = Json::array({"solver stopped before its final tolerance; value is "
                                              "the best feasible objective found"});
    }
    if (!s.ok) {
        c.flag(Status::DiagnosticFailure);
    }
    scalar_table(c);
}

SourceDistribution parse_source(const Field& f) {
    f.allow_keys({"type", "positions", "weights", "grid", "density"});
    const std::string type = f.at("type").text();
    try {
        if (type == "two-point") {
            return SourceDistribution::two_point(1.0);
        }
        if (type == "point") {
            return SourceDistribution::point(1.0);
        }
        if (type == "discrete") {
            return SourceDistribution::discrete(f.at("positions").reals(), f.at("weights").reals());
        }
        if (type == "gridded") {
            return SourceDistribution::gridded(f.at("grid").reals(), f.at("density").reals());
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        f.fail(e.what());
    }
    f.at("type").fail("unknown source type '" + type + "' (known: two-point, point, discrete, gridded)");
}

struct ImagingRow {
    double delta = 0.0;
    double direct = 0.0;
    double spade = std::nan("");
    double ec = 0.0;
};

void run_imaging(Context& c) {
    const Field& r = c.root;
    const int n = copies(r);
    const SourceDistribution base = parse_source(r.at("source"));
    const int mu = r.integer_or("mu", 2, 1, kMaxImagingOrder);
    const std::vector<double> deltas = r.at("deltas").reals();
    if (deltas.empty()) {
        r.at("deltas").fail("need at least one value");
    }
    for (double v : deltas) {
        if (!(v > 0.0)) {
            r.at("deltas").fail("values must be positive");
        }
    }
    const bool even = mu % 2 == 0;
    const std::vector<ImagingRow> rows =
        parallel_map<ImagingRow>(static_cast<int>(deltas.size()), c.threads, [&](int i) {
            const double delta = deltas[static_cast<std::size_t>(i)];
            const SourceDistribution f = base.dilated(delta);
            ImagingRow row;
            row.delta = delta;
            in_module("imaging", [&] {
                row.direct = direct_imaging_error(f, mu, n);
                row.ec = ec_lower_bound(f, mu, n);
                if (even) {
                    row.spade = spade_error_even(f, mu / 2, n);
                }
                return 0;
            });
            return row;
        });

    c.results["source"] = r.at("source").at("type").text();
    c.results["mu"] = mu;
    c.results["copies"] = n;
    Json table = Json::array();
    bool ec_below_direct = true;
    bool ec_below_spade = true;
    bool ec_equals_spade = true;
    for (const ImagingRow& row : rows) {
        Json j;
        j["delta"] = row.delta;
        j["direct"] = row.direct;
        j["spade"] = even ? Json(row.spade) : Json(nullptr);
        j["ec_bound"] = row.ec;
        table.push_back(j);
        ec_below_direct = ec_below_direct && row.ec <= row.direct + 1e-9;
        if (even) {
            ec_below_spade = ec_below_spade && row.ec <= row.spade + 1e-9;
            ec_equals_spade = ec_equals_spade && std::abs(row.ec - row.spade) <= 1e-9;
        }
    }
    c.results["sweep"] = table;
    c.diagnostics["ec_le_direct"] = ec_below_direct;
    if (!ec_below_direct) {
        c.flag(Status::DiagnosticFailure);
    }
    if (even) {
        c.diagnostics["ec_le_spade"] = ec_below_spade;
        if (!ec_below_spade) {
            c.flag(Status::DiagnosticFailure);
        }
        if (mu == 2 && base.is_discrete()) {
            // SPADE attains the bound exactly for the second moment
            c.diagnostics["spade_attains_ec"] = ec_equals_spade;
            if (!ec_equals_spade) {
                c.flag(Status::DiagnosticFailure);
            }
        }
        if (rows.size() >= 2 && rows.front().spade > 0.0 && rows.back().spade > 0.0) {
            // least-squares slope of log spade against log delta
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            int k = 0;
            for (const ImagingRow& row : rows) {
                if (row.spade > 0.0) {
                    const double lx = std::log(row.delta);
                    const double ly = std::log(row.spade);
                    sx += lx;
                    sy += ly;
                    sxx += lx * lx;
                    sxy += lx * ly;
                    ++k;
                }
            }
            const double den = k * sxx - sx * sx;
            if (k >= 2 && den > 0.0) {
                c.results["spade_loglog_slope"] = (k * sxy - sx * sy) / den;
            }
        }
    }
    c.diagnostics["sandwich"] = nullptr;
    c.table.header = {"delta", "direct", "spade", "ec_bound"};
    for (const ImagingRow& row : rows) {
        c.add_row({fmt(row.delta), fmt(row.direct), even ? fmt(row.spade) : "", fmt(row.ec)});
    }
}

struct CrossItem {
    std::string functional;
    int dim = 0;
    double closed = 0.0;
    double oracle = 0.0;
};

CrossItem crosscheck_one(const DensityMatrix& rho, const Functional& f,
                         const std::vector<Constraint>& cs, int n) {
    CrossItem it;
    it.functional = functional_name(f);
    it.dim = rho.dim();
    if (cs.empty()) {
        it.closed = in_module("bounds", [&] { return ghb_full_dimensional(rho, f, n).ghb; });
        it.oracle = in_module("oracles", [&] { return f0_oracle(rho, f, n); });
    } else {
        it.closed = in_module("bounds", [&] { return ghb_constrained(rho, f, cs, n).ghb; });
        it.oracle = in_module("oracles", [&] { return constrained_oracle(rho, f, cs, n); });
    }
    return it;
}

void run_oracle(Context& c) {
    const Field& r = c.root;
    const int n = copies(r);
    const double tol = r.real_or("tolerance", kCrosscheckTol);
    if (!(tol > 0.0)) {
        r.at("tolerance").fail("tolerance must be positive");
    }
    std::vector<CrossItem> items;
    if (r.has("batch")) {
        const Field b = r.at("batch");
        b.allow_keys({"count", "dim", "functionals", "mix"});
        const int count = b.at("count").integer(1, 100000);
        const int d = b.at("dim").integer(2, kOracleMaxDim);
        const double mix = b.real_or("mix", 0.0);
        if (mix < 0.0 || mix > 1.0) {
            b.at("mix").fail("mix weight must lie in [0, 1]");
        }
        const Field names = b.at("functionals");
        std::vector<std::string> kinds;
        for (std::size_t i = 0; i < names.size(); ++i) {
            const std::string k = names.at(i).text();
            if (k != "expectation" && k != "purity" && k != "entropy" && k != "relative-entropy") {
                names.at(i).fail("batch functionals: expectation, purity, entropy, relative-entropy");
            }
            kinds.push_back(k);
        }
        const int per = static_cast<int>(kinds.size());
        // item i uses its own stream, so results do not depend on thread count
        items = parallel_map<CrossItem>(count * per, c.threads, [&](int idx) {
            Rng rng = stream_rng(c.seed, static_cast<std::uint64_t>(idx / per));
            DensityMatrix rho = random_density_matrix(rng, d);
            if (mix > 0.0) {
                rho = DensityMatrix(rho.op() * (1.0 - mix) + HermitianOp::identity(d) * (mix / d));
            }
            const std::string& k = kinds[static_cast<std::size_t>(idx % per)];
            Functional f = functionals::Purity{};
            if (k == "expectation") {
                f = functionals::Expectation{random_hermitian(rng, d)};
            } else if (k == "entropy") {
                f = functionals::VonNeumannEntropy{};
            } else if (k == "relative-entropy") {
                f = functionals::RelativeEntropy{random_density_matrix(rng, d)};
            }
            return crosscheck_one(rho, f, {}, n);
        });
    } else {
        const DensityMatrix rho = detail::parse_state(r.at("state"), c.rng);
        if (rho.dim() > kOracleMaxDim) {
            r.at("state").fail("oracle cross-check supports d <= " + std::to_string(kOracleMaxDim) +
                               " (the full family has d^2 - 1 parameters)");
        }
        const Functional f = detail::parse_functional(r.at("functional"), rho, c.rng);
        std::vector<Constraint> cs;
        if (r.has("constraints")) {
            cs = detail::parse_constraints(r.at("constraints"), rho, c.rng);
        }
        items.push_back(crosscheck_one(rho, f, cs, n));
    }

    Json list = Json::array();
    double worst = 0.0;
    int failures = 0;
    c.table.header = {"index", "functional", "dim", "closed_form", "oracle", "abs_diff", "rel_diff",
                      "pass"};
    for (std::size_t i = 0; i < items.size(); ++i) {
        const CrossItem& it = items[i];
        const double rd = rel_diff(it.oracle, it.closed);
        const bool pass = rd <= tol;
        worst = std::max(worst, rd);
        failures += pass ? 0 : 1;
        Json j;
        j["functional"] = it.functional;
        j["dim"] = it.dim;
        j["closed_form"] = it.closed;
        j["oracle"] = it.oracle;
        j["abs_diff"] = std::abs(it.closed - it.oracle);
        j["rel_diff"] = rd;
        j["pass"] = pass;
        list.push_back(j);
        c.add_row({std::to_string(i), it.functional, std::to_string(it.dim), fmt(it.closed),
                   fmt(it.oracle), fmt(std::abs(it.closed - it.oracle)), fmt(rd),
                   pass ? "true" : "false"});
    }
    c.results["copies"] = n;
    c.results["checks"] = list;
    c.diagnostics["tolerance"] = tol;
    c.diagnostics["max_rel_diff"] = worst;
    c.diagnostics["failures"] = failures;
    c.diagnostics["range"] = Json{{"range_ok", true}};
    c.diagnostics["sandwich"] = nullptr;
    if (failures > 0) {
        c.flag(Status::DiagnosticFailure);
    }
}

std::string status_name(Status s) {
    switch (s) {
    case Status::Ok:
        return "ok";
    case Status::DiagnosticFailure:
        return "diagnostic-failure";
    case Status::Infeasible:
        return "infeasible";
    case Status::InputError:
        return "input-error";
    }
    return "unknown";
}

std::uint64_t parse_seed(const Field& root) {
    if (!root.has("seed")) {
        return 0;
    }
    const Field s = root.at("seed");
    const std::string& t = s.text();
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) {
        s.fail("seed must be an unsigned 64-bit integer");
    }
    return v;
}

std::vector<std::string> root_keys(Kind kind) {
    std::vector<std::string> keys{"kind", "seed", "copies"};
    auto add = [&](std::initializer_list<const char*> more) {
        keys.insert(keys.end(), more.begin(), more.end());
    };
    switch (kind) {
    case Kind::Expectation:
        add({"state", "observable", "crosscheck"});
        break;
    case Kind::Purity:
    case Kind::Entropy:
        add({"state", "crosscheck"});
        break;
    case Kind::RelativeEntropy:
        add({"state", "reference", "crosscheck"});
        break;
    case Kind::Constrained:
        add({"state", "functional", "constraints", "crosscheck"});
        break;
    case Kind::Displacement:
        add({"state", "generator", "constraints", "crosscheck"});
        break;
    case Kind::VectorHolevo:
        add({"state", "functionals", "weight", "model", "solver"});
        break;
    case Kind::ImagingSweep:
        add({"source", "mu", "deltas"});
        break;
    case Kind::OracleCrosscheck:
        add({"batch", "state", "functional", "constraints", "tolerance"});
        break;
    }
    return keys;
}

} // namespace

Report run_text(const std::string& yaml, Command command, const RunOptions& opts,
                const std::string& origin) {
    const auto t0 = Clock::now();
    YAML::Node doc;
    try {
        doc = YAML::Load(yaml);
    } catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << origin << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
        throw ConfigError(os.str());
    }
    const Field root = detail::root_field(doc, origin);
    if (!doc.IsMap()) {
        root.fail("config must be a mapping");
    }
    const Field kf = root.at("kind");
    Kind kind{};
    try {
        kind = parse_kind(kf.text());
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        kf.fail(e.what());
    }
    if (!accepts(command, kind)) {
        kf.fail("scenario kind '" + kind_name(kind) + "' cannot run under '" +
                command_name(command) + "'");
    }
    root.allow_keys(root_keys(kind));
    if (opts.threads < 1) {
        throw ConfigError("threads must be at least 1");
    }

    Context c{root, command, kind, 0, 1, Rng{}, Json::object(), Json::object(), Table{}, Status::Ok};
    c.seed = opts.seed ? *opts.seed : parse_seed(root);
    c.threads = opts.threads;
    c.rng = stream_rng(c.seed, 0);
    const double parse_s = seconds_since(t0);

    const auto t1 = Clock::now();
    switch (kind) {
    case Kind::Expectation:
    case Kind::Purity:
    case Kind::Entropy:
    case Kind::RelativeEntropy:
        run_single_functional(c);
        break;
    case Kind::Constrained:
        run_constrained(c);
        break;
    case Kind::Displacement:
        run_displacement(c);
        break;
    case Kind::VectorHolevo:
        run_vector_holevo(c);
        break;
    case Kind::ImagingSweep:
        run_imaging(c);
        break;
    case Kind::OracleCrosscheck:
        run_oracle(c);
        break;
    }

    Report rep;
    rep.payload["tool"] = "qsemi";
    rep.payload["version"] = kToolVersion;
    rep.payload["command"] = command_name(command);
    rep.payload["kind"] = kind_name(kind);
    rep.payload["seed"] = c.seed;
    rep.payload["inputs"] = detail::to_json(doc);
    rep.payload["results"] = std::move(c.results);
    rep.payload["diagnostics"] = std::move(c.diagnostics);
    rep.payload["status"] = status_name(c.status);
    rep.timings["parse_s"] = parse_s;
    rep.timings["compute_s"] = seconds_since(t1);
    rep.timings["threads"] = c.threads;
    rep.table = std::move(c.table);
    rep.status = c.status;
    return rep;
}

Report run_file(const std::string& path, Command command, const RunOptions& opts) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open config file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return run_text(ss.str(), command, opts, path);
}

} // namespace qsemi::scenario
