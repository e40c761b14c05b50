#include "parse.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "qsemi/oracles.hpp"

namespace qsemi::scenario::detail {

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

} // namespace

void Field::fail(const std::string& msg) const {
    std::ostringstream os;
    os << (origin ? *origin : std::string("<config>"));
    const YAML::Mark m = node.Mark();
    if (!m.is_null()) {
        os << ":" << m.line + 1 << ":" << m.column + 1;
    }
    os << ": field '" << (path.empty() ? "<root>" : path) << "': " << msg;
    throw ConfigError(os.str());
}

Field root_field(const YAML::Node& root, const std::string& origin) {
    return Field{root, "", &origin};
}

bool Field::has(const std::string& key) const { return node.IsMap() && node[key]; }

Field Field::at(const std::string& key) const {
    if (!node.IsMap()) {
        fail("expected a mapping with key '" + key + "'");
    }
    const YAML::Node child = node[key];
    if (!child) {
        fail("missing required key '" + key + "'");
    }
    return Field{child, join(path, key), origin};
}

Field Field::at(std::size_t i) const {
    if (!node.IsSequence() || i >= node.size()) {
        fail("expected a list with at least " + std::to_string(i + 1) + " entries");
    }
    return Field{node[i], path + "[" + std::to_string(i) + "]", origin};
}

std::size_t Field::size() const {
    if (!node.IsSequence()) {
        fail("expected a list");
    }
    return node.size();
}

void Field::allow_keys(std::initializer_list<const char*> keys) const {
    allow_keys(std::vector<std::string>(keys.begin(), keys.end()));
}

void Field::allow_keys(const std::vector<std::string>& keys) const {
    if (!node.IsMap()) {
        fail("expected a mapping");
    }
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : node) {
        const std::string k = kv.first.as<std::string>();
        if (!ok.count(k)) {
            std::string list;
            for (const std::string& a : keys) {
                list += list.empty() ? a : ", " + a;
            }
            Field{kv.first, join(path, k), origin}.fail("unknown key (allowed: " + list + ")");
        }
    }
}

double Field::real() const {
    if (!node.IsScalar()) {
        fail("expected a number");
    }
    double v = 0.0;
    try {
        v = node.as<double>();
    } catch (const YAML::Exception&) {
        fail("expected a number, got '" + node.Scalar() + "'");
    }
    if (!std::isfinite(v)) {
        fail("number must be finite");
    }
    return v;
}

double Field::real_or(const std::string& key, double fallback) const {
    return has(key) ? at(key).real() : fallback;
}

int Field::integer(int lo, int hi) const {
    if (!node.IsScalar()) {
        fail("expected an integer");
    }
    const std::string& s = node.Scalar();
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        fail("expected an integer, got '" + s + "'");
    }
    if (v < lo || v > hi) {
        fail("value " + s + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(v);
}

int Field::integer_or(const std::string& key, int fallback, int lo, int hi) const {
    return has(key) ? at(key).integer(lo, hi) : fallback;
}

bool Field::boolean() const {
    if (!node.IsScalar()) {
        fail("expected true or false");
    }
    try {
        return node.as<bool>();
    } catch (const YAML::Exception&) {
        fail("expected true or false, got '" + node.Scalar() + "'");
    }
}

bool Field::boolean_or(const std::string& key, bool fallback) const {
    return has(key) ? at(key).boolean() : fallback;
}

std::string Field::text() const {
    if (!node.IsScalar()) {
        fail("expected a string");
    }
    return node.Scalar();
}

std::vector<double> Field::reals() const {
    std::vector<double> out;
    const std::size_t n = size();
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(at(i).real());
    }
    return out;
}

cplx Field::complex() const {
    if (node.IsScalar()) {
        return {real(), 0.0};
    }
    if (size() != 2) {
        fail("expected [re, im]");
    }
    return {at(0).real(), at(1).real()};
}

CMatrix parse_matrix(const Field& f) {
    const std::size_t rows = f.size();
    if (rows == 0) {
        f.fail("matrix must be non-empty");
    }
    const std::size_t cols = f.at(0).size();
    CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const Field row = f.at(i);
        if (row.size() != cols) {
            row.fail("ragged matrix: expected " + std::to_string(cols) + " entries");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.at(j).complex();
        }
    }
    return m;
}

RMatrix parse_real_matrix(const Field& f) {
    const CMatrix c = parse_matrix(f);
    if (c.imag().cwiseAbs().maxCoeff() != 0.0) {
        f.fail("matrix must be real");
    }
    return c.real();
}

namespace {

HermitianOp hermitian_or_fail(const Field& f, const CMatrix& m, int dim) {
    if (m.rows() != dim || m.cols() != dim) {
        f.fail("operator is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
               ", expected " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    try {
        return HermitianOp(m);
    } catch (const Error& e) {
        f.fail(e.what());
    }
}

HermitianOp named_operator(const Field& f, const std::string& name, int dim) {
    const bool qubit = dim == 2;
    if (name == "identity") {
        return HermitianOp::identity(dim);
    }
    if (name == "sx" || name == "sy" || name == "sz") {
        if (!qubit) {
            f.fail("Pauli operator '" + name + "' needs a qubit (dimension 2), got " +
                   std::to_string(dim));
        }
        return name == "sx" ? pauli_x() : (name == "sy" ? pauli_y() : pauli_z());
    }
    if (name == "number") {
        return number_op(dim);
    }
    if (name == "quad_x") {
        return quadrature_x(dim);
    }
    if (name == "quad_p") {
        return quadrature_p(dim);
    }
    if (name == "oscillator") {
        const HermitianOp x = quadrature_x(dim);
        const HermitianOp p = quadrature_p(dim);
        return HermitianOp::hermitize((x.matrix() * x.matrix() + p.matrix() * p.matrix()) / 2.0);
    }
    f.fail("unknown operator '" + name +
           "' (known: identity, sx, sy, sz, number, quad_x, quad_p, oscillator)");
}

} // namespace

HermitianOp parse_operator(const Field& f, int dim, Rng& rng) {
    if (f.is_scalar()) {
        return named_operator(f, f.text(), dim);
    }
    if (!f.is_map()) {
        f.fail("expected an operator name or mapping");
    }
    if (f.has("diag")) {
        f.allow_keys({"diag"});
        const std::vector<double> d = f.at("diag").reals();
        if (static_cast<int>(d.size()) != dim) {
            f.at("diag").fail("expected " + std::to_string(dim) + " entries");
        }
        return HermitianOp::diagonal(d);
    }
    if (f.has("matrix")) {
        f.allow_keys({"matrix"});
        return hermitian_or_fail(f.at("matrix"), parse_matrix(f.at("matrix")), dim);
    }
    if (f.has("terms")) {
        f.allow_keys({"terms"});
        const Field terms = f.at("terms");
        HermitianOp sum = HermitianOp::zero(dim);
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const Field t = terms.at(i);
            t.allow_keys({"coeff", "op"});
            sum = sum + parse_operator(t.at("op"), dim, rng) * t.real_or("coeff", 1.0);
        }
        return sum;
    }
    if (f.has("random")) {
        f.allow_keys({"random"});
        if (!f.at("random").boolean()) {
            f.at("random").fail("set to true or omit");
        }
        return random_hermitian(rng, dim);
    }
    f.fail("operator mapping needs one of: diag, matrix, terms, random");
}

namespace {

DensityMatrix checked_state(const Field& f, const HermitianOp& op) {
    try {
        return DensityMatrix(op);
    } catch (const Error& e) {
        f.fail(e.what());
    }
}

DensityMatrix base_state(const Field& f, Rng& rng) {
    if (f.has("diagonal")) {
        return checked_state(f.at("diagonal"), HermitianOp::diagonal(f.at("diagonal").reals()));
    }
    if (f.has("matrix")) {
        const Field m = f.at("matrix");
        const CMatrix c = parse_matrix(m);
        if (c.rows() != c.cols()) {
            m.fail("state matrix must be square");
        }
        return checked_state(m, hermitian_or_fail(m, c, static_cast<int>(c.rows())));
    }
    if (f.has("random")) {
        const Field r = f.at("random");
        r.allow_keys({"dim"});
        return random_density_matrix(rng, r.at("dim").integer(2, 64));
    }
    if (f.has("fixture")) {
        const Field fx = f.at("fixture");
        const std::string name = fx.text();
        if (name == "maximally-mixed") {
            const int d = f.at("dim").integer(1, 256);
            return DensityMatrix(HermitianOp::identity(d) * (1.0 / d));
        }
        if (name == "bloch") {
            const Field v = f.at("vector");
            const std::vector<double> r = v.reals();
            if (r.size() != 3) {
                v.fail("Bloch vector needs 3 components");
            }
            const HermitianOp op =
                (HermitianOp::identity(2) + pauli_x() * r[0] + pauli_y() * r[1] + pauli_z() * r[2]) *
                0.5;
            return checked_state(v, op);
        }
        if (name == "thermal") {
            const int d = f.at("dim").integer(1, 256);
            const double nbar = f.at("nbar").real();
            if (!(nbar > 0.0)) {
                f.at("nbar").fail("nbar must be positive");
            }
            return thermal_state(d, nbar);
        }
        if (name == "displaced-thermal") {
            const int d = f.at("dim").integer(2, 256);
            const double nbar = f.at("nbar").real();
            if (!(nbar > 0.0)) {
                f.at("nbar").fail("nbar must be positive");
            }
            return phase_scenario(d, f.at("alpha").complex(), nbar).rho0;
        }
        fx.fail("unknown fixture '" + name +
                "' (known: maximally-mixed, bloch, thermal, displaced-thermal)");
    }
    f.fail("state needs one of: diagonal, matrix, random, fixture");
}

} // namespace

DensityMatrix parse_state(const Field& f, Rng& rng) {
    f.allow_keys({"diagonal", "matrix", "random", "fixture", "dim", "vector", "nbar", "alpha", "mix"});
    const DensityMatrix rho = base_state(f, rng);
    if (!f.has("mix")) {
        return rho;
    }
    const double p = f.at("mix").real();
    if (p < 0.0 || p > 1.0) {
        f.at("mix").fail("mix weight must lie in [0, 1]");
    }
    const int d = rho.dim();
    return DensityMatrix(rho.op() * (1.0 - p) + HermitianOp::identity(d) * (p / d));
}

Functional parse_functional(const Field& f, const DensityMatrix& rho, Rng& rng) {
    const int d = rho.dim();
    std::string kind;
    if (f.is_scalar()) {
        kind = f.text();
    } else {
        f.allow_keys({"kind", "observable", "reference", "vector"});
        kind = f.at("kind").text();
    }
    if (kind == "purity") {
        return functionals::Purity{};
    }
    if (kind == "entropy") {
        return functionals::VonNeumannEntropy{};
    }
    if (f.is_scalar()) {
        f.fail("functional '" + kind + "' needs a mapping with its parameters");
    }
    if (kind == "expectation") {
        return functionals::Expectation{parse_operator(f.at("observable"), d, rng)};
    }
    if (kind == "relative-entropy") {
        const Field r = f.at("reference");
        const DensityMatrix sigma = parse_state(r, rng);
        if (sigma.dim() != d) {
            r.fail("reference state has dimension " + std::to_string(sigma.dim()) + ", expected " +
                   std::to_string(d));
        }
        return functionals::RelativeEntropy{sigma};
    }
    if (kind == "fidelity-pure") {
        const Field v = f.at("vector");
        if (static_cast<int>(v.size()) != d) {
            v.fail("expected " + std::to_string(d) + " amplitudes");
        }
        CVector psi(d);
        for (int i = 0; i < d; ++i) {
            psi(i) = v.at(static_cast<std::size_t>(i)).complex();
        }
        return functionals::FidelityPure{psi};
    }
    f.at("kind").fail("unknown functional '" + kind +
                      "' (known: expectation, purity, entropy, relative-entropy, fidelity-pure)");
}

std::vector<Constraint> parse_constraints(const Field& f, const DensityMatrix& rho, Rng& rng) {
    std::vector<Constraint> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const Field c = f.at(i);
        c.allow_keys({"observable", "value"});
        const HermitianOp z = parse_operator(c.at("observable"), rho.dim(), rng);
        const double zeta = c.has("value") ? c.at("value").real()
                                           : (rho.matrix() * z.matrix()).trace().real();
        out.push_back(constraints::LinearMoment{z, zeta});
    }
    return out;
}

Json to_json(const YAML::Node& node) {
    switch (node.Type()) {
    case YAML::NodeType::Map: {
        Json o = Json::object();
        for (const auto& kv : node) {
            o[kv.first.as<std::string>()] = to_json(kv.second);
        }
        return o;
    }
    case YAML::NodeType::Sequence: {
        Json a = Json::array();
        for (const auto& v : node) {
            a.push_back(to_json(v));
        }
        return a;
    }
    case YAML::NodeType::Scalar: {
        const std::string& s = node.Scalar();
        if (node.Tag() == "!") {
            return s;  // quoted
        }
        if (s == "true" || s == "false") {
            return s == "true";
        }
        long long i = 0;
        auto [pi, ei] = std::from_chars(s.data(), s.data() + s.size(), i);
        if (ei == std::errc() && pi == s.data() + s.size()) {
            return i;
        }
        double x = 0.0;
        auto [px, ex] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ex == std::errc() && px == s.data() + s.size()) {
            return x;
        }
        return s;
    }
    default:
        return nullptr;
    }
}

} // namespace qsemi::scenario::detail
