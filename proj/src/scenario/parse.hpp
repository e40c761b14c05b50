#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "qsemi/influence.hpp"
#include "qsemi/operators.hpp"
#include "qsemi/random.hpp"
#include "qsemi/scenario.hpp"

namespace qsemi::scenario::detail {

/// A config node together with its dotted path, for error messages.
struct Field {
    YAML::Node node;
    std::string path;
    const std::string* origin = nullptr;

    [[noreturn]] void fail(const std::string& msg) const;

    bool has(const std::string& key) const;
    Field at(const std::string& key) const;  ///< required child
    Field at(std::size_t i) const;
    std::size_t size() const;
    bool is_map() const { return node.IsMap(); }
    bool is_seq() const { return node.IsSequence(); }
    bool is_scalar() const { return node.IsScalar(); }

    /// Rejects keys outside the allowed set, so typos do not pass silently.
    void allow_keys(std::initializer_list<const char*> keys) const;
    void allow_keys(const std::vector<std::string>& keys) const;

    double real() const;
    double real_or(const std::string& key, double fallback) const;
    int integer(int lo, int hi) const;
    int integer_or(const std::string& key, int fallback, int lo, int hi) const;
    bool boolean() const;
    bool boolean_or(const std::string& key, bool fallback) const;
    std::string text() const;
    std::vector<double> reals() const;
    cplx complex() const;  ///< [re, im] pair or a real number
};

Field root_field(const YAML::Node& root, const std::string& origin);

/// Row-major rows of [re, im] pairs (plain reals are accepted too).
CMatrix parse_matrix(const Field& f);
RMatrix parse_real_matrix(const Field& f);

/// Operator on a dim-level space: a name (identity, sx, sy, sz, number,
/// quad_x, quad_p, oscillator), {diag: [...]}, {matrix: ...},
/// {terms: [{coeff, op}, ...]} or {random: true}.
HermitianOp parse_operator(const Field& f, int dim, Rng& rng);

/// State: {diagonal}, {matrix}, {fixture: maximally-mixed|bloch|thermal|
/// displaced-thermal, ...} or {random: {dim}}; optional `mix` weight toward
/// the maximally mixed state.
DensityMatrix parse_state(const Field& f, Rng& rng);

/// Functional: a kind name or {kind, observable | reference | vector}.
Functional parse_functional(const Field& f, const DensityMatrix& rho, Rng& rng);

/// Linear moment constraints {observable, value}; value defaults to tr rho Z.
std::vector<Constraint> parse_constraints(const Field& f, const DensityMatrix& rho, Rng& rng);

/// Lossless echo of the config: ints, reals, booleans and strings keep their type.
Json to_json(const YAML::Node& node);

} // namespace qsemi::scenario::detail
