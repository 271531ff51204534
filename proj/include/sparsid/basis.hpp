#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparsid/timeseries.hpp"

namespace sparsid {

enum class TermKind { monomial, fourier, time_monomial_product };

std::string to_string(TermKind kind);
TermKind term_kind_from_string(const std::string& s);

/// One candidate function of the state (and possibly time).
///
/// Monomials use `exponents` (x1^l1 ... xm^lm) times t^time_power. Fourier
/// terms use `fourier_index`: +k contributes sin(k*xi), -k contributes
/// cos(k*xi), 0 contributes 1. A Fourier term with all-zero indices is the
/// constant.
struct TermDescriptor {
    TermKind kind = TermKind::monomial;
    std::vector<int> exponents;
    int time_power = 0;
    std::vector<int> fourier_index;

    std::size_t dim() const { return kind == TermKind::fourier ? fourier_index.size() : exponents.size(); }
    bool is_constant() const;
    // Total polynomial degree in the state variables (0 for Fourier terms).
    int degree() const;
    // Linear term x_var, no time factor.
    bool is_linear_in(std::size_t var) const;

    double evaluate(std::span<const double> state, double t = 0.0) const;
    std::string name(const std::vector<std::string>& channels = {}) const;

    friend bool operator==(const TermDescriptor&, const TermDescriptor&) = default;
};

using TermList = std::vector<TermDescriptor>;

struct LibraryOptions {
    // Upper bound on the number of generated terms.
    std::size_t max_terms = 200000;
    // Optional total-degree filter applied to the (1+q)^m tensor grid.
    std::optional<int> max_total_degree;
    // Cross-variable product depth for Fourier libraries.
    int fourier_depth = 1;
};

// Full tensor grid {0..order}^dim in graded order: total degree ascending,
// then number of active variables ascending, then exponent tuple
// lexicographically descending. The constant comes first.
TermList build_polynomial_library(int dim, int order, const LibraryOptions& opts = {});

// Each polynomial term followed by its t^1 .. t^time_order companions.
TermList build_time_augmented_library(int dim, int order, int time_order, const LibraryOptions& opts = {});

// Constant, then sin/cos harmonics 1..max_harmonic per variable, then (for
// depth >= 2) products of harmonics over pairs of distinct variables.
TermList build_fourier_library(int dim, int max_harmonic, const LibraryOptions& opts = {});

// Constant and linear monomials followed by the non-constant Fourier terms.
// Maps such as p' = p + K sin(theta) need both.
TermList build_linear_fourier_library(int dim, int max_harmonic, const LibraryOptions& opts = {});

/// Library matrix G: rows are samples, columns are terms.
struct BasisLibrary {
    TermList descriptors;
    Eigen::MatrixXd matrix;
    // Euclidean norms of the raw columns (all ones when not normalized).
    Eigen::VectorXd column_norms;
    bool normalized = false;
    // Columns that were identically zero; left unscaled under normalization.
    std::vector<Eigen::Index> zero_columns;
};

// Evaluates every descriptor at the given state rows (and times when a term
// carries a time factor).
Eigen::MatrixXd evaluate_terms(const TermList& terms, const Eigen::MatrixXd& states,
                               const Eigen::VectorXd& times);

BasisLibrary evaluate_library(const TermList& terms, const TimeSeries& samples, bool normalize = true);
BasisLibrary evaluate_library(const TermList& terms, const Eigen::MatrixXd& states, const Eigen::VectorXd& times,
                              bool normalize = true);

// Scales columns to unit norm in place; returns the original norms (zero
// columns keep norm 1 and are reported through `zero_columns`).
Eigen::VectorXd normalize_columns(Eigen::MatrixXd& matrix, std::vector<Eigen::Index>* zero_columns = nullptr);

nlohmann::json to_json(const TermDescriptor& term);
TermDescriptor term_from_json(const nlohmann::json& j);
nlohmann::json library_to_json(const TermList& terms);
TermList library_from_json(const nlohmann::json& j);

}  // namespace sparsid
