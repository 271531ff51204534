#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparsid/solvers.hpp"

namespace sparsid {

/// Scalar field u(x, t) on a uniform 1-D space x time lattice.
struct FieldData {
    Eigen::VectorXd x;
    Eigen::VectorXd t;
    // Row = time index, column = space index.
    Eigen::MatrixXd u;
    double dx = 0.0;
    double dt = 0.0;
    bool periodic = false;

    Eigen::Index space_points() const { return u.cols(); }
    Eigen::Index time_points() const { return u.rows(); }
    void validate() const;
};

/// Box [x0, x0 + nx] x [t0, t0 + nt] in lattice indices (inclusive), with
/// the separable bump weight (1 - xi^2)^px (1 - tau^2)^pt on it.
struct IntegrationDomain {
    Eigen::Index x0 = 0;
    Eigen::Index nx = 16;
    Eigen::Index t0 = 0;
    Eigen::Index nt = 16;
    int px = 6;
    int pt = 3;

    friend bool operator==(const IntegrationDomain&, const IntegrationDomain&) = default;
};

/// Library term d^k/dx^k (u^p). For p >= 2 and k = 1 it is reported in the
/// product form u^(p-1) u_x, i.e. scaled by 1/p.
struct PdeTerm {
    int power = 1;
    int derivative = 0;

    std::string name() const;
    friend bool operator==(const PdeTerm&, const PdeTerm&) = default;
};

// Powers 1..max_power times spatial derivative orders 0..max_derivative.
std::vector<PdeTerm> build_pde_library(int max_power = 3, int max_derivative = 4);

// Integral of w * term over the domain with every spatial derivative moved
// onto the weight; trapezoid quadrature on the lattice.
double weak_integral(const FieldData& data, const IntegrationDomain& domain, const PdeTerm& term);

// Integral of w * u_t, evaluated as -integral of w_t * u.
double weak_time_derivative(const FieldData& data, const IntegrationDomain& domain);

// Bump weight (or one of its derivatives) sampled on the domain lattice:
// entry (j, i) is d^kt/dt^kt d^kx/dx^kx w at (t0 + j, x0 + i).
Eigen::MatrixXd weight_samples(const FieldData& data, const IntegrationDomain& domain, int kx, int kt);

struct DomainSampling {
    int count = 0;
    Eigen::Index min_cells = 16;
    Eigen::Index max_cells = 32;
    int px = 6;
    int pt = 3;
    std::uint64_t seed = 1;
};

// Distinct random boxes strictly inside the lattice.
std::vector<IntegrationDomain> sample_domains(const FieldData& data, const DomainSampling& sampling);

struct PdeLibrary {
    std::vector<PdeTerm> terms;
    std::vector<IntegrationDomain> domains;
    Eigen::VectorXd q0;
    Eigen::MatrixXd Q;
    std::vector<std::string> warnings;
};

PdeLibrary build_weak_system(const FieldData& data, const std::vector<IntegrationDomain>& domains,
                             const std::vector<PdeTerm>& terms);

struct PdeConfig {
    int max_power = 3;
    int max_derivative = 4;
    // Number of domains; 0 means 4 x library size.
    int domains = 0;
    Eigen::Index min_cells = 16;
    Eigen::Index max_cells = 32;
    int pt = 3;
    std::uint64_t seed = 1;
    // Absolute STLS cutoff on the physical coefficients.
    double threshold = 0.1;
};

nlohmann::json to_json(const PdeConfig& c);
PdeConfig pde_config_from_json(const nlohmann::json& j, PdeConfig base = {});

/// Minimal PDE u_t = sum c_i f_i.
struct PdeModel {
    std::vector<PdeTerm> library;
    Eigen::VectorXd coefficients;
    std::vector<Eigen::Index> support;
    double residual_norm = 0.0;
    double relative_residual = 0.0;
    SolveStatus status = SolveStatus::converged;
    // Support after each thresholding pass.
    std::vector<std::vector<Eigen::Index>> drop_history;
    Eigen::Index domains = 0;
    std::vector<std::string> warnings;

    std::string equation(int precision = 6) const;
};

PdeModel identify_pde(const FieldData& data, const PdeConfig& config);

// Threshold-ed least squares on an already assembled system.
PdeModel solve_weak_system(const PdeLibrary& system, double threshold);

nlohmann::json to_json(const PdeModel& model);

}  // namespace sparsid
