#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace sparsid {

enum class SolverKind { lasso_cd, omp, stls };
enum class SolveStatus { converged, iteration_cap, empty_support, cycle };

std::string to_string(SolverKind kind);
std::string to_string(SolveStatus status);
SolverKind solver_kind_from_string(const std::string& s);

/// Sparse linear inverse problem G a = X.
struct RegressionProblem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd target;
    // L1 weight of the objective (1/2M)|G a - X|^2 + lambda |a|_1.
    double lambda = 0.0;
    // Hard threshold applied to |coefficient * report_scale|.
    double threshold = 0.0;
    // Threshold is a fraction of the largest reported |coefficient|.
    bool relative_threshold = false;
    std::optional<Eigen::Index> max_support;
    // Maps solver coefficients to reporting units (e.g. 1/column norm after
    // normalization). Defaults to all ones.
    std::optional<Eigen::VectorXd> report_scale;
    double tol = 1e-8;
    long max_iterations = 100000;

    Eigen::Index rows() const { return matrix.rows(); }
    Eigen::Index cols() const { return matrix.cols(); }
    void validate() const;
};

struct SparseSolution {
    Eigen::VectorXd coefficients;
    std::vector<Eigen::Index> support;
    double residual_norm = 0.0;
    Eigen::Index sparsity = 0;
    SolverKind solver_tag = SolverKind::lasso_cd;
    long iterations = 0;
    bool converged = false;
    SolveStatus status = SolveStatus::converged;
    double lambda = 0.0;
    double threshold = 0.0;
    // OMP only: residual norm after each greedy step.
    std::vector<double> residual_history;
    // STLS only: active set entering each pass.
    std::vector<std::vector<Eigen::Index>> support_history;
};

// Raw cyclic coordinate descent with covariance updates, without the
// threshold/debias step. Starts from zero unless `warm_start` is given.
struct LassoIterate {
    Eigen::VectorXd coefficients;
    long iterations = 0;
    bool converged = false;
};
LassoIterate lasso_coordinate_descent(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& target, double lambda,
                                      double tol = 1e-8, long max_iterations = 100000,
                                      const Eigen::VectorXd* warm_start = nullptr);

// Warm-started descent along a geometric lambda sequence from lambda_max
// down to `lambda`; same minimizer, far fewer sweeps on coherent problems.
LassoIterate lasso_path(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& target, double lambda,
                        double tol = 1e-8, long max_iterations = 100000);

// Smallest lambda for which the zero vector is optimal: max |G^T X| / M.
double lambda_max(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& target);

SparseSolution solve_lasso_cd(const RegressionProblem& problem);
SparseSolution solve_omp(const RegressionProblem& problem);
SparseSolution solve_stls(const RegressionProblem& problem);
SparseSolution solve(const RegressionProblem& problem, SolverKind kind);

// Picks the grid value with the lowest mean held-out squared error over
// contiguous folds (ties go to the smaller lambda). The LASSO path is used
// for every fit.
double cross_validate_lambda(const RegressionProblem& problem, int folds, std::vector<double> grid);

// Minimum-norm least squares through a rank-revealing SVD with relative
// singular-value cutoff `rcond`.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs, double rcond = 1e-12);
Eigen::Index numerical_rank(const Eigen::MatrixXd& matrix, double rcond = 1e-12);

// Largest absolute cosine between distinct non-zero columns.
double mutual_coherence(const Eigen::MatrixXd& matrix);

nlohmann::json to_json(const SparseSolution& s);

/// Solver selection shared by the discovery pipelines.
struct SolverConfig {
    SolverKind kind = SolverKind::lasso_cd;
    // LASSO weight; a fraction of lambda_max when `lambda_relative`.
    double lambda = 1e-7;
    bool lambda_relative = true;
    double threshold = 1e-3;
    bool relative_threshold = true;
    std::optional<Eigen::Index> max_support;
    // Cross-validation over `lambda_grid` when folds >= 2 and the grid is set.
    int folds = 0;
    std::vector<double> lambda_grid;
    double tol = 1e-8;
    long max_iterations = 100000;
};

nlohmann::json to_json(const SolverConfig& c);
SolverConfig solver_config_from_json(const nlohmann::json& j, SolverConfig base = {});

// Builds the problem for column-normalized `matrix` whose original column
// norms are `norms`, solves it, and returns coefficients in original units.
SparseSolution solve_normalized(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& norms,
                                const Eigen::VectorXd& target, const SolverConfig& config);

}  // namespace sparsid
