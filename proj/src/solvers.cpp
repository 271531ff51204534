#include "sparsid/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "sparsid/error.hpp"

namespace sparsid {

std::string to_string(SolverKind kind) {
    switch (kind) {
    case SolverKind::lasso_cd: return "lasso_cd";
    case SolverKind::omp: return "omp";
    case SolverKind::stls: return "stls";
    }
    return "lasso_cd";
}

std::string to_string(SolveStatus status) {
    switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_cap: return "iteration_cap";
    case SolveStatus::empty_support: return "empty_support";
    case SolveStatus::cycle: return "cycle";
    }
    return "converged";
}

SolverKind solver_kind_from_string(const std::string& s) {
    if (s == "lasso" || s == "lasso_cd") return SolverKind::lasso_cd;
    if (s == "omp") return SolverKind::omp;
    if (s == "stls") return SolverKind::stls;
    throw InvalidArgument("unknown solver '" + s + "' (expected lasso, omp or stls)");
}

void RegressionProblem::validate() const {
    if (matrix.rows() < 1 || matrix.cols() < 1) throw InvalidArgument("regression: empty matrix");
    if (target.size() != matrix.rows())
        throw InvalidArgument("regression: target length " + std::to_string(target.size()) + " does not match " +
                              std::to_string(matrix.rows()) + " rows");
    if (!(lambda >= 0.0)) throw InvalidArgument("regression: lambda must be non-negative");
    if (!(threshold >= 0.0)) throw InvalidArgument("regression: threshold must be non-negative");
    if (!matrix.allFinite() || !target.allFinite()) throw InvalidArgument("regression: non-finite entries");
    if (report_scale && report_scale->size() != matrix.cols())
        throw InvalidArgument("regression: report scale length does not match column count");
    if (max_support && *max_support < 1) throw InvalidArgument("regression: max_support must be positive");
}

// ---------------------------------------------------------------------------
// Linear algebra helpers
// ---------------------------------------------------------------------------

Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& rhs, double rcond) {
    if (matrix.cols() == 0) return Eigen::VectorXd(0);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rcond);
    return svd.solve(rhs);
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& matrix, double rcond) {
    if (matrix.size() == 0) return 0;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix);
    svd.setThreshold(rcond);
    return svd.rank();
}

double mutual_coherence(const Eigen::MatrixXd& matrix) {
    Eigen::MatrixXd g = matrix;
    std::vector<Eigen::Index> zero;
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        const double n = g.col(j).norm();
        if (n > 0.0) {
            g.col(j) /= n;
        } else {
            zero.push_back(j);
        }
    }
    Eigen::MatrixXd gram = g.transpose() * g;
    double mu = 0.0;
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
        for (Eigen::Index j = i + 1; j < gram.cols(); ++j) mu = std::max(mu, std::abs(gram(i, j)));
    return mu;
}

double lambda_max(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& target) {
    return (matrix.transpose() * target).cwiseAbs().maxCoeff() / static_cast<double>(matrix.rows());
}

namespace {

Eigen::VectorXd scale_of(const RegressionProblem& p) {
    return p.report_scale ? *p.report_scale : Eigen::VectorXd::Ones(p.cols());
}

std::vector<Eigen::Index> thresholded_support(const Eigen::VectorXd& a, const Eigen::VectorXd& scale, double threshold,
                                              bool relative) {
    const Eigen::VectorXd reported = a.cwiseProduct(scale).cwiseAbs();
    const double cut = relative ? threshold * (reported.size() ? reported.maxCoeff() : 0.0) : threshold;
    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        if (a[j] != 0.0 && reported[j] >= cut) support.push_back(j);
    }
    return support;
}

Eigen::VectorXd refit(const Eigen::MatrixXd& g, const Eigen::VectorXd& x, const std::vector<Eigen::Index>& support) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(g.cols());
    if (support.empty()) return a;
    Eigen::MatrixXd sub(g.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = g.col(support[k]);
    const Eigen::VectorXd c = pinv_solve(sub, x);
    for (std::size_t k = 0; k < support.size(); ++k) a[support[k]] = c[static_cast<Eigen::Index>(k)];
    return a;
}

std::vector<Eigen::Index> nonzeros(const Eigen::VectorXd& a) {
    std::vector<Eigen::Index> s;
    for (Eigen::Index j = 0; j < a.size(); ++j)
        if (a[j] != 0.0) s.push_back(j);
    return s;
}

SparseSolution package(const RegressionProblem& p, Eigen::VectorXd a, SolverKind tag, long iterations, bool converged,
                       SolveStatus status) {
    SparseSolution s;
    s.support = nonzeros(a);
    s.sparsity = static_cast<Eigen::Index>(s.support.size());
    s.residual_norm = (p.matrix * a - p.target).norm();
    s.coefficients = std::move(a);
    s.solver_tag = tag;
    s.iterations = iterations;
    s.converged = converged;
    s.status = status;
    s.lambda = p.lambda;
    s.threshold = p.threshold;
    return s;
}

// Hard threshold followed by an unregularized refit on the survivors,
// repeated until the support stops shrinking.
Eigen::VectorXd threshold_and_debias(const RegressionProblem& p, Eigen::VectorXd a) {
    const Eigen::VectorXd scale = scale_of(p);
    auto support = thresholded_support(a, scale, p.threshold, p.relative_threshold);
    for (int round = 0; round < 256; ++round) {
        a = refit(p.matrix, p.target, support);
        auto next = thresholded_support(a, scale, p.threshold, p.relative_threshold);
        if (next == support) break;
        support = std::move(next);
    }
    return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// LASSO by cyclic coordinate descent
// ---------------------------------------------------------------------------

namespace {

constexpr long polish_interval = 50;

// Feature-sign refinement: on the current active set and sign pattern the
// objective is a quadratic; walk towards its minimizer, dropping any
// coordinate that reaches zero on the way. Never increases the objective.
// Returns true when the final point satisfies every optimality condition.
bool polish(const Eigen::MatrixXd& gram, const Eigen::VectorXd& corr, double lambda, double tol, Eigen::VectorXd& a) {
    for (Eigen::Index round = 0; round <= a.size(); ++round) {
        std::vector<Eigen::Index> active;
        for (Eigen::Index j = 0; j < a.size(); ++j)
            if (a[j] != 0.0) active.push_back(j);
        if (active.empty()) return false;
        const auto k = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd g(k, k);
        Eigen::VectorXd rhs(k), cur(k);
        for (Eigen::Index p = 0; p < k; ++p) {
            for (Eigen::Index q = 0; q < k; ++q) g(p, q) = gram(active[p], active[q]);
            cur[p] = a[active[p]];
            rhs[p] = corr[active[p]] - lambda * (cur[p] > 0.0 ? 1.0 : -1.0);
        }
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
        const Eigen::VectorXd z = ldlt.solve(rhs);
        if (!z.allFinite()) return false;
        double step = 1.0;
        Eigen::Index blocking = -1;
        for (Eigen::Index p = 0; p < k; ++p) {
            if (z[p] * cur[p] > 0.0) continue;
            const double t = cur[p] / (cur[p] - z[p]);
            if (t < step) {
                step = t;
                blocking = p;
            }
        }
        const Eigen::VectorXd next = cur + step * (z - cur);
        for (Eigen::Index p = 0; p < k; ++p) a[active[p]] = p == blocking ? 0.0 : next[p];
        if (blocking < 0) break;
    }
    const Eigen::VectorXd grad = corr - gram * a;
    const double slack = tol * std::max(lambda, corr.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double bound = a[j] == 0.0 ? std::abs(grad[j]) - lambda
                                         : std::abs(grad[j] - lambda * (a[j] > 0.0 ? 1.0 : -1.0));
        if (bound > slack) return false;
    }
    return true;
}

}  // namespace

LassoIterate lasso_coordinate_descent(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& target, double lambda,
                                      double tol, long max_iterations, const Eigen::VectorXd* warm_start) {
    const double m = static_cast<double>(matrix.rows());
    const Eigen::Index n = matrix.cols();
    const Eigen::MatrixXd gram = (matrix.transpose() * matrix) / m;
    LassoIterate it;
    it.coefficients = warm_start ? *warm_start : Eigen::VectorXd::Zero(n);
    // grad = G^T (X - G a) / M, kept current through rank-one updates.
    const Eigen::VectorXd corr = (matrix.transpose() * target) / m;
    Eigen::VectorXd grad = corr - gram * it.coefficients;

    auto& a = it.coefficients;
    for (it.iterations = 1; it.iterations <= max_iterations; ++it.iterations) {
        double max_delta = 0.0;
        double max_coef = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = gram(j, j);
            if (d <= 0.0) continue;
            const double rho = grad[j] + d * a[j];
            double next = 0.0;
            if (rho > lambda) {
                next = (rho - lambda) / d;
            } else if (rho < -lambda) {
                next = (rho + lambda) / d;
            }
            const double delta = next - a[j];
            if (delta != 0.0) {
                grad -= gram.col(j) * delta;
                a[j] = next;
            }
            max_delta = std::max(max_delta, std::abs(delta));
            max_coef = std::max(max_coef, std::abs(next));
        }
        if (max_delta <= tol * std::max(max_coef, 1e-300)) {
            it.converged = true;
            break;
        }
        if (it.iterations % polish_interval == 0) {
            const bool optimal = polish(gram, corr, lambda, tol, a);
            grad = corr - gram * a;
            if (optimal) {
                it.converged = true;
                break;
            }
        }
    }
    it.iterations = std::min(it.iterations, max_iterations);
    return it;
}

LassoIterate lasso_path(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& target, double lambda, double tol,
                        long max_iterations) {
    const double lmax = lambda_max(matrix, target);
    if (!(lambda > 0.0) || lambda >= lmax)
        return lasso_coordinate_descent(matrix, target, lambda, tol, max_iterations);
    const int stages = std::clamp(static_cast<int>(std::ceil(5.0 * std::log10(lmax / lambda))), 1, 100);
    LassoIterate it;
    it.coefficients = Eigen::VectorXd::Zero(matrix.cols());
    long used = 0;
    for (int s = 1; s <= stages; ++s) {
        const double lam = s == stages ? lambda : lmax * std::pow(lambda / lmax, static_cast<double>(s) / stages);
        const long budget = std::max<long>(1, max_iterations - used);
        LassoIterate stage = lasso_coordinate_descent(matrix, target, lam, tol, budget, &it.coefficients);
        used += stage.iterations;
        it.coefficients = std::move(stage.coefficients);
        it.converged = stage.converged;
        if (used >= max_iterations && s < stages) {
            stage = lasso_coordinate_descent(matrix, target, lambda, tol, 1, &it.coefficients);
            it.coefficients = std::move(stage.coefficients);
            it.converged = false;
            break;
        }
    }
    it.iterations = std::min(used, max_iterations);
    return it;
}

SparseSolution solve_lasso_cd(const RegressionProblem& problem) {
    problem.validate();
    if (problem.matrix.cwiseAbs().maxCoeff() == 0.0) throw InvalidArgument("lasso: all-zero matrix");
    LassoIterate it = lasso_path(problem.matrix, problem.target, problem.lambda, problem.tol, problem.max_iterations);
    Eigen::VectorXd a = threshold_and_debias(problem, std::move(it.coefficients));
    return package(problem, std::move(a), SolverKind::lasso_cd, it.iterations, it.converged,
                   it.converged ? SolveStatus::converged : SolveStatus::iteration_cap);
}

// ---------------------------------------------------------------------------
// Orthogonal matching pursuit
// ---------------------------------------------------------------------------

SparseSolution solve_omp(const RegressionProblem& problem) {
    problem.validate();
    const Eigen::Index m = problem.rows(), n = problem.cols();
    const Eigen::Index cap = std::min(n, problem.max_support.value_or(std::max<Eigen::Index>(1, m / 2)));

    Eigen::MatrixXd unit = problem.matrix;
    std::vector<bool> usable(static_cast<std::size_t>(n), true);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double c = unit.col(j).norm();
        if (c > 0.0) {
            unit.col(j) /= c;
        } else {
            usable[static_cast<std::size_t>(j)] = false;
        }
    }

    const double target_norm = problem.target.norm();
    const double stop = problem.tol * target_norm;
    std::vector<Eigen::Index> support;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd residual = problem.target;
    std::vector<double> history;
    long steps = 0;
    bool converged = residual.norm() <= stop;

    while (!converged && static_cast<Eigen::Index>(support.size()) < cap) {
        const Eigen::VectorXd corr = unit.transpose() * residual;
        Eigen::Index best = -1;
        double best_val = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!usable[static_cast<std::size_t>(j)]) continue;
            const double v = std::abs(corr[j]);
            if (v > best_val) {
                best_val = v;
                best = j;
            }
        }
        if (best < 0 || best_val <= 1e-14 * std::max(target_norm, 1e-300)) break;
        usable[static_cast<std::size_t>(best)] = false;
        support.push_back(best);
        std::sort(support.begin(), support.end());
        a = refit(problem.matrix, problem.target, support);
        residual = problem.target - problem.matrix * a;
        const double r = residual.norm();
        history.push_back(r);
        ++steps;
        converged = r <= stop;
    }

    a = threshold_and_debias(problem, std::move(a));
    SparseSolution s = package(problem, std::move(a), SolverKind::omp, steps, converged,
                               converged ? SolveStatus::converged : SolveStatus::iteration_cap);
    s.residual_history = std::move(history);
    return s;
}

// ---------------------------------------------------------------------------
// Sequentially thresholded least squares
// ---------------------------------------------------------------------------

SparseSolution solve_stls(const RegressionProblem& problem) {
    problem.validate();
    const Eigen::VectorXd scale = scale_of(problem);
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < problem.cols(); ++j)
        if (problem.matrix.col(j).squaredNorm() > 0.0) active.push_back(j);

    std::set<std::vector<Eigen::Index>> seen{active};
    Eigen::VectorXd a = Eigen::VectorXd::Zero(problem.cols());
    long iterations = 0;
    SolveStatus status = SolveStatus::iteration_cap;
    std::vector<std::vector<Eigen::Index>> history;
    while (iterations < problem.max_iterations) {
        ++iterations;
        history.push_back(active);
        a = refit(problem.matrix, problem.target, active);
        auto next = thresholded_support(a, scale, problem.threshold, problem.relative_threshold);
        if (next.empty()) {
            a.setZero();
            status = SolveStatus::empty_support;
            break;
        }
        if (next == active) {
            status = SolveStatus::converged;
            break;
        }
        if (!seen.insert(next).second) {
            status = SolveStatus::cycle;
            break;
        }
        active = std::move(next);
    }
    SparseSolution s =
        package(problem, std::move(a), SolverKind::stls, iterations, status == SolveStatus::converged, status);
    s.support_history = std::move(history);
    return s;
}

SparseSolution solve(const RegressionProblem& problem, SolverKind kind) {
    switch (kind) {
    case SolverKind::lasso_cd: return solve_lasso_cd(problem);
    case SolverKind::omp: return solve_omp(problem);
    case SolverKind::stls: return solve_stls(problem);
    }
    return solve_lasso_cd(problem);
}

// ---------------------------------------------------------------------------
// Cross-validation
// ---------------------------------------------------------------------------

double cross_validate_lambda(const RegressionProblem& problem, int folds, std::vector<double> grid) {
    problem.validate();
    if (grid.empty()) throw InvalidArgument("cross-validation: empty lambda grid");
    if (grid.size() == 1) return grid.front();
    if (folds < 2 || problem.rows() < folds)
        throw InvalidArgument("cross-validation: need 2 <= folds <= number of rows");
    std::sort(grid.begin(), grid.end());

    const Eigen::Index m = problem.rows();
    std::vector<Eigen::Index> bounds;
    for (int f = 0; f <= folds; ++f) bounds.push_back(m * f / folds);

    double best_lambda = grid.front();
    double best_error = std::numeric_limits<double>::infinity();
    for (double lambda : grid) {
        double total = 0.0;
        for (int f = 0; f < folds; ++f) {
            const Eigen::Index lo = bounds[f], hi = bounds[f + 1];
            const Eigen::Index train_rows = m - (hi - lo);
            RegressionProblem train = problem;
            train.lambda = lambda;
            train.matrix.resize(train_rows, problem.cols());
            train.target.resize(train_rows);
            train.matrix.topRows(lo) = problem.matrix.topRows(lo);
            train.matrix.bottomRows(m - hi) = problem.matrix.bottomRows(m - hi);
            train.target.head(lo) = problem.target.head(lo);
            train.target.tail(m - hi) = problem.target.tail(m - hi);
            if (train.matrix.cwiseAbs().maxCoeff() == 0.0) continue;
            const SparseSolution s = solve_lasso_cd(train);
            const Eigen::VectorXd err =
                problem.matrix.middleRows(lo, hi - lo) * s.coefficients - problem.target.segment(lo, hi - lo);
            total += err.squaredNorm();
        }
        const double mean = total / static_cast<double>(m);
        if (mean < best_error) {
            best_error = mean;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

// ---------------------------------------------------------------------------
// Pipeline entry point
// ---------------------------------------------------------------------------

SparseSolution solve_normalized(const Eigen::MatrixXd& matrix, const Eigen::VectorXd& norms,
                                const Eigen::VectorXd& target, const SolverConfig& config) {
    RegressionProblem p;
    p.matrix = matrix;
    p.target = target;
    p.threshold = config.threshold;
    p.relative_threshold = config.relative_threshold;
    p.max_support = config.max_support;
    p.report_scale = norms.cwiseInverse();
    p.tol = config.tol;
    p.max_iterations = config.max_iterations;

    const double lmax = matrix.size() ? lambda_max(matrix, target) : 0.0;
    const double unit = config.lambda_relative ? lmax : 1.0;
    if (config.kind == SolverKind::lasso_cd && config.folds >= 2 && !config.lambda_grid.empty()) {
        std::vector<double> grid;
        for (double l : config.lambda_grid) grid.push_back(l * unit);
        p.lambda = cross_validate_lambda(p, config.folds, grid);
    } else {
        p.lambda = config.lambda * unit;
    }

    SparseSolution s = solve(p, config.kind);
    s.coefficients = s.coefficients.cwiseQuotient(norms);
    return s;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

nlohmann::json to_json(const SparseSolution& s) {
    std::vector<double> coef(s.coefficients.data(), s.coefficients.data() + s.coefficients.size());
    std::vector<long long> support(s.support.begin(), s.support.end());
    return nlohmann::json{{"solver_tag", to_string(s.solver_tag)},
                          {"lambda", s.lambda},
                          {"threshold", s.threshold},
                          {"support", support},
                          {"coefficients", coef},
                          {"residual_norm", s.residual_norm},
                          {"iterations", s.iterations},
                          {"converged", s.converged}};
}

nlohmann::json to_json(const SolverConfig& c) {
    nlohmann::json j{{"solver", to_string(c.kind)},
                     {"lambda", c.lambda},
                     {"lambda_relative", c.lambda_relative},
                     {"threshold", c.threshold},
                     {"relative_threshold", c.relative_threshold},
                     {"folds", c.folds},
                     {"lambda_grid", c.lambda_grid},
                     {"tol", c.tol},
                     {"max_iterations", c.max_iterations}};
    j["max_support"] = c.max_support ? nlohmann::json(static_cast<long long>(*c.max_support)) : nlohmann::json();
    return j;
}

SolverConfig solver_config_from_json(const nlohmann::json& j, SolverConfig c) {
    try {
        if (j.contains("solver")) c.kind = solver_kind_from_string(j.at("solver").get<std::string>());
        c.lambda = j.value("lambda", c.lambda);
        c.lambda_relative = j.value("lambda_relative", c.lambda_relative);
        c.threshold = j.value("threshold", c.threshold);
        c.relative_threshold = j.value("relative_threshold", c.relative_threshold);
        c.folds = j.value("folds", c.folds);
        c.lambda_grid = j.value("lambda_grid", c.lambda_grid);
        c.tol = j.value("tol", c.tol);
        c.max_iterations = j.value("max_iterations", c.max_iterations);
        if (j.contains("max_support") && !j.at("max_support").is_null())
            c.max_support = j.at("max_support").get<long long>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("solver config: ") + e.what());
    }
    return c;
}

}  // namespace sparsid
