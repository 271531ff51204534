#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "sparsid/basis.hpp"
#include "sparsid/solvers.hpp"
#include "sparsid/timeseries.hpp"

namespace sparsid {

enum class ModelKind { ode, map, time_varying_ode };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct RowDiagnostics {
    double residual_norm = 0.0;
    Eigen::Index sparsity = 0;
    SolveStatus status = SolveStatus::converged;
    long iterations = 0;
    double lambda = 0.0;
};

struct ModelDiagnostics {
    std::vector<RowDiagnostics> rows;
    // Mutual coherence of the library matrix.
    double coherence = 0.0;
    // Regression rows used for every fit.
    Eigen::Index samples = 0;
    // Some row kept more than samples/2 terms: the expansion is not sparse.
    bool not_sparse = false;
    std::vector<std::string> warnings;
};

struct FitWindow {
    double start = 0.0;
    double end = 0.0;
    double length() const { return end - start; }
};

/// Sparse symbolic model x' = C g(x[, t]) (flows) or x_{i+1} = C g(x_i) (maps).
struct RecoveredModel {
    ModelKind kind = ModelKind::ode;
    int dim = 0;
    TermList library;
    // dim x N, de-normalized.
    Eigen::MatrixXd coefficients;
    std::vector<std::string> channel_names;
    ModelDiagnostics diagnostics;
    std::optional<FitWindow> window;
    // A handful of states drawn from the fit data, used to seed simulations.
    Eigen::MatrixXd anchor_states;
    // Largest state norm seen in the fit data.
    double data_scale = 0.0;
    // Sampling step of the fit data (0 for maps).
    double step = 0.0;

    std::vector<Eigen::Index> support(int row) const;
    // Vector field (or map image) at `state`.
    Eigen::VectorXd evaluate(const Eigen::VectorXd& state, double t = 0.0) const;
    // Human-readable equations, one per row.
    std::vector<std::string> equations(int precision = 6) const;
};

struct SimulateOptions {
    double t0 = 0.0;
    // Time-varying models refuse to run past one fit-window length beyond
    // the window end unless this is cleared.
    bool cap_extrapolation = true;
};

// Fixed-step RK4 for flows, plain iteration for maps; `steps` steps produce
// steps + 1 rows. Throws DivergenceError on a non-finite state.
TimeSeries simulate_model(const RecoveredModel& model, const Eigen::VectorXd& initial, long steps, double step,
                          const SimulateOptions& opts = {});

// One RK4 step (flows) or one iteration (maps).
Eigen::VectorXd advance(const RecoveredModel& model, const Eigen::VectorXd& state, double t, double step);

nlohmann::json to_json(const RecoveredModel& model);
RecoveredModel model_from_json(const nlohmann::json& j);

}  // namespace sparsid
