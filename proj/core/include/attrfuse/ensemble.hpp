#ifndef ATTRFUSE_ENSEMBLE_HPP
#define ATTRFUSE_ENSEMBLE_HPP

#include <optional>
#include <string>
#include <vector>

namespace attrfuse {

// Distance-to-ideal confidence of state t under dist: 1 minus the Euclidean
// distance to the one-hot vector at t, clamped at 0 (the raw value reaches
// 1 - sqrt(2) for a one-hot miss).
double confidence(const std::vector<double>& dist, int t);

// Per-state confidence-weighted sum of two distributions over the same
// states, renormalized. Falls back to uniform when every weighted term
// vanishes.
std::vector<double> combine(const std::vector<double>& p,
                            const std::vector<double>& q);

struct PredictionOutcome {
  std::string id;
  std::vector<double> sbm;       // p
  std::vector<double> uts;       // q
  std::vector<double> combined;  // normalized P
  int predicted = -1;            // argmax of combined, ties -> lowest index
  double cop = 0.0;              // confidence of combined at predicted
  bool abstained = false;        // cop <= tau
};

PredictionOutcome make_prediction(const std::vector<double>& p,
                                  const std::vector<double>& q, double tau);

struct GridRow {
  double tau = 0.0;
  double pc_pct = 0.0;   // correct with cop > tau, % of all
  double pi_pct = 0.0;   // incorrect with cop > tau, % of all
  double np_pct = 0.0;   // cop <= tau, % of all
  double objective = 0.0;
};

// Category percentages over the grid {0, step, 2*step, ..., 1} with
// objective J = PC - lambda_pi * PI - lambda_np * NP (percent units).
std::vector<GridRow> sweep_grid(const std::vector<double>& cops,
                                const std::vector<bool>& correct, double step,
                                double lambda_pi, double lambda_np);

struct CalibrationReport {
  std::vector<GridRow> rows;
  double selected_tau = 0.0;
  double lambda_pi = 0.0;
  double lambda_np = 0.0;
  double step = 0.0;
};

// Picks the grid tau maximizing J; ties go to the smallest tau.
CalibrationReport calibrate_tau(const std::vector<double>& cops,
                                const std::vector<bool>& correct,
                                double lambda_pi, double lambda_np,
                                double step);

struct EvalMetrics {
  long long n = 0;
  double pc_pct = 0.0;
  double pi_pct = 0.0;
  double np_pct = 0.0;
  // PC / (PC + PI); absent when everything abstained.
  std::optional<double> accuracy_on_predicted;
  double overall_accuracy = 0.0;  // fraction correct ignoring abstention
};

EvalMetrics evaluate_outcomes(const std::vector<double>& cops,
                              const std::vector<bool>& correct, double tau);

// Convenience adapters over full outcomes and integer truth states.
std::vector<double> outcome_cops(const std::vector<PredictionOutcome>& outcomes);
std::vector<bool> outcome_correct(const std::vector<PredictionOutcome>& outcomes,
                                  const std::vector<int>& truth);

// Report file: columns tau, pc_pct, pi_pct, np_pct, objective. A trailing
// '#' comment records selection metadata when requested.
void write_grid_file(const std::string& path, const std::vector<GridRow>& rows,
                     const CalibrationReport* selection = nullptr);

}  // namespace attrfuse

#endif
