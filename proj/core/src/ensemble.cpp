#include "attrfuse/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "attrfuse/util.hpp"

namespace attrfuse {

namespace {

void check_distribution(const std::vector<double>& dist) {
  double sum = 0.0;
  for (double v : dist) sum += v;
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("distribution does not sum to 1");
}

}  // namespace

double confidence(const std::vector<double>& dist, int t) {
  if (t < 0 || static_cast<std::size_t>(t) >= dist.size())
    throw std::invalid_argument("confidence state index out of range");
  check_distribution(dist);
  double sq = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double d = dist[i] - (static_cast<int>(i) == t ? 1.0 : 0.0);
    sq += d * d;
  }
  double raw = 1.0 - std::sqrt(sq);
  return raw < 0.0 ? 0.0 : raw;
}

std::vector<double> combine(const std::vector<double>& p,
                            const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("distribution dimension mismatch in combine");
  const std::size_t m = p.size();
  std::vector<double> out(m, 0.0);
  double sum = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    int ti = static_cast<int>(t);
    out[t] = confidence(p, ti) * p[t] + confidence(q, ti) * q[t];
    sum += out[t];
  }
  if (sum <= 0.0) {
    // Both models maximally unconfident everywhere.
    for (double& v : out) v = 1.0 / static_cast<double>(m);
    return out;
  }
  for (double& v : out) v /= sum;
  return out;
}

PredictionOutcome make_prediction(const std::vector<double>& p,
                                  const std::vector<double>& q, double tau) {
  if (tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("tau must lie in [0, 1]");
  PredictionOutcome outcome;
  outcome.sbm = p;
  outcome.uts = q;
  outcome.combined = combine(p, q);
  outcome.predicted = 0;
  for (std::size_t t = 1; t < outcome.combined.size(); ++t)
    if (outcome.combined[t] > outcome.combined[static_cast<std::size_t>(
            outcome.predicted)])
      outcome.predicted = static_cast<int>(t);  // ties keep the lowest index
  outcome.cop = confidence(outcome.combined, outcome.predicted);
  outcome.abstained = outcome.cop <= tau;
  return outcome;
}

namespace {

std::vector<double> tau_grid(double step) {
  if (step <= 0.0 || step > 1.0)
    throw std::invalid_argument("grid step must lie in (0, 1]");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    // Snap away the multiply accumulation error so 17 * 0.05 reads back
    // as 0.85, not 0.8500000000000001.
    double tau = std::nearbyint(static_cast<double>(i) * step * 1e10) / 1e10;
    if (tau >= 1.0 - 1e-12) break;
    grid.push_back(tau);
  }
  grid.push_back(1.0);
  return grid;
}

GridRow grid_row(const std::vector<double>& cops,
                 const std::vector<bool>& correct, double tau,
                 double lambda_pi, double lambda_np) {
  long long pc = 0, pi = 0, np = 0;
  for (std::size_t i = 0; i < cops.size(); ++i) {
    if (cops[i] <= tau)
      ++np;
    else if (correct[i])
      ++pc;
    else
      ++pi;
  }
  const double n = static_cast<double>(cops.size());
  GridRow row;
  row.tau = tau;
  row.pc_pct = 100.0 * static_cast<double>(pc) / n;
  row.pi_pct = 100.0 * static_cast<double>(pi) / n;
  row.np_pct = 100.0 * static_cast<double>(np) / n;
  row.objective = row.pc_pct - lambda_pi * row.pi_pct - lambda_np * row.np_pct;
  return row;
}

}  // namespace

std::vector<GridRow> sweep_grid(const std::vector<double>& cops,
                                const std::vector<bool>& correct, double step,
                                double lambda_pi, double lambda_np) {
  if (cops.empty()) throw std::invalid_argument("no outcomes to sweep");
  if (cops.size() != correct.size())
    throw std::invalid_argument("cop/correct length mismatch");
  std::vector<GridRow> rows;
  for (double tau : tau_grid(step))
    rows.push_back(grid_row(cops, correct, tau, lambda_pi, lambda_np));
  return rows;
}

CalibrationReport calibrate_tau(const std::vector<double>& cops,
                                const std::vector<bool>& correct,
                                double lambda_pi, double lambda_np,
                                double step) {
  CalibrationReport report;
  report.rows = sweep_grid(cops, correct, step, lambda_pi, lambda_np);
  report.lambda_pi = lambda_pi;
  report.lambda_np = lambda_np;
  report.step = step;
  std::size_t best = 0;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].objective > report.rows[best].objective)
      best = i;  // ties keep the smallest tau
  report.selected_tau = report.rows[best].tau;
  return report;
}

EvalMetrics evaluate_outcomes(const std::vector<double>& cops,
                              const std::vector<bool>& correct, double tau) {
  if (cops.empty()) throw std::invalid_argument("no outcomes to evaluate");
  if (cops.size() != correct.size())
    throw std::invalid_argument("cop/correct length mismatch");
  GridRow row = grid_row(cops, correct, tau, 0.0, 0.0);
  EvalMetrics metrics;
  metrics.n = static_cast<long long>(cops.size());
  metrics.pc_pct = row.pc_pct;
  metrics.pi_pct = row.pi_pct;
  metrics.np_pct = row.np_pct;
  double predicted = row.pc_pct + row.pi_pct;
  if (predicted > 0.0)
    metrics.accuracy_on_predicted = row.pc_pct / predicted;
  long long right = 0;
  for (bool c : correct) right += c ? 1 : 0;
  metrics.overall_accuracy =
      static_cast<double>(right) / static_cast<double>(cops.size());
  return metrics;
}

std::vector<double> outcome_cops(const std::vector<PredictionOutcome>& outcomes) {
  std::vector<double> cops;
  cops.reserve(outcomes.size());
  for (const auto& o : outcomes) cops.push_back(o.cop);
  return cops;
}

std::vector<bool> outcome_correct(const std::vector<PredictionOutcome>& outcomes,
                                  const std::vector<int>& truth) {
  if (outcomes.size() != truth.size())
    throw std::invalid_argument("outcome/truth length mismatch");
  std::vector<bool> correct;
  correct.reserve(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    correct.push_back(truth[i] >= 0 && outcomes[i].predicted == truth[i]);
  return correct;
}

void write_grid_file(const std::string& path, const std::vector<GridRow>& rows,
                     const CalibrationReport* selection) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open report file: " + path);
  out << "tau,pc_pct,pi_pct,np_pct,objective\n";
  for (const auto& r : rows) {
    out << format_double(r.tau) << ',' << format_double(r.pc_pct) << ','
        << format_double(r.pi_pct) << ',' << format_double(r.np_pct) << ','
        << format_double(r.objective) << '\n';
  }
  if (selection) {
    out << "# selected_tau=" << format_double(selection->selected_tau)
        << " lambda_pi=" << format_double(selection->lambda_pi)
        << " lambda_np=" << format_double(selection->lambda_np)
        << " step=" << format_double(selection->step) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace attrfuse
