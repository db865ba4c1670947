// Bounded derivative-free least-squares fitting (multi-start Nelder-Mead) and
// normalized RMSE with domain-violation saturation.
#pragma once

#include <string>
#include <vector>

#include "cardbench/models.hpp"
#include "cardbench/types.hpp"

namespace cardbench {

// Residual-like quantities saturate at this value; domain-invalid predictions
// contribute a squared error of (kSaturation * scale)^2 per point.
inline constexpr double kSaturation = 10.0;

struct FitOptions {
  int n_starts = 16;          // deterministic stratified starts over the bounds box
  int max_evals_per_start = 2000;
  double diameter_tol = 1e-9; // simplex convergence threshold
  double scale = 1.0;         // normalization scale for saturated squared error
};

// A fitted parameter chart for one candidate on one record set.
struct FittedChart {
  std::vector<double> theta;
  double fit_loss = 0.0;  // mean squared error, with saturated invalid points
};

// Mean squared error of the model at theta over the records; domain-invalid
// predictions contribute (kSaturation * scale)^2.
double mean_squared_loss(const ResolvedModel& model, const std::vector<double>& theta,
                         const std::vector<ObservationRecord>& records, double scale);

// Least-squares fit over the model's bound box. Deterministic for fixed
// inputs and options. Zero-parameter models return an empty theta.
FittedChart fit(const ResolvedModel& model, const std::vector<ObservationRecord>& records,
                const FitOptions& options = FitOptions());

// sqrt(mean squared error) / scale, saturated at kSaturation. Domain-invalid
// predictions contribute their saturated squared error per point, so a fully
// invalid prediction vector yields exactly kSaturation.
double nrmse(const ResolvedModel& model, const std::vector<double>& theta,
             const std::vector<ObservationRecord>& records, double scale);

}  // namespace cardbench
