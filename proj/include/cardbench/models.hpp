// Built-in registry of closed-form model specs (candidate laws, distractors,
// and synthetic test models) plus bounded prediction.
#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cardbench/types.hpp"

namespace cardbench {

// A registered closed-form model. The raw predictor returns NaN to signal a
// prediction-domain violation (e.g. a vanishing denominator).
struct ModelSpec {
  std::string family_id;
  std::string spec_id;
  int input_arity = 1;
  int parameter_count = 0;
  std::vector<Interval> bounds;            // one per parameter
  std::map<std::string, double> constants; // fixed named constants
  // raw(theta, constants, x) -> prediction or NaN.
  std::function<double(const double* theta, const std::map<std::string, double>& constants,
                       const double* x)>
      raw;
};

// A ModelRef resolved against the registry, with frozen parameters and
// constant overrides applied.
struct ResolvedModel {
  const ModelSpec* spec = nullptr;
  std::map<std::string, double> constants;
  std::vector<double> frozen_theta;  // empty unless the ref froze parameters
  int free_parameter_count = 0;
  std::vector<Interval> free_bounds;

  // Raw evaluation; NaN signals a domain violation.
  double eval(const double* theta, const double* x) const;
};

// Registry access. Throws ConfigError for unknown (family_id, spec_id).
const std::vector<ModelSpec>& model_registry();
const ModelSpec& find_model_spec(const std::string& family_id, const std::string& spec_id);
bool model_spec_exists(const std::string& family_id, const std::string& spec_id);
ResolvedModel resolve_model(const ModelRef& ref);

// Checked prediction: validates arity/parameter count and throws
// PredictionDomainError when the model is evaluated outside its domain.
double predict(const ResolvedModel& model, const std::vector<double>& theta,
               const std::vector<double>& x);

}  // namespace cardbench
