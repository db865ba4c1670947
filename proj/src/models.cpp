#include "cardbench/models.hpp"

#include <cmath>
#include <limits>

namespace cardbench {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDenomFloor = 1e-9;

double cget(const std::map<std::string, double>& c, const char* key) { return c.at(key); }

std::vector<ModelSpec> build_registry() {
  std::vector<ModelSpec> reg;
  auto add = [&reg](ModelSpec spec) { reg.push_back(std::move(spec)); };

  // ---- Velocity composition (inputs u, v in units of c). -------------------
  add({"galilean_lorentz", "additive", 2, 0, {}, {},
       [](const double* /*t*/, const auto&, const double* x) { return x[0] + x[1]; }});
  add({"galilean_lorentz", "scaled_additive", 2, 1, {{0.2, 2.0}}, {},
       [](const double* t, const auto&, const double* x) { return t[0] * (x[0] + x[1]); }});
  add({"galilean_lorentz", "poly_composition", 2, 2, {{-2.0, 2.0}, {-2.0, 2.0}}, {},
       [](const double* t, const auto&, const double* x) {
         const double s = x[0] + x[1];
         return s + t[0] * s * s + t[1] * s * s * s;
       }});
  add({"galilean_lorentz", "damped_additive", 2, 1, {{-1.0, 3.0}}, {},
       [](const double* t, const auto&, const double* x) {
         return (x[0] + x[1]) * (1.0 - t[0] * x[0] * x[1]);
       }});
  add({"galilean_lorentz", "lorentz", 2, 0, {}, {{"c", 1.0}},
       [](const double* /*t*/, const auto& c, const double* x) {
         const double c2 = cget(c, "c") * cget(c, "c");
         const double denom = 1.0 + x[0] * x[1] / c2;
         if (std::fabs(denom) < kDenomFloor) return kNaN;
         return (x[0] + x[1]) / denom;
       }});
  add({"galilean_lorentz", "cubic_composition", 2, 1, {{0.1, 3.0}}, {},
       [](const double* t, const auto&, const double* x) {
         const double s = x[0] + x[1];
         return t[0] * s * s * s;
       }});

  // ---- Kinetic energy (input v in units of c; m = 1, c = 1). ---------------
  add({"newton_relativistic", "newtonian", 1, 0, {}, {{"m", 1.0}},
       [](const double* /*t*/, const auto& c, const double* x) {
         return 0.5 * cget(c, "m") * x[0] * x[0];
       }});
  add({"newton_relativistic", "scaled_newtonian", 1, 1, {{0.2, 3.0}}, {{"m", 1.0}},
       [](const double* t, const auto& c, const double* x) {
         return 0.5 * t[0] * cget(c, "m") * x[0] * x[0];
       }});
  add({"newton_relativistic", "rational_energy", 1, 1, {{-0.5, 1.0}}, {{"m", 1.0}},
       [](const double* t, const auto& c, const double* x) {
         const double denom = 1.0 - t[0] * x[0];
         if (denom < kDenomFloor) return kNaN;
         return 0.5 * cget(c, "m") * x[0] * x[0] / denom;
       }});
  add({"newton_relativistic", "relativistic", 1, 0, {}, {{"m", 1.0}, {"c", 1.0}},
       [](const double* /*t*/, const auto& c, const double* x) {
         const double cc = cget(c, "c");
         const double beta2 = (x[0] * x[0]) / (cc * cc);
         if (beta2 >= 1.0) return kNaN;
         return (1.0 / std::sqrt(1.0 - beta2) - 1.0) * cget(c, "m") * cc * cc;
       }});
  add({"newton_relativistic", "cubic_energy", 1, 1, {{0.1, 5.0}}, {},
       [](const double* t, const auto&, const double* x) {
         return t[0] * std::fabs(x[0]) * x[0] * x[0];
       }});

  // ---- Spectral radiance (inputs lambda, T in reduced units; a0 = 1). ------
  add({"rj_planck", "rayleigh_jeans", 2, 0, {}, {{"a0", 1.0}},
       [](const double* /*t*/, const auto& c, const double* x) {
         const double l = x[0];
         if (l < kDenomFloor) return kNaN;
         return cget(c, "a0") * x[1] / (l * l * l * l);
       }});
  add({"rj_planck", "rj_linear_repair", 2, 1, {{-2.0, 2.0}}, {{"a0", 1.0}},
       [](const double* t, const auto& c, const double* x) {
         const double l = x[0];
         if (l < kDenomFloor) return kNaN;
         const double factor = 1.0 + t[0] / l;
         return cget(c, "a0") * x[1] / (l * l * l * l) * std::max(0.0, factor);
       }});
  add({"rj_planck", "rj_quadratic_repair", 2, 2, {{-2.0, 2.0}, {-2.0, 2.0}}, {{"a0", 1.0}},
       [](const double* t, const auto& c, const double* x) {
         const double l = x[0];
         if (l < kDenomFloor) return kNaN;
         const double factor = 1.0 + t[0] / l + t[1] / (l * l);
         return cget(c, "a0") * x[1] / (l * l * l * l) * std::max(0.0, factor);
       }});
  add({"rj_planck", "planck", 2, 2, {{0.05, 20.0}, {0.2, 5.0}}, {},
       [](const double* t, const auto&, const double* x) {
         const double l = x[0], T = x[1];
         if (l < kDenomFloor || T < kDenomFloor) return kNaN;
         const double arg = t[1] / (l * T);
         if (arg > 700.0) return 0.0;  // spectral tail underflows to zero
         const double denom = std::expm1(arg);
         if (denom < kDenomFloor) return kNaN;
         return t[0] / (l * l * l * l * l) / denom;
       }});
  add({"rj_planck", "powerlaw_radiation", 2, 1, {{0.01, 10.0}}, {},
       [](const double* t, const auto&, const double* x) {
         const double l = x[0];
         if (l < kDenomFloor) return kNaN;
         return t[0] * x[1] / (l * l * l);
       }});

  // ---- Pendulum period (input theta0 in radians; T0 = 2*pi). ---------------
  const double kT0 = 2.0 * std::acos(-1.0);
  add({"pendulum_finite", "small_angle", 1, 0, {}, {{"T0", kT0}},
       [](const double* /*t*/, const auto& c, const double* /*x*/) { return cget(c, "T0"); }});
  add({"pendulum_finite", "finite_angle", 1, 1, {{0.0, 0.15}}, {{"T0", kT0}},
       [](const double* t, const auto& c, const double* x) {
         return cget(c, "T0") * (1.0 + t[0] * x[0] * x[0]);
       }});
  add({"pendulum_finite", "rational_period", 1, 1, {{-0.3, 0.6}}, {{"T0", kT0}},
       [](const double* t, const auto& c, const double* x) {
         const double denom = 1.0 - t[0] * x[0];
         if (denom < kDenomFloor) return kNaN;
         return cget(c, "T0") / denom;
       }});
  add({"pendulum_finite", "linear_period", 1, 1, {{-0.3, 0.5}}, {{"T0", kT0}},
       [](const double* t, const auto& c, const double* x) {
         return cget(c, "T0") * (1.0 + t[0] * x[0]);
       }});

  // ---- Compressibility factor (input rho, reduced density). ----------------
  add({"ideal_virial", "ideal", 1, 0, {}, {},
       [](const double* /*t*/, const auto&, const double* /*x*/) { return 1.0; }});
  add({"ideal_virial", "linear_virial", 1, 1, {{-1.0, 2.0}}, {},
       [](const double* t, const auto&, const double* x) { return 1.0 + t[0] * x[0]; }});
  add({"ideal_virial", "quadratic_virial", 1, 2, {{-1.0, 2.0}, {-2.0, 2.0}}, {},
       [](const double* t, const auto&, const double* x) {
         return 1.0 + t[0] * x[0] + t[1] * x[0] * x[0];
       }});
  add({"ideal_virial", "hard_sphere", 1, 1, {{-0.5, 1.0}}, {},
       [](const double* t, const auto&, const double* x) {
         const double denom = 1.0 - t[0] * x[0];
         if (denom < kDenomFloor) return kNaN;
         return 1.0 / denom;
       }});
  add({"ideal_virial", "exp_virial", 1, 1, {{-1.0, 1.0}}, {},
       [](const double* t, const auto&, const double* x) { return std::exp(t[0] * x[0]); }});

  // ---- Ohmic response (inputs I, T; R0 = 100, T0 = 300). -------------------
  add({"ohm_temperature", "ohmic", 2, 0, {}, {{"R0", 100.0}, {"T0", 300.0}},
       [](const double* /*t*/, const auto& c, const double* x) {
         return x[0] * cget(c, "R0");
       }});
  add({"ohm_temperature", "linear_temp", 2, 1, {{0.0, 0.02}}, {{"R0", 100.0}, {"T0", 300.0}},
       [](const double* t, const auto& c, const double* x) {
         return x[0] * cget(c, "R0") * (1.0 + t[0] * (x[1] - cget(c, "T0")));
       }});
  add({"ohm_temperature", "quadratic_temp", 2, 2, {{0.0, 0.02}, {-2e-5, 2e-5}},
       {{"R0", 100.0}, {"T0", 300.0}},
       [](const double* t, const auto& c, const double* x) {
         const double dT = x[1] - cget(c, "T0");
         return x[0] * cget(c, "R0") * (1.0 + t[0] * dT + t[1] * dT * dT);
       }});
  add({"ohm_temperature", "power_temp", 2, 1, {{-2.0, 5.0}}, {{"R0", 100.0}, {"T0", 300.0}},
       [](const double* t, const auto& c, const double* x) {
         if (x[1] < kDenomFloor) return kNaN;
         return x[0] * cget(c, "R0") * std::pow(x[1] / cget(c, "T0"), t[0]);
       }});

  // ---- Synthetic specs used by tests and examples. -------------------------
  add({"synthetic", "zero", 1, 0, {}, {},
       [](const double* /*t*/, const auto&, const double* /*x*/) { return 0.0; }});
  add({"synthetic", "constant", 1, 1, {{-10.0, 10.0}}, {},
       [](const double* t, const auto&, const double* /*x*/) { return t[0]; }});
  add({"synthetic", "linear", 1, 1, {{-5.0, 5.0}}, {},
       [](const double* t, const auto&, const double* x) { return t[0] * x[0]; }});
  add({"synthetic", "affine", 1, 2, {{-10.0, 10.0}, {-5.0, 5.0}}, {},
       [](const double* t, const auto&, const double* x) { return t[0] + t[1] * x[0]; }});
  add({"synthetic", "ohmic_rt", 1, 2, {{50.0, 200.0}, {0.0, 0.01}}, {{"T0", 300.0}},
       [](const double* t, const auto& c, const double* x) {
         return t[0] * (1.0 + t[1] * (x[0] - cget(c, "T0")));
       }});

  return reg;
}

}  // namespace

const std::vector<ModelSpec>& model_registry() {
  static const std::vector<ModelSpec> kRegistry = build_registry();
  return kRegistry;
}

bool model_spec_exists(const std::string& family_id, const std::string& spec_id) {
  for (const auto& s : model_registry()) {
    if (s.family_id == family_id && s.spec_id == spec_id) return true;
  }
  return false;
}

const ModelSpec& find_model_spec(const std::string& family_id, const std::string& spec_id) {
  for (const auto& s : model_registry()) {
    if (s.family_id == family_id && s.spec_id == spec_id) return s;
  }
  throw ConfigError("unknown model spec '" + family_id + "/" + spec_id + "'");
}

ResolvedModel resolve_model(const ModelRef& ref) {
  ResolvedModel m;
  m.spec = &find_model_spec(ref.family_id, ref.spec_id);
  m.constants = m.spec->constants;
  for (const auto& [key, value] : ref.constant_overrides) {
    if (!m.constants.count(key)) {
      throw ConfigError("unknown constant override '" + key + "' for spec '" + ref.spec_id + "'");
    }
    m.constants[key] = value;
  }
  if (ref.frozen_theta) {
    if (static_cast<int>(ref.frozen_theta->size()) != m.spec->parameter_count) {
      throw ConfigError("frozen theta size mismatch for spec '" + ref.spec_id + "'");
    }
    m.frozen_theta = *ref.frozen_theta;
    m.free_parameter_count = 0;
  } else {
    m.free_parameter_count = m.spec->parameter_count;
    m.free_bounds = m.spec->bounds;
  }
  return m;
}

double ResolvedModel::eval(const double* theta, const double* x) const {
  const double* full_theta = frozen_theta.empty() ? theta : frozen_theta.data();
  return spec->raw(full_theta, constants, x);
}

double predict(const ResolvedModel& model, const std::vector<double>& theta,
               const std::vector<double>& x) {
  if (static_cast<int>(theta.size()) != model.free_parameter_count) {
    throw ConfigError("predict: expected " + std::to_string(model.free_parameter_count) +
                      " free parameters, got " + std::to_string(theta.size()));
  }
  if (static_cast<int>(x.size()) != model.spec->input_arity) {
    throw ConfigError("predict: expected " + std::to_string(model.spec->input_arity) +
                      " inputs, got " + std::to_string(x.size()));
  }
  const double value = model.eval(theta.data(), x.data());
  if (std::isnan(value)) {
    throw PredictionDomainError("prediction-domain violation in spec '" + model.spec->spec_id +
                                "'");
  }
  return value;
}

}  // namespace cardbench
