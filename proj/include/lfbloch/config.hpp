#pragma once

// Strict flat-JSON run configuration.  Keys are dotted ("params.nu",
// "integration.dt"); unknown keys and wrong value types are rejected before
// anything is computed.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lfbloch/bloch_models.hpp"
#include "lfbloch/dipole_oracle.hpp"
#include "lfbloch/io.hpp"
#include "lfbloch/quantities.hpp"

namespace lfbloch {

struct IntegrationConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  std::size_t stride = 1;
  SignConvention sign = SignConvention::minus;
};

enum class SweepParameter { rabi, delta, nu };

inline std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::rabi: return "rabi";
    case SweepParameter::delta: return "delta";
    case SweepParameter::nu: return "nu";
  }
  return "?";
}

struct SweepConfig {
  SweepParameter parameter = SweepParameter::rabi;
  double start = 0.0;
  double stop = 1.0;
  std::size_t points = 11;

  std::vector<double> grid() const {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
      g[i] = points == 1 ? start
                         : start + (stop - start) * static_cast<double>(i) /
                                       static_cast<double>(points - 1);
    return g;
  }
};

struct PhysicalConfig {
  PhysicalInputs inputs;
  double reference_rate = 0.0;  // rad/s; the dimensionless time unit
};

enum class OutputFormat { csv, json };

struct OutputConfig {
  std::optional<std::string> path;
  OutputFormat format = OutputFormat::csv;
};

inline OutputFormat parse_output_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw DomainError("unknown output format '" + std::string(s) + "' (expected csv|json)");
}

struct RunConfig {
  ModelKind model = ModelKind::classical_lorentz;
  SystemParams params;
  std::optional<PhysicalConfig> physical;
  BlochState initial;
  IntegrationConfig integration;
  std::optional<SweepConfig> sweep;
  std::optional<double> steady_rabi_max;
  std::size_t steady_scan_points = 2000;
  DipoleLatticeSpec dipole;
  OutputConfig output;

  // Canonical dump of the computational keys (output.* excluded) and its hash.
  std::string canonical;
  std::string hash;

  void validate() const {
    params.validate();
    if (!initial.is_finite() || !initial.is_physical())
      throw DomainError("initial: state must satisfy |w| <= 1, |r21| <= 1/2, w^2 + 4|r21|^2 <= 1");
    if (!(integration.dt > 0.0) || !std::isfinite(integration.dt))
      throw DomainError("integration.dt: must be > 0");
    if (!(integration.t_end >= integration.dt) || !std::isfinite(integration.t_end))
      throw DomainError("integration.t_end: must be >= integration.dt");
    if (integration.stride == 0) throw DomainError("integration.stride: must be >= 1");
    if (sweep) {
      if (!std::isfinite(sweep->start) || !std::isfinite(sweep->stop))
        throw DomainError("sweep.start/sweep.stop: must be finite");
      if (sweep->stop < sweep->start) throw DomainError("sweep.stop: must be >= sweep.start");
      if (sweep->points == 0) throw DomainError("sweep.points: must be >= 1");
    }
    if (steady_rabi_max && !(*steady_rabi_max > 0.0))
      throw DomainError("steady.rabi_max: must be > 0");
    if (steady_scan_points < 2) throw DomainError("steady.scan_points: must be >= 2");
    dipole.validate();
  }
};

namespace detail {

using json = nlohmann::json;

inline double as_real(const json& v, const std::string& key) {
  if (!v.is_number()) throw DomainError(key + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw DomainError(key + ": must be finite");
  return d;
}

inline cplx as_complex(const json& v, const std::string& key) {
  if (v.is_number()) return {as_real(v, key), 0.0};
  if (!v.is_string()) throw DomainError(key + ": expected a number or an \"a+bi\" string");
  try {
    return parse_complex(v.get<std::string>());
  } catch (const DomainError& e) {
    throw DomainError(key + ": " + e.what());
  }
}

inline std::size_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw DomainError(key + ": expected a non-negative integer");
  return v.get<std::size_t>();
}

inline std::string as_text(const json& v, const std::string& key) {
  if (!v.is_string()) throw DomainError(key + ": expected a string");
  return v.get<std::string>();
}

template <class F>
auto rethrow_with_key(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw DomainError(key + ": " + e.what());
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using detail::as_complex;
  using detail::as_count;
  using detail::as_real;
  using detail::as_text;
  if (!j.is_object()) throw DomainError("config: top level must be a JSON object");

  RunConfig c;
  PhysicalConfig phys;
  bool any_physical = false;
  int physical_keys = 0;
  SweepConfig sweep;
  bool any_sweep = false;
  Cylinder cyl;
  double sphere_radius = 40.0;
  std::string geometry = "cylinder";

  using Setter = std::function<void(const nlohmann::json&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"model", [&](auto& v, auto& k) { c.model = detail::rethrow_with_key(k, [&] { return parse_model_kind(as_text(v, k)); }); }},
      {"params.n", [&](auto& v, auto& k) { c.params.n = as_complex(v, k); }},
      {"params.nu", [&](auto& v, auto& k) { c.params.nu = as_real(v, k); }},
      {"params.delta", [&](auto& v, auto& k) { c.params.delta = as_real(v, k); }},
      {"params.rabi", [&](auto& v, auto& k) { c.params.rabi = as_complex(v, k); }},
      {"params.gamma_perp", [&](auto& v, auto& k) { c.params.gamma_perp = as_real(v, k); }},
      {"params.gamma_par", [&](auto& v, auto& k) { c.params.gamma_par = as_real(v, k); }},
      {"params.w_eq", [&](auto& v, auto& k) { c.params.w_eq = as_real(v, k); }},
      {"params.gamma0", [&](auto& v, auto& k) { c.params.gamma0 = as_real(v, k); }},
      {"physical.dipole_moment", [&](auto& v, auto& k) { phys.inputs.dipole_moment = as_real(v, k); ++physical_keys; }},
      {"physical.number_density", [&](auto& v, auto& k) { phys.inputs.number_density = as_real(v, k); ++physical_keys; }},
      {"physical.transition_angular_frequency", [&](auto& v, auto& k) { phys.inputs.transition_angular_frequency = as_real(v, k); ++physical_keys; }},
      {"physical.reference_rate", [&](auto& v, auto& k) { phys.reference_rate = as_real(v, k); ++physical_keys; }},
      {"initial.r21", [&](auto& v, auto& k) { c.initial.r21 = as_complex(v, k); }},
      {"initial.w", [&](auto& v, auto& k) { c.initial.w = as_real(v, k); }},
      {"integration.dt", [&](auto& v, auto& k) { c.integration.dt = as_real(v, k); }},
      {"integration.t_end", [&](auto& v, auto& k) { c.integration.t_end = as_real(v, k); }},
      {"integration.stride", [&](auto& v, auto& k) { c.integration.stride = as_count(v, k); }},
      {"integration.sign_convention", [&](auto& v, auto& k) { c.integration.sign = detail::rethrow_with_key(k, [&] { return parse_sign_convention(as_text(v, k)); }); }},
      {"sweep.parameter", [&](auto& v, auto& k) {
         const auto s = as_text(v, k);
         if (s == "rabi") sweep.parameter = SweepParameter::rabi;
         else if (s == "delta") sweep.parameter = SweepParameter::delta;
         else if (s == "nu") sweep.parameter = SweepParameter::nu;
         else throw DomainError(k + ": expected rabi|delta|nu");
       }},
      {"sweep.start", [&](auto& v, auto& k) { sweep.start = as_real(v, k); }},
      {"sweep.stop", [&](auto& v, auto& k) { sweep.stop = as_real(v, k); }},
      {"sweep.points", [&](auto& v, auto& k) { sweep.points = as_count(v, k); }},
      {"steady.rabi_max", [&](auto& v, auto& k) { c.steady_rabi_max = as_real(v, k); }},
      {"steady.scan_points", [&](auto& v, auto& k) { c.steady_scan_points = as_count(v, k); }},
      {"dipole.geometry", [&](auto& v, auto& k) {
         geometry = as_text(v, k);
         if (geometry != "cylinder" && geometry != "sphere") throw DomainError(k + ": expected cylinder|sphere");
       }},
      {"dipole.thickness", [&](auto& v, auto& k) { cyl.thickness = as_real(v, k); }},
      {"dipole.radius", [&](auto& v, auto& k) { cyl.radius = sphere_radius = as_real(v, k); }},
      {"dipole.lattice_constant", [&](auto& v, auto& k) { c.dipole.lattice_constant = as_real(v, k); }},
      {"dipole.exclusion_radius", [&](auto& v, auto& k) { c.dipole.exclusion_radius = as_real(v, k); }},
      {"dipole.orientation", [&](auto& v, auto& k) { c.dipole.orientation = detail::rethrow_with_key(k, [&] { return parse_orientation(as_text(v, k)); }); }},
      {"dipole.regularization_eta", [&](auto& v, auto& k) { c.dipole.regularization_eta = as_real(v, k); }},
      {"dipole.richardson_levels", [&](auto& v, auto& k) { c.dipole.richardson_levels = static_cast<int>(std::min<std::size_t>(as_count(v, k), 1000)); }},
      {"dipole.quadrature_step", [&](auto& v, auto& k) { c.dipole.quadrature_step = as_real(v, k); }},
      {"dipole.tolerance", [&](auto& v, auto& k) { c.dipole.tolerance = as_real(v, k); }},
      {"output.path", [&](auto& v, auto& k) { c.output.path = as_text(v, k); }},
      {"output.format", [&](auto& v, auto& k) { c.output.format = detail::rethrow_with_key(k, [&] { return parse_output_format(as_text(v, k)); }); }},
  };

  nlohmann::json computational = nlohmann::json::object();
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw DomainError("config: unknown key '" + key + "'");
    it->second(value, key);
    if (key.rfind("physical.", 0) == 0) any_physical = true;
    if (key.rfind("sweep.", 0) == 0) any_sweep = true;
    if (key.rfind("output.", 0) != 0) computational[key] = value;
  }

  if (any_physical) {
    if (physical_keys != 4)
      throw DomainError(
          "physical: dipole_moment, number_density, transition_angular_frequency and "
          "reference_rate are all required");
    if (j.contains("params.nu") || j.contains("params.gamma0"))
      throw DomainError("physical: conflicts with params.nu / params.gamma0");
    c.params = with_physical(c.params, phys.inputs, phys.reference_rate);
    c.physical = phys;
  }
  if (any_sweep) c.sweep = sweep;
  if (geometry == "sphere")
    c.dipole.geometry = Sphere{sphere_radius};
  else
    c.dipole.geometry = cyl;

  c.validate();
  c.canonical = computational.dump();
  c.hash = hex64(fnv1a64(c.canonical));
  return c;
}

inline RunConfig parse_run_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DomainError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

/// Effective parameters as metadata lines.
inline Metadata params_metadata(const SystemParams& p) {
  return {{"params.n", format_complex(p.n)},
          {"params.nu", format_double(p.nu)},
          {"params.delta", format_double(p.delta)},
          {"params.rabi", format_complex(p.rabi)},
          {"params.gamma_perp", format_double(p.gamma_perp)},
          {"params.gamma_par", format_double(p.gamma_par)},
          {"params.w_eq", format_double(p.w_eq)},
          {"params.gamma0", format_double(p.gamma0)}};
}

}  // namespace lfbloch
