// lfbloch: command-line front end for the local-field Bloch library.
//
// Exit codes: 0 success, 1 predicted agreement pattern violated (compare),
// 2 usage or configuration error, 3 numerical failure.

#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lfbloch/config.hpp"
#include "lfbloch/dipole_oracle.hpp"
#include "lfbloch/dynamics.hpp"
#include "lfbloch/report.hpp"
#include "lfbloch/steady.hpp"

using namespace lfbloch;

namespace {

struct OutputOptions {
  std::string path;
  std::string format;
  unsigned jobs = 1;
};

bool is_number_cell(const std::string& s, double& v) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(v);
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json out;
  out["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) out["metadata"][k] = v;
  out["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    auto row = nlohmann::ordered_json::array();
    for (const auto& cell : r) {
      double v = 0.0;
      if (is_number_cell(cell, v))
        row.push_back(v);
      else
        row.push_back(cell);
    }
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  return out.dump(2) + "\n";
}

void emit(const Table& t, const OutputOptions& o, const OutputConfig& from_config = {}) {
  OutputFormat fmt = from_config.format;
  if (!o.format.empty()) fmt = parse_output_format(o.format);
  const std::string text = fmt == OutputFormat::json ? to_json(t) : to_csv(t);
  std::string path = o.path;
  if (path.empty() && from_config.path) path = *from_config.path;
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("output: cannot open '" + path + "'");
  f << text;
  if (!f) throw DomainError("output: write to '" + path + "' failed");
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("config: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_run_config_text(text);
}

Metadata base_meta(const std::string& command, const std::string& hash) {
  return {{"tool", "lfbloch"}, {"command", command}, {"config_hash", hash}};
}

void append(Metadata& m, const Metadata& more) { m.insert(m.end(), more.begin(), more.end()); }

std::string options_hash(const nlohmann::json& j) { return hex64(fnv1a64(j.dump())); }

// ---------------------------------------------------------------------------

int run_factors(const std::string& n_text, const std::string& sign_text, const OutputOptions& o) {
  const cplx n = parse_complex(n_text);
  const SignConvention sign = parse_sign_convention(sign_text);
  SystemParams p;
  p.n = n;
  p.validate();

  Metadata meta = base_meta("factors", options_hash({{"n", format_complex(n)}, {"sign", sign_text}}));
  meta.push_back({"n", format_complex(n)});
  meta.push_back({"sign_convention", std::string(to_string(sign))});

  Table t{{}, {"quantity", "model", "value"}, {}};
  const auto f = enhancement_factors(n);
  t.rows.push_back({"lorentz", "", format_complex(f.lorentz)});
  t.rows.push_back({"onsager", "", format_complex(f.onsager)});
  if (n.imag() == 0.0 && n.real() >= 1.0) {
    t.rows.push_back({"decay_virtual_cavity", "", format_double(decay_virtual_cavity(n.real()))});
    t.rows.push_back({"decay_real_cavity", "", format_double(decay_real_cavity(n.real()))});
  } else {
    const std::string why = "decay ratios need a real index n >= 1";
    meta.push_back({"note", why});
    std::cerr << "lfbloch: " << why << "; omitted for n = " << format_complex(n) << "\n";
  }
  for (const auto& row : factor_table(p, sign)) {
    const std::string model(to_string(row.kind));
    t.rows.push_back({"shift", model, format_complex(row.shift)});
    t.rows.push_back({"field", model, format_complex(row.field)});
    t.rows.push_back({"decay_scaling", model,
                      row.decay_scaling ? format_double(*row.decay_scaling) : "phenomenological"});
  }
  t.meta = std::move(meta);
  emit(t, o);
  return 0;
}

int run_simulate(const std::string& config_path, const OutputOptions& o) {
  const RunConfig c = load_config(config_path);
  IntegrationOptions opts;
  opts.stride = c.integration.stride;
  const Trajectory tr = integrate(c.model, c.params, c.initial, c.integration.t_end,
                                  c.integration.dt, opts, c.integration.sign);

  Metadata meta = base_meta("simulate", c.hash);
  meta.push_back({"model", std::string(to_string(c.model))});
  meta.push_back({"sign_convention", std::string(to_string(c.integration.sign))});
  append(meta, params_metadata(c.params));
  meta.push_back({"integration.dt", format_double(c.integration.dt)});
  meta.push_back({"integration.t_end", format_double(c.integration.t_end)});
  meta.push_back({"integration.stride", std::to_string(c.integration.stride)});
  meta.push_back({"initial.r21", format_complex(c.initial.r21)});
  meta.push_back({"initial.w", format_double(c.initial.w)});
  meta.push_back({"conservation_expected", tr.conservation_expected ? "true" : "false"});
  meta.push_back({"max_residual", format_double(tr.max_residual())});
  emit(trajectory_table(tr, std::move(meta)), o, c.output);
  return 0;
}

int run_steady(const std::string& config_path, const OutputOptions& o) {
  const RunConfig c = load_config(config_path);
  std::vector<SteadyBranch> branches;
  if (c.sweep) {
    if (c.sweep->parameter != SweepParameter::rabi)
      throw DomainError("steady: sweep.parameter must be rabi");
    branches = hysteresis_sweep(c.params, c.sweep->grid(), o.jobs);
  } else {
    branches.push_back(steady_states(c.params));
  }

  Metadata meta = base_meta("steady", c.hash);
  append(meta, params_metadata(c.params));
  std::size_t discarded = 0;
  for (const auto& b : branches) discarded += b.discarded.size();
  meta.push_back({"discarded_roots", std::to_string(discarded)});
  if (c.steady_rabi_max) {
    const auto win = bistability_region(c.params, *c.steady_rabi_max, c.steady_scan_points);
    meta.push_back({"bistable_rabi_low", win ? format_double(win->rabi_low) : "none"});
    meta.push_back({"bistable_rabi_high", win ? format_double(win->rabi_high) : "none"});
  }
  emit(steady_table(branches, std::move(meta)), o, c.output);
  return 0;
}

int run_sweep(const std::string& config_path, const OutputOptions& o) {
  const RunConfig c = load_config(config_path);
  if (!c.sweep) throw DomainError("sweep: config needs sweep.start / sweep.stop / sweep.points");
  const SweepConfig sw = *c.sweep;
  IntegrationOptions opts;
  opts.stride = c.integration.stride;
  const auto runs = parallel_map(
      sw.grid(),
      [&](double value) {
        SystemParams p = c.params;
        switch (sw.parameter) {
          case SweepParameter::rabi: p.rabi = value; break;
          case SweepParameter::delta: p.delta = value; break;
          case SweepParameter::nu: p.nu = value; break;
        }
        const auto tr = integrate(c.model, p, c.initial, c.integration.t_end, c.integration.dt,
                                  opts, c.integration.sign);
        const auto& last = tr.states.back();
        return std::vector<std::string>{format_double(value), format_double(last.w),
                                        format_double(last.r21.real()),
                                        format_double(last.r21.imag()),
                                        format_double(tr.max_residual())};
      },
      o.jobs);

  Metadata meta = base_meta("sweep", c.hash);
  meta.push_back({"model", std::string(to_string(c.model))});
  meta.push_back({"sweep.parameter", std::string(to_string(sw.parameter))});
  append(meta, params_metadata(c.params));
  Table t{std::move(meta),
          {std::string(to_string(sw.parameter)), "final_w", "final_re_r21", "final_im_r21",
           "max_residual"},
          runs};
  emit(t, o, c.output);
  return 0;
}

struct DipoleOverrides {
  double lattice_constant = 0.0;
  double thickness = 0.0;
  double radius = 0.0;
  double exclusion_radius = -1.0;
};

int run_dipole_sum(const std::string& config_path, const DipoleOverrides& ov,
                   const OutputOptions& o) {
  RunConfig c = config_path.empty() ? parse_run_config(nlohmann::json::object())
                                    : load_config(config_path);
  DipoleLatticeSpec spec = c.dipole;
  if (ov.lattice_constant > 0.0) spec.lattice_constant = ov.lattice_constant;
  if (auto* cyl = std::get_if<Cylinder>(&spec.geometry)) {
    if (ov.thickness > 0.0) cyl->thickness = ov.thickness;
    if (ov.radius > 0.0) cyl->radius = ov.radius;
  } else if (ov.radius > 0.0) {
    std::get<Sphere>(spec.geometry).radius = ov.radius;
  }
  if (ov.exclusion_radius >= 0.0) spec.exclusion_radius = ov.exclusion_radius;
  spec.validate();

  const cplx target = lorentz_sum_target();
  auto row = [&](const std::string& kind, double resolution, double eta, cplx v) {
    return std::vector<std::string>{kind, format_double(resolution), format_double(eta),
                                    format_double(v.real()), format_double(v.imag()),
                                    format_double(std::abs(v - target) / std::abs(target))};
  };

  Table t{{}, {"kind", "resolution", "eta", "re", "im", "normalized_error"}, {}};
  const auto cont = continuum_cylinder_integral(spec, o.jobs);
  for (const auto& e : cont.ladder) t.rows.push_back(row("continuum", spec.quadrature_step, e.eta, e.value));
  t.rows.push_back(row("continuum", spec.quadrature_step, 0.0, cont.value));

  DipoleLatticeSpec fine = spec;
  fine.quadrature_step = spec.quadrature_step / 2.0;
  const auto cont_fine = continuum_cylinder_integral(fine, o.jobs);
  t.rows.push_back(row("continuum", fine.quadrature_step, 0.0, cont_fine.value));

  DipoleLatticeSpec point = spec;
  point.exclusion_radius = 0.0;
  const auto cont_point = continuum_cylinder_integral(point, o.jobs);
  t.rows.push_back(row("continuum_no_exclusion", spec.quadrature_step, 0.0, cont_point.value));

  for (double scale : {4.0, 2.0, 1.0}) {
    DipoleLatticeSpec lat = spec;
    lat.lattice_constant = spec.lattice_constant * scale;
    const auto near = near_zone_discrete_sum(lat);
    t.rows.push_back(row("discrete", lat.lattice_constant, 0.0, near.total() + cont.value));
  }

  Metadata meta = base_meta("dipole-sum", c.hash);
  if (const auto* cyl = std::get_if<Cylinder>(&spec.geometry)) {
    meta.push_back({"geometry", "cylinder"});
    meta.push_back({"thickness", format_double(cyl->thickness)});
    meta.push_back({"radius", format_double(cyl->radius)});
  } else {
    meta.push_back({"geometry", "sphere"});
    meta.push_back({"radius", format_double(std::get<Sphere>(spec.geometry).radius)});
  }
  meta.push_back({"lattice_constant", format_double(spec.lattice_constant)});
  meta.push_back({"exclusion_radius", format_double(spec.exclusion_radius)});
  meta.push_back({"orientation", std::string(to_string(spec.orientation))});
  meta.push_back({"target", format_complex(target)});
  t.meta = std::move(meta);
  emit(t, o, c.output);
  return 0;
}

std::vector<cplx> parse_grid(const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  if (out.empty()) throw DomainError("--n-grid: empty");
  return out;
}

int run_compare(const std::string& grid_text, double tolerance, const std::string& sign_text,
                bool simulate, double nu, const OutputOptions& o) {
  const auto grid = parse_grid(grid_text);
  const SignConvention sign = parse_sign_convention(sign_text);
  nlohmann::json opts{{"n_grid", grid_text}, {"tolerance", tolerance}, {"sign", sign_text}};
  std::vector<ComparisonVerdict> verdicts;
  if (simulate) {
    opts["simulate"] = true;
    opts["nu"] = nu;
    SimulationSettings s;
    s.sign = sign;
    verdicts = parallel_map(
        grid,
        [&](cplx n) {
          SystemParams p;
          p.n = n;
          p.nu = nu;
          return run_simulated_comparison(p, tolerance, s);
        },
        o.jobs);
  } else {
    verdicts = compare_models(grid, tolerance, sign, o.jobs);
  }
  bool holds = true;
  for (const auto& v : verdicts) holds = holds && expected_pattern_holds(v, tolerance);

  Metadata meta = base_meta("compare", options_hash(opts));
  meta.push_back({"tolerance", format_double(tolerance)});
  meta.push_back({"sign_convention", std::string(to_string(sign))});
  meta.push_back({"source", simulate ? "trajectories" : "coefficients"});
  meta.push_back({"pattern", holds ? "holds" : "violated"});
  emit(comparison_table(verdicts, tolerance, std::move(meta)), o);
  return holds ? 0 : 1;
}

void add_output_options(CLI::App* cmd, OutputOptions& o, bool with_jobs) {
  cmd->add_option("-o,--output", o.path, "Output file (default stdout)");
  cmd->add_option("--format", o.format, "csv or json (default from config, else csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  if (with_jobs)
    cmd->add_option("--jobs", o.jobs, "Worker threads (output does not depend on it)")
        ->check(CLI::Range(1u, 1024u));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-field Bloch model simulator and dipole-sum oracle"};
  app.require_subcommand(1);

  OutputOptions out;

  std::string n_text;
  std::string sign_text = "minus";
  auto* factors = app.add_subcommand("factors", "Local-field factors and the four-model table");
  factors->add_option("--n", n_text, "Refractive index, e.g. 1.5 or 1.5+0.1i")->required();
  factors->add_option("--sign", sign_text, "minus or plus");
  add_output_options(factors, out, false);

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Integrate one model and emit the trajectory");
  simulate->add_option("--config", config_path, "Flat JSON run configuration")->required();
  add_output_options(simulate, out, false);

  auto* steady = app.add_subcommand("steady", "Steady states of the classical model");
  steady->add_option("--config", config_path, "Flat JSON run configuration")->required();
  add_output_options(steady, out, true);

  auto* sweep = app.add_subcommand("sweep", "Final states over a parameter grid");
  sweep->add_option("--config", config_path, "Flat JSON run configuration")->required();
  add_output_options(sweep, out, true);

  DipoleOverrides ov;
  auto* dipole = app.add_subcommand("dipole-sum", "Dipole lattice-sum convergence table");
  dipole->add_option("--config", config_path, "Flat JSON run configuration (dipole.* keys)");
  dipole->add_option("--lattice-constant", ov.lattice_constant, "Lattice constant in 1/k");
  dipole->add_option("--thickness", ov.thickness, "Cylinder thickness in 1/k");
  dipole->add_option("--radius", ov.radius, "Cylinder or sphere radius in 1/k");
  dipole->add_option("--exclusion-radius", ov.exclusion_radius, "Exclusion radius in 1/k");
  add_output_options(dipole, out, true);

  std::string grid_text = "1,1.5,2,3";
  double tolerance = 1e-9;
  bool sim = false;
  double nu = 3.0;
  auto* compare = app.add_subcommand("compare", "Check the models against the cascade oracle");
  compare->add_option("--n-grid", grid_text, "Comma-separated refractive indices");
  compare->add_option("--tolerance", tolerance, "Relative agreement tolerance");
  compare->add_option("--sign", sign_text, "minus or plus");
  compare->add_flag("--simulate", sim, "Measure factors from trajectories");
  compare->add_option("--nu", nu, "Near dipole-dipole strength for --simulate");
  add_output_options(compare, out, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*factors) return run_factors(n_text, sign_text, out);
    if (*simulate) return run_simulate(config_path, out);
    if (*steady) return run_steady(config_path, out);
    if (*sweep) return run_sweep(config_path, out);
    if (*dipole) return run_dipole_sum(config_path, ov, out);
    if (*compare) {
      const bool tol_given = compare->get_option("--tolerance")->count() > 0;
      if (tol_given && !(tolerance > 0.0)) throw DomainError("--tolerance: must be > 0");
      if (sim && !tol_given) tolerance = 1e-3;
      return run_compare(grid_text, tolerance, sign_text, sim, nu, out);
    }
  } catch (const IntegrationDiverged& e) {
    std::cerr << "lfbloch: " << e.what() << " (last good t = " << format_double(e.last_good_time())
              << ")\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "lfbloch: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "lfbloch: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "lfbloch: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
