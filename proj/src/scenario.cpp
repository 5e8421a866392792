#include "dpshdg/scenario.hpp"

#include "dpshdg/fem.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dpshdg {

namespace {

constexpr double kConservationTol = 1e-8;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << std::setprecision(17);
  return out;
}

void prepare(const RunConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out);
  auto manifest = open_output(config.out / "manifest.toml");
  write_manifest(config, manifest);
}

std::vector<std::string> check_conservation(const ConservationReport& r, const std::string& where) {
  std::vector<std::string> failures;
  auto check = [&](const char* name, double value, double scale) {
    if (!(value <= kConservationTol * (1.0 + scale))) {
      std::ostringstream os;
      os << where << ": " << name << " = " << value << " exceeds " << kConservationTol << " * (1 + " << scale
         << ")";
      failures.push_back(os.str());
    }
  };
  check("div_stokes", r.div_stokes, r.scale_div);
  check("fracture_balance", r.fracture_balance, r.scale_fracture);
  check("matrix_balance", r.matrix_balance, r.scale_matrix);
  check("jump_u", r.jump_u, r.scale_velocity);
  check("interface_flux", r.interface_flux, r.scale_velocity);
  check("jump_u_m", r.jump_u_m, r.scale_matrix_velocity);
  return failures;
}

// Averages of |u_h| over Omega and |u_h^m| over Omega^d.
std::pair<double, double> mean_speeds(const FieldSolution& solution, const Mesh& mesh, const DofLayout& layout) {
  const QuadRule<2> rule = quad_tri(2 * layout.degree() + 2);
  double su = 0.0;
  double sm = 0.0;
  double area = 0.0;
  double area_d = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const AffineMap map = physical_map(mesh.cell_points(c));
    const bool dual = mesh.cell(c).subdomain == Subdomain::Dual;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double w = rule.weights[q] * map.det;
      const PointValues v = evaluate(solution, mesh, layout, c, map.to_physical(rule.points[q]));
      su += w * v.u.norm();
      if (dual) {
        sm += w * v.u_m.norm();
      }
    }
    area += mesh.area(c);
    if (dual) {
      area_d += mesh.area(c);
    }
  }
  return {su / area, area_d > 0.0 ? sm / area_d : 0.0};
}

FlowResult run_flow(const RunConfig& config, Geometry geometry, bool random_perm) {
  prepare(config);
  const Mesh mesh = build_structured(geometry, config.n);
  const DiscretizationParams disc = config.discretization();

  PhysicalParams params = PhysicalParams::uniform(mesh, config.physical());
  if (random_perm) {
    sample_permeabilities(mesh, config.seed, params);
  }
  params.validate(mesh);

  BoundaryConditionSet bcs;
  bcs.stokes.kind = StokesBoundary::Kind::TractionFree;
  const double pd = config.pressure_fracture;
  const double pm = config.pressure_matrix;
  bcs.fracture = DualBoundary::pressure([pd](const Point&) { return pd; });
  bcs.matrix = DualBoundary::pressure([pm](const Point&) { return pm; });
  bcs.validate();

  const DofLayout layout = build_layout(mesh, disc, bcs);
  const SourceSet sources;  // f = g = 0
  const SaddleSystem system = assemble(mesh, layout, params, disc, sources);
  const SolveOutcome outcome = solve(system, layout, config.condense);

  FlowResult result;
  result.solve = outcome.report;
  result.global_unknowns = outcome.global_unknowns;
  result.cells = mesh.num_cells();
  result.conservation = conservation(outcome.solution, mesh, layout, params, sources);
  std::tie(result.mean_speed, result.mean_matrix_speed) = mean_speeds(outcome.solution, mesh, layout);
  result.failures = check_conservation(result.conservation, std::string(to_string(config.scenario)));

  {
    auto out = open_output(config.out / "conservation.csv");
    out << "cells," << ConservationReport::csv_header() << '\n';
    out << result.cells << ',' << result.conservation.csv_row() << '\n';
  }
  if (config.write_fields) {
    export_fields(outcome.solution, mesh, layout,
                  config.out / ("fields_" + std::string(to_string(config.scenario)) + ".vtk"));
  }
  return result;
}

}  // namespace

void sample_permeabilities(const Mesh& mesh, std::uint64_t seed, PhysicalParams& params) {
  std::mt19937_64 rng(seed);
  auto draw = [&rng](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11U) * 0x1.0p-53;
    return std::pow(10.0, lo + u * (hi - lo));
  };
  params.kappa_f.resize(static_cast<std::size_t>(mesh.num_cells()), 1.0);
  params.kappa_m.resize(static_cast<std::size_t>(mesh.num_cells()), 1.0);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell(c).subdomain != Subdomain::Dual) {
      continue;
    }
    params.kappa_f[c] = draw(-2.0, 0.0);
    params.kappa_m[c] = draw(-6.0, -4.0);
  }
}

std::vector<std::string> check_rates(const RateTable& table, int k) {
  std::vector<std::string> failures;
  if (table.cells.size() < 3) {
    return failures;
  }
  struct Threshold {
    const char* name;
    double min_rate;
  };
  const double kk = k;
  const Threshold thresholds[] = {
      {"u_s", kk + 0.8},      {"u_d", kk + 0.8},      {"u_m", kk + 0.8},      {"p_s", kk - 0.2},
      {"p_d", kk - 0.2},      {"p_m", kk - 0.2},      {"grad_u_s", kk - 0.1}, {"div_u_d", kk - 0.1},
      {"div_u_m", kk - 0.1},
  };
  for (const Threshold& t : thresholds) {
    const RateColumn& col = table.column(t.name);
    const double r = col.rates.back();
    if (!(r >= t.min_rate)) {
      std::ostringstream os;
      os << "rate of " << t.name << " on the final interval is " << r << ", expected >= " << t.min_rate;
      failures.push_back(os.str());
    }
  }
  return failures;
}

MmsResult run_mms(const RunConfig& config) {
  if (config.scenario != Scenario::Mms) {
    throw std::invalid_argument("run_mms needs the mms scenario");
  }
  prepare(config);
  const DiscretizationParams disc = config.discretization();
  const ManufacturedProblem problem = example1(config.physical());
  const BoundaryConditionSet bcs = example1_boundary(problem.exact);

  MmsResult result;
  std::vector<ErrorReport> reports;
  Mesh mesh = build_structured(Geometry::UnitSquareSplit, config.n);
  FieldSolution finest;
  DofLayout finest_layout;
  for (int level = 0; level < config.levels; ++level) {
    if (level > 0) {
      mesh = refine_uniform(mesh);
    }
    const PhysicalParams params = PhysicalParams::uniform(mesh, problem.params);
    const DofLayout layout = build_layout(mesh, disc, bcs);
    LevelResult lr;
    SolveOutcome outcome;
    try {
      const SaddleSystem system = assemble(mesh, layout, params, disc, problem.sources);
      outcome = solve(system, layout, config.condense);
    } catch (const std::exception& e) {
      throw std::runtime_error("level " + std::to_string(level) + " (" + std::to_string(mesh.num_cells()) +
                               " cells): " + e.what());
    }
    lr.solve = outcome.report;
    lr.global_unknowns = outcome.global_unknowns;
    lr.errors = compute_errors(outcome.solution, problem.exact, mesh, layout, params, problem.sources);
    lr.conservation = conservation(outcome.solution, mesh, layout, params, problem.sources);
    for (auto& f : check_conservation(lr.conservation, "level " + std::to_string(level))) {
      result.failures.push_back(std::move(f));
    }
    reports.push_back(lr.errors);
    result.levels.push_back(lr);
    if (level + 1 == config.levels) {
      finest = std::move(outcome.solution);
      finest_layout = layout;
    }
  }

  {
    auto out = open_output(config.out / "errors.csv");
    out << ErrorReport::csv_header() << '\n';
    for (const auto& r : reports) {
      out << r.csv_row() << '\n';
    }
  }
  {
    auto out = open_output(config.out / "conservation.csv");
    out << "cells," << ConservationReport::csv_header() << '\n';
    for (const auto& l : result.levels) {
      out << l.errors.cells << ',' << l.conservation.csv_row() << '\n';
    }
  }
  if (reports.size() >= 2) {
    result.table = rates(reports);
    const std::pair<const char*, RateTable> tables[] = {
        {"rates_stokes.csv", stokes_table(*result.table)},
        {"rates_microfractures.csv", fracture_table(*result.table)},
        {"rates_matrix.csv", matrix_table(*result.table)},
    };
    for (const auto& [name, table] : tables) {
      auto out = open_output(config.out / name);
      table.write_csv(out);
    }
    for (auto& f : check_rates(*result.table, config.k)) {
      result.failures.push_back(std::move(f));
    }
  }
  if (config.write_fields) {
    export_fields(finest, mesh, finest_layout, config.out / "fields_mms.vtk");
  }
  return result;
}

FlowResult run_wellbore(const RunConfig& config) {
  switch (config.scenario) {
    case Scenario::WellboreVertical: return run_flow(config, Geometry::VerticalWellbore, false);
    case Scenario::WellboreHorizontal: return run_flow(config, Geometry::HorizontalWellbore, false);
    default: throw std::invalid_argument("run_wellbore needs a wellbore scenario");
  }
}

FlowResult run_random_perm(const RunConfig& config) {
  if (config.scenario != Scenario::RandomPerm) {
    throw std::invalid_argument("run_random_perm needs the random-perm scenario");
  }
  return run_flow(config, Geometry::HorizontalWellbore, true);
}

}  // namespace dpshdg
