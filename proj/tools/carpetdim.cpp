// SPDX-License-Identifier: Apache-2.0
// carpetdim: command-line driver.
//
// Exit codes: 0 success, 1 validation or hypothesis failure, 2 numerical
// non-convergence, 3 I/O or parse error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "carpetdim/carpet.hpp"
#include "carpetdim/carpet_io.hpp"
#include "carpetdim/coding.hpp"
#include "carpetdim/error.hpp"
#include "carpetdim/fulldim.hpp"
#include "carpetdim/geometry.hpp"
#include "carpetdim/parallel.hpp"
#include "carpetdim/variational.hpp"

using namespace carpetdim;

namespace {

struct Common {
  std::string file;
  int K = 64;
  double tol = 1e-10;
};

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  return os;
}

void csv_preamble(std::ostream& os, const std::string& command, const Common& c,
                  const std::string& extra = "") {
  os << "# carpetdim " << CARPETDIM_VERSION << " " << command << "\n";
  os << "# input=" << c.file << " K=" << c.K << " tol=" << format_real(c.tol) << "\n";
  if (!extra.empty()) os << "# " << extra << "\n";
}

// Loads and validates; a failed validation ends the command with exit 1.
CarpetSpec load_valid(const std::string& path, int* exit_status) {
  CarpetSpec spec = read_carpet_file(path);
  const ValidationReport rep = validate_carpet(spec);
  if (!rep.pass) {
    std::cerr << rep.to_string();
    *exit_status = 1;
  }
  return spec;
}

FullDimOptions solve_options(const Common& c) {
  FullDimOptions o;
  o.K = c.K;
  o.tol = c.tol;
  return o;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(item);
  return out;
}

int cmd_validate(const Common& c, int grid) {
  const CarpetSpec spec = read_carpet_file(c.file);
  const ValidationReport rep = validate_carpet(spec, grid);
  std::cout << rep.to_string();
  if (rep.pass) {
    const DominationConstants dc = domination_constants(spec, grid);
    std::cout << "lambda=" << fixed(dc.lambda) << " C=" << fixed(dc.C) << "\n";
  }
  return rep.pass ? 0 : 1;
}

int cmd_dim(const Common& c, const std::string& out_path) {
  int status = 0;
  const CarpetSpec spec = load_valid(c.file, &status);
  if (status) return status;
  const FullDimSolution sol = solve_full_dimension(spec, solve_options(c));
  std::cout << "D=" << fixed(sol.D) << " t*=" << fixed(sol.t_star) << " beta*=" << fixed(sol.beta_star)
            << " rho*=" << fixed(sol.rho_star) << (sol.degenerate ? " degenerate" : "") << "\n";

  nlohmann::json j;
  j["version"] = CARPETDIM_VERSION;
  j["input"] = c.file;
  j["K"] = c.K;
  j["tol"] = c.tol;
  j["D"] = sol.D;
  j["t_star"] = sol.t_star;
  j["beta_star"] = sol.degenerate ? nlohmann::json(nullptr) : nlohmann::json(sol.beta_star);
  j["rho_star"] = sol.rho_star;
  j["degenerate"] = sol.degenerate;
  j["t_range"] = {{"lower", sol.t_range.lower},
                  {"upper", sol.t_range.upper},
                  {"outer_lower", sol.t_range.outer_lower},
                  {"outer_upper", sol.t_range.outer_upper},
                  {"max_period", sol.t_range.max_period}};
  const auto& d = sol.diagnostics;
  j["diagnostics"] = {{"P_at_star", d.P_at_star},
                      {"dPdt_at_star", d.dPdt_at_star},
                      {"d2Pdt2_at_star", d.d2Pdt2_at_star},
                      {"beta_residual", d.beta_residual},
                      {"eigen_residual", d.eigen_residual},
                      {"outer_iterations", d.outer_iterations},
                      {"inner_evaluations", d.inner_evaluations}};
  j["dimension_of_measure"] = dimension_of_measure(sol);
  nlohmann::json masses = nlohmann::json::object();
  for (const FullWord& w : all_full_words(spec, 1)) masses[format_word(w)] = measure_cylinder(sol, w);
  j["cylinder_masses"] = masses;
  open_out(out_path) << j.dump(2) << "\n";
  return 0;
}

int cmd_measure(const Common& c, const std::string& words) {
  int status = 0;
  const CarpetSpec spec = load_valid(c.file, &status);
  if (status) return status;
  const FullDimSolution sol = solve_full_dimension(spec, solve_options(c));
  std::cout << "word,mass\n";
  for (const std::string& text : split(words, ',')) {
    double mass;
    std::string label;
    if (text.find('.') != std::string::npos) {
      const FullWord w = parse_full_word(text);
      mass = measure_cylinder(sol, w);
      label = format_word(w);
    } else {
      const RowWord w = parse_row_word(text);
      mass = cylinder_mass(*sol.nu, w);
      label = format_word(w);
    }
    std::cout << label << "," << format_real(mass) << "\n";
  }
  return 0;
}

void print_report(const UniquenessReport& r) {
  std::cout << "D=" << fixed(r.D) << " t*=" << fixed(r.t_star) << "\n";
  std::cout << "t_range=(" << fixed(r.t_range.lower, 9) << ", " << fixed(r.t_range.upper, 9)
            << ") outer=(" << fixed(r.t_range.outer_lower, 9) << ", " << fixed(r.t_range.outer_upper, 9)
            << ")\n";
  std::cout << "interval=[" << fixed(r.t_lo, 9) << ", " << fixed(r.t_hi, 9) << "] eps=" << fixed(r.epsilon, 9)
            << " grid=" << r.rows.size() << "\n";
  std::cout << "max_d2Pdt2=" << format_real(r.max_d2P) << " gamma=" << fixed(r.gamma_witness)
            << " hoelder_phi=" << fixed(r.hoelder_phi) << " hoelder_psi=" << fixed(r.hoelder_psi) << "\n";
  std::cout << "concavity_ok=" << (r.concavity_ok ? "true" : "false")
            << " H_eps_ok=" << (r.H_eps_ok ? "true" : "false") << (r.degenerate ? " degenerate" : "")
            << "\n";
  std::cout << "unique=" << (r.unique ? "true" : "false") << "\n";
}

int cmd_uniqueness(const Common& c, std::optional<double> eps, int grid, double cert_tol,
                   const std::string& csv_path) {
  int status = 0;
  const CarpetSpec spec = load_valid(c.file, &status);
  if (status) return status;
  UniquenessOptions o;
  o.epsilon = eps;
  o.grid = grid;
  o.tol = cert_tol;
  o.solve = solve_options(c);
  const UniquenessReport r = uniqueness_certificate(spec, o);
  print_report(r);
  std::ofstream os = open_out(csv_path);
  csv_preamble(os, "uniqueness", c, "eps=" + format_real(r.epsilon) + " grid=" + std::to_string(grid));
  os << "t,P,dPdt,d2Pdt2,beta,rho\n";
  for (const CurveRow& row : r.rows)
    os << format_real(row.t) << ',' << format_real(row.P) << ',' << format_real(row.dPdt) << ','
       << format_real(row.d2Pdt2) << ',' << format_real(row.beta) << ',' << format_real(row.rho) << '\n';
  return r.unique ? 0 : 1;
}

int cmd_variational(const Common& c, int n, std::uint64_t seed) {
  int status = 0;
  const CarpetSpec spec = load_valid(c.file, &status);
  if (status) return status;
  const LevelNProblem prob = make_level_n(spec, n);
  const LevelNOptimum opt = optimize_level_n(prob, c.tol, seed);
  std::cout << "n=" << n << " value=" << fixed(opt.value, 9) << " t_n=" << fixed(opt.t_star, 9)
            << " lambda_n=" << fixed(opt.lambda_star, 9) << " spread=" << format_real(opt.start_spread)
            << "\n";
  std::cout << "word,p\n";
  for (std::size_t i = 0; i < prob.row_words.size(); ++i)
    std::cout << format_word(prob.row_words[i]) << ',' << format_real(opt.p_star[i]) << '\n';
  return 0;
}

int cmd_render(const Common& c, int depth, const std::string& out_path, const std::string& boundary_path) {
  const CarpetSpec spec = read_carpet_file(c.file);
  const std::vector<Region> regions = render_regions(spec, depth);
  {
    std::ofstream os = open_out(out_path);
    csv_preamble(os, "render", c, "depth=" + std::to_string(depth));
    write_regions_csv(os, regions);
  }
  if (!boundary_path.empty()) {
    std::ofstream os = open_out(boundary_path);
    csv_preamble(os, "render", c, "depth=" + std::to_string(depth));
    write_boundaries_csv(os, regions);
  }
  std::cout << "regions=" << regions.size() << "\n";
  return 0;
}

int cmd_boxcount(const Common& c, std::int64_t samples, int depth, int s_lo, int s_hi, std::uint64_t seed,
                 const std::string& out_path) {
  const CarpetSpec spec = read_carpet_file(c.file);
  const BoxCountResult r = box_count(spec, samples, depth, dyadic_scales(s_lo, s_hi), seed);
  std::ofstream os = open_out(out_path);
  csv_preamble(os, "boxcount", c,
               "seed=" + std::to_string(seed) + " samples=" + std::to_string(samples) +
                   " depth=" + std::to_string(depth));
  write_box_counts_csv(os, r);
  std::cout << "estimate=" << fixed(r.estimate) << "\n";
  return 0;
}

int cmd_sweep(const Common& c, const std::string& param, double from, double to, int steps,
              std::uint64_t seed, const std::string& out_path) {
  if (param != "epsilon") throw Error(ErrorKind::ParseError, "sweep supports --param epsilon only");
  if (steps < 1) throw Error(ErrorKind::ParseError, "--steps must be >= 1");
  int status = 0;
  const CarpetSpec base = load_valid(c.file, &status);
  if (status) return status;

  struct Row {
    double eps = 0.0, D = 0.0, t_star = 0.0;
    bool unique = false;
    std::vector<double> masses;
  };
  const std::vector<FullWord> letters = all_full_words(base, 1);
  std::vector<Row> rows(static_cast<std::size_t>(steps));
  parallel_for(rows.size(), [&](std::size_t k) {
    Row& r = rows[k];
    r.eps = steps == 1 ? from : from + (to - from) * static_cast<double>(k) / (steps - 1);
    const CarpetSpec spec = perturb_carpet(base, r.eps, seed).spec;
    const FullDimSolution sol = solve_full_dimension(spec, solve_options(c));
    UniquenessOptions o;
    o.solve = solve_options(c);
    r.unique = uniqueness_certificate(sol, o).unique;
    r.D = sol.D;
    r.t_star = sol.t_star;
    for (const FullWord& w : letters) r.masses.push_back(measure_cylinder(sol, w));
  });

  std::ofstream os = open_out(out_path);
  csv_preamble(os, "sweep", c, "seed=" + std::to_string(seed) + " param=epsilon");
  os << "epsilon,D,t_star,unique";
  for (const FullWord& w : letters) os << ",mass_" << format_word(w);
  os << "\n";
  for (const Row& r : rows) {
    os << format_real(r.eps) << ',' << format_real(r.D) << ',' << format_real(r.t_star) << ','
       << (r.unique ? "true" : "false");
    for (double m : r.masses) os << ',' << format_real(m);
    os << "\n";
  }

  double tv_D = 0.0, tv_mass = 0.0;
  int flips = 0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    tv_D += std::abs(rows[k].D - rows[k - 1].D);
    flips += rows[k].unique != rows[k - 1].unique;
  }
  // Total variation of each mass along the sweep; report the largest.
  for (std::size_t q = 0; q < letters.size(); ++q) {
    double tv = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) tv += std::abs(rows[k].masses[q] - rows[k - 1].masses[q]);
    tv_mass = std::max(tv_mass, tv);
  }
  for (const Row& r : rows)
    std::cout << "epsilon=" << fixed(r.eps, 4) << " D=" << fixed(r.D) << " unique=" << (r.unique ? "true" : "false")
              << "\n";
  std::cout << "variation_D=" << format_real(tv_D) << " variation_mass=" << format_real(tv_mass)
            << " flips=" << flips << "\n";
  return flips == 0 && rows.front().unique ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hausdorff dimension and measures of full dimension for class-L carpets"};
  app.set_version_flag("--version", std::string(CARPETDIM_VERSION));
  app.require_subcommand(1);

  Common c;
  auto add_common = [&](CLI::App* sub, bool numeric) {
    sub->add_option("file", c.file, "carpet file")->required();
    if (numeric) {
      sub->add_option("--K", c.K, "collocation nodes")->check(CLI::Range(8, 1024));
      sub->add_option("--tol", c.tol, "root tolerance")->check(CLI::PositiveNumber);
    }
  };

  int grid = 2001;
  auto* validate = app.add_subcommand("validate", "check the carpet hypotheses");
  add_common(validate, false);
  validate->add_option("--grid", grid, "grid points")->check(CLI::Range(2, 10000000));

  std::string dim_out = "solution.json";
  auto* dim = app.add_subcommand("dim", "dimension and measure of full dimension");
  add_common(dim, true);
  dim->add_option("--out", dim_out, "solution record (JSON)");

  std::string words;
  auto* measure = app.add_subcommand("measure", "cylinder masses of the measure of full dimension");
  add_common(measure, true);
  measure->add_option("--words", words, "comma-separated words, e.g. \"1.1,2.1 1.2\" or \"1 2\"")->required();

  std::optional<double> eps;
  int cert_grid = 50;
  double cert_tol = 1e-8;
  std::string cert_csv = "uniqueness.csv";
  auto* uniq = app.add_subcommand("uniqueness", "concavity certificate for the pressure curve");
  add_common(uniq, true);
  uniq->add_option("--eps", eps, "margin inside (t_lower, t_upper)");
  uniq->add_option("--grid", cert_grid, "grid points")->check(CLI::Range(1, 100000));
  uniq->add_option("--cert-tol", cert_tol, "concavity margin")->check(CLI::PositiveNumber);
  uniq->add_option("--csv", cert_csv, "curve CSV");

  int level = 1;
  std::uint64_t seed = 0;
  auto* var = app.add_subcommand("variational", "level-n variational optimum");
  add_common(var, true);
  var->add_option("--n", level, "level")->check(CLI::Range(1, 64));
  var->add_option("--seed", seed, "multi-start seed");

  int depth = 1;
  std::string render_out = "regions.csv", boundary_out;
  auto* render = app.add_subcommand("render", "region covers at a given depth");
  add_common(render, false);
  render->add_option("--depth", depth, "depth")->check(CLI::Range(0, 64));
  render->add_option("--out", render_out, "regions CSV");
  render->add_option("--boundaries", boundary_out, "boundary polyline CSV");

  std::int64_t samples = 1000000;
  int box_depth = 14, s_lo = 3, s_hi = 9;
  std::string box_out = "boxcount.csv";
  auto* box = app.add_subcommand("boxcount", "Monte-Carlo box-counting estimate");
  add_common(box, false);
  box->add_option("--samples", samples, "sample points")->check(CLI::Range(int64_t{10000}, int64_t{100000000}));
  box->add_option("--seed", seed, "seed");
  box->add_option("--depth", box_depth, "symbols per sample")->check(CLI::Range(1, 64));
  box->add_option("--scale-min", s_lo, "coarsest scale exponent k in 2^-k");
  box->add_option("--scale-max", s_hi, "finest scale exponent");
  box->add_option("--out", box_out, "counts CSV");

  std::string param = "epsilon";
  double from = 0.0, to = 0.05;
  int steps = 6;
  std::string sweep_out = "sweep.csv";
  auto* sweep = app.add_subcommand("sweep", "dimension and uniqueness along a perturbation sweep");
  add_common(sweep, true);
  sweep->add_option("--param", param, "swept parameter (epsilon)");
  sweep->add_option("--from", from, "first value");
  sweep->add_option("--to", to, "last value");
  sweep->add_option("--steps", steps, "number of sweep points")->check(CLI::Range(1, 10000));
  sweep->add_option("--seed", seed, "perturbation seed");
  sweep->add_option("--out", sweep_out, "sweep CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (*validate) return cmd_validate(c, grid);
    if (*dim) return cmd_dim(c, dim_out);
    if (*measure) return cmd_measure(c, words);
    if (*uniq) return cmd_uniqueness(c, eps, cert_grid, cert_tol, cert_csv);
    if (*var) return cmd_variational(c, level, seed);
    if (*render) return cmd_render(c, depth, render_out, boundary_out);
    if (*box) return cmd_boxcount(c, samples, box_depth, s_lo, s_hi, seed, box_out);
    if (*sweep) return cmd_sweep(c, param, from, to, steps, seed, sweep_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
