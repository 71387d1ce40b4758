// Command-line front end: factorize, solve, equiv, ident, generic, local,
// spectrum, simulate. Exit codes: 0 success / identified / equivalent,
// 1 bad input, 2 existence-uniqueness or canonical-form failure,
// 3 not identified / not equivalent, 4 inconclusive or oracle disagreement.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ratex/errors.hpp"
#include "ratex/ident.hpp"
#include "ratex/model_io.hpp"
#include "ratex/param_map.hpp"
#include "ratex/solution.hpp"
#include "ratex/wiener_hopf.hpp"

using namespace ratex;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInput = 1, kEU = 2, kNegative = 3, kUndecided = 4 };

struct Common {
  std::string format = "text";
  std::vector<double> theta;
  double tol_rank = 0.0;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(Complex z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

std::string fmt(const Matrix& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += i ? "; " : "";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? " " : "") + fmt(m(i, j));
  }
  return s + "]";
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const LaurentMatrix& l) {
  json out = json::object();
  for (int k = l.min_lag(); k <= l.max_lag(); ++k) out[std::to_string(k)] = to_json(l.coeff(k));
  return out;
}

json to_json(const std::vector<Complex>& zs) {
  json out = json::array();
  for (const auto& z : zs) out.push_back({z.real(), z.imag()});
  return out;
}

json to_json(const RankReport& r) {
  json sv = json::array();
  for (Eigen::Index k = 0; k < r.singular_values.size(); ++k) sv.push_back(r.singular_values(k));
  return {{"verdict", r.identified ? "identified" : "not_identified"},
          {"required_rank", r.required_rank},
          {"numerical_rank", r.numerical_rank},
          {"singular_values", sv},
          {"matrix_shape", {r.rows, r.cols}},
          {"gap_ratio", r.gap_ratio},
          {"threshold", r.threshold},
          {"borderline", r.borderline},
          {"warnings", r.warnings}};
}

void print_laurent(const std::string& name, const LaurentMatrix& l) {
  for (int k = l.min_lag(); k <= l.max_lag(); ++k) std::cout << name << "[" << k << "] = " << fmt(l.coeff(k)) << "\n";
}

void print_rank(const RankReport& r) {
  std::cout << "matrix: " << r.rows << " x " << r.cols << "\n";
  std::cout << "numerical rank: " << r.numerical_rank << " (required " << r.required_rank << ")\n";
  std::cout << "gap ratio: " << fmt(r.gap_ratio) << " (threshold " << fmt(r.threshold) << ")"
            << (r.borderline ? " borderline" : "") << "\n";
  std::cout << "singular values:";
  for (Eigen::Index k = 0; k < r.singular_values.size(); ++k) std::cout << " " << fmt(r.singular_values(k));
  std::cout << "\n";
  for (const auto& w : r.warnings) std::cout << "warning: " << w << "\n";
}

Tolerances tolerances(const Common& c) {
  Tolerances t = Tolerances::from_environment();
  if (c.tol_rank > 0.0) t.rank = c.tol_rank;
  return t;
}

Model load_numeric(const std::string& path, const Common& c) {
  const ModelFile f = load_model_file(path);
  std::optional<Vector> theta;
  if (!c.theta.empty()) theta = Eigen::Map<const Vector>(c.theta.data(), static_cast<Eigen::Index>(c.theta.size()));
  std::vector<std::string> warnings;
  Model m = model_at(f, theta, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return m;
}

void emit(const Common& c, const json& report) {
  if (c.format == "json-report") std::cout << report.dump(2) << "\n";
}

int eu_failure(const Common& c, const Error& e, json report) {
  report["verdict"] = "eu_failure";
  report["error"] = to_string(e.kind());
  report["message"] = e.what();
  if (c.format == "json-report") {
    emit(c, report);
  } else {
    std::cout << "EU-LREM fails: " << e.what() << " (" << to_string(e.kind()) << ")\n";
  }
  return kEU;
}

bool is_eu_kind(ErrorKind k) {
  return k == ErrorKind::ZerosOnUnitCircle || k == ErrorKind::WrongStableCount ||
         k == ErrorKind::DivisorExtractionSingular || k == ErrorKind::SingularLeadingCoefficient;
}

int cmd_factorize(const std::string& path, const Common& c) {
  const Model model = load_numeric(path, c);
  const Tolerances tol = tolerances(c);
  json report = {{"command", "factorize"}};
  const EUDiagnostic d = check_eu(model.B, tol);
  report["zeros"] = to_json(d.zeros);
  report["stable_count"] = d.stable_count;
  report["required_stable"] = d.required_stable;
  if (!d.holds) {
    if (c.format != "json-report") {
      std::cout << "zeros of det(z^lambda B):";
      for (const auto& z : d.zeros) std::cout << " " << fmt(z);
      std::cout << "\n";
    }
    return eu_failure(c, Error(*d.failure, d.message), report);
  }
  const WHFactors f = wh_factorize(model.B, tol);
  report["verdict"] = "factorized";
  report["b_minus"] = to_json(f.b_minus);
  report["b_plus"] = to_json(f.b_plus);
  report["residual"] = f.residual;
  if (c.format == "json-report") {
    emit(c, report);
    return kOk;
  }
  if (f.lambda == 0) {
    std::cout << "B_- = I\n";
  } else {
    print_laurent("B_-", f.b_minus);
  }
  print_laurent("B_+", f.b_plus);
  std::cout << "zeros of det(z^lambda B):";
  for (const auto& z : f.zeros) std::cout << " " << fmt(z);
  std::cout << "\nstable zeros: " << f.stable_count << " (required " << d.required_stable << ")\n";
  std::cout << "residual: " << fmt(f.residual) << "\n";
  return kOk;
}

int cmd_solve(const std::string& path, int horizon, const Common& c) {
  const Model model = load_numeric(path, c);
  const Tolerances tol = tolerances(c);
  json report = {{"command", "solve"}};
  const SolutionBundle b = solve_model(model, horizon, tol);
  std::optional<CanonicalForm> cfo;
  try {
    cfo = cf_check_and_normalize(b, tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::RankDeficientC0 && e.kind() != ErrorKind::NotInvertible) throw;
    report["verdict"] = to_string(e.kind());
    report["message"] = e.what();
    if (c.format == "json-report") {
      emit(c, report);
    } else {
      print_laurent("ma_part", b.ma_part);
      print_laurent("A_plus", b.a_plus);
      std::cout << "CF: fails: " << e.what() << " (" << to_string(e.kind()) << ")\n";
    }
    return kEU;
  }
  const CanonicalForm& cf = *cfo;
  report["verdict"] = cf.was_canonical ? "canonical" : "normalized";
  report["ma_part"] = to_json(b.ma_part);
  report["a_plus"] = to_json(b.a_plus);
  json cs = json::array();
  for (const auto& m : b.transfer.coeffs) cs.push_back(to_json(m));
  report["transfer"] = cs;
  report["V"] = to_json(cf.V);
  report["invertibility_method"] = cf.invertibility.method;
  if (c.format == "json-report") {
    emit(c, report);
    return kOk;
  }
  print_laurent("ma_part", b.ma_part);
  print_laurent("A_plus", b.a_plus);
  for (int j = 0; j <= b.transfer.horizon(); ++j) std::cout << "C[" << j << "] = " << fmt(b.transfer[j]) << "\n";
  if (cf.was_canonical) {
    std::cout << "CF: canonical\n";
  } else {
    std::cout << "CF: not canonical; rotation V = " << fmt(cf.V) << " gives C[0] V = " << fmt(cf.bundle.transfer[0])
              << "\n";
  }
  if (cf.invertibility.status == InvertibilityStatus::Boundary) std::cout << "warning: transfer function has zeros on the unit circle\n";
  if (cf.invertibility.method == "grid") {
    std::cout << "note: invertibility for n > m checked on a disk grid (radii 0.1..0.9, 64 angles), not proven\n";
  }
  return kOk;
}

int cmd_equiv(const std::string& pa, const std::string& pb, const std::string& oracle, const Common& c) {
  const Tolerances tol = tolerances(c);
  const Model ma = load_numeric(pa, c);
  const Model mb = load_numeric(pb, c);
  json report = {{"command", "equiv"}, {"oracle", oracle}};
  SolutionBundle a = solve_model(ma, 0, tol);
  SolutionBundle b = solve_model(mb, 0, tol);
  std::optional<EquivalenceResult> kernel, spectral;
  if (oracle == "kernel" || oracle == "both") kernel = obs_equivalent(a, mb, 1e-8, tol);
  if (oracle == "spectral" || oracle == "both") spectral = spectral_equivalent(a, b);
  if (kernel) report["kernel"] = {{"equivalent", kernel->equivalent}, {"residual", kernel->residual}};
  if (spectral) report["spectral"] = {{"equivalent", spectral->equivalent}, {"residual", spectral->residual}};
  int code;
  if (kernel && spectral && kernel->equivalent != spectral->equivalent) {
    report["verdict"] = "oracle_disagreement";
    code = kUndecided;
  } else {
    const bool eq = kernel ? kernel->equivalent : spectral->equivalent;
    report["verdict"] = eq ? "equivalent" : "not_equivalent";
    code = eq ? kOk : kNegative;
  }
  if (c.format == "json-report") {
    emit(c, report);
    return code;
  }
  if (kernel) {
    std::cout << "kernel criterion: " << (kernel->equivalent ? "equivalent" : "not equivalent")
              << " (residual " << fmt(kernel->residual) << ")\n";
  }
  if (spectral) {
    std::cout << "spectral oracle (64 points): " << (spectral->equivalent ? "equivalent" : "not equivalent")
              << " (max difference " << fmt(spectral->residual) << ")\n";
  }
  std::cout << "verdict: " << report["verdict"].get<std::string>() << "\n";
  return code;
}

int cmd_ident(const std::string& mpath, const std::string& rpath, bool ds, const Common& c) {
  const Tolerances tol = tolerances(c);
  const Model model = load_numeric(mpath, c);
  const RestrictionFile rf = load_restriction_file(rpath, model.n, model.m, model.kappa, model.lambda);
  if (!rf.affine) throw Error(ErrorKind::InvalidRestriction, "ident needs affine restrictions (use 'local' for nonlinear ones)");
  json report = {{"command", "ident"}};
  std::optional<SolutionBundle> bo;
  try {
    bo = solve_model(model, 0, tol);
  } catch (const Error& e) {
    if (!is_eu_kind(e.kind())) throw;
    return eu_failure(c, e, report);
  }
  const SolutionBundle& b = *bo;
  const IdentSystem sys = build_ident_system(b, tol.rank);
  RankReport r = rf.equation ? ident_test_equation(sys, *rf.affine, model, tol.rank)
                             : ident_test_affine(sys, *rf.affine, model, tol.rank);
  if (!b.c0_canonical) r.warnings.push_back("C_0 is not canonical quasi-lower triangular at this point");
  report.update(to_json(r));
  report["mode"] = rf.equation ? "equation" : "system";
  if (rf.equation) report["equation"] = *rf.equation + 1;
  int code = r.identified ? kOk : kNegative;
  std::optional<RankReport> dsr;
  if (ds) {
    if (rf.equation) throw Error(ErrorKind::InvalidArgument, "--ds needs a system-wide restriction");
    dsr = ds_criterion(model, *rf.affine, tol.rank);
    report["ds"] = to_json(*dsr);
    if (dsr->identified != r.identified) {
      report["verdict"] = "criteria_disagree";
      code = kUndecided;
    }
  }
  if (c.format == "json-report") {
    emit(c, report);
    return code;
  }
  std::cout << (rf.equation ? "equation " + std::to_string(*rf.equation + 1) + ": " : std::string("system: "))
            << (r.identified ? "identified" : "not identified") << "\n";
  print_rank(r);
  if (dsr) {
    std::cout << "structural criterion: " << (dsr->identified ? "identified" : "not identified") << "\n";
    print_rank(*dsr);
    std::cout << (code == kUndecided ? "criteria disagree\n" : "criteria agree\n");
  }
  return code;
}

int cmd_generic(const std::string& mpath, const std::string& rpath, int samples, std::uint64_t seed, int min_valid,
                int threads, const Common& c) {
  const Tolerances tol = tolerances(c);
  const ModelFile f = load_model_file(mpath);
  if (!f.parametrized) throw Error(ErrorKind::InvalidArgument, "generic needs a parametrized model file");
  const ParamMap& map = *f.parametrized;
  const RestrictionFile rf = load_restriction_file(rpath, map.n, map.m, map.kappa, map.lambda);
  if (!rf.affine) throw Error(ErrorKind::InvalidRestriction, "generic needs affine restrictions");
  SamplerConfig cfg{samples, seed, min_valid, threads};
  const GenericReport g = generic_ident(map, *rf.affine, cfg, tol);
  const int code = g.verdict == GenericVerdict::GenericallyIdentified ? kOk
                   : g.verdict == GenericVerdict::EvidenceNotIdentified ? kNegative
                                                                         : kUndecided;
  json report = {{"command", "generic"},
                 {"verdict", to_string(g.verdict)},
                 {"samples_drawn", g.samples_drawn},
                 {"samples_valid", g.samples_valid},
                 {"deficient_count", g.deficient_count},
                 {"borderline_count", g.borderline_count},
                 {"full_rank_found", g.full_rank_found},
                 {"notes", g.notes}};
  if (g.witness) {
    const RankReport& r = *g.witness->report;
    json w = to_json(r);
    w["theta"] = std::vector<double>(g.witness->theta.data(), g.witness->theta.data() + g.witness->theta.size());
    report["witness"] = w;
    report["required_rank"] = r.required_rank;
    report["numerical_rank"] = r.numerical_rank;
    report["singular_values"] = w["singular_values"];
  }
  if (c.format == "json-report") {
    emit(c, report);
    return code;
  }
  std::cout << "verdict: " << to_string(g.verdict) << "\n";
  std::cout << "samples drawn: " << g.samples_drawn << ", valid: " << g.samples_valid
            << ", rank-deficient: " << g.deficient_count << ", borderline: " << g.borderline_count << "\n";
  if (g.witness) {
    std::cout << "witness theta:";
    for (Eigen::Index k = 0; k < g.witness->theta.size(); ++k) {
      std::cout << " " << map.params[static_cast<std::size_t>(k)] << "=" << fmt(g.witness->theta(k));
    }
    std::cout << "\n";
    print_rank(*g.witness->report);
  }
  for (const auto& n : g.notes) std::cout << "note: " << n << "\n";
  return code;
}

int cmd_local(const std::string& mpath, const std::string& rpath, const Common& c) {
  const Tolerances tol = tolerances(c);
  const Model model = load_numeric(mpath, c);
  const RestrictionFile rf = load_restriction_file(rpath, model.n, model.m, model.kappa, model.lambda);
  const NonlinearRestriction r = rf.nonlinear.empty()
                                     ? affine_as_nonlinear(*rf.affine)
                                     : compile_nonlinear(rf.nonlinear, model.n, model.m, model.kappa, model.lambda,
                                                         rf.equation);
  json report = {{"command", "local"}};
  LocalReport lr;
  try {
    lr = local_ident(model, r, tol);
  } catch (const Error& e) {
    if (!is_eu_kind(e.kind())) throw;
    return eu_failure(c, e, report);
  }
  const int code = lr.verdict == LocalVerdict::LocallyIdentified ? kOk : kNegative;
  report.update(to_json(lr.rank));
  report["verdict"] = to_string(lr.verdict);
  report["probe_ranks"] = lr.probe_ranks;
  report["notes"] = lr.notes;
  if (c.format == "json-report") {
    emit(c, report);
    return code;
  }
  std::cout << "verdict: " << to_string(lr.verdict) << "\n";
  print_rank(lr.rank);
  if (!lr.probe_ranks.empty()) {
    std::cout << "ranks at nearby points:";
    for (int k : lr.probe_ranks) std::cout << " " << k;
    std::cout << "\n";
  }
  for (const auto& n : lr.notes) std::cout << "note: " << n << "\n";
  return code;
}

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error(ErrorKind::Io, "cannot write " + path);
  return file;
}

int cmd_spectrum(const std::string& path, int points, const std::string& out, const Common& c) {
  const Tolerances tol = tolerances(c);
  const Model model = load_numeric(path, c);
  const SolutionBundle b = solve_model(model, 0, tol);
  const auto grid = unit_circle_grid(points);
  const auto f = spectral_density(model.B, b.a_plus, grid);
  std::ofstream file;
  std::ostream& os = output(out, file);
  os << "omega";
  for (int i = 1; i <= model.n; ++i) {
    for (int j = 1; j <= model.n; ++j) os << ",re_f_" << i << "_" << j << ",im_f_" << i << "_" << j;
  }
  os << "\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << fmt(2.0 * std::numbers::pi * static_cast<double>(k) / points);
    for (int i = 0; i < model.n; ++i) {
      for (int j = 0; j < model.n; ++j) {
        const Complex v = f[k](i, j);
        // Clean signed zeros and rounding dust so equivalent models print alike.
        auto clean = [](double x) { return std::abs(x) < 1e-13 ? 0.0 : x; };
        os << "," << fmt(clean(v.real())) << "," << fmt(clean(v.imag()));
      }
    }
    os << "\n";
  }
  return kOk;
}

int cmd_simulate(const std::string& path, int T, std::uint64_t seed, const std::string& out, const Common& c) {
  const Tolerances tol = tolerances(c);
  const Model model = load_numeric(path, c);
  const SolutionBundle b = solve_model(model, 0, tol);
  SimulationConfig cfg;
  cfg.seed = seed;
  const Matrix y = simulate(b, T, cfg);
  std::ofstream file;
  std::ostream& os = output(out, file);
  os << "t";
  for (int i = 1; i <= model.n; ++i) os << ",y_" << i;
  os << "\n";
  for (Eigen::Index t = 0; t < y.rows(); ++t) {
    os << t + 1;
    for (Eigen::Index i = 0; i < y.cols(); ++i) os << "," << fmt(y(t, i));
    os << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Existence, solution and identification diagnostics for linear rational expectations models"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "json-report"}));
    sub->add_option("--theta", common.theta, "Parameter values for a parametrized model file")->delimiter(',');
    sub->add_option("--tol-rank", common.tol_rank, "Relative rank tolerance (overrides RATEX_TOL_RANK)");
  };

  std::string model_path, other_path, restriction_path, out_path, oracle = "both";
  int horizon = 10, grid = 64, T = 1000, samples = 64, min_valid = 16, threads = 1;
  std::uint64_t seed = 1;
  bool ds = false;

  auto* factorize = app.add_subcommand("factorize", "Wiener-Hopf factorization of B");
  factorize->add_option("model", model_path, "Model file")->required();
  add_common(factorize);

  auto* solve = app.add_subcommand("solve", "Solution objects, transfer coefficients and canonical-form check");
  solve->add_option("model", model_path, "Model file")->required();
  solve->add_option("--horizon", horizon, "Last transfer coefficient to print")->check(CLI::NonNegativeNumber);
  add_common(solve);

  auto* equiv = app.add_subcommand("equiv", "Observational equivalence of two models");
  equiv->add_option("model_a", model_path, "First model file")->required();
  equiv->add_option("model_b", other_path, "Second model file")->required();
  equiv->add_option("--oracle", oracle, "Criterion")->check(CLI::IsMember({"spectral", "kernel", "both"}));
  add_common(equiv);

  auto* ident = app.add_subcommand("ident", "Rank test under affine restrictions");
  ident->add_option("model", model_path, "Model file")->required();
  ident->add_option("restrictions", restriction_path, "Restriction file")->required();
  ident->add_flag("--ds", ds, "Also run the structural-coefficient criterion (lambda = 0)");
  add_common(ident);

  auto* generic = app.add_subcommand("generic", "Generic identification by sampling the parameter box");
  generic->add_option("model", model_path, "Parametrized model file")->required();
  generic->add_option("restrictions", restriction_path, "Restriction file")->required();
  generic->add_option("--samples", samples, "Number of draws")->check(CLI::PositiveNumber);
  generic->add_option("--seed", seed, "Random seed");
  generic->add_option("--min-valid", min_valid, "Valid draws needed for a negative verdict");
  generic->add_option("--threads", threads, "Worker threads (0 = all cores)");
  add_common(generic);

  auto* local = app.add_subcommand("local", "Local identification under nonlinear restrictions");
  local->add_option("model", model_path, "Model file")->required();
  local->add_option("restrictions", restriction_path, "Restriction file")->required();
  add_common(local);

  auto* spectrum = app.add_subcommand("spectrum", "Spectral density on a unit-circle grid as CSV");
  spectrum->add_option("model", model_path, "Model file")->required();
  spectrum->add_option("--grid", grid, "Number of grid points")->check(CLI::PositiveNumber);
  spectrum->add_option("--out", out_path, "Output CSV (default stdout)");
  add_common(spectrum);

  auto* sim = app.add_subcommand("simulate", "Simulated sample path as CSV");
  sim->add_option("model", model_path, "Model file")->required();
  sim->add_option("--T", T, "Sample length")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--out", out_path, "Output CSV (default stdout)");
  add_common(sim);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*factorize) return cmd_factorize(model_path, common);
    if (*solve) return cmd_solve(model_path, horizon, common);
    if (*equiv) return cmd_equiv(model_path, other_path, oracle, common);
    if (*ident) return cmd_ident(model_path, restriction_path, ds, common);
    if (*generic) return cmd_generic(model_path, restriction_path, samples, seed, min_valid, threads, common);
    if (*local) return cmd_local(model_path, restriction_path, common);
    if (*spectrum) return cmd_spectrum(model_path, grid, out_path, common);
    if (*sim) return cmd_simulate(model_path, T, seed, out_path, common);
  } catch (const Error& e) {
    if (is_eu_kind(e.kind())) return eu_failure(common, e, json{{"command", app.get_subcommands().front()->get_name()}});
    std::cerr << "error: " << e.what() << " (" << to_string(e.kind()) << ")\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
