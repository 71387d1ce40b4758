#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "ratex/errors.hpp"
#include "ratex/param_map.hpp"

namespace ratex {

PointResult evaluate_point(const ParamMap& map, const AffineRestriction& r, const Vector& theta,
                           const Tolerances& tol) {
  PointResult p;
  p.theta = theta;
  try {
    const Model model = eval_model(map, theta);
    const SolutionBundle bundle = solve_model(model, 0, tol);
    if (bundle.c0_rank < model.m || !bundle.c0_canonical) {
      p.reason = "C_0 is not canonical quasi-lower triangular";
      return p;
    }
    if (check_invertibility(bundle.ma_part, tol).status == InvertibilityStatus::NotInvertible) {
      p.reason = "transfer function is not invertible on the unit disk";
      return p;
    }
    const IdentSystem sys = build_ident_system(bundle, tol.rank);
    p.report = r.equation ? ident_test_equation(sys, r, model, tol.rank) : ident_test_affine(sys, r, model, tol.rank);
    p.valid = true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidRestriction) throw;
    p.reason = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return p;
}

GenericReport generic_ident(const ParamMap& map, const AffineRestriction& r, const SamplerConfig& config,
                            const Tolerances& tol) {
  if (config.num_samples < 1) throw Error(ErrorKind::InvalidArgument, "num_samples must be positive");
  const auto d = static_cast<Eigen::Index>(map.params.size());
  if (static_cast<Eigen::Index>(map.domain.size()) != d) {
    throw Error(ErrorKind::InvalidArgument, "domain box does not match the parameter list");
  }
  for (const auto& [lo, hi] : map.domain) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
      throw Error(ErrorKind::InvalidArgument, "domain box must be finite with lo <= hi");
    }
  }

  // All draws are fixed up front so the result cannot depend on scheduling.
  std::mt19937_64 rng(config.seed);
  std::vector<Vector> thetas;
  thetas.reserve(static_cast<std::size_t>(config.num_samples));
  for (int s = 0; s < config.num_samples; ++s) {
    Vector t(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const auto& [lo, hi] = map.domain[static_cast<std::size_t>(k)];
      t(k) = lo + (hi - lo) * u;
    }
    thetas.push_back(std::move(t));
  }

  const int workers = config.threads > 0 ? config.threads
                                         : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  GenericReport rep;
  std::vector<PointResult> results(thetas.size());
  std::size_t next = 0;
  while (next < thetas.size() && !rep.full_rank_found) {
    const std::size_t end = std::min(thetas.size(), next + static_cast<std::size_t>(workers));
    if (workers == 1) {
      results[next] = evaluate_point(map, r, thetas[next], tol);
    } else {
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(end - next);
      for (std::size_t i = next; i < end; ++i) {
        pool.emplace_back([&, i] {
          try {
            results[i] = evaluate_point(map, r, thetas[i], tol);
          } catch (...) {
            errors[i - next] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    const std::size_t stop = workers == 1 ? next + 1 : end;
    for (std::size_t i = next; i < stop; ++i) {
      const PointResult& p = results[i];
      ++rep.samples_drawn;
      if (!p.valid) continue;
      ++rep.samples_valid;
      if (p.report->identified) {
        rep.full_rank_found = true;
        rep.witness = p;
        break;
      }
      if (p.report->borderline) {
        ++rep.borderline_count;
      } else {
        ++rep.deficient_count;
      }
    }
    next = stop;
  }

  if (rep.full_rank_found) {
    rep.verdict = GenericVerdict::GenericallyIdentified;
    rep.notes.push_back("full column rank at the witness point implies generic identification");
  } else if (rep.samples_valid >= config.min_valid && rep.deficient_count == rep.samples_valid) {
    rep.verdict = GenericVerdict::EvidenceNotIdentified;
    rep.notes.push_back("every valid sample is rank-deficient: numerical evidence of generic non-identification, "
                        "not a proof");
  } else {
    rep.verdict = GenericVerdict::Inconclusive;
    if (rep.samples_valid == 0) {
      rep.notes.push_back("no sampled point satisfied the existence/uniqueness and canonical-form conditions");
    } else if (rep.samples_valid < config.min_valid) {
      rep.notes.push_back("only " + std::to_string(rep.samples_valid) + " valid samples, " +
                          std::to_string(config.min_valid) + " required");
    } else {
      rep.notes.push_back(std::to_string(rep.borderline_count) +
                          " valid samples were borderline for the rank threshold");
    }
  }
  rep.notes.push_back("assumed, not checked: the parameter domain is connected and the map is one-to-one");
  return rep;
}

}  // namespace ratex
