#include <doctest.h>

#include "ratex/errors.hpp"
#include "ratex/expr.hpp"
#include "ratex/model_io.hpp"
#include "ratex/param_map.hpp"
#include "test_support.hpp"

using namespace ratex;
using testing::coord_index;
using testing::error_kind;
using testing::pin_coordinates;

namespace {

const char* kHansenSargent = R"j({
  "n": 1, "m": 1, "lambda": 1, "kappa": 1,
  "parametrized": {
    "params": ["theta1", "theta2", "theta3"],
    "domain": [[0.5, 0.99], [-3, -0.5], [-3, -0.1]],
    "B": {"-1": [["theta1"]], "0": [["-((theta3/theta2)+1+theta1)"]], "1": [["1"]]},
    "A": {"0": [["1/theta2"]]}
  }
})j";

const char* kHansenSargent2 = R"j({
  "n": 1, "m": 1, "lambda": 1, "kappa": 1,
  "parametrized": {
    "params": ["theta2", "theta3"],
    "domain": [[-3, -0.5], [-3, -0.1]],
    "B": {"-1": [["1"]], "0": [["-((theta3/theta2)+1+1)"]], "1": [["1"]]},
    "A": {"0": [["1/theta2"]]}
  }
})j";

double eval(const std::string& text, const std::vector<std::string>& vars = {}, Vector values = Vector()) {
  return evaluate(*parse_expression(text, vars), values);
}

Vector vec2(double a, double b) { return (Vector(2) << a, b).finished(); }
Vector vec3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }

// Pins B_1 = 1 and A_1 = 0, optionally also B_{-1} = 1.
AffineRestriction hs_restriction(bool pin_lead) {
  const int width = static_cast<int>(restriction_width(1, 1, 1, 1, false));
  std::vector<int> coords{coord_index(1, 1, 1, 1, true, 1, 0, 0), coord_index(1, 1, 1, 1, false, 1, 0, 0)};
  Vector values = vec2(1.0, 0.0);
  if (pin_lead) {
    coords.push_back(coord_index(1, 1, 1, 1, true, -1, 0, 0));
    values = vec3(1.0, 0.0, 1.0);
  }
  AffineRestriction r{Matrix::Zero(static_cast<Eigen::Index>(coords.size()), width), values, std::nullopt};
  for (std::size_t k = 0; k < coords.size(); ++k) r.R(static_cast<Eigen::Index>(k), coords[k]) = 1.0;
  return r;
}

std::string random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  const std::vector<std::string> names{"x", "y", "theta_1", "B[-1][1][2]"};
  switch (pick(rng)) {
    case 0: return std::to_string(std::uniform_int_distribution<int>(0, 99)(rng)) + ".25";
    case 1: return names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
    case 2: return "-" + random_expression(rng, depth - 1);
    case 3: return "(" + random_expression(rng, depth - 1) + ")^" + std::to_string(rng() % 4);
    case 4: return random_expression(rng, depth - 1) + " + " + random_expression(rng, depth - 1);
    case 5: return random_expression(rng, depth - 1) + " - " + random_expression(rng, depth - 1);
    case 6: return random_expression(rng, depth - 1) + " * " + random_expression(rng, depth - 1);
    default: return "(" + random_expression(rng, depth - 1) + ") / (" + random_expression(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("(1 + 2) * 3") == 9.0);
  CHECK(eval("8 - 3 - 2") == 3.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("-2^2") == -4.0);
  CHECK(eval("2 * -3") == -6.0);
  CHECK(eval("--2") == 2.0);
  CHECK(eval("2^0") == 1.0);
  CHECK(eval("1.5e1 + .5") == 15.5);
  CHECK(eval("x * y", {"x", "y"}, vec2(3.0, -2.0)) == -6.0);
}

TEST_CASE("subscripted identifiers are normalized") {
  const std::vector<std::string> vars{"B[-1][1][1]"};
  CHECK(eval("2 * B[ -1 ][1][ 1]", vars, Vector::Constant(1, 4.0)) == 8.0);
  CHECK(eval("B[-1][+1][1]", vars, Vector::Constant(1, 4.0)) == 4.0);
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_expression("theta1 + * 2", {"theta1"});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 10);
  }
  try {
    parse_expression("1 +\n  bogus", {});
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK(error_kind([] { parse_expression("x ^ 1.5", {"x"}); }) == ErrorKind::Parse);
  CHECK(error_kind([] { parse_expression("x ^ -1", {"x"}); }) == ErrorKind::Parse);
  CHECK(error_kind([] { parse_expression("(1 + 2", {}); }) == ErrorKind::Parse);
  CHECK(error_kind([] { parse_expression("", {}); }) == ErrorKind::Parse);
  CHECK(error_kind([] { parse_expression("1 # 2", {}); }) == ErrorKind::Parse);
}

TEST_CASE("evaluation errors") {
  CHECK(error_kind([] { eval("1 / (x - x)", {"x"}, Vector::Constant(1, 2.0)); }) == ErrorKind::Evaluation);
  CHECK(error_kind([] { eval("(1e200 * 1e200)"); }) == ErrorKind::Evaluation);
}

TEST_CASE("printing round-trips through the parser") {
  std::mt19937_64 rng(131);
  const std::vector<std::string> vars{"x", "y", "theta_1", "B[-1][1][2]"};
  for (int k = 0; k < 100; ++k) {
    const std::string text = random_expression(rng, 4);
    const ExprPtr tree = parse_expression(text, vars);
    const std::string printed = to_string(*tree);
    const ExprPtr again = parse_expression(printed, vars);
    CHECK_MESSAGE(same_tree(*tree, *again), text);
    CHECK(to_string(*again) == printed);
  }
}

TEST_CASE("identifier listing") {
  const ExprPtr e = parse_expression("y * x + y", {"x", "y"});
  CHECK(identifiers(*e) == std::vector<std::string>{"y", "x"});
}

TEST_CASE("Hansen-Sargent map parses and evaluates") {
  const ParamMap map = parse_model(kHansenSargent);
  CHECK(map.params.size() == 3);
  const Model hs = eval_model(map, vec3(1.0, -2.0, -1.0));
  CHECK(max_abs_difference(hs.B, testing::scalar(-1, {1.0, -2.5, 1.0})) < 1e-15);
  CHECK(max_abs_difference(hs.A, testing::scalar(0, {-0.5})) < 1e-15);
  CHECK(error_kind([&] { eval_model(map, vec3(0.7, 0.0, -1.0)); }) == ErrorKind::Evaluation);

  std::vector<std::string> warnings;
  eval_model(map, vec3(1.0, -2.0, -1.0), &warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("parameter-free maps") {
  const ParamMap map = parse_model(R"j({"n": 1, "m": 1, "lambda": 0, "kappa": 0,
    "parametrized": {"params": [], "domain": [], "B": {"0": [["1"]]}, "A": {"0": [["1"]]}}})j");
  CHECK(map.params.empty());
  const Model a = eval_model(map, Vector()), b = eval_model(map, Vector());
  CHECK(max_abs_difference(a.B, b.B) == 0.0);
  CHECK(a.B.coeff(0)(0, 0) == 1.0);
}

TEST_CASE("malformed parametrized files") {
  CHECK(error_kind([] {
          parse_model(R"j({"n": 1, "m": 1, "lambda": 0, "kappa": 0,
            "parametrized": {"params": ["t"], "domain": [[0, 1]], "B": {"0": [["t + * 2"]]}, "A": {"0": [["1"]]}}})j");
        }) == ErrorKind::Parse);
  CHECK(error_kind([] {
          parse_model(R"j({"n": 1, "m": 1, "lambda": 0, "kappa": 0,
            "parametrized": {"params": ["t"], "domain": [[0, 1]], "B": {"0": [["s"]]}, "A": {"0": [["1"]]}}})j");
        }) == ErrorKind::Parse);
  CHECK(error_kind([] {
          parse_model(R"j({"n": 1, "m": 1, "lambda": 0, "kappa": 0,
            "parametrized": {"params": ["t"], "domain": [[0, 1]], "B": {"0": [["1", "2"]]}, "A": {"0": [["1"]]}}})j");
        }) == ErrorKind::ShapeMismatch);
  CHECK(error_kind([] {
          parse_model(R"j({"n": 1, "m": 1, "lambda": 0, "kappa": 0,
            "parametrized": {"params": ["t"], "domain": [[0, 1]], "B": {"1": [["1"]]}, "A": {"0": [["1"]]}}})j");
        }) == ErrorKind::LagBoundMismatch);
}

TEST_CASE("coefficient names follow the vec ordering") {
  const auto names = coefficient_names(2, 1, 0, 0);
  CHECK(names == std::vector<std::string>{"B[0][1][1]", "B[0][2][1]", "B[0][1][2]", "B[0][2][2]", "A[0][1][1]",
                                          "A[0][2][1]"});
  CHECK(coefficient_names(2, 1, 0, 0, 1) == std::vector<std::string>{"B[0][2][1]", "B[0][2][2]", "A[0][2][1]"});
}

TEST_CASE("three-parameter Hansen-Sargent is rank deficient at every sample") {
  const GenericReport rep = generic_ident(parse_model(kHansenSargent), hs_restriction(false));
  CHECK(rep.verdict == GenericVerdict::EvidenceNotIdentified);
  CHECK(rep.samples_valid >= 16);
  CHECK_FALSE(rep.full_rank_found);
  CHECK(rep.deficient_count + rep.borderline_count == rep.samples_valid);
}

TEST_CASE("two-parameter Hansen-Sargent has full-rank witnesses") {
  const ParamMap map = parse_model(kHansenSargent2);
  const AffineRestriction r = hs_restriction(true);
  const GenericReport rep = generic_ident(map, r);
  CHECK(rep.verdict == GenericVerdict::GenericallyIdentified);
  REQUIRE(rep.witness.has_value());
  CHECK(rep.witness->report->identified);
  for (const auto& theta : {vec2(-2.0, -1.0), vec2(1.0, -5.0)}) {
    const PointResult p = evaluate_point(map, r, theta);
    REQUIRE(p.valid);
    CHECK(p.report->identified);
  }
}

TEST_CASE("sampling is deterministic and thread-count independent") {
  const ParamMap map = parse_model(kHansenSargent);
  SamplerConfig one{32, 5, 16, 1}, many{32, 5, 16, 4};
  const GenericReport a = generic_ident(map, hs_restriction(false), one);
  const GenericReport b = generic_ident(map, hs_restriction(false), one);
  const GenericReport c = generic_ident(map, hs_restriction(false), many);
  CHECK(a.samples_valid == b.samples_valid);
  CHECK(a.samples_valid == c.samples_valid);
  CHECK(a.deficient_count == c.deficient_count);
  CHECK(a.verdict == c.verdict);

  const GenericReport w1 = generic_ident(parse_model(kHansenSargent2), hs_restriction(true), {64, 9, 16, 1});
  const GenericReport w4 = generic_ident(parse_model(kHansenSargent2), hs_restriction(true), {64, 9, 16, 4});
  REQUIRE(w1.witness.has_value());
  REQUIRE(w4.witness.has_value());
  CHECK(w1.witness->theta == w4.witness->theta);
  CHECK(w1.samples_drawn == w4.samples_drawn);
}

TEST_CASE("full pinning finds a witness on the first valid draw") {
  const ParamMap map = parse_model(R"j({"n": 1, "m": 1, "lambda": 0, "kappa": 0,
    "parametrized": {"params": ["b", "a"], "domain": [[1, 2], [1, 2]], "B": {"0": [["b"]]}, "A": {"0": [["a"]]}}})j");
  // B_0 = 1.5, A_0 = 1.2 pinned; the draws never satisfy this, which only
  // adds a warning. Full pinning is full rank everywhere.
  AffineRestriction r{Matrix::Identity(2, 2), vec2(1.5, 1.2), std::nullopt};
  const GenericReport rep = generic_ident(map, r);
  CHECK(rep.verdict == GenericVerdict::GenericallyIdentified);
  CHECK(rep.samples_drawn == 1);
}

TEST_CASE("no valid samples is inconclusive") {
  // B = 1 - 2z has its zero inside the disk for every theta.
  const ParamMap map = parse_model(R"j({"n": 1, "m": 1, "lambda": 0, "kappa": 1,
    "parametrized": {"params": ["a"], "domain": [[1, 2]], "B": {"0": [["1"]], "1": [["-2"]]}, "A": {"0": [["a"]]}}})j");
  AffineRestriction r{Matrix::Identity(1, 4), Vector::Ones(1), std::nullopt};
  const GenericReport rep = generic_ident(map, r, {8, 1, 4, 1});
  CHECK(rep.verdict == GenericVerdict::Inconclusive);
  CHECK(rep.samples_valid == 0);
}

TEST_CASE("finite-difference Jacobian") {
  const auto square = [](const Vector& x) { return Vector::Constant(1, x(0) * x(0)); };
  CHECK(std::abs(fd_jacobian(square, Vector::Constant(1, 3.0))(0, 0) - 6.0) < 1e-6);

  std::mt19937_64 rng(137);
  const Matrix R = testing::random_matrix(rng, 3, 4);
  const auto linear = [&](const Vector& x) -> Vector { return R * x; };
  CHECK((fd_jacobian(linear, testing::random_matrix(rng, 4, 1)) - R).cwiseAbs().maxCoeff() < 1e-9);

  const auto failing = [](const Vector& x) -> Vector {
    if (x(0) > 1.0) throw Error(ErrorKind::Evaluation, "outside");
    return x;
  };
  CHECK(error_kind([&] { fd_jacobian(failing, Vector::Constant(1, 1.0)); }) == ErrorKind::Jacobian);
}

TEST_CASE("finite-difference gradient of a Hansen-Sargent impulse response") {
  // C_1 = -1 / (t2 rho2^2), rho2 = (s + sqrt(s^2 - 4 t1)) / 2, s = t3/t2 + 1 + t1.
  const double t1 = 0.8, t2 = -2.0, t3 = -1.5;
  const double s = t3 / t2 + 1.0 + t1, d = std::sqrt(s * s - 4.0 * t1), rho = (s + d) / 2.0;
  const double ds[3] = {1.0, -t3 / (t2 * t2), 1.0 / t2};
  const double dt1_direct[3] = {1.0, 0.0, 0.0};
  Vector analytic(3);
  for (int k = 0; k < 3; ++k) {
    const double drho = 0.5 * (ds[k] + (s * ds[k] - 2.0 * dt1_direct[k]) / d);
    const double dt2 = k == 1 ? 1.0 : 0.0;
    analytic(k) = dt2 / (t2 * t2 * rho * rho) + 2.0 * drho / (t2 * rho * rho * rho);
  }
  const auto c1 = [](const Vector& th) {
    return Vector::Constant(1, solve_model(testing::hansen_sargent(th(0), th(1), th(2))).transfer[1](0, 0));
  };
  CHECK((fd_jacobian(c1, vec3(t1, t2, t3)).row(0).transpose() - analytic).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("affine restrictions through the nonlinear path") {
  std::mt19937_64 rng(139);
  int disagreements = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 2, kappa = trial % 2, lambda = (trial / 2) % 2;
    const auto rm = testing::random_valid_model(rng, n, n, kappa, lambda);
    const int width = static_cast<int>(restriction_width(n, n, kappa, lambda, false));
    std::vector<int> coords(static_cast<std::size_t>(width));
    std::iota(coords.begin(), coords.end(), 0);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(static_cast<std::size_t>(1 + trial % width));
    coords.push_back(coord_index(n, n, kappa, lambda, true, 0, 0, 0));
    const AffineRestriction r = pin_coordinates(rm.model, coords);
    const IdentSystem sys = build_ident_system(solve_model(rm.model));
    const RankReport affine = ident_test_affine(sys, r, rm.model);
    const NonlinearRestriction nl = affine_as_nonlinear(r);
    const LocalReport local = local_ident(rm.model, nl);
    CHECK((local.jacobian - r.R).cwiseAbs().maxCoeff() < 1e-6);
    disagreements += affine.identified != (local.verdict == LocalVerdict::LocallyIdentified);
  }
  CHECK(disagreements == 0);
}

TEST_CASE("quadratic restriction at a regular-looking point carries the caveat") {
  const Model sem(testing::scalar(0, {1.0}), testing::scalar(0, {1.0}), 0, 0);
  const NonlinearRestriction r = compile_nonlinear({"(A[0][1][1] - 1)^2"}, 1, 1, 0, 0);
  const LocalReport rep = local_ident(sem, r);
  CHECK_FALSE(rep.rank.identified);
  CHECK(rep.verdict != LocalVerdict::LocallyIdentified);
  bool caveat = false;
  for (const auto& note : rep.notes) caveat = caveat || note.find("regularity") != std::string::npos;
  CHECK(caveat);
}

TEST_CASE("shifted quadratic pinning of every coordinate is locally identified") {
  std::mt19937_64 rng(149);
  const auto rm = testing::random_valid_model(rng, 1, 1, 1, 1);
  const Vector x0 = restriction_coordinates(rm.model);
  const auto names = coefficient_names(1, 1, 1, 1);
  std::vector<std::string> exprs;
  for (std::size_t k = 0; k < names.size(); ++k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x0(static_cast<Eigen::Index>(k)));
    exprs.push_back("(" + names[k] + " - " + buf + ") + (" + names[k] + " - " + buf + ")^2");
  }
  const LocalReport rep = local_ident(rm.model, compile_nonlinear(exprs, 1, 1, 1, 1));
  CHECK(rep.verdict == LocalVerdict::LocallyIdentified);
}

TEST_CASE("restriction must hold at the point") {
  const Model sem(testing::scalar(0, {1.0}), testing::scalar(0, {2.0}), 0, 0);
  const NonlinearRestriction r = compile_nonlinear({"A[0][1][1] - 1"}, 1, 1, 0, 0);
  CHECK(error_kind([&] { local_ident(sem, r); }) == ErrorKind::InvalidRestriction);
}

TEST_CASE("restriction files compile pins and dense blocks") {
  const auto pins = parse_restriction_file(nlohmann::json::parse(R"j({"pins": [
      {"block": "B", "lag": -1, "row": 1, "col": 1, "value": 0.5},
      {"block": "A", "lag": 0, "row": 1, "col": 1, "value": 1}]})j"),
                                           1, 1, 1, 1);
  REQUIRE(pins.affine.has_value());
  CHECK(pins.affine->R.cols() == 5);
  CHECK(pins.affine->R(0, 0) == 1.0);
  CHECK(pins.affine->R(1, 3) == 1.0);
  CHECK(pins.affine->u == vec2(0.5, 1.0));

  const auto eq = parse_restriction_file(nlohmann::json::parse(R"j({"equation": 2, "R": [[1, 0, 0]], "u": [1]})j"),
                                         2, 1, 0, 0);
  REQUIRE(eq.affine.has_value());
  CHECK(eq.equation == 1);
  CHECK(eq.affine->equation == 1);

  CHECK(error_kind([] {
          parse_restriction_file(nlohmann::json::parse(R"j({"R": [[1, 0]], "u": [1]})j"), 1, 1, 1, 1);
        }) == ErrorKind::ShapeMismatch);
}
