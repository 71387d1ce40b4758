#include "ratex/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ratex/errors.hpp"

namespace ratex {

using nlohmann::json;

namespace {

int get_int(const json& doc, const char* key, int min_value) {
  if (!doc.contains(key) || !doc[key].is_number_integer()) {
    throw Error(ErrorKind::Io, std::string("model file needs integer field '") + key + "'");
  }
  const int v = doc[key].get<int>();
  if (v < min_value) throw Error(ErrorKind::Io, std::string("field '") + key + "' is out of range");
  return v;
}

int parse_lag(const std::string& key) {
  std::size_t used = 0;
  int lag = 0;
  try {
    lag = std::stoi(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || key.empty()) throw Error(ErrorKind::Io, "lag key '" + key + "' is not an integer");
  return lag;
}

Matrix numeric_matrix(const json& rows_json, int rows, int cols, const std::string& what) {
  if (!rows_json.is_array() || static_cast<int>(rows_json.size()) != rows) {
    throw Error(ErrorKind::ShapeMismatch, what + " must have " + std::to_string(rows) + " rows");
  }
  Matrix out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = rows_json[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw Error(ErrorKind::ShapeMismatch, what + " row " + std::to_string(i + 1) + " must have " +
                                                std::to_string(cols) + " entries");
    }
    for (int j = 0; j < cols; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw Error(ErrorKind::Io, what + " has a non-numeric entry");
      out(i, j) = v.get<double>();
      if (!std::isfinite(out(i, j))) throw Error(ErrorKind::NonFinite, what + " has a non-finite entry");
    }
  }
  return out;
}

LaurentMatrix numeric_block(const json& lags, int rows, int cols, int lo, int hi, const char* name) {
  if (!lags.is_object()) throw Error(ErrorKind::Io, std::string(name) + " must map lag strings to matrices");
  std::vector<Matrix> coeffs(static_cast<std::size_t>(hi - lo + 1), Matrix::Zero(rows, cols));
  for (const auto& [key, value] : lags.items()) {
    const int lag = parse_lag(key);
    if (lag < lo || lag > hi) {
      throw Error(ErrorKind::LagBoundMismatch, std::string(name) + " lag " + key + " outside " + std::to_string(lo) +
                                                   ".." + std::to_string(hi));
    }
    coeffs[static_cast<std::size_t>(lag - lo)] = numeric_matrix(value, rows, cols, std::string(name) + " lag " + key);
  }
  return LaurentMatrix(lo, std::move(coeffs));
}

std::map<int, std::vector<std::vector<ExprPtr>>> expression_block(const json& lags, int rows, int cols, int lo, int hi,
                                                                  const char* name,
                                                                  const std::vector<std::string>& params) {
  std::map<int, std::vector<std::vector<ExprPtr>>> out;
  if (lags.is_null()) return out;
  if (!lags.is_object()) throw Error(ErrorKind::Io, std::string(name) + " must map lag strings to matrices");
  for (const auto& [key, value] : lags.items()) {
    const int lag = parse_lag(key);
    if (lag < lo || lag > hi) {
      throw Error(ErrorKind::LagBoundMismatch, std::string(name) + " lag " + key + " outside " + std::to_string(lo) +
                                                   ".." + std::to_string(hi));
    }
    const std::string what = std::string(name) + " lag " + key;
    if (!value.is_array() || static_cast<int>(value.size()) != rows) {
      throw Error(ErrorKind::ShapeMismatch, what + " must have " + std::to_string(rows) + " rows");
    }
    auto& grid = out[lag];
    grid.assign(static_cast<std::size_t>(rows), std::vector<ExprPtr>(static_cast<std::size_t>(cols)));
    for (int i = 0; i < rows; ++i) {
      const json& row = value[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != cols) {
        throw Error(ErrorKind::ShapeMismatch, what + " row " + std::to_string(i + 1) + " must have " +
                                                  std::to_string(cols) + " entries");
      }
      for (int j = 0; j < cols; ++j) {
        const json& cell = row[static_cast<std::size_t>(j)];
        const std::string text = cell.is_string() ? cell.get<std::string>() : cell.is_number() ? cell.dump() : "";
        if (text.empty()) throw Error(ErrorKind::Io, what + " entries must be strings or numbers");
        try {
          grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = parse_expression(text, params);
        } catch (const ParseError& e) {
          throw ParseError(what + " entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") \"" + text +
                               "\": " + e.what(),
                           e.line(), e.column());
        }
      }
    }
  }
  return out;
}

ParamMap parametrized_block(const json& spec, int n, int m, int lambda, int kappa) {
  ParamMap map;
  map.n = n;
  map.m = m;
  map.lambda = lambda;
  map.kappa = kappa;
  if (!spec.is_object()) throw Error(ErrorKind::Io, "'parametrized' must be an object");
  if (spec.contains("params")) {
    for (const auto& p : spec["params"]) {
      if (!p.is_string()) throw Error(ErrorKind::Io, "parameter names must be strings");
      map.params.push_back(p.get<std::string>());
    }
  }
  const json domain = spec.value("domain", json::array());
  if (!domain.is_array() || domain.size() != map.params.size()) {
    throw Error(ErrorKind::Io, "'domain' needs one [lo, hi] pair per parameter");
  }
  for (const auto& box : domain) {
    if (!box.is_array() || box.size() != 2 || !box[0].is_number() || !box[1].is_number()) {
      throw Error(ErrorKind::Io, "domain entries must be [lo, hi] pairs");
    }
    const double lo = box[0].get<double>(), hi = box[1].get<double>();
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw Error(ErrorKind::Io, "domain box must be finite");
    map.domain.emplace_back(lo, hi);
  }
  map.B = expression_block(spec.value("B", json()), n, n, -lambda, kappa, "B", map.params);
  map.A = expression_block(spec.value("A", json()), n, m, 0, kappa, "A", map.params);
  return map;
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Io, path + ": " + e.what());
  }
}

ModelFile parse_model_file(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Io, "model file must be a JSON object");
  const int n = get_int(doc, "n", 1);
  const int m = get_int(doc, "m", 1);
  const int lambda = get_int(doc, "lambda", 0);
  const int kappa = get_int(doc, "kappa", 0);
  const bool numeric = doc.contains("B") || doc.contains("A");
  const bool param = doc.contains("parametrized");
  if (numeric == param) throw Error(ErrorKind::Io, "model file needs exactly one of numeric B/A or 'parametrized'");

  ModelFile f;
  if (param) {
    f.parametrized = parametrized_block(doc["parametrized"], n, m, lambda, kappa);
    return f;
  }
  if (!doc.contains("B") || !doc.contains("A")) throw Error(ErrorKind::Io, "numeric model needs both B and A");
  LaurentMatrix B = numeric_block(doc["B"], n, n, -lambda, kappa, "B");
  LaurentMatrix A = numeric_block(doc["A"], n, m, 0, kappa, "A");
  f.numeric = Model(std::move(B), std::move(A), lambda, kappa);
  return f;
}

ModelFile load_model_file(const std::string& path) { return parse_model_file(read_json_file(path)); }

ParamMap parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Io, e.what());
  }
  ModelFile f = parse_model_file(doc);
  if (!f.parametrized) throw Error(ErrorKind::Io, "model is not parametrized");
  return *f.parametrized;
}

Model model_at(const ModelFile& file, const std::optional<Vector>& theta, std::vector<std::string>* warnings) {
  if (file.numeric) return *file.numeric;
  if (!theta) {
    if (!file.parametrized->params.empty()) {
      throw Error(ErrorKind::InvalidArgument, "parametrized model needs a parameter value (--theta)");
    }
    return eval_model(*file.parametrized, Vector(), warnings);
  }
  return eval_model(*file.parametrized, *theta, warnings);
}

RestrictionFile parse_restriction_file(const json& doc, int n, int m, int kappa, int lambda) {
  if (!doc.is_object()) throw Error(ErrorKind::InvalidRestriction, "restriction file must be a JSON object");
  RestrictionFile f;
  if (doc.contains("equation")) {
    if (!doc["equation"].is_number_integer()) throw Error(ErrorKind::InvalidRestriction, "'equation' must be an integer");
    const int i = doc["equation"].get<int>();
    if (i < 1 || i > n) throw Error(ErrorKind::InvalidRestriction, "'equation' must lie in 1.." + std::to_string(n));
    f.equation = i - 1;
  }
  const int w = kappa + lambda + 1;
  const Eigen::Index width = restriction_width(n, m, kappa, lambda, f.equation.has_value());

  std::vector<Vector> rows;
  std::vector<double> rhs;
  if (doc.contains("pins")) {
    for (const auto& pin : doc["pins"]) {
      const std::string block = pin.value("block", "");
      if (block != "B" && block != "A") throw Error(ErrorKind::InvalidRestriction, "pin block must be \"B\" or \"A\"");
      if (!pin.contains("lag") || !pin.contains("row") || !pin.contains("col") || !pin.contains("value")) {
        throw Error(ErrorKind::InvalidRestriction, "pin needs lag, row, col and value");
      }
      const int lag = pin["lag"].get<int>();
      const int row = pin["row"].get<int>() - 1;
      const int col = pin["col"].get<int>() - 1;
      const int cols = block == "B" ? n : m;
      const int lo = block == "B" ? -lambda : 0;
      if (lag < lo || lag > kappa || row < 0 || row >= n || col < 0 || col >= cols) {
        throw Error(ErrorKind::InvalidRestriction, "pin " + block + "[" + std::to_string(lag) + "][" +
                                                       std::to_string(row + 1) + "][" + std::to_string(col + 1) +
                                                       "] is outside the model");
      }
      Eigen::Index big_col = block == "B" ? (lag + lambda) * n + col : n * w + lag * m + col;
      Eigen::Index index;
      if (f.equation) {
        if (row != *f.equation) throw Error(ErrorKind::InvalidRestriction, "pin row differs from 'equation'");
        index = big_col;
      } else {
        index = big_col * n + row;
      }
      Vector r = Vector::Zero(width);
      r(index) = 1.0;
      rows.push_back(std::move(r));
      rhs.push_back(pin["value"].get<double>());
    }
  }
  if (doc.contains("R")) {
    const json& R = doc["R"];
    if (!R.is_array()) throw Error(ErrorKind::InvalidRestriction, "'R' must be an array of rows");
    const Matrix dense = numeric_matrix(R, static_cast<int>(R.size()), static_cast<int>(width), "R");
    if (!doc.contains("u") || !doc["u"].is_array() || doc["u"].size() != R.size()) {
      throw Error(ErrorKind::InvalidRestriction, "'u' must have one entry per row of R");
    }
    for (Eigen::Index i = 0; i < dense.rows(); ++i) {
      rows.push_back(dense.row(i).transpose());
      rhs.push_back(doc["u"][static_cast<std::size_t>(i)].get<double>());
    }
  }
  if (!rows.empty()) {
    AffineRestriction a;
    a.R.resize(static_cast<Eigen::Index>(rows.size()), width);
    a.u.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      a.R.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
      a.u(static_cast<Eigen::Index>(i)) = rhs[i];
    }
    a.equation = f.equation;
    f.affine = std::move(a);
  }
  if (doc.contains("nonlinear")) {
    for (const auto& s : doc["nonlinear"]) {
      if (!s.is_string()) throw Error(ErrorKind::InvalidRestriction, "nonlinear restrictions must be strings");
      f.nonlinear.push_back(s.get<std::string>());
    }
  }
  if (!f.affine && f.nonlinear.empty()) throw Error(ErrorKind::InvalidRestriction, "restriction file is empty");
  return f;
}

RestrictionFile load_restriction_file(const std::string& path, int n, int m, int kappa, int lambda) {
  return parse_restriction_file(read_json_file(path), n, m, kappa, lambda);
}

}  // namespace ratex
