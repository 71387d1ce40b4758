#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ratex/param_map.hpp"

namespace ratex {

/// Either a numeric model or a parametrized map, never both.
struct ModelFile {
  std::optional<Model> numeric;
  std::optional<ParamMap> parametrized;
};

ModelFile parse_model_file(const nlohmann::json& doc);
ModelFile load_model_file(const std::string& path);

/// Parametrized model from JSON text; the document must use the
/// "parametrized" form.
ParamMap parse_model(const std::string& text);

/// Numeric model, evaluating a parametrized file at theta when given.
Model model_at(const ModelFile& file, const std::optional<Vector>& theta = std::nullopt,
               std::vector<std::string>* warnings = nullptr);

struct RestrictionFile {
  std::optional<AffineRestriction> affine;
  std::vector<std::string> nonlinear;
  /// 0-based equation for equation-wise tests.
  std::optional<int> equation;
};

/// Pins and dense blocks are compiled against the given dimensions.
RestrictionFile parse_restriction_file(const nlohmann::json& doc, int n, int m, int kappa, int lambda);
RestrictionFile load_restriction_file(const std::string& path, int n, int m, int kappa, int lambda);

nlohmann::json read_json_file(const std::string& path);

}  // namespace ratex
