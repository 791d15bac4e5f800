#include "trustsched/config_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace trustsched {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& msg) {
  throw ModelError(ErrorCode::ParseError, "ParseError: " + msg);
}

json parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    parse_fail(e.what());
  }
  if (!doc.is_object()) parse_fail("config must be a JSON object");
  return doc;
}

template <typename T>
T field(const json& doc, const char* key) {
  if (!doc.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_fail(std::string("field '") + key + "': " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SystemConfig parse_config(std::string_view json_text) {
  const json doc = parse_document(json_text);
  RawConfig raw;
  raw.lambda = field<double>(doc, "lambda");
  raw.sizes = field<std::vector<double>>(doc, "sizes");
  if (doc.contains("matrix")) {
    raw.matrix = field<std::vector<std::vector<double>>>(doc, "matrix");
    return validate_config(raw);
  }
  if (!doc.contains("size_probs")) parse_fail("need either 'matrix' or 'size_probs'");
  const auto probs = field<std::vector<double>>(doc, "size_probs");
  const double x = doc.contains("error_rate") ? field<double>(doc, "error_rate") : 0.0;
  auto grid = SizeGrid::create(raw.sizes);
  auto matrix = uniform_error_matrix(probs, grid, x);
  if (!(raw.lambda > 0.0)) throw ModelError(ErrorCode::BadLambda, "BadLambda: arrival rate must be positive");
  return SystemConfig(raw.lambda, std::move(grid), std::move(matrix));
}

SystemConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

SizeFamily parse_family(std::string_view json_text) {
  const json doc = parse_document(json_text);
  if (doc.contains("matrix")) {
    const SystemConfig config = parse_config(json_text);
    return SizeFamily{config.grid(), config.matrix().size_marginals(), config.lambda()};
  }
  const auto lambda = field<double>(doc, "lambda");
  auto grid = SizeGrid::create(field<std::vector<double>>(doc, "sizes"));
  const auto probs = field<std::vector<double>>(doc, "size_probs");
  SizeFamily family{std::move(grid), probs, lambda};
  // Validates the distribution and the load.
  (void)family.at(0.0);
  return family;
}

SizeFamily load_family(const std::string& path) { return parse_family(read_file(path)); }

}  // namespace trustsched
