#include "fairod/dataio/schema.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>

#include "fairod/errors.hpp"

namespace fairod::dataio {

namespace {

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE) return std::nullopt;
  return v;
}

}  // namespace

std::string to_string(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

ColumnKind parse_column_kind(const std::string& name) {
  if (name == "numeric") return ColumnKind::kNumeric;
  if (name == "categorical") return ColumnKind::kCategorical;
  throw LoadError("unknown column kind '" + name + "' (expected numeric or categorical)");
}

bool LabelPredicate::matches(const std::string& cell) const {
  const auto lhs = parse_number(cell);
  const auto rhs = parse_number(value);
  if (op == "==" || op == "!=") {
    const bool equal = (lhs && rhs) ? *lhs == *rhs : cell == value;
    return op == "==" ? equal : !equal;
  }
  if (!lhs || !rhs) {
    throw LoadError("label predicate '" + column + " " + op + " " + value +
                    "' needs numeric values, got '" + cell + "'");
  }
  if (op == "<") return *lhs < *rhs;
  if (op == "<=") return *lhs <= *rhs;
  if (op == ">") return *lhs > *rhs;
  if (op == ">=") return *lhs >= *rhs;
  throw LoadError("unknown label predicate operator '" + op + "'");
}

void DatasetSchema::validate() const {
  if (sensitive.empty()) throw LoadError("schema: sensitive column is required");
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw LoadError("schema: empty feature column name");
    if (!seen.insert(f.name).second) throw LoadError("schema: duplicate feature '" + f.name + "'");
    if (f.name == sensitive) {
      throw LoadError("schema: sensitive column '" + sensitive +
                      "' listed as a feature; use include_sensitive_in_features");
    }
    if (label && f.name == label->column) {
      throw LoadError("schema: label column '" + f.name + "' listed as a feature");
    }
  }
  if (features.empty() && !include_sensitive_in_features) {
    throw LoadError("schema: no feature columns");
  }
  if (label) {
    static const std::set<std::string> ops{"==", "!=", "<", "<=", ">", ">="};
    if (label->column.empty()) throw LoadError("schema: label column name is empty");
    if (!ops.contains(label->op)) throw LoadError("schema: unknown label operator '" + label->op + "'");
  }
}

void to_json(nlohmann::json& j, const DatasetSchema& schema) {
  j = nlohmann::json::object();
  auto cols = nlohmann::json::array();
  for (const auto& f : schema.features) cols.push_back({{"name", f.name}, {"kind", to_string(f.kind)}});
  j["features"] = std::move(cols);
  j["sensitive"] = schema.sensitive;
  if (schema.label) {
    j["label"] = {{"column", schema.label->column}, {"op", schema.label->op}, {"value", schema.label->value}};
  } else {
    j["label"] = nullptr;
  }
  j["include_sensitive_in_features"] = schema.include_sensitive_in_features;
}

void from_json(const nlohmann::json& j, DatasetSchema& schema) {
  try {
    schema = DatasetSchema{};
    for (const auto& col : j.at("features")) {
      if (col.is_string()) {
        schema.features.push_back({col.get<std::string>(), ColumnKind::kNumeric});
      } else {
        schema.features.push_back({col.at("name").get<std::string>(),
                                   parse_column_kind(col.value("kind", std::string("numeric")))});
      }
    }
    schema.sensitive = j.at("sensitive").get<std::string>();
    if (j.contains("label") && !j["label"].is_null()) {
      const auto& l = j["label"];
      LabelPredicate p;
      p.column = l.at("column").get<std::string>();
      p.op = l.value("op", std::string("=="));
      const auto& v = l.value("value", nlohmann::json("1"));
      p.value = v.is_string() ? v.get<std::string>() : v.dump();
      schema.label = p;
    }
    schema.include_sensitive_in_features = j.value("include_sensitive_in_features", false);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("schema: ") + e.what());
  }
  schema.validate();
}

DatasetSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open schema '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("schema '" + path.string() + "': " + e.what());
  }
  return j.get<DatasetSchema>();
}

void save_schema(const DatasetSchema& schema, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write schema '" + path.string() + "'");
  out << nlohmann::json(schema).dump(2) << '\n';
}

}  // namespace fairod::dataio
