#include "config.hpp"

#include <fstream>
#include <sstream>

#include <renormlab/errors.hpp>
#include <renormlab/library.hpp>

namespace rltool {

ConfigError::ConfigError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(what), line_(line), column_(column) {}

namespace {

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& message) {
  const YAML::Mark m = n.Mark();
  throw ConfigError(message, m.line < 0 ? 0 : static_cast<std::size_t>(m.line + 1),
                    m.column < 0 ? 0 : static_cast<std::size_t>(m.column + 1));
}

// Parses text embedded in a scalar node; inner errors are moved to file coordinates.
template <class F>
auto parse_embedded(const YAML::Node& n, const std::string& what, F&& parse) {
  try {
    return parse(n.as<std::string>());
  } catch (const renormlab::ParseError& e) {
    const YAML::Mark m = n.Mark();
    std::size_t line = static_cast<std::size_t>(m.line + 1) + e.line() - 1;
    std::size_t col = e.line() == 1 ? static_cast<std::size_t>(m.column + 1) + e.column() - 1 : e.column();
    throw ConfigError("bad " + what + ": " + e.what(), line, col);
  } catch (const renormlab::Error& e) {
    fail_at(n, "bad " + what + ": " + e.what());
  }
}

}  // namespace

Section::Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
  if (!node_.IsMap()) fail_at(node_, (path_.empty() ? std::string("config") : path_) + " must be a mapping");
}

bool Section::has(const std::string& key) const {
  const YAML::Node& self = node_;
  return static_cast<bool>(self[key]);
}

YAML::Node Section::at(const std::string& key) {
  const YAML::Node& self = node_;
  YAML::Node n = self[key];
  if (!n) fail_at(node_, "missing key '" + (path_.empty() ? key : path_ + "." + key) + "'");
  used_.insert(key);
  return n;
}

YAML::Node Section::raw(const std::string& key) { return at(key); }

Section Section::section(const std::string& key) { return Section(at(key), path_.empty() ? key : path_ + "." + key); }

std::optional<Section> Section::optional_section(const std::string& key) {
  if (!has(key)) return std::nullopt;
  return section(key);
}

std::string Section::string(const std::string& key) {
  YAML::Node n = at(key);
  if (!n.IsScalar()) fail_at(n, "'" + key + "' must be a string");
  return n.as<std::string>();
}

std::string Section::string_or(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

double Section::number(const std::string& key) {
  YAML::Node n = at(key);
  try {
    if (!n.IsScalar()) throw YAML::Exception(n.Mark(), "");
    return n.as<double>();
  } catch (const YAML::Exception&) {
    fail_at(n, "'" + key + "' must be a number");
  }
}

double Section::number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

long Section::integer_or(const std::string& key, long fallback) {
  if (!has(key)) return fallback;
  YAML::Node n = at(key);
  try {
    if (!n.IsScalar()) throw YAML::Exception(n.Mark(), "");
    return n.as<long>();
  } catch (const YAML::Exception&) {
    fail_at(n, "'" + key + "' must be an integer");
  }
}

bool Section::boolean_or(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  YAML::Node n = at(key);
  try {
    if (!n.IsScalar()) throw YAML::Exception(n.Mark(), "");
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    fail_at(n, "'" + key + "' must be true or false");
  }
}

std::vector<double> Section::numbers(const std::string& key) {
  YAML::Node n = at(key);
  if (!n.IsSequence()) fail_at(n, "'" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& item : n) {
    try {
      if (!item.IsScalar()) throw YAML::Exception(item.Mark(), "");
      out.push_back(item.as<double>());
    } catch (const YAML::Exception&) {
      fail_at(item, "'" + key + "' entries must be numbers");
    }
  }
  return out;
}

std::vector<double> Section::numbers_or(const std::string& key, std::vector<double> fallback) {
  return has(key) ? numbers(key) : fallback;
}

std::vector<std::string> Section::strings(const std::string& key) {
  YAML::Node n = at(key);
  if (!n.IsSequence()) fail_at(n, "'" + key + "' must be a list");
  std::vector<std::string> out;
  for (const auto& item : n) {
    if (!item.IsScalar()) fail_at(item, "'" + key + "' entries must be strings");
    out.push_back(item.as<std::string>());
  }
  return out;
}

renormlab::HarmonicExpr Section::harmonic(const std::string& key) {
  YAML::Node n = at(key);
  if (!n.IsScalar()) fail_at(n, "'" + key + "' must be an expression or catalog name");
  if (auto e = renormlab::catalog_expression(n.as<std::string>())) return *e;
  return parse_embedded(n, "expression", [](const std::string& s) { return renormlab::HarmonicExpr::parse(s); });
}

std::vector<renormlab::HarmonicExpr> Section::harmonics(const std::string& key) {
  YAML::Node n = at(key);
  if (!n.IsSequence() || n.size() == 0) fail_at(n, "'" + key + "' must be a non-empty list of expressions");
  std::vector<renormlab::HarmonicExpr> out;
  for (const auto& item : n) {
    if (!item.IsScalar()) fail_at(item, "'" + key + "' entries must be expressions or catalog names");
    if (auto e = renormlab::catalog_expression(item.as<std::string>())) {
      out.push_back(*e);
      continue;
    }
    out.push_back(
        parse_embedded(item, "expression", [](const std::string& s) { return renormlab::HarmonicExpr::parse(s); }));
  }
  return out;
}

renormlab::HoloExpr Section::holomorphic(const std::string& key) {
  YAML::Node n = at(key);
  if (!n.IsScalar()) fail_at(n, "'" + key + "' must be a holomorphic expression");
  return parse_embedded(n, "holomorphic expression", [](const std::string& s) { return renormlab::HoloExpr::parse(s); });
}

renormlab::DomainExpr Section::domain(const std::string& key) {
  YAML::Node n = at(key);
  if (!n.IsScalar()) fail_at(n, "'" + key + "' must be a domain or catalog name");
  if (auto d = renormlab::catalog_domain(n.as<std::string>())) return *d;
  return parse_embedded(n, "domain", [](const std::string& s) { return renormlab::DomainExpr::parse(s); });
}

renormlab::MatrixHoloMap Section::matrix(const std::string& key) {
  YAML::Node n = at(key);
  if (!n.IsScalar()) fail_at(n, "'" + key + "' must be a matrix expression");
  return parse_embedded(n, "matrix", [](const std::string& s) { return renormlab::MatrixHoloMap::parse(s); });
}

void Section::finish() const {
  for (const auto& kv : node_) {
    const std::string k = kv.first.as<std::string>();
    if (!used_.count(k)) fail_at(kv.first, "unknown key '" + (path_.empty() ? k : path_ + "." + k) + "'");
  }
}

void Section::fail(const std::string& key, const std::string& message) const {
  const YAML::Node& self = node_;
  fail_at(has(key) ? self[key] : self, message);
}

Section load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config '" + file + "'", 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  YAML::Node root;
  try {
    root = YAML::Load(ss.str());
  } catch (const YAML::Exception& e) {
    throw ConfigError(e.msg, static_cast<std::size_t>(e.mark.line + 1), static_cast<std::size_t>(e.mark.column + 1));
  }
  if (!root || root.IsNull()) throw ConfigError("config is empty", 1, 1);
  return Section(root, "");
}

}  // namespace rltool
