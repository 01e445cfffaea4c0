#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include <renormlab/domain_expr.hpp>
#include <renormlab/group_targets.hpp>
#include <renormlab/harmonic_expr.hpp>
#include <renormlab/holo_expr.hpp>

namespace rltool {

/// Malformed or schema-violating configuration, located in the config file.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// A mapping node whose keys are checked off as they are read; `finish`
/// rejects whatever was not read.
class Section {
public:
  Section(YAML::Node node, std::string path);

  bool has(const std::string& key) const;
  Section section(const std::string& key);
  std::optional<Section> optional_section(const std::string& key);
  YAML::Node raw(const std::string& key);

  std::string string(const std::string& key);
  std::string string_or(const std::string& key, const std::string& fallback);
  double number_or(const std::string& key, double fallback);
  double number(const std::string& key);
  long integer_or(const std::string& key, long fallback);
  bool boolean_or(const std::string& key, bool fallback);
  std::vector<double> numbers(const std::string& key);
  std::vector<double> numbers_or(const std::string& key, std::vector<double> fallback);
  std::vector<std::string> strings(const std::string& key);

  renormlab::HarmonicExpr harmonic(const std::string& key);
  std::vector<renormlab::HarmonicExpr> harmonics(const std::string& key);
  renormlab::HoloExpr holomorphic(const std::string& key);
  renormlab::DomainExpr domain(const std::string& key);
  renormlab::MatrixHoloMap matrix(const std::string& key);

  void finish() const;
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
  const std::string& path() const { return path_; }

private:
  YAML::Node at(const std::string& key);
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

/// Loads a YAML mapping from disk.
Section load_config(const std::string& file);

}  // namespace rltool
