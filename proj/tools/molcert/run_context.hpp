#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace molcert::cli {

/// Missing or malformed command-line input (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Subcommands that take a config; `replay` is handled separately.
const std::vector<std::string>& command_names();

/// Built-in settings of a subcommand.
nlohmann::json default_config(const std::string& command);

/// Makes the path-valued keys of `config` absolute against `base`.
void absolutize_paths(nlohmann::json& config, const std::filesystem::path& base);

/// defaults <- config file (or the "config" block of a sidecar) <- overrides.
nlohmann::json resolve_config(const std::string& command, const std::optional<std::filesystem::path>& config_file,
                              const nlohmann::json& overrides);

/// One subcommand run: typed access to the resolved config, input bookkeeping
/// and output files. The sidecar lists everything needed to repeat the run.
class RunContext {
 public:
  RunContext(std::string command, nlohmann::json config);

  const std::string& command() const { return command_; }
  const nlohmann::json& config() const { return config_; }

  std::uint64_t seed() const;
  std::size_t workers() const;

  bool has(std::string_view key) const;
  double number(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  std::string text(std::string_view key) const;
  std::vector<double> numbers(std::string_view key) const;
  std::vector<std::string> texts(std::string_view key) const;

  /// Reads a required input file; UsageError when the key is unset.
  std::string input(std::string_view key);
  /// Same for an optional input; nullopt when unset.
  std::optional<std::string> optional_input(std::string_view key);
  /// Reads one file of a path-list key.
  std::string input_from_list(std::string_view key, std::size_t index);

  void write(const std::string& name, std::string_view content);
  void result(const std::string& key, nlohmann::json value);

  /// Writes <out>/<command>.meta.json.
  void finish() const;

 private:
  const nlohmann::json& at(std::string_view key) const;
  std::string record_input(const std::string& label, const std::string& path);

  std::string command_;
  nlohmann::json config_;
  std::filesystem::path out_;
  nlohmann::json inputs_ = nlohmann::json::object();
  std::vector<std::string> outputs_;
  nlohmann::json results_ = nlohmann::json::object();
};

}  // namespace molcert::cli
