#pragma once

#include <istream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace recdiv::cli {

// Reads a JSON object as CLI11 config. Scalar and array members become
// option values of the active subcommand; an object member named after a
// subcommand scopes its members to that subcommand. Underscores in keys
// are accepted for dashes.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::set<std::string> subcommands)
      : subcommands_(std::move(subcommands)) {}

  void set_active(std::string name) { active_ = std::move(name); }

  std::string to_config(const CLI::App* app, bool default_also, bool write_description,
                        std::string prefix) const override;
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override;

 private:
  std::set<std::string> subcommands_;
  std::string active_;
};

}  // namespace recdiv::cli
