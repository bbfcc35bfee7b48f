#include "json_config.hpp"

#include <algorithm>
#include <iterator>

#include "json.hpp"
#include "recdiv/error.hpp"

namespace recdiv::cli {
namespace {

using nlohmann::json;

std::string option_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string scalar_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number()) return value.dump();
  throw DataError("config values must be strings, numbers, booleans or arrays of those");
}

void collect(const json& object, const std::vector<std::string>& parents,
             std::vector<CLI::ConfigItem>& items) {
  for (const auto& [key, value] : object.items()) {
    if (value.is_null()) continue;
    if (value.is_object()) throw DataError("config option '" + key + "' cannot be an object");
    CLI::ConfigItem item;
    item.parents = parents;
    item.name = option_name(key);
    if (value.is_array()) {
      for (const auto& v : value) item.inputs.push_back(scalar_text(v));
    } else {
      item.inputs.push_back(scalar_text(value));
    }
    items.push_back(std::move(item));
  }
}

}  // namespace

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool,
                                  std::string) const {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const std::string& name = opt->get_lnames().front();
    std::vector<std::string> values = opt->results();
    if (values.empty() && default_also && !opt->get_default_str().empty()) {
      values.push_back(opt->get_default_str());
    }
    if (values.empty()) continue;
    if (values.size() == 1) {
      j[name] = values.front();
    } else {
      j[name] = values;
    }
  }
  return j.dump(2) + "\n";
}

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
  const std::string text(std::istreambuf_iterator<char>(input), {});
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("config must be a JSON object");
  std::vector<CLI::ConfigItem> items;
  std::vector<std::string> parents;
  if (!active_.empty()) parents.push_back(active_);
  json flat = json::object();
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      if (!subcommands_.count(key)) {
        throw DataError("config section '" + key + "' is not a subcommand");
      }
      // One file may carry sections for several subcommands.
      if (key == active_) collect(value, parents, items);
    } else {
      flat[key] = value;
    }
  }
  collect(flat, parents, items);
  return items;
}

}  // namespace recdiv::cli
