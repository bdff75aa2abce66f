#pragma once

#include <dnsqd/experiment.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dnsqd {

// Flat "section.key = value" configuration. "[section]" headers prefix the keys that
// follow them; '#' starts a comment.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(std::string_view text);

/// Every key understood by apply_config, in the order render_config writes them.
const std::vector<std::string>& config_keys();

/// Applies key/value pairs on top of `config`. Unknown keys and malformed values throw
/// ConfigError.
void apply_config(ExperimentConfig& config, const ConfigMap& values);
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Current value of a key, formatted the way render_config writes it.
std::string config_value(const ExperimentConfig& config, const std::string& key);

/// Every key with its resolved value, one "key = value" line each.
std::string render_config(const ExperimentConfig& config);

/// Text of a file; throws ConfigError when unreadable.
std::string read_text_file(const std::string& path);

/// Shortest representation that reads back to the same double.
std::string format_double(double value);

} // namespace dnsqd
