// Parsing of "name:key=value:key=value" model ids.
#pragma once

#include <map>
#include <string>
#include <vector>

namespace evt::detail {

std::vector<std::string> split(const std::string& s, char sep);

/// Reads "key=value" tokens into a map; returns false on a malformed token.
bool parse_params(const std::vector<std::string>& tokens, std::map<std::string, double>& out);

/// Strict double parse of the whole string.
bool parse_double(const std::string& s, double& out);

}  // namespace evt::detail
