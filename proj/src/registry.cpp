#include "idparse.hpp"

#include <charconv>
#include <sstream>

#include "evt/errors.hpp"

namespace evt {

namespace {
std::string format_unknown(const std::string& kind, const std::string& id,
                           const std::vector<std::string>& available) {
  std::ostringstream os;
  os << "unknown " << kind << " id '" << id << "'; available:";
  for (const auto& a : available) os << "\n  " << a;
  return os.str();
}
}  // namespace

UnknownIdError::UnknownIdError(const std::string& kind, const std::string& id,
                               const std::vector<std::string>& available)
    : std::invalid_argument(format_unknown(kind, id, available)) {}

namespace detail {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_params(const std::vector<std::string>& tokens, std::map<std::string, double>& out) {
  for (const auto& tok : tokens) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) return false;
    double v = 0.0;
    if (!parse_double(tok.substr(eq + 1), v)) return false;
    if (!out.emplace(tok.substr(0, eq), v).second) return false;
  }
  return true;
}

}  // namespace detail
}  // namespace evt
