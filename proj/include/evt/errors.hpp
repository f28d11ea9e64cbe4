#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evt {

/// A model, generator or stdf id that does not match any known pattern.
/// The message lists the accepted ids.
class UnknownIdError : public std::invalid_argument {
 public:
  UnknownIdError(const std::string& kind, const std::string& id,
                 const std::vector<std::string>& available);
};

}  // namespace evt
