#pragma once

#include <string>
#include <string_view>

namespace sentimix {

// Porter stemming algorithm (1980), steps 1a through 5b, classical reference
// behavior: step 2 maps bli->ble and logi->log, and words of length <= 2 are
// returned unchanged. Input must be a lowercase ASCII word.
std::string porter_stem(std::string_view word);

}  // namespace sentimix
