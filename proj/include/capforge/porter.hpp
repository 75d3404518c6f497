#pragma once

#include <string>

namespace capforge {

// Porter (1980) suffix-stripping stemmer, steps 1a through 5b.
std::string porter_stem(const std::string& word);

} // namespace capforge
