#pragma once

#include <stdexcept>
#include <string>

namespace wtrie {

// Position or index outside the valid range of a structure.
class range_error : public std::out_of_range {
 public:
  explicit range_error(const std::string& what) : std::out_of_range(what) {}
};

// A well-formed query whose answer does not exist, e.g. select past the last
// occurrence or a lookup in an empty trie.
class not_found_error : public std::runtime_error {
 public:
  explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed encoded input: truncated codes, bad magic, inconsistent payloads.
class decode_error : public std::runtime_error {
 public:
  explicit decode_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation not supported by the structure's variant (e.g. append on static).
class variant_error : public std::logic_error {
 public:
  explicit variant_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace wtrie
