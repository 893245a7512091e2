#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sjs {

/// Half-open byte range into a source text, with the 1-based line/column of
/// its first byte. A default-constructed span (line 0) means "no location".
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t line = 0;
  std::uint32_t col = 0;

  bool valid() const { return line != 0; }

  friend bool operator==(const Span&, const Span&) = default;
};

/// Source order: position of the first byte, then extent.
inline bool before(const Span& a, const Span& b) {
  if (a.begin != b.begin) return a.begin < b.begin;
  return a.end < b.end;
}

/// The later of two spans; an invalid span never wins.
inline Span later(const Span& a, const Span& b) {
  if (!a.valid()) return b;
  if (!b.valid()) return a;
  return before(a, b) ? b : a;
}

std::string to_string(const Span& span);

struct SourceProgram {
  std::string text;
  std::string path = "<input>";
};

SourceProgram read_source_file(const std::string& path);

}  // namespace sjs
