#include "sjs/source.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sjs {

std::string to_string(const Span& span) {
  if (!span.valid()) return "?";
  return std::to_string(span.line) + ":" + std::to_string(span.col);
}

SourceProgram read_source_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return SourceProgram{buf.str(), path};
}

}  // namespace sjs
