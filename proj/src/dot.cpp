#include "sjs/dot.hpp"

#include <set>
#include <sstream>

namespace sjs {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const ConstraintStore& store, std::size_t count) {
  const auto& all = store.constraints();
  if (count == 0 || count > all.size()) count = all.size();
  std::set<RowVar> vars;
  std::set<LitId> lits;
  std::ostringstream edges;
  for (std::size_t i = 0; i < count; ++i) {
    const Constraint& c = all[i];
    switch (c.kind) {
      case Constraint::SubLV:
        lits.insert(c.a);
        vars.insert(c.b);
        edges << "  L" << c.a << " -> V" << c.b << ";\n";
        break;
      case Constraint::SubVL:
        vars.insert(c.a);
        lits.insert(c.b);
        edges << "  V" << c.a << " -> L" << c.b << ";\n";
        break;
      case Constraint::SubVV:
        vars.insert(c.a);
        vars.insert(c.b);
        edges << "  V" << c.a << " -> V" << c.b << ";\n";
        break;
      case Constraint::SubVMinus: {
        vars.insert(c.a);
        vars.insert(c.b);
        std::string label;
        for (const auto& f : store.fields(c.c)) label += (label.empty() ? "" : ",") + f;
        edges << "  V" << c.a << " -> V" << c.b << " [label=\"\\\\{" << escape(label) << "}\"];\n";
        break;
      }
      default:
        break;
    }
  }
  std::ostringstream out;
  out << "digraph constraints {\n";
  for (RowVar v : vars) out << "  V" << v << " [label=\"" << rowvar_name(v) << "\"];\n";
  for (LitId l : lits) out << "  L" << l << " [shape=box, label=\"" << escape(to_string(store, l)) << "\"];\n";
  out << edges.str() << "}\n";
  return out.str();
}

}  // namespace sjs
