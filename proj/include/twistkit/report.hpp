#pragma once

#include <string>
#include <vector>

namespace twk {

// Outcome of a verification pass: a flat list of human-readable lines plus an
// overall flag. Verbs print the lines verbatim, so keep them one fact each.
struct Report {
  bool ok = true;
  std::vector<std::string> lines;

  void note(std::string s) { lines.push_back(std::move(s)); }
  void fail(std::string s) {
    ok = false;
    lines.push_back("FAIL: " + std::move(s));
  }
  std::string str() const {
    std::string out;
    for (const std::string& l : lines) {
      out += l;
      out += '\n';
    }
    return out;
  }
};

}  // namespace twk
