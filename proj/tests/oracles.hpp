// Reference deciders written directly from the language definitions. None of
// them touches the library code under test.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace oracle {

inline bool bordered(const std::vector<int>& w) {
  int n = int(w.size());
  for (int k = 1; k < n; ++k) {
    bool eq = true;
    for (int i = 0; i < k && eq; ++i) eq = w[i] == w[n - k + i];
    if (eq) return true;
  }
  return false;
}

inline bool palindrome(const std::vector<int>& w) {
  for (size_t i = 0, j = w.size() - 1; i < j; ++i, --j)
    if (w[i] != w[j]) return false;
  return true;
}

inline bool even_a(const std::vector<int>& w) {
  int c = 0;
  for (int x : w) c += x == 0;
  return c % 2 == 0;
}

inline bool first_last_a(const std::vector<int>& w) { return w.front() == 0 && w.back() == 0; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace oracle
