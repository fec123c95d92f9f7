#include "virtblow/rational.hpp"

#include <cctype>

#include "virtblow/errors.hpp"

namespace vb {

std::string to_string(const Rational& q) { return q.get_str(); }

Rational parse_rational(std::string_view text) {
  std::string s;
  for (char ch : text) {
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  }
  if (s.empty()) throw ConfigError("empty rational literal");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  std::size_t slash = s.find('/');
  auto digits = [&](std::size_t b, std::size_t e) {
    if (b >= e) return false;
    for (std::size_t i = b; i < e; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
  };
  bool ok = slash == std::string::npos ? digits(start, s.size())
                                       : digits(start, slash) && digits(slash + 1, s.size());
  if (!ok) throw ConfigError("malformed rational literal '" + std::string(text) + "'");
  if (s[0] == '+') s.erase(0, 1);
  Rational q;
  try {
    q = Rational(s, 10);
  } catch (const std::invalid_argument&) {
    throw ConfigError("malformed rational literal '" + std::string(text) + "'");
  }
  if (q.get_den() == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

}  // namespace vb
