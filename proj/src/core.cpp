#include "mtq/core.hpp"

#include <sstream>

namespace mtq {

std::string format_word(const Word& w) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << ',';
    os << w[i] + 1;
  }
  os << ')';
  return os.str();
}

Word parse_word(const std::string& s) {
  Word w;
  std::string tok;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      tok.push_back(c);
    } else if (!tok.empty()) {
      w.push_back(std::stoi(tok) - 1);
      tok.clear();
    }
  }
  if (!tok.empty()) w.push_back(std::stoi(tok) - 1);
  if (w.empty()) throw InputError("empty word: '" + s + "'");
  for (int a : w)
    if (a < 0) throw InputError("letters are 1-based: '" + s + "'");
  return w;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
    boost::multiprecision::cpp_int num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (den == 0) throw InputError("zero denominator in '" + s + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw InputError("not a rational: '" + s + "'");
  }
}

}  // namespace mtq
