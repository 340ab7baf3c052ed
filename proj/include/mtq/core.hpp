#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mtq {

// Letters are stored 0-based. For a base alphabet of size N the lifted
// letter i+ is stored as i + N.
using Word = std::vector<int>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Rational = boost::multiprecision::cpp_rational;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an enumeration would exceed its configured word budget.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

// Streaming log-sum-exp accumulator.
class LogSum {
 public:
  void add(double x) { acc_ = log_add(acc_, x); }
  double value() const { return acc_; }

 private:
  double acc_ = kNegInf;
};

// "(1,2,3)" with 1-based letters; lifted letters print as i+N as in the
// usual Omega = {1..2N} labelling.
std::string format_word(const Word& w);
Word parse_word(const std::string& s);

double to_double(const Rational& q);
Rational parse_rational(const std::string& s);

}  // namespace mtq
