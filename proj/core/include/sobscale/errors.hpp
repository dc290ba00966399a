#ifndef SOBSCALE_ERRORS_HPP
#define SOBSCALE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sobscale {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A weight function evaluated to a non-finite or non-positive value.
class InvalidFunctionError : public Error {
public:
  InvalidFunctionError(const std::string& variant, double t, const std::string& why)
      : Error("invalid weight function (" + variant + ") at t=" + std::to_string(t) + ": " + why),
        variant_(variant), t_(t) {}
  const std::string& variant() const { return variant_; }
  double argument() const { return t_; }

private:
  std::string variant_;
  double t_;
};

/// A precondition on arguments was violated (domain, ordering, index inequality).
class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Malformed or incomplete configuration input.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Mismatched dimensions, component counts, or multi-index lengths.
class DimensionError : public Error {
public:
  explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// A numeric estimation procedure could not produce a stable answer.
/// Carries the raw samples it was working from so callers can inspect them.
class EstimationError : public Error {
public:
  EstimationError(const std::string& msg, std::string raw_data)
      : Error(msg), raw_data_(std::move(raw_data)) {}
  const std::string& raw_data() const { return raw_data_; }

private:
  std::string raw_data_;
};

/// The operator failed the ellipticity test where it was required to pass it.
class EllipticityError : public Error {
public:
  EllipticityError(const std::string& msg, double min_abs_det)
      : Error(msg), min_abs_det_(min_abs_det) {}
  double min_abs_det() const { return min_abs_det_; }

private:
  double min_abs_det_;
};

}  // namespace sobscale

#endif
