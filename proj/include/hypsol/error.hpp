#pragma once

#include <stdexcept>
#include <string>

namespace hypsol {

enum class ErrorKind {
  NonOddPrime,
  WildRamification,
  InvalidTower,
  DivisionByZero,
  PrecisionExhausted,
  ZeroElement,
  NoSquareRoot,
  SyntaxError,
  UnsupportedFactor,
  DegreeTooSmall,
  NotGaloisClosed,
  WildInput,
  RootCollision,
  AmbiguousMatch,
  NonRationalCoefficient,
  NotSquarefree,
  InternalError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonOddPrime: return "NonOddPrime";
    case ErrorKind::WildRamification: return "WildRamification";
    case ErrorKind::InvalidTower: return "InvalidTower";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::ZeroElement: return "ZeroElement";
    case ErrorKind::NoSquareRoot: return "NoSquareRoot";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnsupportedFactor: return "UnsupportedFactor";
    case ErrorKind::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorKind::NotGaloisClosed: return "NotGaloisClosed";
    case ErrorKind::WildInput: return "WildInput";
    case ErrorKind::RootCollision: return "RootCollision";
    case ErrorKind::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorKind::NonRationalCoefficient: return "NonRationalCoefficient";
    case ErrorKind::NotSquarefree: return "NotSquarefree";
    case ErrorKind::InternalError: return "InternalError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `module()` names the component that
/// detected it so the CLI can report provenance.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& what)
      : std::runtime_error(what), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace hypsol
