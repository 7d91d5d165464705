#pragma once

#include <stdexcept>
#include <string>

namespace stratwave {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// B(lambda) has more zero singular values than the radical index allows.
class DegenerateLambda : public Error {
 public:
  using Error::Error;
};

class OrderTooLarge : public Error {
 public:
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ZeroTime : public Error {
 public:
  using Error::Error;
};

class FrameUnavailable : public Error {
 public:
  using Error::Error;
};

class NotLinear : public Error {
 public:
  using Error::Error;
};

// Unknown catalog kind, inadmissible parameters, malformed group documents.
class CatalogError : public Error {
 public:
  using Error::Error;
};

}  // namespace stratwave
