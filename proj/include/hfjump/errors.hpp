#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfjump {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sample is too short for the requested estimator. The message names the
/// bound that failed.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Parameters outside the admissible domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input data problem tied to a specific row of a document (1-based, header
/// is row 1). Row 0 means "not row specific".
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row)
      : Error(row ? what + " (row " + std::to_string(row) + ")" : what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class NonPositivePrice : public DataError {
 public:
  using DataError::DataError;
};

class CrossedQuote : public DataError {
 public:
  using DataError::DataError;
};

class MissingFactorMonth : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical failures in model fitting.
class RankDeficient : public Error {
 public:
  using Error::Error;
};

class Separation : public Error {
 public:
  using Error::Error;
};

/// Analysis preconditions on individual records.
class DegenerateSigma : public DomainError {
 public:
  using DomainError::DomainError;
};

class ZeroRV : public DomainError {
 public:
  using DomainError::DomainError;
};

class MalformedSIC : public DomainError {
 public:
  using DomainError::DomainError;
};

class ZeroTotalReturn : public DomainError {
 public:
  ZeroTotalReturn(const std::string& what, std::size_t index) : DomainError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NoPreTick : public InsufficientData {
 public:
  using InsufficientData::InsufficientData;
};

class NoPostTick : public InsufficientData {
 public:
  using InsufficientData::InsufficientData;
};

}  // namespace hfjump
