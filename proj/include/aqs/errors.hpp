#pragma once

#include <stdexcept>
#include <string>

namespace aqs {

// Root of the library's error hierarchy. Every failure the library raises
// derives from Error, so callers can catch domain errors without catching
// programming errors (std::logic_error et al.).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A backend could not serve a request (transport failure, retries exhausted,
// or a well-formed error response translated by an adapter).
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

// A remote peer replied with bytes that do not match the inference protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A token id is not part of the scorer's vocabulary, or a vocabulary is
// malformed (duplicate ids, missing end-of-sequence token).
class VocabularyMismatch : public Error {
 public:
  using Error::Error;
};

// An operation received empty input where non-empty input is required.
class EmptyInput : public Error {
 public:
  using Error::Error;
};

// Beam search failed to finish any hypothesis within its iteration budget.
// Unreachable with the force-termination rule; kept as a guard.
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

// An embedding with zero norm reached a cosine computation.
class DegenerateEmbedding : public Error {
 public:
  using Error::Error;
};

// Every QA answer was empty and no fallback was requested.
class NoAnswers : public Error {
 public:
  using Error::Error;
};

// Pearson correlation over a constant series.
class ZeroVariance : public Error {
 public:
  using Error::Error;
};

// Paired series of unequal (or insufficient) length.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

// A file's bytes could not be parsed (JSON or CSV structure).
class ParseError : public Error {
 public:
  using Error::Error;
};

// A parsed record is missing required fields or violates record invariants.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Filesystem-level failure (open, write, rename).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqs
