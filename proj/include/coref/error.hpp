#pragma once

#include <stdexcept>
#include <string>

namespace coref {

// Malformed input: bad JSON, unknown fields, wrong types, version mismatches.
class parse_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Well-formed input that breaks a data invariant (spans, sentences, keys).
class validation_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Caller violated a precondition on in-memory data.
class data_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace coref
