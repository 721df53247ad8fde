#pragma once

#include <stdexcept>
#include <string>

namespace gammoid {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ground set or permutation-search cap exceeded.
struct SizeExceeded : Error {
  using Error::Error;
};

// Malformed or axiom-violating input file.
struct InputError : Error {
  using Error::Error;
};

struct FlatLatticeTooLarge : Error {
  using Error::Error;
};

struct InvalidCut : Error {
  using Error::Error;
};

struct NotDecisive : Error {
  using Error::Error;
};

struct NotADeflate : Error {
  using Error::Error;
};

struct InvalidSelection : Error {
  using Error::Error;
};

struct RankTooLow : Error {
  using Error::Error;
};

}  // namespace gammoid
