#pragma once

// Reader for the QF_FF fragment of SMT-LIB 2.

#include "zpsmt/formula.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zpsmt {

/// Base class for every error caused by the input text.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
  ParseError(const std::string &msg, int line, int column);
  int line;
  int column;
};

/// Mixed primes, p = 2, or an ill-sorted term.
class SortError : public InputError {
public:
  using InputError::InputError;
};

class UnsupportedFeature : public InputError {
public:
  using InputError::InputError;
};

enum class Command { check_sat, get_model };

struct Script {
  std::string logic;
  /// Set once a field sort or field literal has been seen.
  std::optional<Field> field;
  /// Declared field constants, in declaration order, as original variables.
  VarTable vars;
  std::vector<std::string> bool_names;
  Formula formula;
  std::vector<NodeId> assertions;
  std::vector<Command> commands;
};

/// Parses a complete script.  Commands after `(exit)` are ignored.
Script parse_script(std::string_view text);

/// Field of the script, or Z_3 when the script never mentions one.
Field script_field(const Script &script);

} // namespace zpsmt
