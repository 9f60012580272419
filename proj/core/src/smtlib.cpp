#include "zpsmt/smtlib.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <unordered_map>

namespace zpsmt {

ParseError::ParseError(const std::string &msg, int line, int column)
    : InputError(std::to_string(line) + ":" + std::to_string(column) + ": " +
                 msg),
      line(line), column(column) {}

Field script_field(const Script &script) {
  if (script.field)
    return *script.field;
  return Field(Prime(Integer(3)));
}

namespace {

struct SExpr {
  bool is_list = false;
  bool quoted = false; // |symbol| or "string"
  std::string atom;
  std::vector<SExpr> items;
  int line = 0;
  int column = 0;

  bool is_symbol(std::string_view s) const {
    return !is_list && !quoted && atom == s;
  }
};

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::optional<SExpr> next() {
    skip_space();
    if (pos_ >= text_.size())
      return std::nullopt;
    return read();
  }

private:
  [[noreturn]] void fail(const std::string &msg) const {
    throw ParseError(msg, line_, col_);
  }

  char peek() const { return text_[pos_]; }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == ';') {
        while (pos_ < text_.size() && peek() != '\n')
          advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = peek();
    if (c == '(') {
      advance();
      e.is_list = true;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size())
          throw ParseError("unbalanced '('", e.line, e.column);
        if (peek() == ')') {
          advance();
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == ')')
      fail("unexpected ')'");
    if (c == '|' || c == '"') {
      const char close = c;
      advance();
      while (pos_ < text_.size() && peek() != close) {
        e.atom.push_back(peek());
        advance();
      }
      if (pos_ >= text_.size())
        throw ParseError("unterminated literal", e.line, e.column);
      advance();
      e.quoted = true;
      return e;
    }
    while (pos_ < text_.size()) {
      c = peek();
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' ||
          c == ')' || c == ';' || c == '|' || c == '"')
        break;
      e.atom.push_back(c);
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Sort {
  bool is_bool = false;
  Integer prime;
};

struct Value {
  bool is_bool = false;
  Polynomial poly;
  NodeId node = 0;
};

[[noreturn]] void fail_at(const SExpr &e, const std::string &msg) {
  throw ParseError(msg, e.line, e.column);
}

bool is_numeral(std::string_view s) {
  if (s.empty())
    return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)))
      return false;
  return true;
}

bool is_signed_numeral(std::string_view s) {
  if (!s.empty() && s.front() == '-')
    s.remove_prefix(1);
  return is_numeral(s);
}

class Elaborator {
public:
  explicit Elaborator(Script &script) : s_(script) {}

  /// Returns false on (exit).
  bool command(const SExpr &cmd);

private:
  const Field &field_for(const SExpr &at) {
    if (!s_.field)
      fail_at(at, "field term used before any finite field sort");
    return *s_.field;
  }

  void set_prime(const Integer &p, const SExpr &at) {
    if (p == 2)
      throw SortError("the field of order 2 is not supported");
    if (s_.field) {
      if (s_.field->modulus() != p)
        throw SortError("mixed field orders " + s_.field->modulus().get_str() +
                        " and " + p.get_str());
      return;
    }
    try {
      s_.field.emplace(Prime(p));
    } catch (const NotPrime &) {
      throw SortError("FiniteField order is not prime: " + p.get_str());
    }
    (void)at;
  }

  Sort sort(const SExpr &e);
  Value term(const SExpr &e);
  Value apply(const SExpr &e);
  Value field_literal(const SExpr &e, std::string_view text, bool sorted);
  NodeId as_bool(const Value &v, const SExpr &at) const {
    if (!v.is_bool)
      throw SortError("expected Bool term at " + std::to_string(at.line) +
                      ":" + std::to_string(at.column));
    return v.node;
  }
  const Polynomial &as_field(const Value &v, const SExpr &at) const {
    if (v.is_bool)
      throw SortError("expected finite field term at " +
                      std::to_string(at.line) + ":" +
                      std::to_string(at.column));
    return v.poly;
  }
  Value boolean(NodeId n) const {
    Value v;
    v.is_bool = true;
    v.node = n;
    return v;
  }
  Value field_value(Polynomial p) const {
    Value v;
    v.poly = std::move(p);
    return v;
  }
  void declare(const SExpr &name, const Sort &srt);

  Script &s_;
  std::map<std::string, Sort> sort_aliases_;
  std::unordered_map<std::string, Value> globals_;
  std::vector<std::unordered_map<std::string, Value>> scopes_;
};

Sort Elaborator::sort(const SExpr &e) {
  if (!e.is_list) {
    if (e.atom == "Bool")
      return Sort{true, 0};
    auto it = sort_aliases_.find(e.atom);
    if (it != sort_aliases_.end())
      return it->second;
    throw UnsupportedFeature("unsupported sort " + e.atom);
  }
  if (e.items.size() == 3 && e.items[0].is_symbol("_") &&
      e.items[1].is_symbol("FiniteField")) {
    if (!is_numeral(e.items[2].atom))
      fail_at(e.items[2], "expected a numeral field order");
    Integer p(e.items[2].atom);
    set_prime(p, e);
    return Sort{false, p};
  }
  throw UnsupportedFeature("unsupported sort expression");
}

void Elaborator::declare(const SExpr &name, const Sort &srt) {
  if (name.is_list)
    fail_at(name, "expected a symbol");
  if (globals_.count(name.atom) || s_.vars.find(name.atom))
    fail_at(name, "redeclared symbol " + name.atom);
  if (srt.is_bool) {
    auto idx = static_cast<std::uint32_t>(s_.bool_names.size());
    s_.bool_names.push_back(name.atom);
    globals_[name.atom] = boolean(s_.formula.bool_var(idx));
  } else {
    VarId v = s_.vars.add(name.atom, VarKind::original);
    globals_[name.atom] = field_value(Polynomial::variable(v));
  }
}

Value Elaborator::field_literal(const SExpr &e, std::string_view text,
                                bool sorted) {
  // #fK, #fKmP, or the ffK body of (as ffK F).
  Integer value;
  if (sorted) {
    if (!is_signed_numeral(text))
      fail_at(e, "malformed field literal");
    value = Integer(std::string(text));
  } else {
    auto m = text.find('m');
    std::string_view digits = text.substr(0, m);
    if (!is_numeral(digits))
      fail_at(e, "malformed field literal");
    value = Integer(std::string(digits));
    if (m != std::string_view::npos) {
      std::string_view order = text.substr(m + 1);
      if (!is_numeral(order))
        fail_at(e, "malformed field literal");
      set_prime(Integer(std::string(order)), e);
    }
  }
  const Field &f = field_for(e);
  return field_value(Polynomial::constant(f.from_integer(value)));
}

Value Elaborator::term(const SExpr &e) {
  if (e.is_list)
    return apply(e);
  for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
    auto hit = it->find(e.atom);
    if (hit != it->end())
      return hit->second;
  }
  if (auto hit = globals_.find(e.atom); hit != globals_.end())
    return hit->second;
  if (!e.quoted) {
    if (e.atom == "true")
      return boolean(s_.formula.constant(true));
    if (e.atom == "false")
      return boolean(s_.formula.constant(false));
    if (e.atom.rfind("#f", 0) == 0)
      return field_literal(e, std::string_view(e.atom).substr(2), false);
    if (is_numeral(e.atom))
      throw SortError("bare numeral " + e.atom + " has no field sort");
  }
  fail_at(e, "unknown symbol " + e.atom);
}

Value Elaborator::apply(const SExpr &e) {
  if (e.items.empty())
    fail_at(e, "empty application");
  const SExpr &head = e.items[0];
  if (head.is_list)
    fail_at(head, "unsupported indexed function");
  const std::string &op = head.atom;
  const std::size_t argc = e.items.size() - 1;
  auto arg = [&](std::size_t i) -> const SExpr & { return e.items[i + 1]; };
  auto need = [&](bool ok) {
    if (!ok)
      fail_at(e, "wrong number of arguments to " + op);
  };

  if (op == "forall" || op == "exists")
    throw UnsupportedFeature("quantifiers are not supported");
  if (op == "as") {
    need(argc == 2);
    Sort srt = sort(arg(1));
    if (srt.is_bool || arg(0).is_list || arg(0).atom.rfind("ff", 0) != 0)
      fail_at(e, "malformed (as ...) literal");
    return field_literal(arg(0), std::string_view(arg(0).atom).substr(2),
                         true);
  }
  if (op == "let") {
    need(argc == 2 && arg(0).is_list);
    std::unordered_map<std::string, Value> frame;
    for (const SExpr &b : arg(0).items) {
      if (!b.is_list || b.items.size() != 2 || b.items[0].is_list)
        fail_at(b, "malformed let binding");
      frame[b.items[0].atom] = term(b.items[1]);
    }
    scopes_.push_back(std::move(frame));
    Value body = term(arg(1));
    scopes_.pop_back();
    return body;
  }
  if (op == "!") {
    need(argc >= 1);
    return term(arg(0));
  }

  std::vector<Value> args;
  args.reserve(argc);
  for (std::size_t i = 0; i < argc; ++i)
    args.push_back(term(arg(i)));

  if (op == "ff.add" || op == "ff.mul") {
    need(argc >= 1);
    const Field &f = field_for(e);
    Polynomial acc = as_field(args[0], arg(0));
    for (std::size_t i = 1; i < argc; ++i) {
      const Polynomial &b = as_field(args[i], arg(i));
      acc = op == "ff.add" ? add(f, acc, b) : mul(f, acc, b);
    }
    return field_value(std::move(acc));
  }
  if (op == "ff.neg") {
    need(argc == 1);
    return field_value(neg(field_for(e), as_field(args[0], arg(0))));
  }
  if (op.rfind("ff.", 0) == 0)
    throw UnsupportedFeature("unsupported field operator " + op);

  Formula &fm = s_.formula;
  if (op == "not") {
    need(argc == 1);
    return boolean(fm.negate(as_bool(args[0], arg(0))));
  }
  if (op == "and" || op == "or" || op == "xor") {
    std::vector<NodeId> kids;
    for (std::size_t i = 0; i < argc; ++i)
      kids.push_back(as_bool(args[i], arg(i)));
    if (kids.empty())
      return boolean(fm.constant(op == "and"));
    Op kind = op == "and" ? Op::and_ : op == "or" ? Op::or_ : Op::xor_;
    return boolean(fm.connective(kind, std::move(kids)));
  }
  if (op == "=>") {
    need(argc >= 2);
    // Right associative: a => b => c is a => (b => c).
    NodeId acc = as_bool(args[argc - 1], arg(argc - 1));
    for (std::size_t i = argc - 1; i-- > 0;)
      acc = fm.connective(Op::or_, {fm.negate(as_bool(args[i], arg(i))), acc});
    return boolean(acc);
  }
  if (op == "ite") {
    need(argc == 3);
    NodeId c = as_bool(args[0], arg(0));
    if (!args[1].is_bool || !args[2].is_bool)
      throw UnsupportedFeature("ite over finite field terms");
    return boolean(fm.connective(Op::ite, {c, args[1].node, args[2].node}));
  }
  if (op == "=" || op == "distinct") {
    need(argc >= 2);
    const bool bools = args[0].is_bool;
    for (std::size_t i = 1; i < argc; ++i)
      if (args[i].is_bool != bools)
        throw SortError("mixed sorts in " + op);
    std::vector<NodeId> parts;
    if (op == "=") {
      if (bools) {
        std::vector<NodeId> kids;
        for (const Value &v : args)
          kids.push_back(v.node);
        return boolean(fm.connective(Op::iff, std::move(kids)));
      }
      const Field &f = field_for(e);
      for (std::size_t i = 0; i + 1 < argc; ++i)
        parts.push_back(fm.equation(sub(f, args[i].poly, args[i + 1].poly)));
    } else {
      for (std::size_t i = 0; i < argc; ++i) {
        for (std::size_t j = i + 1; j < argc; ++j) {
          if (bools) {
            parts.push_back(
                fm.connective(Op::xor_, {args[i].node, args[j].node}));
          } else {
            const Field &f = field_for(e);
            parts.push_back(
                fm.negate(fm.equation(sub(f, args[i].poly, args[j].poly))));
          }
        }
      }
    }
    if (parts.size() == 1)
      return boolean(parts.front());
    return boolean(fm.connective(Op::and_, std::move(parts)));
  }
  if (globals_.count(op) || s_.vars.find(op))
    fail_at(head, "symbol " + op + " is not a function");
  throw UnsupportedFeature("unsupported function " + op);
}

bool Elaborator::command(const SExpr &cmd) {
  if (!cmd.is_list || cmd.items.empty() || cmd.items[0].is_list)
    fail_at(cmd, "expected a command");
  const std::string &name = cmd.items[0].atom;
  const std::size_t argc = cmd.items.size() - 1;
  auto arg = [&](std::size_t i) -> const SExpr & { return cmd.items[i + 1]; };
  auto need = [&](bool ok) {
    if (!ok)
      fail_at(cmd, "malformed " + name);
  };

  if (name == "set-logic") {
    need(argc == 1);
    s_.logic = arg(0).atom;
  } else if (name == "set-info" || name == "set-option") {
    // Accepted and ignored.
  } else if (name == "define-sort") {
    need(argc == 3 && !arg(0).is_list && arg(1).is_list);
    if (!arg(1).items.empty())
      throw UnsupportedFeature("parametric define-sort");
    sort_aliases_[arg(0).atom] = sort(arg(2));
  } else if (name == "declare-fun") {
    need(argc == 3 && arg(1).is_list);
    if (!arg(1).items.empty())
      throw UnsupportedFeature("uninterpreted functions of non-zero arity");
    declare(arg(0), sort(arg(2)));
  } else if (name == "declare-const") {
    need(argc == 2);
    declare(arg(0), sort(arg(1)));
  } else if (name == "define-fun") {
    need(argc == 4 && arg(1).is_list && !arg(0).is_list);
    if (!arg(1).items.empty())
      throw UnsupportedFeature("define-fun with parameters");
    Sort srt = sort(arg(2));
    Value v = term(arg(3));
    if (v.is_bool != srt.is_bool)
      throw SortError("define-fun body does not match its sort");
    if (globals_.count(arg(0).atom))
      fail_at(arg(0), "redeclared symbol " + arg(0).atom);
    globals_[arg(0).atom] = v;
  } else if (name == "assert") {
    need(argc == 1);
    s_.assertions.push_back(as_bool(term(arg(0)), arg(0)));
  } else if (name == "check-sat") {
    s_.commands.push_back(Command::check_sat);
  } else if (name == "get-model") {
    s_.commands.push_back(Command::get_model);
  } else if (name == "exit") {
    return false;
  } else if (name == "push" || name == "pop") {
    throw UnsupportedFeature("incremental commands are not supported");
  } else {
    throw UnsupportedFeature("unsupported command " + name);
  }
  return true;
}

} // namespace

Script parse_script(std::string_view text) {
  Script script;
  Elaborator elab(script);
  Reader reader(text);
  while (auto e = reader.next()) {
    if (!elab.command(*e))
      break;
  }
  return script;
}

} // namespace zpsmt
