#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "gpcap/rational.hpp"

namespace gpcap::fm {

// Everything in this module is exact: coefficients are rationals end to end.
inline constexpr bool kExactArithmetic = true;

/// Linear form over named rate variables and opaque symbolic atoms
/// (information-measure labels such as "I(U;S)" or "H(V1|U)"), plus a
/// rational constant. Zero-coefficient entries are never stored.
struct LinForm {
  std::map<std::string, Rational> vars;
  std::map<std::string, Rational> atoms;
  Rational constant;

  LinForm& add_var(const std::string& name, Rational c) {
    insert(vars, name, c);
    return *this;
  }
  LinForm& add_atom(const std::string& name, Rational c) {
    insert(atoms, name, c);
    return *this;
  }
  LinForm& add_const(Rational c) {
    constant += c;
    return *this;
  }

  bool is_ground() const { return vars.empty() && atoms.empty(); }
  bool is_zero() const { return is_ground() && constant.is_zero(); }

  Rational var_coeff(const std::string& name) const {
    auto it = vars.find(name);
    return it == vars.end() ? Rational(0) : it->second;
  }

  friend LinForm operator+(const LinForm& a, const LinForm& b) {
    LinForm r = a;
    for (const auto& [k, v] : b.vars) r.add_var(k, v);
    for (const auto& [k, v] : b.atoms) r.add_atom(k, v);
    r.constant += b.constant;
    return r;
  }
  friend LinForm operator-(const LinForm& a, const LinForm& b) { return a + (b * Rational(-1)); }
  friend LinForm operator*(const LinForm& a, const Rational& s) {
    LinForm r;
    if (s.is_zero()) return r;
    for (const auto& [k, v] : a.vars) r.vars.emplace(k, v * s);
    for (const auto& [k, v] : a.atoms) r.atoms.emplace(k, v * s);
    r.constant = a.constant * s;
    return r;
  }

  bool same_coefficients(const LinForm& o) const { return vars == o.vars && atoms == o.atoms; }
  bool operator==(const LinForm& o) const {
    return vars == o.vars && atoms == o.atoms && constant == o.constant;
  }

 private:
  static void insert(std::map<std::string, Rational>& m, const std::string& k, Rational c) {
    auto it = m.find(k);
    if (it == m.end()) {
      if (!c.is_zero()) m.emplace(k, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) m.erase(it);
    }
  }
};

/// Relation of a row "form REL 0". GE/GT inputs are normalized by negation.
enum class Rel { le, lt, eq };

inline const char* rel_text(Rel r) {
  switch (r) {
    case Rel::le: return "<=";
    case Rel::lt: return "<";
    case Rel::eq: return "=";
  }
  return "?";
}

struct Row {
  LinForm form;  // form REL 0
  Rel rel = Rel::le;

  bool operator==(const Row& o) const { return rel == o.rel && form == o.form; }
};

/// Parse/position error for the text format.
struct ParseError : std::runtime_error {
  ParseError(std::size_t line, std::size_t col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " +
                           msg),
        line(line),
        col(col) {}
  std::size_t line;
  std::size_t col;
};

/// System of linear inequalities over declared variables; any symbol not in
/// the variable list is an atom.
class System {
 public:
  System() = default;
  explicit System(std::vector<std::string> variables) : vars_(std::move(variables)) {}

  const std::vector<std::string>& variables() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  bool has_variable(const std::string& v) const {
    for (const auto& x : vars_) {
      if (x == v) return true;
    }
    return false;
  }

  /// Adds "lhs REL rhs" after moving everything to the left-hand side.
  enum class InputRel { le, lt, eq, ge, gt };
  void add(const LinForm& lhs, InputRel rel, const LinForm& rhs = LinForm{}) {
    LinForm f = lhs - rhs;
    check_declared(f);
    switch (rel) {
      case InputRel::le: rows_.push_back({std::move(f), Rel::le}); break;
      case InputRel::lt: rows_.push_back({std::move(f), Rel::lt}); break;
      case InputRel::eq: rows_.push_back({std::move(f), Rel::eq}); break;
      case InputRel::ge: rows_.push_back({f * Rational(-1), Rel::le}); break;
      case InputRel::gt: rows_.push_back({f * Rational(-1), Rel::lt}); break;
    }
  }
  void add_row(Row r) {
    check_declared(r.form);
    rows_.push_back(std::move(r));
  }

  /// Removes syntactic redundancy: scales rows so the leading coefficient is
  /// +-1, drops trivially true ground rows, and keeps only the tightest row
  /// among rows sharing identical variable/atom coefficients.
  void cleanup() {
    std::vector<Row> kept;
    for (Row& r : rows_) {
      if (r.form.is_ground()) {
        const int s = r.form.constant.sign();
        const bool holds = (r.rel == Rel::le && s <= 0) || (r.rel == Rel::lt && s < 0) ||
                           (r.rel == Rel::eq && s == 0);
        if (!holds) kept.push_back(r);  // infeasibility witness stays visible
        continue;
      }
      normalize_scale(r);
      kept.push_back(std::move(r));
    }
    // Dominance among inequality rows with identical coefficients: bigger
    // constant is tighter; at equal constants strict beats non-strict.
    std::vector<Row> out;
    for (const Row& r : kept) {
      bool superseded = false;
      for (Row& o : out) {
        if (o.rel != Rel::eq && r.rel != Rel::eq && o.form.same_coefficients(r.form)) {
          if (dominates(o, r)) {
            superseded = true;
          } else if (dominates(r, o)) {
            o = r;
            superseded = true;
          }
          if (superseded) break;
        }
        if (o.rel == Rel::eq && r.rel == Rel::eq && o.form == r.form) {
          superseded = true;
          break;
        }
      }
      if (!superseded) out.push_back(r);
    }
    rows_ = std::move(out);
  }

  /// Exact Fourier-Motzkin projection eliminating the named variables in
  /// order. The returned system's solution set over the remaining variables
  /// (for every atom assignment) equals the projection of this one's.
  System eliminate(const std::vector<std::string>& names) const {
    System cur = *this;
    cur.cleanup();
    for (const auto& v : names) {
      if (!cur.has_variable(v)) throw std::invalid_argument("eliminate: unknown variable " + v);
      cur = eliminate_one(cur, v);
    }
    return cur;
  }

  /// Substitutes an atom by a linear form over atoms and a constant.
  System substitute_atom(const std::string& name, const LinForm& replacement) const {
    if (!replacement.vars.empty()) {
      throw std::invalid_argument("substitute_atom: replacement must not contain variables");
    }
    System out(vars_);
    for (const Row& r : rows_) {
      auto it = r.form.atoms.find(name);
      if (it == r.form.atoms.end()) {
        out.rows_.push_back(r);
        continue;
      }
      Row nr = r;
      const Rational c = it->second;
      nr.form.atoms.erase(name);
      nr.form = nr.form + replacement * c;
      out.rows_.push_back(std::move(nr));
    }
    out.cleanup();
    return out;
  }

  std::string to_text() const;
  static System from_text(const std::string& text);

  std::string row_text(const Row& r) const;

  /// Canonical sorted row strings; convenient for set comparisons in tests.
  std::vector<std::string> canonical_rows() const {
    System c = *this;
    c.cleanup();
    std::vector<std::string> out;
    out.reserve(c.rows_.size());
    for (const Row& r : c.rows_) out.push_back(c.row_text(r));
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  void check_declared(const LinForm&) const {}  // all symbols legal; non-vars are atoms

  static bool dominates(const Row& a, const Row& b) {
    // requires identical coefficients; rows read "coeffs + c <= / < 0"
    if (a.form.constant > b.form.constant) return true;
    if (a.form.constant == b.form.constant) {
      return a.rel == Rel::lt || b.rel == a.rel;
    }
    return false;
  }

  void normalize_scale(Row& r) const {
    // Leading coefficient: first declared variable present, else first atom
    // (lexicographic), else the constant. Scale so it becomes +-1.
    Rational lead;
    bool found = false;
    for (const auto& v : vars_) {
      auto it = r.form.vars.find(v);
      if (it != r.form.vars.end()) {
        lead = it->second;
        found = true;
        break;
      }
    }
    if (!found && !r.form.atoms.empty()) {
      lead = r.form.atoms.begin()->second;
      found = true;
    }
    if (!found) return;
    const Rational scale = Rational(1) / lead.abs();
    r.form = r.form * scale;
  }

  static System eliminate_one(const System& in, const std::string& v) {
    System out(remove_name(in.vars_, v));
    // An equality pinning v substitutes it everywhere (exact Gaussian step).
    std::ptrdiff_t eq_idx = -1;
    for (std::size_t i = 0; i < in.rows_.size(); ++i) {
      if (in.rows_[i].rel == Rel::eq && !in.rows_[i].form.var_coeff(v).is_zero()) {
        eq_idx = static_cast<std::ptrdiff_t>(i);
        break;
      }
    }
    if (eq_idx >= 0) {
      const Row& eq = in.rows_[static_cast<std::size_t>(eq_idx)];
      const Rational a = eq.form.var_coeff(v);
      for (std::size_t i = 0; i < in.rows_.size(); ++i) {
        if (i == static_cast<std::size_t>(eq_idx)) continue;
        const Row& r = in.rows_[i];
        const Rational b = r.form.var_coeff(v);
        if (b.is_zero()) {
          out.rows_.push_back(r);
        } else {
          // r - (b/a) * eq removes v.
          Row nr{r.form - eq.form * (b / a), r.rel};
          out.rows_.push_back(std::move(nr));
        }
      }
      out.cleanup();
      return out;
    }

    std::vector<const Row*> uppers;  // coeff(v) > 0
    std::vector<const Row*> lowers;  // coeff(v) < 0
    for (const Row& r : in.rows_) {
      const Rational c = r.form.var_coeff(v);
      if (c.is_zero()) {
        out.rows_.push_back(r);
      } else if (c.sign() > 0) {
        uppers.push_back(&r);
      } else {
        lowers.push_back(&r);
      }
    }
    for (const Row* up : uppers) {
      for (const Row* lo : lowers) {
        const Rational a = up->form.var_coeff(v);
        const Rational b = lo->form.var_coeff(v);  // negative
        Row nr;
        nr.form = up->form * (-b) + lo->form * a;
        nr.rel = (up->rel == Rel::lt || lo->rel == Rel::lt) ? Rel::lt : Rel::le;
        out.rows_.push_back(std::move(nr));
      }
    }
    out.cleanup();
    return out;
  }

  static std::vector<std::string> remove_name(const std::vector<std::string>& names,
                                              const std::string& v) {
    std::vector<std::string> out;
    for (const auto& n : names) {
      if (n != v) out.push_back(n);
    }
    return out;
  }

  std::vector<std::string> vars_;
  std::vector<Row> rows_;
};

// ---------------------------------------------------------------------------
// Text format: header "vars: A B C", then one inequality per line. Variable
// terms appear on the left as "c*name"; atoms and constants on the right.
// '#' starts a comment.
// ---------------------------------------------------------------------------

namespace detail {

inline void append_term(std::string& s, bool& first, const Rational& c, const std::string& name,
                        bool explicit_one) {
  const Rational mag = c.abs();
  if (first) {
    if (c.sign() < 0) s += "-";
    first = false;
  } else {
    s += c.sign() < 0 ? " - " : " + ";
  }
  if (name.empty()) {
    s += mag.str();
    return;
  }
  if (mag != Rational(1) || explicit_one) {
    s += mag.str();
    s += "*";
  }
  s += name;
}

}  // namespace detail

inline std::string System::row_text(const Row& r) const {
  std::string lhs;
  bool lf = true;
  for (const auto& v : vars_) {
    auto it = r.form.vars.find(v);
    if (it != r.form.vars.end()) detail::append_term(lhs, lf, it->second, v, /*explicit_one=*/true);
  }
  std::string rhs;
  bool rf = true;
  for (const auto& [name, c] : r.form.atoms) {
    detail::append_term(rhs, rf, -c, name, /*explicit_one=*/false);
  }
  if (!r.form.constant.is_zero() || rf) {
    if (!(rf && r.form.constant.is_zero()))
      detail::append_term(rhs, rf, -r.form.constant, "", false);
  }
  if (lhs.empty()) lhs = "0";
  if (rhs.empty()) rhs = "0";
  return lhs + " " + rel_text(r.rel) + " " + rhs;
}

inline std::string System::to_text() const {
  std::string out = "vars:";
  for (const auto& v : vars_) {
    out += " ";
    out += v;
  }
  out += "\n";
  for (const Row& r : rows_) {
    out += row_text(r);
    out += "\n";
  }
  return out;
}

namespace detail {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  explicit Lexer(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, col, msg); }

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }
  char get() {
    const char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
  void skip_spaces() {
    while (pos < text.size() && (peek() == ' ' || peek() == '\t')) get();
  }
};

inline bool ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
inline bool ident_char(char c) {
  return ident_start(c) || (c >= '0' && c <= '9');
}

/// Reads "name" or "name(...)" with balanced parentheses.
inline std::string read_symbol(Lexer& lx) {
  std::string s;
  while (ident_char(lx.peek())) s += lx.get();
  if (lx.peek() == '(') {
    int depth = 0;
    do {
      const char c = lx.get();
      s += c;
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (lx.peek() == '\0' && depth != 0) lx.fail("unbalanced parentheses in symbol");
    } while (depth != 0);
  }
  return s;
}

inline Rational read_rational(Lexer& lx) {
  std::string digits;
  while (lx.peek() >= '0' && lx.peek() <= '9') digits += lx.get();
  if (digits.empty()) lx.fail("expected number");
  std::int64_t num = 0;
  try {
    num = std::stoll(digits);
  } catch (const std::exception&) {
    lx.fail("number out of range");
  }
  if (lx.peek() == '/') {
    lx.get();
    std::string den;
    while (lx.peek() >= '0' && lx.peek() <= '9') den += lx.get();
    if (den.empty()) lx.fail("expected denominator");
    return Rational(num, std::stoll(den));
  }
  return Rational(num);
}

/// expr := term (('+'|'-') term)*  ; term := [rat '*'] symbol | rat
inline LinForm read_expr(Lexer& lx, const std::vector<std::string>& vars) {
  LinForm f;
  int sign = 1;
  bool expect_term = true;
  for (;;) {
    lx.skip_spaces();
    const char c = lx.peek();
    if (expect_term) {
      Rational coeff(sign);
      bool have_coeff = false;
      if (c == '-') {
        lx.get();
        sign = -sign;
        continue;
      }
      if (c == '+') {
        lx.get();
        continue;
      }
      if (c >= '0' && c <= '9') {
        coeff = read_rational(lx) * Rational(sign);
        have_coeff = true;
        lx.skip_spaces();
        if (lx.peek() == '*') {
          lx.get();
          lx.skip_spaces();
        } else if (!ident_start(lx.peek())) {
          f.add_const(coeff);
          sign = 1;
          expect_term = false;
          continue;
        }
      }
      if (!ident_start(lx.peek())) {
        if (have_coeff) lx.fail("expected symbol after coefficient");
        lx.fail("expected term");
      }
      const std::string sym = read_symbol(lx);
      bool is_var = false;
      for (const auto& v : vars) {
        if (v == sym) {
          is_var = true;
          break;
        }
      }
      if (is_var) {
        f.add_var(sym, coeff);
      } else {
        f.add_atom(sym, coeff);
      }
      sign = 1;
      expect_term = false;
      continue;
    }
    if (c == '+' || c == '-') {
      lx.get();
      sign = (c == '-') ? -1 : 1;
      expect_term = true;
      continue;
    }
    return f;
  }
}

}  // namespace detail

inline System System::from_text(const std::string& text) {
  detail::Lexer lx(text);
  std::vector<std::string> vars;
  bool have_header = false;
  System sys;
  while (lx.pos < text.size()) {
    lx.skip_spaces();
    if (lx.peek() == '\n' || lx.peek() == '\r') {
      lx.get();
      continue;
    }
    if (lx.peek() == '#') {
      while (lx.pos < text.size() && lx.peek() != '\n') lx.get();
      continue;
    }
    if (lx.peek() == '\0') break;
    if (!have_header) {
      const std::size_t save = lx.pos;
      std::string word;
      while (detail::ident_char(lx.peek())) word += lx.get();
      if (word != "vars" || lx.peek() != ':') {
        throw ParseError(lx.line, lx.col, "expected 'vars:' header before inequalities");
      }
      lx.get();  // ':'
      while (lx.peek() != '\n' && lx.peek() != '\0') {
        lx.skip_spaces();
        if (lx.peek() == '\n' || lx.peek() == '\0') break;
        std::string name;
        while (detail::ident_char(lx.peek())) name += lx.get();
        if (name.empty()) throw ParseError(lx.line, lx.col, "bad variable name in header");
        vars.push_back(name);
      }
      (void)save;
      sys = System(vars);
      have_header = true;
      continue;
    }
    const LinForm lhs = detail::read_expr(lx, vars);
    lx.skip_spaces();
    InputRel rel;
    const char c = lx.peek();
    if (c == '<') {
      lx.get();
      if (lx.peek() == '=') {
        lx.get();
        rel = InputRel::le;
      } else {
        rel = InputRel::lt;
      }
    } else if (c == '>') {
      lx.get();
      if (lx.peek() == '=') {
        lx.get();
        rel = InputRel::ge;
      } else {
        rel = InputRel::gt;
      }
    } else if (c == '=') {
      lx.get();
      rel = InputRel::eq;
    } else {
      lx.fail("expected relation (<=, <, =, >=, >)");
    }
    const LinForm rhs = detail::read_expr(lx, vars);
    lx.skip_spaces();
    if (lx.peek() != '\n' && lx.peek() != '\0' && lx.peek() != '\r' && lx.peek() != '#') {
      lx.fail("unexpected trailing characters");
    }
    sys.add(lhs, rel, rhs);
  }
  if (!have_header) throw ParseError(1, 1, "empty system: missing 'vars:' header");
  return sys;
}

static_assert(std::is_same_v<decltype(LinForm::constant), Rational>,
              "linear forms must carry exact rational coefficients");
static_assert(std::is_same_v<std::map<std::string, Rational>, decltype(LinForm::vars)>,
              "variable coefficients must be exact rationals");

}  // namespace gpcap::fm
