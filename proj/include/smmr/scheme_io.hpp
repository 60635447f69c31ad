#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smmr/coupling.hpp"
#include "smmr/rational.hpp"

namespace smmr {

// Plain-text coupling scheme files.  Layout (order of sections is fixed;
// '#' starts a comment; numbers are decimals or p/q rationals):
//
//     name   <identifier>          (optional)
//     stages <s>
//     order  <p>
//     kind   mri | spc
//     A                            (s rows of s entries, row-major)
//     ...
//     b                            (s entries)
//     ...
//     c                            (s entries)
//     ...
//     coupling 0                   (s rows for mri, 1 row for spc)
//     ...
//     coupling 1                   (one block per polynomial degree)
//     ...
//
// When every number parses as a rational the exact form is retained so the
// scheme validates symbolically as well as numerically.

namespace detail {

struct SchemeToken {
  std::string text;
};

class SchemeTokenizer {
 public:
  explicit SchemeTokenizer(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back(tok);
    }
  }

  bool done() const { return next_ >= tokens_.size(); }

  std::string take(const char* what) {
    if (done()) throw std::runtime_error(std::string("scheme file: missing ") + what);
    return tokens_[next_++];
  }

  const std::string& peek() const { return tokens_[next_]; }

 private:
  std::vector<std::string> tokens_;
  std::size_t next_ = 0;
};

inline double parse_scheme_number(const std::string& text, std::optional<Rational>& rational) {
  try {
    const Rational r = Rational::parse(text);
    rational = r;
    return r.to_double();
  } catch (const std::exception&) {
    rational.reset();
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("scheme file: bad number '" + text + "'");
  }
}

}  // namespace detail

inline CouplingScheme parse_scheme(std::istream& in, const std::string& fallbackName) {
  detail::SchemeTokenizer toks(in);
  std::string name = fallbackName;
  bool allRational = true;

  auto expect = [&](const char* keyword) {
    const std::string got = toks.take(keyword);
    if (got != keyword)
      throw std::runtime_error("scheme file: expected '" + std::string(keyword) + "', got '" +
                               got + "'");
  };

  if (!toks.done() && toks.peek() == "name") {
    toks.take("name");
    name = toks.take("scheme name");
  }

  expect("stages");
  const int s = std::stoi(toks.take("stage count"));
  if (s < 1 || s > 64) throw std::runtime_error("scheme file: unreasonable stage count");
  expect("order");
  const int order = std::stoi(toks.take("order"));
  if (order < 1) throw std::runtime_error("scheme file: order must be positive");
  expect("kind");
  const std::string kindTok = toks.take("kind");
  CouplingKind kind;
  if (kindTok == "mri" || kindTok == "decoupled-mri")
    kind = CouplingKind::DecoupledMri;
  else if (kindTok == "spc" || kindTok == "step-predictor-corrector")
    kind = CouplingKind::StepPredictorCorrector;
  else
    throw std::runtime_error("scheme file: unknown kind '" + kindTok + "'");

  auto readNumber = [&](const char* what, Rational& rOut) {
    std::optional<Rational> r;
    const double v = detail::parse_scheme_number(toks.take(what), r);
    if (r)
      rOut = *r;
    else
      allRational = false;
    return v;
  };

  RationalTableau exactTab;
  exactTab.a.assign(s, std::vector<Rational>(s));
  exactTab.b.assign(s, Rational());
  exactTab.c.assign(s, Rational());

  RkTableau tab;
  tab.name = name + "-base";
  tab.order = order;
  tab.a = Matrix(s, s);
  tab.b.resize(s);
  tab.c.resize(s);

  expect("A");
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) tab.a(i, j) = readNumber("A entry", exactTab.a[i][j]);
  expect("b");
  for (int j = 0; j < s; ++j) tab.b[j] = readNumber("b entry", exactTab.b[j]);
  expect("c");
  for (int j = 0; j < s; ++j) tab.c[j] = readNumber("c entry", exactTab.c[j]);

  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j)
      if (tab.a(i, j) != 0.0)
        throw std::runtime_error(
            "scheme file: A is not strictly lower triangular; only explicit schemes are "
            "supported");

  const int rows = kind == CouplingKind::DecoupledMri ? s : 1;
  PolynomialMatrix coupling;
  std::vector<std::vector<std::vector<Rational>>> exactCoupling;
  int degree = 0;
  while (!toks.done()) {
    expect("coupling");
    const int k = std::stoi(toks.take("coupling degree"));
    if (k != degree)
      throw std::runtime_error("scheme file: coupling blocks must appear as degrees 0,1,2,...");
    Matrix block(rows, s);
    std::vector<std::vector<Rational>> exactBlock(rows, std::vector<Rational>(s));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < s; ++j) block(i, j) = readNumber("coupling entry", exactBlock[i][j]);
    coupling.coeff.push_back(std::move(block));
    exactCoupling.push_back(std::move(exactBlock));
    ++degree;
  }
  if (coupling.coeff.empty())
    throw std::runtime_error("scheme file: at least one coupling block is required");

  std::optional<ExactSchemeData> exact;
  if (allRational) exact = ExactSchemeData{std::move(exactTab), std::move(exactCoupling)};
  return make_coupling_scheme(std::move(name), std::move(tab), kind, std::move(coupling),
                              std::move(exact));
}

inline CouplingScheme load_scheme_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scheme_file: cannot open '" + path + "'");
  std::string stem = path;
  const std::size_t slash = stem.find_last_of("/\\");
  if (slash != std::string::npos) stem.erase(0, slash + 1);
  const std::size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos && dot > 0) stem.erase(dot);
  return parse_scheme(in, stem);
}

}  // namespace smmr
