#pragma once

#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

#include "pencil/forms.hpp"

namespace testutil {

using pencil::forms::Exps;
using pencil::forms::MPoly;
using pencil::gf::Elem;
using pencil::gf::FieldPtr;

inline std::vector<Exps> monomials(int d, int nvars = 4) {
  std::vector<Exps> out;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; a + b <= d; ++b)
      for (int c = 0; a + b + c <= d; ++c) {
        int e = d - a - b - c;
        if (nvars == 3 && e) continue;
        if (nvars == 3) out.push_back(Exps{std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), 0});
        else out.push_back(Exps{std::uint8_t(a), std::uint8_t(b), std::uint8_t(c), std::uint8_t(e)});
      }
  return out;
}

inline MPoly form(const FieldPtr& K, std::initializer_list<std::pair<Exps, Elem>> terms, int nvars = 4) {
  MPoly f{K, nvars, {}};
  for (const auto& [e, c] : terms) f.add_term(e, c);
  return f;
}

inline MPoly random_form(const FieldPtr& K, int d, std::mt19937_64& rng, int nvars = 4) {
  MPoly f{K, nvars, {}};
  while (f.is_zero())
    for (const auto& e : monomials(d, nvars)) f.add_term(e, rng() % K->size());
  return f;
}

inline std::vector<Elem> random_point(const pencil::gf::Field& K, int n, std::mt19937_64& rng) {
  std::vector<Elem> v(n);
  for (auto& x : v) x = rng() % K.size();
  return v;
}

}  // namespace testutil
