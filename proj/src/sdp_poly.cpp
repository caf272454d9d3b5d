#include "pibi/sdp.hpp"

namespace pibi {

namespace {
constexpr double kDropTol = 0.0; // exact zero pruning only; coefficients are exact small integers / N powers
}

ReducedPolynomial ReducedPolynomial::constant(double c) {
  ReducedPolynomial p;
  if (c != 0) p.terms[{0, 0, 0}] = c;
  return p;
}

ReducedPolynomial ReducedPolynomial::variable(int which) {
  ReducedPolynomial p;
  MomentMonomial m;
  if (which == 0)
    m.p = 1;
  else if (which == 1)
    m.q = 1;
  else if (which == 2)
    m.r = 1;
  else
    fail(ErrorCode::InvalidArgument, "variable index must be 0, 1 or 2");
  p.terms[m] = 1.0;
  return p;
}

ReducedPolynomial& ReducedPolynomial::add(const ReducedPolynomial& o, double factor) {
  for (const auto& [m, c] : o.terms) {
    auto it = terms.find(m);
    if (it == terms.end()) {
      if (factor * c != 0) terms[m] = factor * c;
    } else {
      it->second += factor * c;
      if (std::abs(it->second) <= kDropTol) terms.erase(it);
    }
  }
  return *this;
}

ReducedPolynomial ReducedPolynomial::times(const ReducedPolynomial& o) const {
  ReducedPolynomial out;
  for (const auto& [m1, c1] : terms)
    for (const auto& [m2, c2] : o.terms) {
      const MomentMonomial m{m1.p + m2.p, m1.q + m2.q, m1.r + m2.r};
      if (m.degree() > kMomentMaxDegree)
        fail(ErrorCode::DegreeOverflow, "reduced polynomial degree exceeds 7");
      out.terms[m] += c1 * c2;
    }
  std::erase_if(out.terms, [](const auto& kv) { return kv.second == 0; });
  return out;
}

double ReducedPolynomial::eval(double s0, double s1, double z) const {
  double acc = 0;
  for (const auto& [m, c] : terms)
    acc += c * std::pow(s0, m.p) * std::pow(s1, m.q) * std::pow(z, m.r);
  return acc;
}

int ReducedPolynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms) d = std::max(d, m.degree());
  return d;
}

CorrPolynomial CorrPolynomial::constant(double c) {
  CorrPolynomial p;
  if (c != 0) p.terms[Monomial{}] = c;
  return p;
}

CorrPolynomial CorrPolynomial::symbol(CorrelatorLabel lab) {
  const int idx = label_index(lab);
  if (idx >= 9) fail(ErrorCode::InvalidArgument, "reduce_mod_ideal handles correlators up to order 3");
  CorrPolynomial p;
  Monomial m{};
  m[static_cast<std::size_t>(idx)] = 1;
  p.terms[m] = 1.0;
  return p;
}

CorrPolynomial& CorrPolynomial::add(const CorrPolynomial& o, double factor) {
  for (const auto& [m, c] : o.terms) {
    terms[m] += factor * c;
    if (terms[m] == 0) terms.erase(m);
  }
  return *this;
}

CorrPolynomial CorrPolynomial::times(const CorrPolynomial& o) const {
  CorrPolynomial out;
  for (const auto& [m1, c1] : terms)
    for (const auto& [m2, c2] : o.terms) {
      Monomial m;
      for (std::size_t i = 0; i < 9; ++i) m[i] = m1[i] + m2[i];
      out.terms[m] += c1 * c2;
    }
  std::erase_if(out.terms, [](const auto& kv) { return kv.second == 0; });
  return out;
}

ReducedPolynomial basis_polynomial(int index, std::int64_t n_parties) {
  const double nn = static_cast<double>(n_parties);
  const auto S0 = ReducedPolynomial::variable(0);
  const auto S1 = ReducedPolynomial::variable(1);
  const auto Z = ReducedPolynomial::variable(2);
  switch (index) {
    case 0: return ReducedPolynomial::constant(1.0);
    case 1: return S0;
    case 2: return S1;
    case 3: { // S_00 = S_0^2 - N
      auto p = S0.times(S0);
      p.add(ReducedPolynomial::constant(-nn));
      return p;
    }
    case 4: { // S_01 = S_0 S_1 - Z
      auto p = S0.times(S1);
      p.add(Z, -1.0);
      return p;
    }
    case 5: {
      auto p = S1.times(S1);
      p.add(ReducedPolynomial::constant(-nn));
      return p;
    }
    case 6: { // S_000 = S_0^3 + (2-3N) S_0
      auto p = S0.times(S0).times(S0);
      p.add(S0, 2.0 - 3.0 * nn);
      return p;
    }
    case 7: { // S_001 = S_0^2 S_1 + (2-N) S_1 - 2 Z S_0
      auto p = S0.times(S0).times(S1);
      p.add(S1, 2.0 - nn);
      p.add(Z.times(S0), -2.0);
      return p;
    }
    case 8: { // S_011 = S_0 S_1^2 + (2-N) S_0 - 2 Z S_1
      auto p = S0.times(S1).times(S1);
      p.add(S0, 2.0 - nn);
      p.add(Z.times(S1), -2.0);
      return p;
    }
    case 9: {
      auto p = S1.times(S1).times(S1);
      p.add(S1, 2.0 - 3.0 * nn);
      return p;
    }
    default: fail(ErrorCode::InvalidArgument, "basis index must be 0..9");
  }
}

ReducedPolynomial localizer_polynomial(int index, std::int64_t n_parties) {
  // (N +/- S_0 +/- S_1 +/- Z)/4 -> a, b, c, d
  static constexpr int signs[4][3] = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
  if (index < 0 || index > 3) fail(ErrorCode::InvalidArgument, "localizer index must be 0..3");
  ReducedPolynomial p = ReducedPolynomial::constant(0.25 * static_cast<double>(n_parties));
  p.add(ReducedPolynomial::variable(0), 0.25 * signs[index][0]);
  p.add(ReducedPolynomial::variable(1), 0.25 * signs[index][1]);
  p.add(ReducedPolynomial::variable(2), 0.25 * signs[index][2]);
  return p;
}

ReducedPolynomial reduce_mod_ideal(const CorrPolynomial& expr, std::int64_t n_parties) {
  std::array<ReducedPolynomial, 9> reps;
  for (int i = 0; i < 9; ++i) reps[static_cast<std::size_t>(i)] = basis_polynomial(i + 1, n_parties);
  ReducedPolynomial out;
  for (const auto& [mono, coeff] : expr.terms) {
    ReducedPolynomial term = ReducedPolynomial::constant(coeff);
    for (std::size_t s = 0; s < 9; ++s)
      for (int e = 0; e < mono[s]; ++e) term = term.times(reps[s]);
    out.add(term);
  }
  std::erase_if(out.terms, [](const auto& kv) { return kv.second == 0; });
  return out;
}

MomentMatrixSpec build_moment_spec(std::int64_t n_parties) {
  if (n_parties < 2) fail(ErrorCode::InvalidArgument, "need N >= 2");
  MomentMatrixSpec spec;
  spec.n_parties = n_parties;
  for (int i = 0; i < 10; ++i) spec.basis[static_cast<std::size_t>(i)] = basis_polynomial(i, n_parties);
  for (int i = 0; i < 4; ++i) spec.localizers[static_cast<std::size_t>(i)] = localizer_polynomial(i, n_parties);

  spec.entries.resize(500);
  std::map<MomentMonomial, int> seen;
  for (int blk = 0; blk < 5; ++blk) {
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        ReducedPolynomial e = spec.basis[static_cast<std::size_t>(i)].times(spec.basis[static_cast<std::size_t>(j)]);
        if (blk > 0) e = e.times(spec.localizers[static_cast<std::size_t>(blk - 1)]);
        spec.max_degree = std::max(spec.max_degree, e.degree());
        for (const auto& [m, c] : e.terms)
          if (m.degree() > 0) seen.emplace(m, 0);
        spec.entries[static_cast<std::size_t>(blk * 100 + i * 10 + j)] = std::move(e);
      }
  }
  spec.monomials.reserve(seen.size());
  for (const auto& [m, unused] : seen) spec.monomials.push_back(m);
  return spec;
}

} // namespace pibi
