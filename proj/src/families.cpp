#include "pibi/families.hpp"

#include <limits>
#include <mutex>

#include <nlohmann/json.hpp>

namespace pibi {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    fail(ErrorCode::Overflow, std::string("integer overflow in ") + what);
  return static_cast<std::int64_t>(v);
}

NPoly k(std::int64_t c0, std::int64_t c1 = 0, std::int64_t c2 = 0) { return NPoly{{c0, c1, c2}}; }

InequalityFamily make(std::string name, int order, NPoly constant,
                      std::initializer_list<std::pair<const char*, NPoly>> coeffs) {
  InequalityFamily f;
  f.name = std::move(name);
  f.max_order = order;
  f.constant_term = constant;
  for (const auto& [lab, poly] : coeffs)
    f.coeffs[static_cast<std::size_t>(label_index(CorrelatorLabel::parse(lab)))] = poly;
  return f;
}

std::vector<InequalityFamily> build_catalog() {
  std::vector<InequalityFamily> cat;
  // I2 is stored as twice the usual half-integer form so that all catalog
  // coefficients are integer polynomials; ratios to the classical bound are
  // unaffected.
  cat.push_back(make("I2", 2, k(0, 4),
                     {{"0", k(-4)}, {"00", k(1)}, {"01", k(-2)}, {"11", k(1)}}));
  cat.push_back(make("I3", 3, k(0, -12, 12),
                     {{"0", k(12, -12)}, {"1", k(12, -12)}, {"00", k(-6, 3)}, {"01", k(0, 6)},
                      {"11", k(-6, 3)}, {"000", k(-2)}, {"001", k(-3)}, {"111", k(1)}}));
  cat.push_back(make("I3_1", 3, k(0, -12, 12),
                     {{"0", k(24, -24)}, {"00", k(6, 3)}, {"01", k(12, -6)}, {"11", k(-6, 3)},
                      {"000", k(-2)}, {"001", k(3)}, {"111", k(-1)}}));
  cat.push_back(make("I3_2", 3, k(0, 4, 4),
                     {{"0", k(4, -12)}, {"1", k(4, -4)}, {"00", k(6, 1)}, {"01", k(0, 2)},
                      {"11", k(-2, 1)}, {"000", k(-1)}, {"001", k(-2)}, {"011", k(-1)}}));
  cat.push_back(make("I3_3", 3, k(0, 4, 4),
                     {{"0", k(0, -8)}, {"1", k(8, -8)}, {"00", k(2, 1)}, {"01", k(4, 2)},
                      {"11", k(-2, 1)}, {"000", k(-1)}, {"001", k(-2)}, {"011", k(-1)}}));
  cat.push_back(make("I3_4", 3, k(0, 4, 4),
                     {{"0", k(8, -8)}, {"1", k(-8)}, {"00", k(-2, 1)}, {"01", k(12, -2)},
                      {"11", k(-6, 1)}, {"001", k(-1)}, {"011", k(2)}, {"111", k(-1)}}));
  cat.push_back(make("I3_5", 3, k(0, -4, 4),
                     {{"0", k(8, -8)}, {"00", k(2, 1)}, {"01", k(4, -2)}, {"11", k(-2, 1)},
                      {"000", k(-1)}, {"001", k(2)}, {"011", k(-1)}}));
  cat.push_back(make("I3_6", 3, k(0, -4, 4),
                     {{"0", k(4, -4)}, {"1", k(4, -4)}, {"00", k(-2, 1)}, {"01", k(8, -2)},
                      {"11", k(-2, 1)}, {"000", k(-1)}, {"001", k(2)}, {"011", k(-1)}}));
  cat.push_back(make("I3_7", 3, k(0, -4, 4),
                     {{"0", k(4, -4)}, {"1", k(4, -4)}, {"00", k(-2, 1)}, {"01", k(0, 2)},
                      {"11", k(-2, 1)}, {"000", k(-1)}, {"001", k(-2)}, {"011", k(-1)}}));
  cat.push_back(make("I3_8", 3, k(0, -4, 4),
                     {{"00", k(-6, 1)}, {"01", k(4, -2)}, {"11", k(-2, 1)},
                      {"000", k(-1)}, {"001", k(2)}, {"011", k(-1)}}));
  cat.push_back(make("I3_9", 3, k(0, -12, 12),
                     {{"00", k(-12, 3)}, {"01", k(0, -6)}, {"11", k(0, 3)},
                      {"000", k(-2)}, {"001", k(3)}, {"111", k(-1)}}));
  cat.push_back(make("I3_10", 3, k(0, 20, 4),
                     {{"0", k(12, -12)}, {"1", k(28, -4)}, {"00", k(-2, 1)}, {"01", k(-16, 2)},
                      {"11", k(-10, 1)}, {"001", k(1)}, {"011", k(2)}, {"111", k(1)}}));
  cat.push_back(make("I3_11", 3, k(0, 20, 4),
                     {{"0", k(12, -12)}, {"1", k(12, 12)}, {"00", k(-2, 1)}, {"01", k(-8, -2)},
                      {"11", k(6, 1)}, {"001", k(1)}, {"011", k(-2)}, {"111", k(1)}}));
  cat.push_back(make("I3_12", 3, k(0, 20, 4),
                     {{"0", k(-8, 8)}, {"1", k(8, 16)}, {"00", k(-2, 1)}, {"01", k(4, 2)},
                      {"11", k(10, 1)}, {"001", k(1)}, {"011", k(2)}, {"111", k(1)}}));
  cat.push_back(make("I3_13", 3, k(0, 44, 4),
                     {{"0", k(16, -16)}, {"1", k(56, -8)}, {"00", k(-2, 1)}, {"01", k(-20, 2)},
                      {"11", k(-14, 1)}, {"001", k(1)}, {"011", k(2)}, {"111", k(1)}}));
  cat.push_back(make("I3_14", 3, k(0, 44, 4),
                     {{"0", k(16, -16)}, {"1", k(32, 16)}, {"00", k(-2, 1)}, {"01", k(-12, -2)},
                      {"11", k(10, 1)}, {"001", k(1)}, {"011", k(-2)}, {"111", k(1)}}));
  cat.push_back(make("I3_15", 3, k(0, 44, 4),
                     {{"0", k(-12, 12)}, {"1", k(28, 20)}, {"00", k(-2, 1)}, {"01", k(8, 2)},
                      {"11", k(14, 1)}, {"001", k(1)}, {"011", k(2)}, {"111", k(1)}}));
  cat.push_back(make("I3_16", 3, k(48, -34, 10),
                     {{"0", k(-44, 20)}, {"00", k(2, 2)}, {"01", k(16, -4)}, {"11", k(-8, 2)},
                      {"000", k(1)}, {"001", k(-1)}, {"011", k(-1)}, {"111", k(1)}}));
  cat.push_back(make("I3_17", 3, k(192, -120, 24),
                     {{"0", k(-72, 24)}, {"1", k(-72, 24)}, {"00", k(-10, 5)}, {"01", k(44, -10)},
                      {"11", k(-10, 5)}, {"000", k(2)}, {"001", k(-1)}, {"011", k(-4)}, {"111", k(3)}}));
  cat.push_back(make("I4", 4, k(0, -48, 48),
                     {{"00", k(-24, 24)}, {"01", k(-48, 48)}, {"11", k(-72, 24)},
                      {"0000", k(1)}, {"0001", k(4)}, {"0011", k(6)}, {"0111", k(4)}, {"1111", k(1)}}));
  return cat;
}

} // namespace

std::int64_t eval_inequality_exact(const InequalityFamily& f, const PartitionCorrelators& pc) {
  if (pc.max_order < f.max_order)
    fail(ErrorCode::MissingCorrelator, "correlator vector order below family order");
  const std::int64_t n = pc.n_parties;
  if (n > 100000) fail(ErrorCode::Overflow, "N too large for exact evaluation");
  i128 acc = f.constant_term.eval(n);
  for (int i = 0; i < labels_up_to_order(f.max_order); ++i) {
    const auto& poly = f.coeffs[static_cast<std::size_t>(i)];
    if (poly.is_zero()) continue;
    acc += static_cast<i128>(poly.eval(n)) * pc.values[static_cast<std::size_t>(i)];
  }
  return narrow(acc, "eval_inequality_exact");
}

double eval_inequality(const InequalityFamily& f, const CorrelatorVector& v) {
  if (v.max_order < f.max_order)
    fail(ErrorCode::MissingCorrelator, "correlator vector order below family order");
  const std::int64_t n = v.n_parties;
  double acc = static_cast<double>(f.constant_term.eval(n));
  for (int i = 0; i < labels_up_to_order(f.max_order); ++i) {
    const auto& poly = f.coeffs[static_cast<std::size_t>(i)];
    if (poly.is_zero()) continue;
    acc += static_cast<double>(poly.eval(n)) * v.values[static_cast<std::size_t>(i)];
  }
  return acc;
}

ClassicalReport verify_classical_bound(const InequalityFamily& f, std::int64_t n_lo, std::int64_t n_hi) {
  if (n_lo < 1 || n_hi < n_lo) fail(ErrorCode::InvalidArgument, "bad N range");
  ClassicalReport rep;
  rep.n_lo = n_lo;
  rep.n_hi = n_hi;
  bool first = true;
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    for_each_partition(n, [&](const Partition& p) {
      const auto pc = eval_partition_correlators(p, f.max_order);
      const std::int64_t val = eval_inequality_exact(f, pc);
      if (first || val < rep.min_value) {
        first = false;
        rep.min_value = val;
        rep.min_n = n;
        rep.argmin = p;
      }
    });
  }
  rep.pass = rep.min_value >= 0;
  return rep;
}

const std::vector<InequalityFamily>& builtin_catalog() {
  static const std::vector<InequalityFamily> cat = build_catalog();
  return cat;
}

const InequalityFamily& catalog_family(const std::string& name) {
  for (const auto& f : builtin_catalog())
    if (f.name == name) return f;
  fail(ErrorCode::InvalidArgument, "unknown catalog family '" + name + "'");
}

namespace {

nlohmann::json poly_to_json(const NPoly& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (int pw = 0; pw < 3; ++pw)
    if (p.c[static_cast<std::size_t>(pw)] != 0)
      arr.push_back({pw, p.c[static_cast<std::size_t>(pw)]});
  if (arr.empty()) arr.push_back({0, 0});
  return arr;
}

NPoly poly_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) fail(ErrorCode::JsonFormat, "polynomial must be a [[power, coeff], ...] array");
  NPoly p;
  for (const auto& term : arr) {
    if (!term.is_array() || term.size() != 2) fail(ErrorCode::JsonFormat, "polynomial term must be [power, coeff]");
    const int pw = term[0].get<int>();
    if (pw < 0 || pw > 2) fail(ErrorCode::JsonFormat, "polynomial degree must be <= 2 in N");
    p.c[static_cast<std::size_t>(pw)] += term[1].get<std::int64_t>();
  }
  return p;
}

} // namespace

nlohmann::json family_to_json(const InequalityFamily& f) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (int i = 0; i < labels_up_to_order(f.max_order); ++i) {
    const auto& poly = f.coeffs[static_cast<std::size_t>(i)];
    if (!poly.is_zero()) coeffs[label_at(i).str()] = poly_to_json(poly);
  }
  return nlohmann::json{{"name", f.name},
                        {"K", f.max_order},
                        {"coeffs", coeffs},
                        {"constant", poly_to_json(f.constant_term)},
                        {"meta", nlohmann::json{{"n_min", f.n_min}}}};
}

InequalityFamily family_from_json(const nlohmann::json& j) {
  InequalityFamily f;
  try {
    f.name = j.at("name").get<std::string>();
    f.max_order = j.at("K").get<int>();
    if (f.max_order < 2 || f.max_order > kMaxOrder) fail(ErrorCode::JsonFormat, "K must be 2..4");
    f.constant_term = poly_from_json(j.at("constant"));
    for (const auto& [word, arr] : j.at("coeffs").items()) {
      const auto lab = CorrelatorLabel::parse(word);
      if (lab.order > f.max_order) fail(ErrorCode::JsonFormat, "coefficient label exceeds K");
      f.coeffs[static_cast<std::size_t>(label_index(lab))] = poly_from_json(arr);
    }
    if (j.contains("meta") && j["meta"].contains("n_min")) f.n_min = j["meta"]["n_min"].get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::JsonFormat, std::string("bad inequality JSON: ") + e.what());
  }
  return f;
}

} // namespace pibi
