#include "pibi.h"

#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "pibi/nongauss.hpp"
#include "pibi/polytope.hpp"
#include "pibi/sdp.hpp"

namespace {

thread_local std::string g_last_error;

pibi_status code_to_status(pibi::ErrorCode c) {
  using EC = pibi::ErrorCode;
  switch (c) {
    case EC::InvalidArgument: return PIBI_ERR_INVALID_ARG;
    case EC::MissingCorrelator: return PIBI_ERR_MISSING_CORRELATOR;
    case EC::SizeLimit: return PIBI_ERR_SIZE_LIMIT;
    case EC::Overflow: return PIBI_ERR_OVERFLOW;
    case EC::SolverFailure: return PIBI_ERR_SOLVER_FAILURE;
    case EC::NoViolation: return PIBI_ERR_NO_VIOLATION;
    case EC::NonConvergence: return PIBI_ERR_NON_CONVERGENCE;
    case EC::InvalidCertificate: return PIBI_ERR_INVALID_CERTIFICATE;
    case EC::DegreeOverflow: return PIBI_ERR_DEGREE_OVERFLOW;
    case EC::DegenerateVariance: return PIBI_ERR_DEGENERATE_VARIANCE;
    case EC::JsonFormat: return PIBI_ERR_JSON;
  }
  return PIBI_ERR_INTERNAL;
}

template <class F>
pibi_status guarded(F&& fn) {
  try {
    fn();
    return PIBI_OK;
  } catch (const pibi::Error& e) {
    g_last_error = e.what();
    return code_to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PIBI_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PIBI_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const pibi::InequalityFamily* unwrap(const pibi_family* f) {
  return reinterpret_cast<const pibi::InequalityFamily*>(f);
}

pibi::SymState make_state(int64_t n, const double* re, const double* im) {
  if (n < 1 || re == nullptr) pibi::fail(pibi::ErrorCode::InvalidArgument, "bad state arguments");
  pibi::SymState psi(n + 1);
  for (int64_t i = 0; i <= n; ++i) psi(i) = std::complex<double>(re[i], im ? im[i] : 0.0);
  const double nrm = psi.norm();
  if (std::abs(nrm - 1.0) > 1e-9) pibi::fail(pibi::ErrorCode::InvalidArgument, "state must be unit norm");
  return psi;
}

pibi::MembershipOptions make_opts(const pibi_sdp_options* o) {
  pibi::MembershipOptions opts;
  if (o) {
    if (o->lambda_cap > 0) opts.lambda_cap = o->lambda_cap;
    if (o->tolerance > 0) opts.tol = o->tolerance;
  }
  return opts;
}

nlohmann::json certificate_json(const pibi::Certificate& cert, double mu, const pibi::DirectionSearch& ds,
                                const pibi::MembershipResult& res) {
  nlohmann::json coeffs = nlohmann::json::object();
  const int ncoef = cert.constrained ? 5 : 9;
  for (int i = 0; i < ncoef; ++i)
    coeffs[pibi::label_at(i).str()] = nlohmann::json::array({{0, cert.coeffs[static_cast<std::size_t>(i)]}});
  nlohmann::json j{{"name", cert.constrained ? "I3_SDP_constrained" : "I3_SDP"},
                   {"K", 3},
                   {"coeffs", coeffs},
                   {"constant", nlohmann::json::array({{0, 1.0}})}};
  if (cert.constrained)
    j["combined_third_order"] = {{"alpha", cert.alpha}, {"beta", cert.beta}, {"coefficient", cert.combined_coeff}};
  nlohmann::json point = nlohmann::json::object();
  for (int i = 0; i < 9; ++i)
    point[pibi::label_at(i).str()] = cert.separated_point.values[static_cast<std::size_t>(i)];
  j["meta"] = {{"n", cert.n_parties},
               {"mu", mu},
               {"lambda_star", cert.lambda_star},
               {"alpha", cert.alpha},
               {"beta", cert.beta},
               {"solver", "hkm-ipm-longdouble"},
               {"solver_err", res.solver_err},
               {"stationarity_resid", res.stationarity_resid},
               {"vertex_min", cert.min_vertex_value},
               {"value_at_point", cert.value_at_point},
               {"constant_raw", cert.constant_raw},
               {"directions",
                {{"n", {ds.n.x, ds.n.y, ds.n.z}},
                 {"m", {ds.m.x, ds.m.y, ds.m.z}},
                 {"angles", {ds.angles.phi0, ds.angles.theta0, ds.angles.phi1, ds.angles.theta1}}}},
               {"separated_point", point},
               // both normalizations of the combined coefficient (the dual is
               // reported either raw or with the (alpha, beta) weights absorbed)
               {"combined_coeff_raw",
                cert.constrained ? cert.combined_coeff * cert.lambda_star : 0.0}};
  return j;
}

} // namespace

extern "C" {

const char* pibi_status_name(pibi_status s) {
  switch (s) {
    case PIBI_OK: return "ok";
    case PIBI_ERR_INVALID_ARG: return "invalid_argument";
    case PIBI_ERR_MISSING_CORRELATOR: return "missing_correlator";
    case PIBI_ERR_SIZE_LIMIT: return "size_limit";
    case PIBI_ERR_OVERFLOW: return "overflow";
    case PIBI_ERR_SOLVER_FAILURE: return "solver_failure";
    case PIBI_ERR_NO_VIOLATION: return "no_violation";
    case PIBI_ERR_NON_CONVERGENCE: return "non_convergence";
    case PIBI_ERR_INVALID_CERTIFICATE: return "invalid_certificate";
    case PIBI_ERR_DEGREE_OVERFLOW: return "degree_overflow";
    case PIBI_ERR_DEGENERATE_VARIANCE: return "degenerate_variance";
    case PIBI_ERR_JSON: return "json_error";
    case PIBI_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* pibi_last_error(void) { return g_last_error.c_str(); }

void pibi_string_free(char* s) { delete[] s; }

struct pibi_catalog {
  std::vector<pibi::InequalityFamily> families;
};

pibi_status pibi_catalog_create(pibi_catalog** out) {
  return guarded([&] {
    if (!out) pibi::fail(pibi::ErrorCode::InvalidArgument, "null output");
    *out = new pibi_catalog{pibi::builtin_catalog()};
  });
}

void pibi_catalog_free(pibi_catalog* cat) { delete cat; }

int pibi_catalog_size(const pibi_catalog* cat) { return cat ? static_cast<int>(cat->families.size()) : 0; }

pibi_status pibi_catalog_at(const pibi_catalog* cat, int index, const pibi_family** out) {
  return guarded([&] {
    if (!cat || !out || index < 0 || index >= static_cast<int>(cat->families.size()))
      pibi::fail(pibi::ErrorCode::InvalidArgument, "bad catalog index");
    *out = reinterpret_cast<const pibi_family*>(&cat->families[static_cast<std::size_t>(index)]);
  });
}

pibi_status pibi_catalog_find(const pibi_catalog* cat, const char* name, const pibi_family** out) {
  return guarded([&] {
    if (!cat || !name || !out) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    for (const auto& f : cat->families)
      if (f.name == name) {
        *out = reinterpret_cast<const pibi_family*>(&f);
        return;
      }
    pibi::fail(pibi::ErrorCode::InvalidArgument, std::string("unknown family '") + name + "'");
  });
}

pibi_status pibi_family_from_json(const char* json, pibi_family** out) {
  return guarded([&] {
    if (!json || !out) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    nlohmann::json j = nlohmann::json::parse(json, nullptr, false);
    if (j.is_discarded()) pibi::fail(pibi::ErrorCode::JsonFormat, "malformed JSON");
    auto* fam = new pibi::InequalityFamily(pibi::family_from_json(j));
    *out = reinterpret_cast<pibi_family*>(fam);
  });
}

void pibi_family_free(pibi_family* f) { delete reinterpret_cast<pibi::InequalityFamily*>(f); }

pibi_status pibi_family_to_json(const pibi_family* f, char** out_json) {
  return guarded([&] {
    if (!f || !out_json) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    *out_json = dup_string(pibi::family_to_json(*unwrap(f)).dump(2));
  });
}

const char* pibi_family_name(const pibi_family* f) { return f ? unwrap(f)->name.c_str() : ""; }

int pibi_family_order(const pibi_family* f) { return f ? unwrap(f)->max_order : 0; }

pibi_status pibi_verify_classical(const pibi_family* f, int64_t n_lo, int64_t n_hi,
                                  pibi_classical_report* out) {
  return guarded([&] {
    if (!f || !out) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    const auto rep = pibi::verify_classical_bound(*unwrap(f), n_lo, n_hi);
    out->pass = rep.pass ? 1 : 0;
    out->min_value = rep.min_value;
    out->min_n = rep.min_n;
    out->argmin[0] = rep.argmin.a;
    out->argmin[1] = rep.argmin.b;
    out->argmin[2] = rep.argmin.c;
    out->argmin[3] = rep.argmin.d;
  });
}

pibi_status pibi_eval_partition(const pibi_family* f, int64_t a, int64_t b, int64_t c, int64_t d,
                                int64_t* out_value) {
  return guarded([&] {
    if (!f || !out_value) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    const auto pc = pibi::eval_partition_correlators({a, b, c, d}, unwrap(f)->max_order);
    *out_value = pibi::eval_inequality_exact(*unwrap(f), pc);
  });
}

struct pibi_vertexset {
  pibi::VertexSet vs;
};

pibi_status pibi_vertices(int64_t n, int max_order, pibi_vertexset** out) {
  return guarded([&] {
    if (!out) pibi::fail(pibi::ErrorCode::InvalidArgument, "null output");
    *out = new pibi_vertexset{pibi::enumerate_vertices(n, max_order)};
  });
}

void pibi_vertexset_free(pibi_vertexset* vs) { delete vs; }

int64_t pibi_vertexset_count(const pibi_vertexset* vs) {
  return vs ? static_cast<int64_t>(vs->vs.points.size()) : 0;
}

int pibi_vertexset_dim(const pibi_vertexset* vs) { return vs ? vs->vs.dim() : 0; }

pibi_status pibi_vertexset_point(const pibi_vertexset* vs, int64_t index, int64_t* out_coords) {
  return guarded([&] {
    if (!vs || !out_coords || index < 0 || index >= static_cast<int64_t>(vs->vs.points.size()))
      pibi::fail(pibi::ErrorCode::InvalidArgument, "bad vertex index");
    for (int j = 0; j < vs->vs.dim(); ++j)
      out_coords[j] = vs->vs.points[static_cast<std::size_t>(index)][static_cast<std::size_t>(j)];
  });
}

pibi_status pibi_facet_check(const pibi_family* f, int64_t n, pibi_facet_report* out) {
  return guarded([&] {
    if (!f || !out) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    const auto rep = pibi::facet_check(*unwrap(f), n);
    out->valid = rep.valid ? 1 : 0;
    out->min_value = rep.min_value;
    out->tight_count = rep.tight_count;
    out->tight_affine_rank = rep.tight_affine_rank;
    out->ambient_affine_dim = rep.ambient_affine_dim;
    out->is_facet = rep.is_facet ? 1 : 0;
  });
}

pibi_status pibi_optimize_theta(const pibi_family* f, int64_t n, double* out_theta, double* out_qv,
                                double* out_ratio) {
  return guarded([&] {
    if (!f) pibi::fail(pibi::ErrorCode::InvalidArgument, "null family");
    const auto r = pibi::optimize_theta(*unwrap(f), n);
    if (out_theta) *out_theta = r.theta;
    if (out_qv) *out_qv = r.q_v;
    if (out_ratio) *out_ratio = r.ratio;
  });
}

pibi_status pibi_oat_state(int64_t n, double mu, double* out_re, double* out_im) {
  return guarded([&] {
    if (!out_re || !out_im) pibi::fail(pibi::ErrorCode::InvalidArgument, "null output");
    const auto psi = pibi::oat_vector({n, mu, 1.0});
    for (int64_t i = 0; i <= n; ++i) {
      out_re[i] = psi(i).real();
      out_im[i] = psi(i).imag();
    }
  });
}

pibi_status pibi_min_eig_state(const pibi_family* f, int64_t n, double* out_theta, double* out_ratio,
                               double* out_re, double* out_im) {
  return guarded([&] {
    if (!f || !out_re || !out_im) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    const auto& fam = *unwrap(f);
    const auto opt = pibi::optimize_theta(fam, n);
    const pibi::DickeSpace space{n};
    const auto op = pibi::bell_operator(fam, space, {0, 0, 1},
                                        pibi::Direction::from_angles(0.0, opt.theta));
    const auto [val, vec] = pibi::min_eigenvalue(op.matrix);
    if (out_theta) *out_theta = opt.theta;
    if (out_ratio) *out_ratio = val / static_cast<double>(fam.constant_term.eval(n));
    for (int64_t i = 0; i <= n; ++i) {
      out_re[i] = vec(i).real();
      out_im[i] = vec(i).imag();
    }
  });
}

pibi_status pibi_oat_optimize_angles(const pibi_family* f, int64_t n, double mu, double eta, int starts,
                                     double out_angles[4], double* out_value, double* out_ratio) {
  return guarded([&] {
    if (!f) pibi::fail(pibi::ErrorCode::InvalidArgument, "null family");
    const auto r = pibi::optimize_angles(*unwrap(f), {n, mu, eta}, starts > 0 ? starts : 24);
    if (out_angles) {
      out_angles[0] = r.angles.phi0;
      out_angles[1] = r.angles.theta0;
      out_angles[2] = r.angles.phi1;
      out_angles[3] = r.angles.theta1;
    }
    if (out_value) *out_value = r.value;
    if (out_ratio) *out_ratio = r.ratio;
  });
}

pibi_status pibi_oat_min_purity(const pibi_family* f, int64_t n, double mu, double* out_eta) {
  return guarded([&] {
    if (!f || !out_eta) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    const auto eta = pibi::min_purity(*unwrap(f), n, mu);
    if (!eta) pibi::fail(pibi::ErrorCode::NoViolation, "pure state does not violate this family");
    *out_eta = *eta;
  });
}

pibi_status pibi_state_bell_value(const pibi_family* f, int64_t n, const double* re, const double* im,
                                  double eta, const double angles[4], double* out_value) {
  return guarded([&] {
    if (!f || !angles || !out_value) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    const auto psi = make_state(n, re, im);
    const auto tensors = pibi::SpinMomentTensors::from_state(n, psi);
    *out_value = pibi::bell_value(*unwrap(f), tensors, eta, {angles[0], angles[1], angles[2], angles[3]});
  });
}

pibi_status pibi_state_optimize_angles(const pibi_family* f, int64_t n, const double* re, const double* im,
                                       double eta, int starts, double out_angles[4], double* out_value,
                                       double* out_ratio) {
  return guarded([&] {
    if (!f) pibi::fail(pibi::ErrorCode::InvalidArgument, "null family");
    const auto psi = make_state(n, re, im);
    const auto tensors = pibi::SpinMomentTensors::from_state(n, psi);
    const auto r = pibi::optimize_angles(*unwrap(f), tensors, n, eta, starts > 0 ? starts : 24);
    if (out_angles) {
      out_angles[0] = r.angles.phi0;
      out_angles[1] = r.angles.theta0;
      out_angles[2] = r.angles.phi1;
      out_angles[3] = r.angles.theta1;
    }
    if (out_value) *out_value = r.value;
    if (out_ratio) *out_ratio = r.ratio;
  });
}

pibi_status pibi_sdp_membership_point(int64_t n, const double point9[9], int constrained, double alpha,
                                      double beta, const pibi_sdp_options* opts, double* out_lambda) {
  return guarded([&] {
    if (!point9 || !out_lambda) pibi::fail(pibi::ErrorCode::InvalidArgument, "null argument");
    const auto spec = pibi::build_moment_spec(n);
    pibi::CorrelatorVector v;
    v.n_parties = n;
    v.max_order = 3;
    for (int i = 0; i < 9; ++i) v.values[static_cast<std::size_t>(i)] = point9[i];
    const auto mo = make_opts(opts);
    const auto res = constrained ? pibi::constrained_membership_sdp(spec, v, alpha, beta, mo)
                                 : pibi::membership_sdp(spec, v, mo);
    *out_lambda = res.lambda_star;
  });
}

pibi_status pibi_sdp_detect(int64_t n, double mu, int constrain_one_third_moment,
                            const pibi_sdp_options* opts, char** out_certificate_json) {
  return guarded([&] {
    if (!out_certificate_json) pibi::fail(pibi::ErrorCode::InvalidArgument, "null output");
    const auto mo = make_opts(opts);
    const int starts = opts && opts->direction_starts > 0 ? opts->direction_starts : 8;
    const int grid = opts && opts->alpha_beta_grid > 0 ? opts->alpha_beta_grid : 180;
    const auto spec = pibi::build_moment_spec(n);
    const auto ds = pibi::optimize_directions(n, mu, starts, mo);
    pibi::MembershipResult res;
    if (constrain_one_third_moment) {
      const auto ab = pibi::optimize_alpha_beta(spec, ds.point, grid, mo);
      res = ab.result;
    } else {
      res = pibi::membership_sdp(spec, ds.point, mo);
    }
    const auto cert = pibi::extract_certificate(res, spec, ds.point);
    *out_certificate_json = dup_string(certificate_json(cert, mu, ds, res).dump(2));
  });
}

pibi_status pibi_excess_kurtosis(int64_t n, const double* re, const double* im, int optimize,
                                 double* out_value, double out_direction[3]) {
  return guarded([&] {
    if (!out_value) pibi::fail(pibi::ErrorCode::InvalidArgument, "null output");
    const auto psi = make_state(n, re, im);
    const auto r = pibi::excess_kurtosis(psi, optimize != 0);
    *out_value = r.value;
    if (out_direction) {
      out_direction[0] = r.direction.x;
      out_direction[1] = r.direction.y;
      out_direction[2] = r.direction.z;
    }
  });
}

pibi_status pibi_wigner_negativity(int64_t n, const double* re, const double* im, double tol,
                                   double* out_value) {
  return guarded([&] {
    if (!out_value) pibi::fail(pibi::ErrorCode::InvalidArgument, "null output");
    const auto psi = make_state(n, re, im);
    *out_value = pibi::wigner_negativity(psi, tol > 0 ? tol : 1e-3);
  });
}

pibi_status pibi_wigner_field(int64_t n, const double* re, const double* im, int n_theta, int n_phi,
                              double* out_theta, double* out_phi, double* out_w) {
  return guarded([&] {
    if (!out_theta || !out_phi || !out_w) pibi::fail(pibi::ErrorCode::InvalidArgument, "null output");
    const auto psi = make_state(n, re, im);
    const auto grid = pibi::SphereGrid::build(n_theta, n_phi);
    const auto field = pibi::wigner_function(pibi::MultipoleDecomposition::from_state(psi), grid);
    for (int i = 0; i < n_theta; ++i) out_theta[i] = grid.theta[static_cast<std::size_t>(i)];
    for (int i = 0; i < n_phi; ++i) out_phi[i] = grid.phi[static_cast<std::size_t>(i)];
    for (int i = 0; i < n_theta; ++i)
      for (int j = 0; j < n_phi; ++j) out_w[i * n_phi + j] = field(i, j);
  });
}

pibi_status pibi_clebsch_gordan(double j1, double m1, double j2, double m2, double jj, double mm,
                                double* out_value) {
  return guarded([&] {
    if (!out_value) pibi::fail(pibi::ErrorCode::InvalidArgument, "null output");
    *out_value = pibi::clebsch_gordan(j1, m1, j2, m2, jj, mm);
  });
}

} // extern "C"
