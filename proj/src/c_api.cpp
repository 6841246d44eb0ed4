#include "rieszcap/rieszcap.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "rieszcap/capacity.hpp"
#include "rieszcap/energies.hpp"
#include "rieszcap/error.hpp"
#include "rieszcap/experiment_defaults.hpp"
#include "rieszcap/measure.hpp"
#include "rieszcap/measure_io.hpp"
#include "rieszcap/parallel.hpp"
#include "rieszcap/report_io.hpp"
#include "rieszcap/verify.hpp"

struct rc_measure {
  rieszcap::DiscreteMeasure mu;
};

struct rc_capacity {
  rieszcap::CapacityEstimate est;
};

struct rc_verify_report {
  rieszcap::VerifyReport report;
};

namespace {

using namespace rieszcap;

thread_local std::string g_last_error;

rc_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return RC_ERR_DOMAIN;
    case ErrorCode::Argument: return RC_ERR_ARGUMENT;
    case ErrorCode::Size: return RC_ERR_SIZE;
    case ErrorCode::Parse: return RC_ERR_PARSE;
    case ErrorCode::Io: return RC_ERR_IO;
    case ErrorCode::UnsupportedExponent: return RC_ERR_UNSUPPORTED_EXPONENT;
    case ErrorCode::EmptyRestriction: return RC_ERR_EMPTY_RESTRICTION;
    case ErrorCode::ToleranceNotMet: return RC_ERR_TOLERANCE;
  }
  return RC_ERR_INTERNAL;
}

template <class Fn>
rc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RC_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw ArgumentError(std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

TruncationWindow window_of(rc_window w) {
  const double r_out = std::isnan(w.r_out) ? std::numeric_limits<double>::infinity() : w.r_out;
  return TruncationWindow(w.eps, r_out);
}

OptimizerConfig optimizer_of(const rc_optimizer_config* c) {
  OptimizerConfig cfg;
  if (c != nullptr) {
    cfg.max_iters = c->max_iters;
    cfg.step_rule = c->backtracking ? OptimizerConfig::StepRule::Backtracking
                                    : OptimizerConfig::StepRule::Fixed;
    cfg.fixed_step = c->fixed_step;
    cfg.tolerance = c->tolerance;
    cfg.seed = c->seed;
    cfg.random_init = c->random_init != 0;
    cfg.refine_iters = c->refine_iters;
    cfg.stationarity = c->stationarity;
  }
  cfg.validate();
  return cfg;
}

EnergyReport report_of(const rc_energy_report& r) {
  EnergyReport out;
  out.n = r.n;
  out.atoms = r.atoms;
  out.alpha = r.alpha;
  out.window = TruncationWindow(r.eps, r.r_out);
  out.p_alpha_energy = r.p_alpha;
  out.riesz_l2_energy = r.riesz_l2;
  out.sup_riesz_l2 = r.sup_riesz_l2;
  out.wolff_energy = r.wolff;
  out.max_m_alpha = r.m_alpha_max;
  out.e_alpha = r.e_alpha;
  return out;
}

std::vector<std::string> split_names(const char* list) {
  std::vector<std::string> out;
  if (list == nullptr) return out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = verify_suite_names();
  return names;
}

}  // namespace

extern "C" {

const char* rc_version(void) { return RIESZCAP_VERSION; }

const char* rc_status_name(rc_status status) {
  switch (status) {
    case RC_OK: return "ok";
    case RC_ERR_DOMAIN: return "domain error";
    case RC_ERR_ARGUMENT: return "argument error";
    case RC_ERR_SIZE: return "size cap exceeded";
    case RC_ERR_PARSE: return "malformed input";
    case RC_ERR_IO: return "i/o error";
    case RC_ERR_UNSUPPORTED_EXPONENT: return "unsupported exponent";
    case RC_ERR_EMPTY_RESTRICTION: return "empty restriction";
    case RC_ERR_TOLERANCE: return "tolerance not met";
    case RC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* rc_last_error(void) { return g_last_error.c_str(); }

void rc_string_free(char* s) { std::free(s); }

void rc_set_thread_limit(unsigned limit) { set_thread_limit(limit); }
unsigned rc_thread_limit(void) { return thread_limit(); }

void rc_set_p_alpha_fault_scale(double scale) { testing_hooks::set_p_alpha_fault_scale(scale); }

// --- measures -----------------------------------------------------------------

rc_status rc_measure_create(size_t n, size_t atoms, const double* coords, const double* weights,
                            double delta, rc_measure** out) {
  return guarded([&] {
    require(out, "out");
    require(coords, "coords");
    require(weights, "weights");
    std::vector<double> c(coords, coords + n * atoms), w(weights, weights + atoms);
    *out = delta > 0.0 ? new rc_measure{DiscreteMeasure(n, std::move(c), std::move(w), delta)}
                       : new rc_measure{DiscreteMeasure::with_natural_delta(n, std::move(c), std::move(w))};
  });
}

void rc_measure_free(rc_measure* mu) { delete mu; }
size_t rc_measure_dim(const rc_measure* mu) { return mu ? mu->mu.dim() : 0; }
size_t rc_measure_size(const rc_measure* mu) { return mu ? mu->mu.size() : 0; }
double rc_measure_delta(const rc_measure* mu) { return mu ? mu->mu.delta() : NAN; }
double rc_measure_total_mass(const rc_measure* mu) { return mu ? mu->mu.total_mass() : NAN; }
double rc_measure_diameter(const rc_measure* mu) { return mu ? mu->mu.diameter() : NAN; }

rc_status rc_measure_atom(const rc_measure* mu, size_t i, double* coords_out, double* weight_out) {
  return guarded([&] {
    require(mu, "measure");
    if (i >= mu->mu.size()) throw ArgumentError("atom index out of range");
    if (coords_out) {
      const auto x = mu->mu.atom(i);
      std::copy(x.begin(), x.end(), coords_out);
    }
    if (weight_out) *weight_out = mu->mu.weight(i);
  });
}

rc_status rc_measure_dilate(const rc_measure* mu, double lambda, rc_measure** out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    *out = new rc_measure{mu->mu.dilated(lambda)};
  });
}

rc_status rc_measure_normalize(const rc_measure* mu, rc_measure** out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    *out = new rc_measure{mu->mu.normalized()};
  });
}

rc_status rc_measure_load(const char* path, rc_measure** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new rc_measure{read_measure_file(path)};
  });
}

rc_status rc_measure_from_json(const char* text, rc_measure** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new rc_measure{measure_from_json_string(text)};
  });
}

rc_status rc_measure_to_json(const rc_measure* mu, char** out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    *out = dup_string(measure_to_json_string(mu->mu));
  });
}

rc_status rc_measure_save_json(const rc_measure* mu, const char* path) {
  return guarded([&] {
    require(mu, "measure");
    require(path, "path");
    write_measure_json(mu->mu, path);
  });
}

void rc_cantor_spec_default(rc_cantor_spec* spec) {
  if (spec == nullptr) return;
  const CantorSpec d;
  *spec = rc_cantor_spec{d.n, d.lambda, d.depth, d.base, d.max_atoms};
}

namespace {
CantorSpec cantor_of(const rc_cantor_spec* s) {
  require(s, "spec");
  CantorSpec spec;
  spec.n = s->n;
  spec.lambda = s->lambda;
  spec.depth = s->depth;
  spec.base = s->base;
  spec.max_atoms = s->max_atoms;
  return spec;
}
}  // namespace

rc_status rc_cantor_ratio_for_dimension(size_t n, double dim, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = CantorSpec::ratio_for_dimension(n, dim);
  });
}

rc_status rc_cantor_similarity_dimension(const rc_cantor_spec* spec, double* out) {
  return guarded([&] {
    require(out, "out");
    const auto s = cantor_of(spec);
    s.validate();
    *out = s.similarity_dimension();
  });
}

rc_status rc_generate_cantor(const rc_cantor_spec* spec, rc_measure** out) {
  return guarded([&] {
    require(out, "out");
    *out = new rc_measure{generate_cantor(cantor_of(spec))};
  });
}

// --- energies -----------------------------------------------------------------

rc_status rc_p_alpha_triple(size_t n, const double* x1, const double* x2, const double* x3,
                            double alpha, double* out) {
  return guarded([&] {
    require(x1, "x1");
    require(x2, "x2");
    require(x3, "x3");
    require(out, "out");
    (void)KernelParams(alpha, n);
    *out = p_alpha(std::span<const double>(x1, n), std::span<const double>(x2, n),
                   std::span<const double>(x3, n), alpha);
  });
}

rc_status rc_p_alpha_energy(const rc_measure* mu, double alpha, rc_window w, double* out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    *out = p_alpha_energy(mu->mu, KernelParams(alpha, mu->mu.dim()), window_of(w));
  });
}

rc_status rc_riesz_l2_energy(const rc_measure* mu, double alpha, rc_window w, double* out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    *out = riesz_l2_energy(mu->mu, KernelParams(alpha, mu->mu.dim()), window_of(w));
  });
}

rc_status rc_pointwise_p_potential(const rc_measure* mu, const double* x, double alpha,
                                   rc_window w, double* out) {
  return guarded([&] {
    require(mu, "measure");
    require(x, "x");
    require(out, "out");
    const std::size_t n = mu->mu.dim();
    *out = pointwise_p_potential(mu->mu, std::span<const double>(x, n), KernelParams(alpha, n),
                                 window_of(w));
  });
}

rc_status rc_wolff_potential(const rc_measure* mu, const double* x, double s, double p,
                             double alpha, rc_window w, double* out) {
  return guarded([&] {
    require(mu, "measure");
    require(x, "x");
    require(out, "out");
    const std::size_t n = mu->mu.dim();
    const auto exps = s > 0.0 ? WolffExponents(s, p, n) : WolffExponents::for_alpha(alpha, n);
    *out = wolff_potential(mu->mu, std::span<const double>(x, n), exps, window_of(w));
  });
}

rc_status rc_wolff_energy(const rc_measure* mu, double alpha, rc_window w, double* out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    *out = wolff_energy(mu->mu, WolffExponents::for_alpha(alpha, mu->mu.dim()), window_of(w));
  });
}

rc_status rc_tolsa_energy(const rc_measure* mu, double alpha, rc_window w, double* out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    *out = tolsa_energy(mu->mu, KernelParams(alpha, mu->mu.dim()), window_of(w));
  });
}

rc_status rc_energy_report_compute(const rc_measure* mu, double alpha, rc_window w,
                                   rc_energy_report* out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    const auto r = energy_report(mu->mu, alpha, window_of(w));
    *out = rc_energy_report{r.n,          r.atoms,          r.alpha,          r.window.eps,
                            r.window.r_out, r.p_alpha_energy, r.riesz_l2_energy, r.sup_riesz_l2,
                            r.wolff_energy, r.max_m_alpha,    r.e_alpha};
  });
}

const char* rc_energy_csv_header(void) {
  static const std::string header = energy_csv_header();
  return header.c_str();
}

rc_status rc_energy_report_csv_row(const rc_energy_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = dup_string(energy_csv_row(report_of(*r)));
  });
}

rc_status rc_energy_report_json(const rc_energy_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = dup_string(energy_report_json(report_of(*r)));
  });
}

// --- capacity -----------------------------------------------------------------

void rc_optimizer_config_default(rc_optimizer_config* cfg) {
  if (cfg == nullptr) return;
  const OptimizerConfig d;
  *cfg = rc_optimizer_config{d.max_iters,
                             d.step_rule == OptimizerConfig::StepRule::Backtracking ? 1 : 0,
                             d.fixed_step,
                             d.tolerance,
                             d.seed,
                             d.random_init ? 1 : 0,
                             d.refine_iters,
                             d.stationarity};
}

rc_status rc_minimize_wolff_energy(const rc_measure* support, double alpha, rc_window w,
                                   const rc_optimizer_config* cfg, rc_capacity** out) {
  return guarded([&] {
    require(support, "support");
    require(out, "out");
    KernelParams(alpha, support->mu.dim()).require_unit_range();
    *out = new rc_capacity{minimize_wolff_energy(
        support->mu, WolffExponents::for_alpha(alpha, support->mu.dim()), window_of(w),
        optimizer_of(cfg))};
  });
}

rc_status rc_estimate_gamma_plus(const rc_measure* support, double alpha, rc_window w,
                                 const rc_optimizer_config* cfg, rc_capacity** out) {
  return guarded([&] {
    require(support, "support");
    require(out, "out");
    *out = new rc_capacity{estimate_gamma_plus(support->mu, KernelParams(alpha, support->mu.dim()),
                                               window_of(w), optimizer_of(cfg))};
  });
}

rc_status rc_admissible_lower_bound(const rc_measure* mu, double alpha, rc_window w,
                                    rc_capacity** out) {
  return guarded([&] {
    require(mu, "measure");
    require(out, "out");
    const auto win = window_of(w);
    *out = new rc_capacity{admissible_lower_bound(mu->mu, KernelParams(alpha, mu->mu.dim()),
                                                  admissible_probe_points(mu->mu, win), win)};
  });
}

void rc_capacity_free(rc_capacity* c) { delete c; }
double rc_capacity_value(const rc_capacity* c) { return c ? c->est.value : NAN; }
const char* rc_capacity_method(const rc_capacity* c) { return c ? to_string(c->est.method) : ""; }

rc_status rc_capacity_diagnostic(const rc_capacity* c, const char* label, double* out) {
  return guarded([&] {
    require(c, "capacity");
    require(label, "label");
    require(out, "out");
    const auto it = c->est.diagnostics.find(label);
    if (it == c->est.diagnostics.end())
      throw ArgumentError(std::string("no diagnostic '") + label + "'");
    *out = it->second;
  });
}

rc_status rc_capacity_witness(const rc_capacity* c, rc_measure** out) {
  return guarded([&] {
    require(c, "capacity");
    require(out, "out");
    *out = new rc_measure{c->est.witness};
  });
}

rc_status rc_capacity_to_json(const rc_capacity* c, char** out) {
  return guarded([&] {
    require(c, "capacity");
    require(out, "out");
    *out = dup_string(capacity_estimate_json(c->est));
  });
}

rc_status rc_comparability_report(const rc_measure* support, double alpha, rc_window w,
                                  const rc_optimizer_config* cfg, rc_comparability* out) {
  return guarded([&] {
    require(support, "support");
    require(out, "out");
    const auto r = comparability_report(support->mu, alpha, window_of(w), optimizer_of(cfg));
    const auto& d = r.csp.diagnostics;
    *out = rc_comparability{r.gamma_plus_proxy,
                            r.csp_proxy,
                            r.ratio,
                            r.gamma_plus.diagnostics.at("energy"),
                            d.at("energy"),
                            d.at("iterations"),
                            d.at("converged") != 0.0 ? 1 : 0};
  });
}

rc_status rc_chebyshev_restrict(const rc_measure* mu, const double* potentials, double t,
                                double* retained_mass, rc_measure** restricted) {
  return guarded([&] {
    require(mu, "measure");
    require(potentials, "potentials");
    const auto r =
        chebyshev_restrict(mu->mu, std::span<const double>(potentials, mu->mu.size()), t);
    if (retained_mass) *retained_mass = r.retained_mass;
    if (restricted) *restricted = new rc_measure{r.restricted};
  });
}

size_t rc_bilipschitz_map_count(void) { return bilipschitz_registry().size(); }

const char* rc_bilipschitz_map_id(size_t i) {
  const auto& reg = bilipschitz_registry();
  return i < reg.size() ? reg[i].id.c_str() : nullptr;
}

rc_status rc_bilipschitz_experiment(const rc_measure* support, const char* map_id, double alpha,
                                    rc_window w, const rc_optimizer_config* cfg, double bound,
                                    rc_bilipschitz* out) {
  return guarded([&] {
    require(support, "support");
    require(map_id, "map_id");
    require(out, "out");
    const auto r = bilipschitz_experiment(support->mu, map_id, alpha, window_of(w),
                                          optimizer_of(cfg),
                                          bound > 0.0 ? bound : defaults::kBilipschitzBound);
    *out = rc_bilipschitz{r.before,    r.after, r.ratio, r.csp_before,
                          r.csp_after, r.bound, r.within_bound ? 1 : 0};
  });
}

const char* rc_capacity_csv_header(void) {
  static const std::string header = capacity_csv_header();
  return header.c_str();
}

rc_status rc_capacity_csv_row(const rc_capacity_row* row, char** out) {
  return guarded([&] {
    require(row, "row");
    require(out, "out");
    CapacityRow r;
    r.set_id = row->set_id ? row->set_id : "";
    r.n = row->n;
    r.alpha = row->alpha;
    r.dim = row->dim;
    r.depth = row->depth;
    r.eps = row->eps;
    r.method = row->method ? row->method : "";
    r.value = row->value;
    r.energy = row->energy;
    r.iters = row->iters;
    r.status = row->status ? row->status : "ok";
    r.csp_value = row->csp_value;
    r.csp_energy = row->csp_energy;
    r.ratio = row->ratio;
    *out = dup_string(capacity_csv_row(r));
  });
}

// --- verification -------------------------------------------------------------

void rc_verify_config_default(rc_verify_config* cfg) {
  if (cfg == nullptr) return;
  const VerifyConfig d;
  *cfg = rc_verify_config{d.seed, d.quick ? 1 : 0, nullptr, d.p_alpha_fault_scale, nullptr};
}

size_t rc_verify_suite_name_count(void) { return suite_names().size(); }

const char* rc_verify_suite_name(size_t i) {
  return i < suite_names().size() ? suite_names()[i].c_str() : nullptr;
}

rc_status rc_verify_run(const rc_verify_config* cfg, rc_verify_report** out) {
  return guarded([&] {
    require(out, "out");
    VerifyConfig c;
    if (cfg != nullptr) {
      c.seed = cfg->seed;
      c.quick = cfg->quick != 0;
      if (cfg->ratio_csv_path) c.ratio_csv_path = cfg->ratio_csv_path;
      c.p_alpha_fault_scale = cfg->p_alpha_fault_scale;
      c.suites = split_names(cfg->suites);
    }
    *out = new rc_verify_report{run_verify(c)};
  });
}

void rc_verify_report_free(rc_verify_report* r) { delete r; }
int rc_verify_passed(const rc_verify_report* r) { return r && r->report.passed() ? 1 : 0; }
size_t rc_verify_suite_count(const rc_verify_report* r) { return r ? r->report.suites.size() : 0; }

rc_status rc_verify_suite(const rc_verify_report* r, size_t i, rc_suite_info* out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    if (i >= r->report.suites.size()) throw ArgumentError("suite index out of range");
    const auto& s = r->report.suites[i];
    *out = rc_suite_info{s.name.c_str(), s.criterion, s.passed ? 1 : 0, s.checks,
                         s.failures,     s.message.c_str(), s.seconds};
  });
}

rc_status rc_verify_summary_json(const rc_verify_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = dup_string(r->report.summary_json());
  });
}

rc_status rc_verify_timings_json(const rc_verify_report* r, char** out) {
  return guarded([&] {
    require(r, "report");
    require(out, "out");
    *out = dup_string(r->report.timings_json());
  });
}

}  // extern "C"
