// rieszcap: batch driver over the C interface.
//
//   rieszcap gen --lambda 0.25 --depth 3 --out set.json
//   rieszcap energy set.json --alpha 0.25,0.5 --eps 0.01,0.02
//   rieszcap capacity --dim 0.5 --depth 1,2,3,4,5 --alpha 0.5 --plot value.svg
//   rieszcap verify --json
//
// Exit codes: 0 ok, 1 verification failure, 2 size cap, 3 malformed input,
// 4 I/O.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rieszcap/rieszcap.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitSize = 2;
constexpr int kExitInput = 3;
constexpr int kExitIo = 4;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(rc_status s) {
  switch (s) {
    case RC_OK: return kExitOk;
    case RC_ERR_SIZE: return kExitSize;
    case RC_ERR_IO: return kExitIo;
    case RC_ERR_INTERNAL:
    case RC_ERR_TOLERANCE: return kExitVerify;
    default: return kExitInput;
  }
}

void check(rc_status s, const std::string& context) {
  if (s != RC_OK) throw CliError{exit_code_for(s), context + ": " + rc_last_error()};
}

struct MeasureDeleter {
  void operator()(rc_measure* m) const { rc_measure_free(m); }
};
using Measure = std::unique_ptr<rc_measure, MeasureDeleter>;

struct CapacityDeleter {
  void operator()(rc_capacity* c) const { rc_capacity_free(c); }
};
using Capacity = std::unique_ptr<rc_capacity, CapacityDeleter>;

struct ReportDeleter {
  void operator()(rc_verify_report* r) const { rc_verify_report_free(r); }
};

struct CString {
  char* p = nullptr;
  ~CString() { rc_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

std::string real(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---- output ----------------------------------------------------------------

/// Writes to --out when given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) : path_(path) {
    if (!path_.empty()) {
      file_.open(path_, std::ios::binary);
      if (!file_) throw CliError{kExitIo, "cannot open " + path_ + " for writing"};
    }
  }
  std::ostream& out() { return path_.empty() ? std::cout : file_; }
  void close() {
    if (path_.empty()) {
      std::cout.flush();
      return;
    }
    file_.close();
    if (!file_) throw CliError{kExitIo, "failed writing " + path_};
  }

 private:
  std::string path_;
  std::ofstream file_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CliError{kExitIo, "cannot open " + path + " for writing"};
  f << text;
  f.close();
  if (!f) throw CliError{kExitIo, "failed writing " + path};
}

// ---- config files ------------------------------------------------------------

/// Binds JSON config keys to CLI options. A key only applies when the matching
/// flag was not given on the command line; unknown keys are rejected.
class ConfigBinder {
 public:
  template <class T>
  void bind(const std::string& key, CLI::Option* opt, T& target) {
    entries_.push_back({key, opt, [&target, key](const json& v) {
                          try {
                            target = v.get<T>();
                          } catch (const json::exception&) {
                            throw CliError{kExitInput, "config key '" + key + "' has the wrong type"};
                          }
                        }});
  }
  /// Lists accept a single number too.
  void bind_list(const std::string& key, CLI::Option* opt, std::vector<double>& target) {
    entries_.push_back({key, opt, [&target, key](const json& v) {
                          try {
                            target = v.is_array() ? v.get<std::vector<double>>()
                                                  : std::vector<double>{v.get<double>()};
                          } catch (const json::exception&) {
                            throw CliError{kExitInput, "config key '" + key + "' must be a number or list"};
                          }
                        }});
  }
  void bind_uint_list(const std::string& key, CLI::Option* opt, std::vector<unsigned>& target) {
    entries_.push_back({key, opt, [&target, key](const json& v) {
                          try {
                            target = v.is_array() ? v.get<std::vector<unsigned>>()
                                                  : std::vector<unsigned>{v.get<unsigned>()};
                          } catch (const json::exception&) {
                            throw CliError{kExitInput, "config key '" + key + "' must be an integer or list"};
                          }
                        }});
  }

  void apply(const std::string& path) const {
    if (path.empty()) return;
    std::ifstream f(path);
    if (!f) throw CliError{kExitIo, "cannot read config " + path};
    json doc;
    try {
      doc = json::parse(f);
    } catch (const json::exception& e) {
      throw CliError{kExitInput, "config " + path + " is not valid JSON: " + e.what()};
    }
    if (!doc.is_object()) throw CliError{kExitInput, "config " + path + " must hold a JSON object"};
    for (const auto& [key, value] : doc.items()) {
      const auto it = std::find_if(entries_.begin(), entries_.end(),
                                   [&](const Entry& e) { return e.key == key; });
      if (it == entries_.end()) throw CliError{kExitInput, "unknown config key '" + key + "'"};
      if (it->opt->count() == 0) it->assign(value);
    }
  }

 private:
  struct Entry {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> assign;
  };
  std::vector<Entry> entries_;
};

// ---- shared option groups ----------------------------------------------------

struct CommonOptions {
  std::string config;
  std::string out;
  unsigned threads = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o, ConfigBinder& cb) {
  cmd->add_option("--config", o.config, "JSON file with the same keys as the long flags");
  cb.bind("out", cmd->add_option("--out", o.out, "output path (default stdout)"), o.out);
  cb.bind("threads", cmd->add_option("--threads", o.threads, "worker thread cap (0 = all cores)"),
          o.threads);
  cb.bind("seed", cmd->add_option("--seed", o.seed, "seed for randomized steps"), o.seed);
}

struct SetOptions {
  std::string measure;
  std::size_t n = 2;
  double lambda = 0.0;
  std::vector<double> dims;
  std::vector<unsigned> depths{3};
  double base = 1.0;
  std::size_t max_atoms = 65536;
};

void add_set(CLI::App* cmd, SetOptions& o, ConfigBinder& cb, bool measure_allowed) {
  if (measure_allowed)
    cb.bind("measure", cmd->add_option("measure,--measure", o.measure, "measure file (.json or .csv)"),
            o.measure);
  cb.bind("n", cmd->add_option("--n", o.n, "ambient dimension of the Cantor set"), o.n);
  cb.bind("lambda", cmd->add_option("--lambda", o.lambda, "contraction ratio in (0, 1/2]"), o.lambda);
  cb.bind_list("dim", cmd->add_option("--dim", o.dims, "similarity dimension(s); overrides --lambda")
                          ->delimiter(','),
               o.dims);
  cb.bind_uint_list("depth", cmd->add_option("--depth", o.depths, "depth(s)")->delimiter(','),
                    o.depths);
  cb.bind("base", cmd->add_option("--base", o.base, "side of the initial cube"), o.base);
  cb.bind("max_atoms", cmd->add_option("--max-atoms", o.max_atoms, "atom cap"), o.max_atoms);
}

struct SetPoint {
  std::string id;
  Measure mu;
  double dim = std::numeric_limits<double>::quiet_NaN();
  int depth = -1;
};

Measure load_measure(const std::string& path) {
  rc_measure* m = nullptr;
  check(rc_measure_load(path.c_str(), &m), "reading " + path);
  return Measure(m);
}

rc_cantor_spec cantor_spec(const SetOptions& o, double lambda, unsigned depth) {
  rc_cantor_spec spec;
  rc_cantor_spec_default(&spec);
  spec.n = o.n;
  spec.lambda = lambda;
  spec.depth = depth;
  spec.base = o.base;
  spec.max_atoms = o.max_atoms;
  return spec;
}

/// Either the measure file or every (dim, depth) Cantor set of the sweep.
std::vector<SetPoint> build_sets(const SetOptions& o) {
  std::vector<SetPoint> out;
  if (!o.measure.empty()) {
    std::string id = o.measure;
    const auto slash = id.find_last_of('/');
    if (slash != std::string::npos) id = id.substr(slash + 1);
    out.push_back({id, load_measure(o.measure)});
    return out;
  }
  std::vector<double> lambdas;
  if (!o.dims.empty()) {
    for (double d : o.dims) {
      double l = 0.0;
      check(rc_cantor_ratio_for_dimension(o.n, d, &l), "dimension " + real(d));
      lambdas.push_back(l);
    }
  } else {
    lambdas.push_back(o.lambda > 0.0 ? o.lambda : 0.25);
  }
  for (double l : lambdas) {
    for (unsigned m : o.depths) {
      const auto spec = cantor_spec(o, l, m);
      double dim = 0.0;
      check(rc_cantor_similarity_dimension(&spec, &dim), "Cantor spec");
      rc_measure* mu = nullptr;
      check(rc_generate_cantor(&spec, &mu), "generating Cantor set");
      out.push_back({"cantor-n" + std::to_string(o.n) + "-d" + real(dim) + "-m" + std::to_string(m),
                     Measure(mu), dim, static_cast<int>(m)});
    }
  }
  return out;
}

struct WindowOptions {
  std::vector<double> alphas{0.5};
  std::vector<double> eps;  // empty: delta of each set
  double r_out = std::numeric_limits<double>::infinity();
};

void add_window(CLI::App* cmd, WindowOptions& o, ConfigBinder& cb) {
  cb.bind_list("alpha", cmd->add_option("--alpha", o.alphas, "alpha value(s) in (0, 1)")->delimiter(','),
               o.alphas);
  cb.bind_list("eps", cmd->add_option("--eps", o.eps, "truncation radius (default: delta of the set)")
                          ->delimiter(','),
               o.eps);
  cb.bind("r_out", cmd->add_option("--r-out", o.r_out, "outer truncation radius"), o.r_out);
}

std::vector<double> eps_values(const WindowOptions& o, const rc_measure* mu) {
  return o.eps.empty() ? std::vector<double>{rc_measure_delta(mu)} : o.eps;
}

struct OptimizerOptions {
  unsigned max_iters = 500;
  double tolerance = 1e-14;
  double stationarity = 1e-9;
  bool fixed_step = false;
  bool random_init = false;
  unsigned refine_iters = 0;
};

void add_optimizer(CLI::App* cmd, OptimizerOptions& o, ConfigBinder& cb) {
  cb.bind("max_iters", cmd->add_option("--max-iters", o.max_iters, "optimizer iteration cap"),
          o.max_iters);
  cb.bind("tolerance", cmd->add_option("--tolerance", o.tolerance, "relative decrease stop"),
          o.tolerance);
  cb.bind("stationarity",
          cmd->add_option("--stationarity", o.stationarity, "projected-gradient norm stop"),
          o.stationarity);
  cb.bind("fixed_step", cmd->add_flag("--fixed-step", o.fixed_step, "fixed step instead of backtracking"),
          o.fixed_step);
  cb.bind("random_init", cmd->add_flag("--random-init", o.random_init, "seeded random start"),
          o.random_init);
  cb.bind("refine_iters", cmd->add_option("--refine-iters", o.refine_iters, "E_alpha refinement steps"),
          o.refine_iters);
}

rc_optimizer_config optimizer_config(const OptimizerOptions& o, std::uint64_t seed) {
  rc_optimizer_config cfg;
  rc_optimizer_config_default(&cfg);
  cfg.max_iters = o.max_iters;
  cfg.tolerance = o.tolerance;
  cfg.stationarity = o.stationarity;
  cfg.backtracking = o.fixed_step ? 0 : 1;
  cfg.random_init = o.random_init ? 1 : 0;
  cfg.refine_iters = o.refine_iters;
  cfg.seed = seed;
  return cfg;
}

void apply_common(const CommonOptions& o) { rc_set_thread_limit(o.threads); }

// ---- SVG ---------------------------------------------------------------------

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Line chart with a log-scale y axis. Non-positive values are dropped.
std::string svg_chart(const std::vector<Series>& series, const std::string& xlabel,
                      const std::string& ylabel) {
  constexpr double W = 640, H = 420, L = 70, R = 170, T = 20, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      if (!(y > 0.0)) continue;
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, std::log10(y));
      y1 = std::max(y1, std::log10(y));
    }
  }
  if (!std::isfinite(x0)) {
    x0 = 0;
    x1 = 1;
    y0 = 0;
    y1 = 1;
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 - y0 < 1e-9) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                                 "#e377c2", "#7f7f7f", "#17becf"};
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  for (double ly = std::ceil(y0 * 4) / 4; ly <= y1 + 1e-12; ly += 0.25) {
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(ly) + 4 << "\" text-anchor=\"end\">"
      << real(std::pow(10.0, ly)).substr(0, 6) << "</text>\n";
  }
  for (double x = std::ceil(x0); x <= x1 + 1e-12; x += 1.0) {
    o << "<text x=\"" << px(x) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << x
      << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
    << xml_escape(xlabel) << "</text>\n"
    << "<text x=\"14\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 14 "
    << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << xml_escape(ylabel) << " (log scale)</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % (sizeof colors / sizeof *colors)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : series[k].points) {
      if (y > 0.0) o << px(x) << "," << py(std::log10(y)) << " ";
    }
    o << "\"/>\n";
    o << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14 * (k + 1) << "\" fill=\"" << color
      << "\">" << xml_escape(series[k].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

// ---- commands ----------------------------------------------------------------

int cmd_gen(const CommonOptions& common, const SetOptions& set) {
  apply_common(common);
  if (set.depths.size() != 1 || set.dims.size() > 1)
    throw CliError{kExitInput, "gen takes a single depth and dimension"};
  double lambda = set.lambda > 0.0 ? set.lambda : 0.25;
  if (!set.dims.empty()) check(rc_cantor_ratio_for_dimension(set.n, set.dims[0], &lambda), "dimension");
  const auto spec = cantor_spec(set, lambda, set.depths[0]);
  double dim = 0.0;
  check(rc_cantor_similarity_dimension(&spec, &dim), "Cantor spec");
  rc_measure* raw = nullptr;
  check(rc_generate_cantor(&spec, &raw), "generating Cantor set");
  Measure mu(raw);
  CString text;
  check(rc_measure_to_json(mu.get(), &text.p), "serializing");
  if (common.out.empty()) {
    std::cout << text.str() << "\n";
  } else {
    write_text(common.out, text.str() + "\n");
  }
  std::ostream& info = common.out.empty() ? std::cerr : std::cout;
  info << "atoms: " << rc_measure_size(mu.get()) << "\n"
       << "delta: " << real(rc_measure_delta(mu.get())) << "\n"
       << "similarity_dimension: " << real(dim) << "\n";
  return kExitOk;
}

int cmd_energy(const CommonOptions& common, const SetOptions& set, const WindowOptions& win,
               bool as_json) {
  apply_common(common);
  if (set.measure.empty()) throw CliError{kExitInput, "energy needs a measure file"};
  const Measure mu = load_measure(set.measure);
  Sink sink(common.out);
  json rows = json::array();
  if (!as_json) sink.out() << rc_energy_csv_header() << "\n";
  for (double a : win.alphas) {
    for (double eps : eps_values(win, mu.get())) {
      rc_energy_report r;
      check(rc_energy_report_compute(mu.get(), a, rc_window{eps, win.r_out}, &r),
            "alpha=" + real(a) + " eps=" + real(eps));
      CString text;
      if (as_json) {
        check(rc_energy_report_json(&r, &text.p), "formatting");
        rows.push_back(json::parse(text.str()));
      } else {
        check(rc_energy_report_csv_row(&r, &text.p), "formatting");
        sink.out() << text.str() << "\n";
      }
    }
  }
  if (as_json) sink.out() << rows.dump(1) << "\n";
  sink.close();
  return kExitOk;
}

int cmd_capacity(const CommonOptions& common, const SetOptions& set, const WindowOptions& win,
                 const OptimizerOptions& opt, const std::string& plot) {
  apply_common(common);
  const auto sets = build_sets(set);
  const auto cfg = optimizer_config(opt, common.seed);
  Sink sink(common.out);
  sink.out() << rc_capacity_csv_header() << "\n";
  std::vector<Series> series;
  for (const auto& s : sets) {
    for (double a : win.alphas) {
      for (double eps : eps_values(win, s.mu.get())) {
        rc_capacity_row row{};
        row.set_id = s.id.c_str();
        row.n = rc_measure_dim(s.mu.get());
        row.alpha = a;
        row.dim = s.dim;
        row.depth = s.depth;
        row.eps = eps;
        row.method = "tolsa-energy";
        row.value = row.energy = row.iters = row.csp_value = row.csp_energy = row.ratio =
            std::numeric_limits<double>::quiet_NaN();
        std::string status = "ok";
        rc_comparability rep;
        const rc_status st = rc_comparability_report(s.mu.get(), a, rc_window{eps, win.r_out}, &cfg, &rep);
        if (st == RC_OK) {
          row.value = rep.gamma_plus_proxy;
          row.energy = rep.gamma_plus_energy;
          row.iters = rep.csp_iterations;
          row.csp_value = rep.csp_proxy;
          row.csp_energy = rep.csp_energy;
          row.ratio = rep.ratio;
          if (!rep.csp_converged) status = "not-converged";
        } else if (st == RC_ERR_SIZE || st == RC_ERR_IO) {
          check(st, s.id);
        } else {
          status = std::string("error:") + rc_status_name(st);
          std::cerr << s.id << ": " << rc_last_error() << "\n";
        }
        row.status = status.c_str();
        CString text;
        check(rc_capacity_csv_row(&row, &text.p), "formatting");
        sink.out() << text.str() << "\n";
        if (!plot.empty() && s.depth >= 0) {
          const std::string label = "d=" + real(s.dim).substr(0, 6) + " a=" + real(a);
          auto it = std::find_if(series.begin(), series.end(),
                                 [&](const Series& x) { return x.label == label; });
          if (it == series.end()) {
            series.push_back({label, {}});
            it = series.end() - 1;
          }
          it->points.emplace_back(s.depth, row.value);
        }
      }
    }
  }
  sink.close();
  if (!plot.empty()) write_text(plot, svg_chart(series, "depth", "gamma_plus proxy"));
  return kExitOk;
}

int cmd_compare(const CommonOptions& common, const SetOptions& set, const WindowOptions& win,
                const OptimizerOptions& opt) {
  apply_common(common);
  const auto sets = build_sets(set);
  const auto cfg = optimizer_config(opt, common.seed);
  Sink sink(common.out);
  sink.out() << "set_id,alpha,eps,gamma_plus_proxy,csp_proxy,ratio\n";
  for (const auto& s : sets) {
    for (double a : win.alphas) {
      for (double eps : eps_values(win, s.mu.get())) {
        rc_comparability rep;
        check(rc_comparability_report(s.mu.get(), a, rc_window{eps, win.r_out}, &cfg, &rep), s.id);
        sink.out() << s.id << "," << real(a) << "," << real(eps) << "," << real(rep.gamma_plus_proxy)
                   << "," << real(rep.csp_proxy) << "," << real(rep.ratio) << "\n";
      }
    }
  }
  sink.close();
  return kExitOk;
}

int cmd_bilip(const CommonOptions& common, const SetOptions& set, const WindowOptions& win,
              const OptimizerOptions& opt, std::vector<std::string> maps, double bound) {
  apply_common(common);
  const auto sets = build_sets(set);
  const auto cfg = optimizer_config(opt, common.seed);
  if (maps.empty()) {
    for (std::size_t i = 0; i < rc_bilipschitz_map_count(); ++i) maps.emplace_back(rc_bilipschitz_map_id(i));
  }
  Sink sink(common.out);
  sink.out() << "set_id,map,alpha,eps,before,after,ratio,csp_before,csp_after,bound,within_bound\n";
  bool all_within = true;
  for (const auto& s : sets) {
    for (double a : win.alphas) {
      for (double eps : eps_values(win, s.mu.get())) {
        for (const auto& m : maps) {
          rc_bilipschitz r;
          check(rc_bilipschitz_experiment(s.mu.get(), m.c_str(), a, rc_window{eps, win.r_out}, &cfg,
                                          bound, &r),
                m);
          all_within = all_within && r.within_bound;
          sink.out() << s.id << "," << m << "," << real(a) << "," << real(eps) << ","
                     << real(r.before) << "," << real(r.after) << "," << real(r.ratio) << ","
                     << real(r.csp_before) << "," << real(r.csp_after) << "," << real(r.bound)
                     << "," << (r.within_bound ? "true" : "false") << "\n";
        }
      }
    }
  }
  sink.close();
  if (!all_within) {
    std::cerr << "bilipschitz ratio outside [1/B, B]\n";
    return kExitVerify;
  }
  return kExitOk;
}

struct VerifyOptions {
  bool quick = false;
  bool json = false;
  bool inject_fault = false;
  std::string ratios;
  std::string timings;
  std::vector<std::string> suites;
  bool list = false;
};

int cmd_verify(const CommonOptions& common, const VerifyOptions& v) {
  apply_common(common);
  if (v.list) {
    for (std::size_t i = 0; i < rc_verify_suite_name_count(); ++i)
      std::cout << rc_verify_suite_name(i) << "\n";
    return kExitOk;
  }
  rc_verify_config cfg;
  rc_verify_config_default(&cfg);
  cfg.seed = common.seed;
  cfg.quick = v.quick ? 1 : 0;
  cfg.ratio_csv_path = v.ratios.empty() ? nullptr : v.ratios.c_str();
  cfg.p_alpha_fault_scale = v.inject_fault ? 1.01 : 1.0;
  std::string names;
  for (const auto& s : v.suites) names += (names.empty() ? "" : ",") + s;
  cfg.suites = names.empty() ? nullptr : names.c_str();
  rc_verify_report* raw = nullptr;
  check(rc_verify_run(&cfg, &raw), "verify");
  std::unique_ptr<rc_verify_report, ReportDeleter> report(raw);

  CString summary;
  check(rc_verify_summary_json(report.get(), &summary.p), "summary");
  if (!common.out.empty()) write_text(common.out, summary.str() + "\n");
  if (!v.timings.empty()) {
    CString t;
    check(rc_verify_timings_json(report.get(), &t.p), "timings");
    write_text(v.timings, t.str() + "\n");
  }
  if (v.json) std::cout << summary.str() << "\n";

  std::ostream& human = v.json ? std::cerr : std::cout;
  for (std::size_t i = 0; i < rc_verify_suite_count(report.get()); ++i) {
    rc_suite_info s;
    check(rc_verify_suite(report.get(), i, &s), "suite");
    human << (s.passed ? "PASS " : "FAIL ") << s.name;
    if (s.criterion > 0) human << " [criterion " << s.criterion << "]";
    human << " checks=" << s.checks << " failures=" << s.failures;
    if (!s.passed) human << " :: " << s.message;
    human << "\n";
  }
  if (!rc_verify_passed(report.get())) {
    for (std::size_t i = 0; i < rc_verify_suite_count(report.get()); ++i) {
      rc_suite_info s;
      check(rc_verify_suite(report.get(), i, &s), "suite");
      if (!s.passed) {
        std::cerr << "verification failed: " << s.name << ": " << s.message << "\n";
        break;
      }
    }
    return kExitVerify;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riesz-kernel energies and capacity proxies on discrete measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rc_version());

  CommonOptions common;
  {
    rc_verify_config defaults;
    rc_verify_config_default(&defaults);
    common.seed = defaults.seed;
  }
  SetOptions set;
  WindowOptions win;
  OptimizerOptions opt;
  VerifyOptions ver;
  bool energy_json = false;
  std::string plot;
  std::vector<std::string> maps;
  double bound = 0.0;

  ConfigBinder gen_cb, energy_cb, capacity_cb, compare_cb, bilip_cb, verify_cb;

  auto* gen = app.add_subcommand("gen", "generate a corner Cantor measure");
  add_common(gen, common, gen_cb);
  add_set(gen, set, gen_cb, false);

  auto* energy = app.add_subcommand("energy", "energy table of a measure file");
  add_common(energy, common, energy_cb);
  add_set(energy, set, energy_cb, true);
  add_window(energy, win, energy_cb);
  energy_cb.bind("json", energy->add_flag("--json", energy_json, "JSON instead of CSV"), energy_json);

  auto* capacity = app.add_subcommand("capacity", "capacity proxies over a set or Cantor sweep");
  add_common(capacity, common, capacity_cb);
  add_set(capacity, set, capacity_cb, true);
  add_window(capacity, win, capacity_cb);
  add_optimizer(capacity, opt, capacity_cb);
  capacity_cb.bind("plot", capacity->add_option("--plot", plot, "SVG of value against depth"), plot);

  auto* compare = app.add_subcommand("compare", "gamma_plus / C_sp proxy ratio");
  add_common(compare, common, compare_cb);
  add_set(compare, set, compare_cb, true);
  add_window(compare, win, compare_cb);
  add_optimizer(compare, opt, compare_cb);

  auto* bilip = app.add_subcommand("bilip", "capacity proxies before and after a bilipschitz map");
  add_common(bilip, common, bilip_cb);
  add_set(bilip, set, bilip_cb, true);
  add_window(bilip, win, bilip_cb);
  add_optimizer(bilip, opt, bilip_cb);
  bilip_cb.bind("map", bilip->add_option("--map", maps, "map id(s); default all")->delimiter(','), maps);
  bilip_cb.bind("bound", bilip->add_option("--bound", bound, "allowed factor B (default from thresholds)"),
                bound);

  auto* verify = app.add_subcommand("verify", "run the property battery");
  add_common(verify, common, verify_cb);
  verify_cb.bind("quick", verify->add_flag("--quick", ver.quick, "reduced sample counts"), ver.quick);
  verify_cb.bind("json", verify->add_flag("--json", ver.json, "print the JSON summary"), ver.json);
  verify_cb.bind("inject_fault", verify->add_flag("--inject-fault", ver.inject_fault,
                                                   "scale p_alpha by 1.01 (mutation check)"),
                 ver.inject_fault);
  verify_cb.bind("ratios", verify->add_option("--ratios", ver.ratios, "CSV archive of the energy ratios"),
                 ver.ratios);
  verify_cb.bind("timings", verify->add_option("--timings", ver.timings, "per-suite seconds (JSON)"),
                 ver.timings);
  verify_cb.bind("suite", verify->add_option("--suite", ver.suites, "restrict to suite name(s)")->delimiter(','),
                 ver.suites);
  verify->add_flag("--list", ver.list, "list suite names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (gen->parsed()) {
      gen_cb.apply(common.config);
      return cmd_gen(common, set);
    }
    if (energy->parsed()) {
      energy_cb.apply(common.config);
      return cmd_energy(common, set, win, energy_json);
    }
    if (capacity->parsed()) {
      capacity_cb.apply(common.config);
      return cmd_capacity(common, set, win, opt, plot);
    }
    if (compare->parsed()) {
      compare_cb.apply(common.config);
      return cmd_compare(common, set, win, opt);
    }
    if (bilip->parsed()) {
      bilip_cb.apply(common.config);
      return cmd_bilip(common, set, win, opt, maps, bound);
    }
    if (verify->parsed()) {
      verify_cb.apply(common.config);
      return cmd_verify(common, ver);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerify;
  }
  return kExitOk;
}
