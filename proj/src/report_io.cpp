#include "rieszcap/report_io.hpp"

#include <cmath>

#include "json.hpp"
#include "rieszcap/measure_io.hpp"

namespace rieszcap {

using nlohmann::json;

namespace {

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string cell(double v) { return std::isnan(v) ? std::string() : format_real(v); }

}  // namespace

std::string energy_csv_header() { return "n,alpha,eps,N_atoms,p_alpha,riesz_l2,wolff,E_alpha,M_max"; }

std::string energy_csv_row(const EnergyReport& r) {
  return std::to_string(r.n) + "," + format_real(r.alpha) + "," + format_real(r.window.eps) + "," +
         std::to_string(r.atoms) + "," + format_real(r.p_alpha_energy) + "," +
         format_real(r.riesz_l2_energy) + "," + format_real(r.wolff_energy) + "," +
         format_real(r.e_alpha) + "," + format_real(r.max_m_alpha);
}

std::string energy_report_json(const EnergyReport& r) {
  json doc = {{"n", r.n},
              {"alpha", r.alpha},
              {"eps", r.window.eps},
              {"r_out", real_or_null(r.window.r_out)},
              {"N_atoms", r.atoms},
              {"p_alpha", r.p_alpha_energy},
              {"riesz_l2", r.riesz_l2_energy},
              {"sup_riesz_l2", r.sup_riesz_l2},
              {"wolff", r.wolff_energy},
              {"E_alpha", r.e_alpha},
              {"M_max", real_or_null(r.max_m_alpha)}};
  return doc.dump();
}

std::string capacity_csv_header() {
  return "set_id,n,alpha,dim,depth,eps,method,value,energy,iters,status,csp_value,csp_energy,"
         "ratio";
}

std::string capacity_csv_row(const CapacityRow& r) {
  return r.set_id + "," + std::to_string(r.n) + "," + format_real(r.alpha) + "," + cell(r.dim) +
         "," + (r.depth < 0 ? std::string() : std::to_string(r.depth)) + "," +
         format_real(r.eps) + "," + r.method + "," + cell(r.value) + "," + cell(r.energy) + "," +
         cell(r.iters) + "," + r.status + "," + cell(r.csp_value) + "," + cell(r.csp_energy) +
         "," + cell(r.ratio);
}

std::string capacity_estimate_json(const CapacityEstimate& e) {
  json diag = json::object();
  for (const auto& [k, v] : e.diagnostics) diag[k] = real_or_null(v);
  json doc = {{"value", real_or_null(e.value)},
              {"method", to_string(e.method)},
              {"eps", e.window.eps},
              {"r_out", real_or_null(e.window.r_out)},
              {"diagnostics", diag},
              {"witness", json::parse(measure_to_json_string(e.witness))}};
  return doc.dump();
}

}  // namespace rieszcap
