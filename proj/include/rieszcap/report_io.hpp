#pragma once

#include <limits>
#include <string>

#include "rieszcap/capacity.hpp"
#include "rieszcap/energies.hpp"

namespace rieszcap {

/// "n,alpha,eps,N_atoms,p_alpha,riesz_l2,wolff,E_alpha,M_max"
std::string energy_csv_header();
std::string energy_csv_row(const EnergyReport& r);
std::string energy_report_json(const EnergyReport& r);

/// Sweep rows: set_id,n,alpha,dim,depth,eps,method,value,energy,iters,status
/// followed by the wolff-energy proxy of the same point and the ratio.
struct CapacityRow {
  std::string set_id;
  std::size_t n = 0;
  double alpha = 0.0;
  double dim = std::numeric_limits<double>::quiet_NaN();  // similarity dimension
  int depth = -1;    // -1 when not a Cantor set
  double eps = 0.0;
  std::string method;
  double value = 0.0;
  double energy = 0.0;
  double iters = 0.0;
  std::string status = "ok";
  double csp_value = std::numeric_limits<double>::quiet_NaN();
  double csp_energy = std::numeric_limits<double>::quiet_NaN();
  double ratio = std::numeric_limits<double>::quiet_NaN();
};

std::string capacity_csv_header();
std::string capacity_csv_row(const CapacityRow& r);

/// Includes the witness measure.
std::string capacity_estimate_json(const CapacityEstimate& e);

}  // namespace rieszcap
