#include "rieszcap/measure_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rieszcap/error.hpp"

namespace rieszcap {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string measure_to_json_string(const DiscreteMeasure& mu) {
  json atoms = json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    auto a = mu.atom(i);
    atoms.push_back(std::vector<double>(a.begin(), a.end()));
  }
  json doc = {{"n", mu.dim()},
              {"delta", mu.delta()},
              {"atoms", std::move(atoms)},
              {"weights", std::vector<double>(mu.weights().begin(), mu.weights().end())}};
  return doc.dump(1);
}

DiscreteMeasure measure_from_json_string(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("measure JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("measure JSON: top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "n" && key != "delta" && key != "atoms" && key != "weights") {
      throw ParseError("measure JSON: unknown key '" + key + "'");
    }
  }
  try {
    const auto n = doc.at("n").get<std::size_t>();
    const auto& atoms = doc.at("atoms");
    auto weights = doc.at("weights").get<std::vector<double>>();
    if (!atoms.is_array() || atoms.empty()) throw ParseError("measure JSON: no atoms");
    if (atoms.size() != weights.size()) {
      throw ParseError("measure JSON: atoms and weights differ in length");
    }
    std::vector<double> coords;
    coords.reserve(atoms.size() * n);
    for (const auto& a : atoms) {
      auto c = a.get<std::vector<double>>();
      if (c.size() != n) throw ParseError("measure JSON: atom dimension differs from n");
      coords.insert(coords.end(), c.begin(), c.end());
    }
    if (doc.contains("delta")) {
      return DiscreteMeasure(n, std::move(coords), std::move(weights),
                             doc.at("delta").get<double>());
    }
    return DiscreteMeasure::with_natural_delta(n, std::move(coords), std::move(weights));
  } catch (const json::exception& e) {
    throw ParseError(std::string("measure JSON: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("measure JSON: ") + e.what());
  }
}

DiscreteMeasure measure_from_csv_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t width = 0;
  std::vector<double> coords, weights;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (first) {  // header
        first = false;
        continue;
      }
      throw ParseError("measure CSV: non-numeric cell in line '" + line + "'");
    }
    first = false;
    if (row.size() < 2) throw ParseError("measure CSV: need columns x1..xn,w");
    if (width == 0) width = row.size();
    if (row.size() != width) throw ParseError("measure CSV: ragged rows");
    coords.insert(coords.end(), row.begin(), row.end() - 1);
    weights.push_back(row.back());
  }
  if (weights.empty()) throw ParseError("measure CSV: no atoms");
  try {
    return DiscreteMeasure::with_natural_delta(width - 1, std::move(coords), std::move(weights));
  } catch (const Error& e) {
    throw ParseError(std::string("measure CSV: ") + e.what());
  }
}

DiscreteMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open measure file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
  return csv ? measure_from_csv_string(text) : measure_from_json_string(text);
}

void write_measure_json(const DiscreteMeasure& mu, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write measure file '" + path + "'");
  out << measure_to_json_string(mu) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace rieszcap
