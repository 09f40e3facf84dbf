#include "cidlab/sweep_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cidlab {

std::vector<SweepRow> SweepTable::select(const std::string& model, int size) const {
  std::vector<SweepRow> out;
  for (const auto& r : rows)
    if (r.model == model && r.size == size) out.push_back(r);
  std::sort(out.begin(), out.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
  return out;
}

std::vector<int> SweepTable::sizes(const std::string& model) const {
  std::set<int> s;
  for (const auto& r : rows)
    if (r.model == model) s.insert(r.size);
  return {s.begin(), s.end()};
}

void SweepTable::save_csv(const std::string& path,
                          const std::vector<std::string>& header_comments) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write table: " + path);
  for (const auto& c : header_comments) out << "# " << c << "\n";
  out << kColumns << ",status\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%d,%ld,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%s\n",
                  r.model.c_str(), r.param, r.size, r.n_samples, r.s_d, r.s_d_err, r.cid,
                  r.cid_err, r.obs, r.obs_err, r.status.c_str());
    out << buf;
  }
}

SweepTable SweepTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open table: " + path);
  SweepTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!have_header) {
      if (line.rfind("model,", 0) != 0)
        throw std::runtime_error("sweep table: missing header row");
      have_header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 10) throw std::runtime_error("sweep table: short row: " + line);
    SweepRow r;
    r.model = fields[0];
    r.param = std::stod(fields[1]);
    r.size = std::stoi(fields[2]);
    r.n_samples = std::stol(fields[3]);
    r.s_d = std::stod(fields[4]);
    r.s_d_err = std::stod(fields[5]);
    r.cid = std::stod(fields[6]);
    r.cid_err = std::stod(fields[7]);
    r.obs = std::stod(fields[8]);
    r.obs_err = std::stod(fields[9]);
    if (fields.size() > 10) r.status = fields[10];
    t.rows.push_back(std::move(r));
  }
  return t;
}

double uniform_grid_spacing(const std::vector<SweepRow>& rows) {
  if (rows.size() < 2) throw std::invalid_argument("grid: need at least two rows");
  const double dx = rows[1].param - rows[0].param;
  if (dx <= 0.0) throw std::invalid_argument("grid: parameters must be strictly increasing");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double step = rows[i].param - rows[i - 1].param;
    if (std::abs(step - dx) > 1e-6 * std::max(1.0, std::abs(dx)))
      throw std::invalid_argument("grid: non-uniform parameter spacing");
  }
  return dx;
}

}  // namespace cidlab
