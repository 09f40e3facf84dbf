#pragma once

#include <string>
#include <vector>

namespace cidlab {

/// One aggregate row of a parameter sweep.  `obs` carries the optional
/// auxiliary observable (vortex free energy or disorder-averaged correlator).
struct SweepRow {
  std::string model;
  double param = 0.0;
  int size = 0;
  long n_samples = 0;
  double s_d = 0.0, s_d_err = 0.0;
  double cid = 0.0, cid_err = 0.0;
  double obs = 0.0, obs_err = 0.0;
  std::string status = "ok";
};

struct SweepTable {
  std::vector<SweepRow> rows;

  static constexpr const char* kColumns = "model,param,L,N_s,s_d,s_d_err,cid,cid_err,obs,obs_err";

  /// Rows for one (model, size), sorted by parameter.
  std::vector<SweepRow> select(const std::string& model, int size) const;
  std::vector<int> sizes(const std::string& model) const;

  /// Writes the CSV with `# `-prefixed header comments first.
  void save_csv(const std::string& path, const std::vector<std::string>& header_comments = {}) const;
  static SweepTable load_csv(const std::string& path);
};

/// Uniform grid spacing of a sorted parameter column; throws when the grid is
/// non-uniform (relative tolerance 1e-6) or strictly increasing fails.
double uniform_grid_spacing(const std::vector<SweepRow>& rows);

}  // namespace cidlab
