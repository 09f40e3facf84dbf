#include "cidlab/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "cidlab/analysis.hpp"
#include "cidlab/baseline.hpp"
#include "cidlab/born_models.hpp"
#include "cidlab/estimators.hpp"
#include "cidlab/sampler.hpp"
#include "cidlab/sweep_table.hpp"
#include "cidlab/thread_pool.hpp"

namespace cidlab {

namespace {

namespace fs = std::filesystem;

void require_parent_dir(const std::string& path) {
  const fs::path p(path);
  const fs::path dir = p.parent_path();
  if (!dir.empty() && !fs::exists(dir))
    throw std::runtime_error("output directory does not exist: " + dir.string());
}

std::string format_param(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.sampler.seed)
    throw std::invalid_argument("config: sampler.seed is mandatory (no wall-clock default)");
  return *cfg.sampler.seed;
}

void validate_grids(const RunConfig& cfg) {
  if (cfg.model.variant.empty()) throw std::invalid_argument("config: model.variant is required");
  if (cfg.model.params.empty()) throw std::invalid_argument("config: empty parameter grid");
  if (cfg.model.sizes.empty()) throw std::invalid_argument("config: empty size list");
  if (cfg.sampler.samples <= 0) throw std::invalid_argument("config: sampler.samples must be > 0");
}

ContractOptions contract_opts(const RunConfig& cfg) {
  return ContractOptions{cfg.estimator.tol, cfg.estimator.bond_cap};
}

std::vector<std::string> output_header(const RunConfig& cfg) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "cidlab %s config_hash=%016llx", kVersion,
                static_cast<unsigned long long>(config_hash(cfg.raw_text)));
  return {buf};
}

struct TaskSamples {
  std::vector<std::vector<Snapshot>> snapshots;   // per chain
  std::vector<std::vector<double>> log2p;         // per chain
  ChainStats stats;
};

TaskSamples collect_samples(const BornModel& model, const RunConfig& cfg, std::uint64_t task_seed) {
  TaskSamples out;
  const int chains = std::max(1, cfg.sampler.chains);
  out.snapshots.resize(chains);
  out.log2p.resize(chains);
  const long per_chain = (cfg.sampler.samples + chains - 1) / chains;
  long left = cfg.sampler.samples;
  for (int c = 0; c < chains; ++c) {
    const long want = std::min<long>(per_chain, left);
    left -= want;
    if (want <= 0) continue;
    if (model.has_direct_sampling()) {
      const auto& nm = dynamic_cast<const NishimoriModel&>(model);
      Rng rng(derive_seed(task_seed, 0xd15ecuLL, c));
      for (long s = 0; s < want; ++s) {
        auto [snap, bonds] = nm.direct_sample(rng);
        out.log2p[c].push_back(nm.log2_prob_bonds(bonds));
        out.snapshots[c].push_back(std::move(snap));
      }
    } else {
      ChainConfig ch;
      ch.model = &model;
      ch.n_samples = want;
      ch.master_seed = task_seed;
      ch.chain_index = static_cast<std::uint32_t>(c);
      ch.thermalization = cfg.sampler.thermalization;
      ch.thinning = cfg.sampler.thinning;
      ch.bond_pair_weight = cfg.sampler.bond_pair_weight;
      ch.single_site_weight = cfg.sampler.single_site_weight;
      ChainStats st = run_chain(ch, [&](ChainSample&& s) {
        out.log2p[c].push_back(s.log2_prob);
        out.snapshots[c].push_back(std::move(s.snapshot));
      });
      out.stats.proposed += st.proposed;
      out.stats.accepted += st.accepted;
    }
  }
  return out;
}

}  // namespace

void cmd_baseline(const BaselineArgs& args) {
  if (args.lengths.empty()) throw std::invalid_argument("baseline: no lengths given");
  if (args.out_path.empty()) throw std::invalid_argument("baseline: no output path");
  require_parent_dir(args.out_path);
  ShuffleBaseline b;
  if (fs::exists(args.out_path)) b = ShuffleBaseline::load(args.out_path);
  std::vector<std::size_t> todo;
  for (std::size_t n : args.lengths)
    if (!b.has(n)) todo.push_back(n);
  std::vector<ShuffleBaseline::Entry> built(todo.size());
  parallel_for_tasks(0, static_cast<int>(todo.size()), [&](int i) {
    built[i] = ShuffleBaseline::compute_entry(todo[i], args.k, args.seed);
  });
  for (const auto& e : built) b.insert(e);
  b.save(args.out_path);
}

void cmd_sample(const RunConfig& cfg) {
  validate_grids(cfg);
  const std::uint64_t seed = require_seed(cfg);
  if (!fs::exists(cfg.output.dir))
    throw std::runtime_error("output directory does not exist: " + cfg.output.dir);

  struct Task {
    int param_idx, size_idx;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < cfg.model.params.size(); ++p)
    for (std::size_t s = 0; s < cfg.model.sizes.size(); ++s)
      tasks.push_back({static_cast<int>(p), static_cast<int>(s)});
  std::vector<TaskSamples> results(tasks.size());

  parallel_for_tasks(cfg.threads, static_cast<int>(tasks.size()), [&](int t) {
    const double param = cfg.model.params[tasks[t].param_idx];
    const int size = cfg.model.sizes[tasks[t].size_idx];
    auto model = make_model(cfg.model.variant, param, size, contract_opts(cfg));
    results[t] = collect_samples(*model, cfg,
                                 derive_seed(seed, tasks[t].param_idx, size, 0x5a3eULL));
  });

  const auto header = output_header(cfg);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const double param = cfg.model.params[tasks[t].param_idx];
    const int size = cfg.model.sizes[tasks[t].size_idx];
    const std::string stem = cfg.output.dir + "/" + cfg.output.prefix + "_" + cfg.model.variant +
                             "_L" + std::to_string(size) + "_p" + format_param(param);
    std::ofstream snaps(stem + ".snapshots.txt");
    if (!snaps) throw std::runtime_error("cannot write " + stem + ".snapshots.txt");
    snaps << "# " << header[0] << "\n";
    bool first = true;
    for (const auto& chain : results[t].snapshots)
      for (const auto& s : chain) {
        if (!first) snaps.put('\n');
        first = false;
        write_snapshot(snaps, s);
      }
    std::ofstream side(stem + ".log2p.csv");
    side << "# " << header[0] << "\n";
    side << "chain,sample,log2_prob\n";
    char buf[96];
    for (std::size_t c = 0; c < results[t].log2p.size(); ++c)
      for (std::size_t s = 0; s < results[t].log2p[c].size(); ++s) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.12g\n", c, s, results[t].log2p[c][s]);
        side << buf;
      }
  }
}

std::string cmd_sweep(const RunConfig& cfg) {
  validate_grids(cfg);
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.estimator.baseline_file.empty())
    throw std::invalid_argument("sweep: estimator.baseline_file is required");
  const ShuffleBaseline baseline = ShuffleBaseline::load(cfg.estimator.baseline_file);
  if (!fs::exists(cfg.output.dir))
    throw std::runtime_error("output directory does not exist: " + cfg.output.dir);

  struct Task {
    int param_idx, size_idx;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < cfg.model.params.size(); ++p)
    for (std::size_t s = 0; s < cfg.model.sizes.size(); ++s)
      tasks.push_back({static_cast<int>(p), static_cast<int>(s)});
  std::vector<SweepRow> rows(tasks.size());

  parallel_for_tasks(cfg.threads, static_cast<int>(tasks.size()), [&](int t) {
    const double param = cfg.model.params[tasks[t].param_idx];
    const int size = cfg.model.sizes[tasks[t].size_idx];
    SweepRow row;
    row.model = cfg.model.variant;
    row.param = param;
    row.size = size;
    row.n_samples = cfg.sampler.samples;
    try {
      auto model = make_model(cfg.model.variant, param, size, contract_opts(cfg));
      const std::uint64_t task_seed = derive_seed(seed, tasks[t].param_idx, size, 0x5a3eULL);
      TaskSamples samples = collect_samples(*model, cfg, task_seed);

      EntropyEstimate sd = direct_entropy(samples.log2p, model->site_count());
      row.s_d = sd.value;
      row.s_d_err = sd.std_error;

      std::vector<std::vector<double>> cid_blocks(samples.snapshots.size());
      for (std::size_t c = 0; c < samples.snapshots.size(); ++c)
        for (const auto& snap : samples.snapshots[c])
          cid_blocks[c].push_back(cid(snap, baseline));
      EntropyEstimate ec = cid_entropy(cid_blocks, model->site_count());
      row.cid = ec.value;
      row.cid_err = ec.std_error;

      if (cfg.estimator.observable == "vortex_fe") {
        auto& grid_model = dynamic_cast<const Grid2dBornModel&>(*model);
        VortexFeOptions fe;
        fe.n_samples = cfg.sampler.samples;
        fe.seed = derive_seed(task_seed, 0xfe0ULL);
        fe.exponent = cfg.estimator.fe_exponent;
        fe.chains = cfg.sampler.chains;
        fe.thinning = cfg.sampler.thinning;
        ScalarEstimate obs = vortex_free_energy(grid_model, fe);
        row.obs = obs.value;
        row.obs_err = obs.std_error;
      } else if (cfg.estimator.observable == "correlation") {
        auto& nm = dynamic_cast<const NishimoriModel&>(*model);
        ScalarEstimate obs =
            correlation_disorder_avg(nm, cfg.sampler.samples, derive_seed(task_seed, 0xc02ULL));
        row.obs = obs.value;
        row.obs_err = obs.std_error;
      } else if (cfg.estimator.observable != "none") {
        throw std::invalid_argument("unknown observable: " + cfg.estimator.observable);
      }
    } catch (const std::exception& e) {
      std::string why = e.what();
      std::replace(why.begin(), why.end(), ',', ';');
      std::replace(why.begin(), why.end(), '\n', ' ');
      row.status = "error: " + why;
    }
    rows[t] = std::move(row);
  });

  SweepTable table;
  table.rows = std::move(rows);
  const std::string path = cfg.output.dir + "/" + cfg.output.prefix + "_sweep.csv";
  table.save_csv(path, output_header(cfg));
  return path;
}

namespace {

const double* column_ptr(const SweepRow& r, const std::string& column) {
  if (column == "s_d") return &r.s_d;
  if (column == "cid") return &r.cid;
  if (column == "obs") return &r.obs;
  throw std::invalid_argument("analyze: unknown column " + column);
}

const double* column_err_ptr(const SweepRow& r, const std::string& column) {
  if (column == "s_d") return &r.s_d_err;
  if (column == "cid") return &r.cid_err;
  return &r.obs_err;
}

}  // namespace

void cmd_analyze(const AnalyzeArgs& args) {
  SweepTable table = SweepTable::load_csv(args.table_path);
  require_parent_dir(args.out_path);
  std::ofstream out(args.out_path);
  if (!out) throw std::runtime_error("cannot write " + args.out_path);
  char buf[256];

  std::vector<std::string> models;
  for (const auto& r : table.rows)
    if (std::find(models.begin(), models.end(), r.model) == models.end())
      models.push_back(r.model);

  if (args.op == "derive" || args.op == "gamma") {
    const LinearFilter smooth_f = smoothing_filter(args.smooth_rounds);
    out << "# cidlab " << kVersion << " op=" << args.op << " column=" << args.column
        << " smooth_rounds=" << args.smooth_rounds << " derivative_order=" << args.derivative
        << "\n";
    out << "model,param,L,value,error\n";
    for (const auto& model : models) {
      for (int size : table.sizes(model)) {
        auto rows = table.select(model, size);
        std::vector<SweepRow> ok;
        for (auto& r : rows)
          if (r.status == "ok") ok.push_back(r);
        if (ok.size() < 2) continue;
        const double dx = uniform_grid_spacing(ok);
        LinearFilter f = smooth_f;
        if (args.derivative > 0) f = compose(derivative_filter(args.derivative, dx), f);
        if (static_cast<int>(ok.size()) < static_cast<int>(f.taps.size())) continue;
        std::vector<double> y, se, p;
        for (const auto& r : ok) {
          y.push_back(*column_ptr(r, args.column));
          se.push_back(*column_err_ptr(r, args.column));
          p.push_back(r.param);
        }
        if (args.op == "gamma") continue;  // handled below
        auto val = apply_filter(f, y);
        auto err = propagate_errors(f, se);
        const int off = f.radius();
        for (std::size_t i = 0; i < val.size(); ++i) {
          std::snprintf(buf, sizeof(buf), "%s,%.10g,%d,%.10g,%.10g\n", model.c_str(), p[i + off],
                        size, val[i], err[i]);
          out << buf;
        }
      }
      if (args.op == "gamma") {
        for (int size : table.sizes(model)) {
          auto lo = table.select(model, size);
          auto hi = table.select(model, 2 * size);
          if (lo.empty() || hi.empty()) continue;
          std::vector<double> ylo, elo, yhi, ehi, p;
          for (std::size_t i = 0; i < std::min(lo.size(), hi.size()); ++i) {
            if (lo[i].status != "ok" || hi[i].status != "ok") continue;
            if (std::abs(lo[i].param - hi[i].param) > 1e-9) continue;
            p.push_back(lo[i].param);
            ylo.push_back(*column_ptr(lo[i], args.column));
            elo.push_back(*column_err_ptr(lo[i], args.column));
            yhi.push_back(*column_ptr(hi[i], args.column));
            ehi.push_back(*column_err_ptr(hi[i], args.column));
          }
          if (static_cast<int>(p.size()) < static_cast<int>(smooth_f.taps.size())) continue;
          auto slo = apply_filter(smooth_f, ylo);
          auto shi = apply_filter(smooth_f, yhi);
          auto xlo = propagate_errors(smooth_f, elo);
          auto xhi = propagate_errors(smooth_f, ehi);
          const int off = smooth_f.radius();
          for (std::size_t i = 0; i < slo.size(); ++i) {
            const double g = gamma_subleading(slo[i], shi[i], size);
            const double ge = 2.0 * size * std::hypot(xlo[i], xhi[i]);
            std::snprintf(buf, sizeof(buf), "%s,%.10g,%d,%.10g,%.10g\n", model.c_str(),
                          p[i + off], size, g, ge);
            out << buf;
          }
        }
      }
    }
    return;
  }

  if (args.op == "collapse") {
    out << "# cidlab " << kVersion << " op=collapse column=" << args.column << " window=["
        << args.window_lo << "," << args.window_hi << "]\n";
    out << "model,column,critical,nu,score\n";
    for (const auto& model : models) {
      std::vector<SizeSeries> series;
      for (int size : table.sizes(model)) {
        SizeSeries s;
        s.size = size;
        for (const auto& r : table.select(model, size)) {
          if (r.status != "ok") continue;
          s.param.push_back(r.param);
          s.value.push_back(*column_ptr(r, args.column));
        }
        if (s.param.size() >= 2) series.push_back(std::move(s));
      }
      if (series.size() < 3) continue;
      CollapseFit fit = data_collapse(series, CollapseWindow{args.window_lo, args.window_hi},
                                      args.critical_start, args.exponent_start);
      std::snprintf(buf, sizeof(buf), "%s,%s,%.8g,%.8g,%.8g\n", model.c_str(),
                    args.column.c_str(), fit.critical, fit.exponent, fit.score);
      out << buf;
    }
    return;
  }
  throw std::invalid_argument("analyze: unknown op " + args.op);
}

long cmd_budget(const RunConfig& cfg, const BudgetArgs& args) {
  validate_grids(cfg);
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.model.params.size() != 1 || cfg.model.sizes.size() != 1)
    throw std::invalid_argument("budget: exactly one parameter and one size required");
  const ShuffleBaseline baseline = ShuffleBaseline::load(cfg.estimator.baseline_file);
  auto model =
      make_model(cfg.model.variant, cfg.model.params[0], cfg.model.sizes[0], contract_opts(cfg));
  EpsilonOptions opts;
  opts.seed = seed;
  opts.chains = cfg.sampler.chains;
  opts.thinning = cfg.sampler.thinning;
  return sample_budget(*model, baseline, args.alpha, args.cap, opts);
}

}  // namespace cidlab
