#include <benchmark/benchmark.h>

#include <random>

#include "cidlab/born_models.hpp"
#include "cidlab/lz77.hpp"
#include "cidlab/sampler.hpp"
#include "cidlab/tn_ising.hpp"

namespace {

std::vector<std::int8_t> random_seq(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::int8_t> out(n);
  for (auto& x : out) x = rng() & 1 ? 1 : -1;
  return out;
}

void BM_lz77_compress_random(benchmark::State& state) {
  auto x = random_seq(static_cast<std::size_t>(state.range(0)), 42);
  for (auto _ : state) benchmark::DoNotOptimize(cidlab::lz77_compress(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_lz77_compress_random)->Arg(1 << 12)->Arg(1 << 14)->Arg(1 << 16);

void BM_tfim_log_prob(benchmark::State& state) {
  const int length = static_cast<int>(state.range(0));
  cidlab::TfimModel model(0.6, cidlab::ChainGeom(length));
  auto x = random_seq(length, 3);
  cidlab::Snapshot snap(1, length);
  snap.values = x;
  for (auto _ : state) benchmark::DoNotOptimize(model.log2_born_prob(snap));
}
BENCHMARK(BM_tfim_log_prob)->Arg(32)->Arg(64)->Arg(128);

void BM_tfim_chain_step(benchmark::State& state) {
  const int length = static_cast<int>(state.range(0));
  auto model = cidlab::make_tfim_model(0.6, length);
  cidlab::ChainConfig cfg;
  cfg.model = model.get();
  cfg.master_seed = 17;
  cidlab::MhChain chain(cfg);
  for (auto _ : state) chain.step();
}
BENCHMARK(BM_tfim_chain_step)->Arg(64)->Arg(128);

void BM_contract_log_z(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  cidlab::DualSquareGeom geom(side);
  std::mt19937_64 rng(5);
  cidlab::BondField bonds(geom);
  for (auto& b : bonds.values) b = rng() & 1 ? 1 : -1;
  cidlab::IsingInstance inst{&geom, &bonds, {0.9, 0.0}};
  for (auto _ : state) benchmark::DoNotOptimize(cidlab::contract_log_z(inst));
}
BENCHMARK(BM_contract_log_z)->Arg(8)->Arg(13)->Arg(17);

void BM_coherent_log_prob(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  auto model = cidlab::make_coherent(0.09 * 3.14159265358979, side);
  cidlab::Snapshot x = model->all_plus();
  x.values[x.size() / 2] = -1;
  for (auto _ : state) benchmark::DoNotOptimize(model->log2_prob(x));
}
BENCHMARK(BM_coherent_log_prob)->Arg(9)->Arg(13);

}  // namespace

BENCHMARK_MAIN();
