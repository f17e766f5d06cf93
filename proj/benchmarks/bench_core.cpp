#include <sivo/certificates.hpp>
#include <sivo/convex.hpp>
#include <sivo/oracle.hpp>

#include <benchmark/benchmark.h>

#include <random>

namespace {

using sivo::Vector;

sivo::FactoredSum random_sum(std::mt19937_64& rng, int dim, int blocks, int gens) {
  std::normal_distribution<double> N(0.0, 1.0);
  sivo::FactoredSum s;
  s.dim = dim;
  for (int b = 0; b < blocks; ++b) {
    sivo::SimplexBlock blk{"f" + std::to_string(b), {}, 0.05};
    for (int j = 0; j < gens; ++j) blk.generators.push_back(Vector::NullaryExpr(dim, [&] { return N(rng); }));
    s.simplex_blocks.push_back(std::move(blk));
  }
  sivo::ConeBlock cone{"g", {}};
  for (int j = 0; j < gens; ++j) cone.generators.push_back(Vector::NullaryExpr(dim, [&] { return N(rng); }));
  s.cone_blocks.push_back(std::move(cone));
  return s;
}

void BM_ResidualMin(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto s = random_sum(rng, static_cast<int>(state.range(0)), 3, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(sivo::residual_min(s).residual);
}
BENCHMARK(BM_ResidualMin)->Args({2, 3})->Args({3, 8})->Args({5, 16});

void BM_StrictDirection(benchmark::State& state) {
  std::vector<Vector> gens;
  for (int k = 0; k < state.range(0); ++k) gens.push_back(Vector::Constant(1, 1.0 + static_cast<double>(k) / state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sivo::strict_direction_lp({gens}, sivo::TangentCone::whole(1)).margin);
}
BENCHMARK(BM_StrictDirection)->Arg(11)->Arg(201)->Arg(2001);

void BM_ClassifyPoint(benchmark::State& state) {
  std::vector<sivo::Expr> f{sivo::Expr::parse("sqcosinv(x)", 1), sivo::Expr::parse("sqcosinv(x)", 1)};
  const sivo::Problem P(1, f, {{"g", sivo::Expr::parse("x - t", 1, 1), sivo::IndexDomain::interval(0, 1)}},
                        sivo::OmegaSet::whole(1));
  const sivo::GridSpec spec{Vector::Constant(1, -2.0), Vector::Zero(1), {static_cast<int>(state.range(0))}, {}};
  const auto grid = sivo::FeasibleGrid::build(P, spec);
  const Vector xi = Vector::Constant(2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(sivo::classify_point(P, Vector::Zero(1), xi, grid).grid_size);
}
BENCHMARK(BM_ClassifyPoint)->Arg(1001)->Arg(10001);

}  // namespace

BENCHMARK_MAIN();
