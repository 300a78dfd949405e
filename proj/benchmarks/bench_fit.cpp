#include <benchmark/benchmark.h>

#include <random>

#include <hlasso/engine.hpp>
#include <hlasso/logistic.hpp>
#include <hlasso/prox.hpp>
#include <hlasso/simbench.hpp>

using namespace hlasso;

namespace {

Matrix normal_matrix(Index n, Index p, std::mt19937_64& rng)
{
    std::normal_distribution<double> z;
    Matrix m(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) m(i, j) = z(rng);
    }
    return m;
}

struct SimData
{
    StandardizedDataset ds;
    GroupStructure g;
};

SimData case1_data(Index n)
{
    const auto cov = sim::gen_covariates(n, 17);
    const Vector y = sim::gen_response(cov.expanded, 1, 1.65, 18);
    return {StandardizedDataset::standardize(cov.expanded, y), sim::design_groups()};
}

} // namespace

static void BM_WeightedLasso(benchmark::State& state)
{
    const Index p = state.range(0);
    std::mt19937_64 rng(1);
    const Matrix X = normal_matrix(400, p, rng);
    const Vector y = X.leftCols(p / 4) * Vector::Ones(p / 4) + normal_matrix(400, 1, rng);
    const GramProblem prob{X.transpose() * X, X.transpose() * y, Vector::Constant(p, 20.0), {}};
    for (auto _ : state) benchmark::DoNotOptimize(solve_weighted_lasso(prob, {1e-10, 10000}));
}
BENCHMARK(BM_WeightedLasso)->Arg(16)->Arg(56)->Arg(200);

static void BM_Garrote(benchmark::State& state)
{
    std::mt19937_64 rng(2);
    const Matrix X = normal_matrix(400, 16, rng);
    const Vector y = X * Vector::LinSpaced(16, -1.0, 2.0) + normal_matrix(400, 1, rng);
    const GramProblem prob{X.transpose() * X, X.transpose() * y, Vector::Ones(16), {}};
    for (auto _ : state) benchmark::DoNotOptimize(solve_nonneg_garrote(prob, {1e-10, 10000}));
}
BENCHMARK(BM_Garrote);

static void BM_FitHLassoSingleLambda(benchmark::State& state)
{
    const SimData d = case1_data(400);
    const auto pen = PenaltySpec::plain(static_cast<double>(state.range(0)), sim::n_expanded);
    for (auto _ : state) benchmark::DoNotOptimize(fit_hlasso(d.ds, d.g, pen));
}
BENCHMARK(BM_FitHLassoSingleLambda)->Arg(1)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

static void BM_FitHLassoPath(benchmark::State& state)
{
    const SimData d = case1_data(400);
    const auto grid = hlasso_lambda_grid(d.ds, {});
    for (auto _ : state) benchmark::DoNotOptimize(fit_path(d.ds, d.g, grid, {}));
}
BENCHMARK(BM_FitHLassoPath)->Unit(benchmark::kMillisecond);

static void BM_FitLogisticOverlapping(benchmark::State& state)
{
    std::mt19937_64 rng(3);
    const Matrix X = normal_matrix(300, 12, rng);
    Vector beta = Vector::Zero(12);
    beta(0) = 1.5;
    beta(1) = -1.0;
    beta(5) = 0.8;
    const Vector eta = X * beta;
    std::uniform_real_distribution<double> u;
    Vector y(300);
    for (Index i = 0; i < 300; ++i) y(i) = u(rng) < 1.0 / (1.0 + std::exp(-eta(i))) ? 1.0 : 0.0;
    const auto ds = StandardizedDataset::standardize(X, y, ResponseMode::binary);
    const auto g = GroupStructure::build(
        std::vector<std::vector<Index>>{{0, 1, 2, 3}, {3, 4, 5, 6}, {6, 7, 8}, {9, 10, 11}, {0, 9}}, 12);
    const auto pen = PenaltySpec::plain(0.5, 12);
    for (auto _ : state) benchmark::DoNotOptimize(fit_logistic_hlasso(ds, g, pen));
}
BENCHMARK(BM_FitLogisticOverlapping)->Unit(benchmark::kMillisecond);

static void BM_SimulationReplication(benchmark::State& state)
{
    sim::BenchConfig cfg;
    cfg.method = sim::Method::hlasso;
    cfg.n_test = 2000;
    cfg.sigma = 1.65;
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_replication(cfg, *cfg.sigma, 0));
}
BENCHMARK(BM_SimulationReplication)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
