#include <benchmark/benchmark.h>

#include <rlms/adaptive_filter.hpp>
#include <rlms/experiment.hpp>
#include <rlms/filter.hpp>
#include <rlms/penalty.hpp>
#include <rlms/signals.hpp>

namespace {

using namespace rlms;

Penalty penalty_for(PenaltyKind kind, std::size_t n)
{
    const std::size_t group = n >= 10 ? 10 : 1;
    switch (kind) {
    case PenaltyKind::L1:
        return Penalty::l1(n);
    case PenaltyKind::WeightedL1:
        return Penalty::weighted_l1(n);
    case PenaltyKind::GroupL12:
        return Penalty::group_l12(GroupPartition::contiguous(n, group));
    case PenaltyKind::WeightedGroupL12:
        break;
    }
    return Penalty::weighted_group_l12(GroupPartition::contiguous(n, group));
}

CoefficientVector gaussian(RandomStream& rng, std::size_t n)
{
    CoefficientVector v(n);
    for (auto& x : v) {
        x = rng.normal();
    }
    return v;
}

void BM_LmsStep(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    RandomStream rng(1);
    FilterState s(n);
    auto x = RegressorWindow::from_values(gaussian(rng, n));
    for (auto _ : state) {
        x.push(rng.normal());
        benchmark::DoNotOptimize(lms_step(s, x, rng.normal(), Normalized{1.0}));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LmsStep)->Arg(100)->Arg(200)->Arg(1000);

void BM_RegularizedStep(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto pen = penalty_for(static_cast<PenaltyKind>(state.range(1)), n);
    RandomStream rng(2);
    FilterState s(n);
    auto x = RegressorWindow::from_values(gaussian(rng, n));
    for (auto _ : state) {
        x.push(rng.normal());
        benchmark::DoNotOptimize(regularized_step(s, x, rng.normal(), Normalized{1.0}, pen, 1e-4));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RegularizedStep)->ArgsProduct({{100, 200}, {0, 1, 2, 3}});

/// Full per-sample cost: weights, subgradient, rho selection and update.
void BM_AdaptiveFilterStep(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto kind = static_cast<PenaltyKind>(state.range(1));
    const bool correlated = state.range(2) != 0;
    const RhoPolicy rho = correlated ? RhoPolicy{CorrelatedInputRho{}, 1.0} : RhoPolicy{WhiteInputNlmsRho{}, 1.0};
    AdaptiveFilter f(n, Normalized{1.0}, penalty_for(kind, n), rho, 5.0);
    RandomStream rng(3);
    const auto w = make_general_sparse_system(n, n / 20, rng).w;
    InputGenerator input(correlated ? InputProcess{Ar1{0.8, true}} : InputProcess{WhiteGaussian{1.0}}, rng.split(1));
    RegressorWindow x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x.push(input.next());
    }
    for (auto _ : state) {
        x.push(input.next());
        f.step(x, desired_output(w, x.values(), NoiseProcess{0.1}, rng));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AdaptiveFilterStep)->ArgsProduct({{100, 200}, {0, 1, 2, 3}, {0, 1}});

void BM_ComputeWeights(benchmark::State& state)
{
    const std::size_t n = 200;
    const auto pen = penalty_for(static_cast<PenaltyKind>(state.range(0)), n);
    RandomStream rng(4);
    const auto w = gaussian(rng, n);
    Weights out;
    for (auto _ : state) {
        compute_weights_into(pen, w, out);
        benchmark::DoNotOptimize(out.beta.data());
    }
}
BENCHMARK(BM_ComputeWeights)->DenseRange(0, 3);

void BM_Subgradient(benchmark::State& state)
{
    const std::size_t n = 200;
    const auto pen = penalty_for(static_cast<PenaltyKind>(state.range(0)), n);
    RandomStream rng(5);
    const auto w = gaussian(rng, n);
    const auto beta = compute_weights(pen, w);
    CoefficientVector g(n);
    for (auto _ : state) {
        subgradient_into(pen, beta, w, g);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_Subgradient)->DenseRange(0, 3);

void BM_MonteCarloTrial(benchmark::State& state)
{
    Scenario s;
    s.name = "bench";
    s.n = 100;
    s.horizon = 1000;
    s.trials = 1;
    s.system.kind = GeneralSparseSpec{5};
    s.noise.variance = 0.1;
    s.filters.push_back({"NLMS", Normalized{1.0}, std::nullopt, {}, {}});
    s.filters.push_back({"RZA-NLMS", Normalized{1.0}, Penalty::weighted_l1(100, 0.003),
                         RhoPolicy{WhiteInputNlmsRho{}, 1.0}, EtaSpec{EtaSpec::Mode::Fixed, 5.0, 1.0}});
    std::size_t trial = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_trial(s, trial++));
    }
}
BENCHMARK(BM_MonteCarloTrial)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
