// Serial reference vs production kernels on the German credit data.
#include <benchmark/benchmark.h>

#include <filesystem>

#include "fairtree/metalearner.hpp"
#include "fairtree/reference.hpp"

using namespace fairtree;

namespace {

const SplitBundle& german()
{
    static const SplitBundle split = [] {
        auto const schema = load_schema(std::filesystem::path(FAIRTREE_DATA_DIR) / "german.schema");
        return split_for_objectives(preprocess(load_dataset(schema.file, schema), schema), 1);
    }();
    return split;
}

std::vector<Individual> population(const TrainingSet& learn, std::size_t n)
{
    Rng rng(7);
    return initialize_population(learn, n, rng).individuals;
}

// 0 means unbounded (depth-first growth)
Hyperparameters leaf_capped(std::int64_t leaves)
{
    Hyperparameters hp;
    if (leaves > 0) {
        hp.max_leaf_nodes = static_cast<int>(leaves);
    }
    return hp;
}

void BM_TrainReference(benchmark::State& state)
{
    auto const& split = german();
    auto const hp = leaf_capped(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(reference::train_tree(split.learn, hp));
    }
}

void BM_TrainPresorted(benchmark::State& state)
{
    auto const& split = german();
    TrainingSet const learn(split.learn);
    auto const hp = leaf_capped(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_tree(learn, hp));
    }
}

void BM_EvaluateSerial(benchmark::State& state)
{
    auto const& split = german();
    TrainingSet const learn(split.learn);
    auto pop = population(learn, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        evaluate_individuals_serial(pop, learn, split.validation);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EvaluateParallel(benchmark::State& state)
{
    auto const& split = german();
    TrainingSet const learn(split.learn);
    auto pop = population(learn, static_cast<std::size_t>(state.range(0)));
    auto const jobs = static_cast<int>(state.range(1));
    for (auto _ : state) {
        evaluate_individuals(pop, learn, split.validation, jobs);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_TrainReference)->Arg(8)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrainPresorted)->Arg(8)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Args({100, 1})->Args({100, 2})->Args({100, 4})->Args({100, 8})
    ->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
