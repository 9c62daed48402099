// Compares the serial reference path against the OpenMP path on the
// replication-parallel kernels, plus raw sampler throughput.

#include <chrono>
#include <cstdio>

#include "flurlab/experiments.hpp"
#include "flurlab/parallel.hpp"
#include "flurlab/process.hpp"

namespace fl = flurlab;

namespace {

double time_once(const fl::ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rep = fl::run(cfg);
    (void)rep;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    fl::ExperimentConfig cfg;
    cfg.kind = fl::ExperimentKind::KernelVariance;
    cfg.spec.d = 0.3;
    cfg.regime = fl::TemperingRegime::power_law(1.0, 1.0);
    cfg.n = 1L << 13;
    cfg.x_points = {0.5};
    cfg.replications = 400;
    cfg.master_seed = 11;

    std::printf("%-38s %10s %10s %8s\n", "workload", "serial[s]", "omp[s]", "speedup");

    cfg.threads = 1;
    const double ts = time_once(cfg);
    cfg.threads = fl::resolve_threads(0);
    const double tp = time_once(cfg);
    std::printf("%-38s %10.3f %10.3f %8.2f\n", "KernelVariance n=2^13 R=400", ts, tp, ts / tp);

    // raw sampler throughput
    fl::ProcessSpec spec;
    spec.d = 0.3;
    fl::PathSampler sampler(spec, fl::TemperingRegime::fixed(0.025), 1L << 14);
    const int reps = 256;
    auto bench_paths = [&](int threads) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> sink(reps);
        fl::parallel_for(reps, threads, [&](std::size_t r) {
            auto p = sampler.sample(fl::SeedTree{123, {r}});
            sink[r] = p.values.back();
        });
        double acc = 0.0;
        for (double v : sink) acc += v;
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return dt + (acc == 1e300 ? 1.0 : 0.0);
    };
    const double ps = bench_paths(1);
    const double pp = bench_paths(fl::resolve_threads(0));
    std::printf("%-38s %10.3f %10.3f %8.2f\n", "path sampling n=2^14 R=256", ps, pp, ps / pp);
    return 0;
}
