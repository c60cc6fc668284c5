// Compares the serial reference and the OpenMP pairwise-matrix kernel on a
// synthetic scene and checks that they agree bitwise.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tmc/pipeline.hpp"
#include "tmc/synth.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int per_lane = 60;
    int repeats = 3;
    for (int a = 1; a + 1 < argc; a += 2) {
        const std::string flag = argv[a];
        if (flag == "--per-lane") per_lane = std::atoi(argv[a + 1]);
        else if (flag == "--repeats") repeats = std::atoi(argv[a + 1]);
        else {
            std::cerr << "usage: bench_pairwise [--per-lane N] [--repeats N]\n";
            return 2;
        }
    }

    tmc::SceneSpec spec;
    spec.seed = 7;
    spec.movements = {{tmc::MovementLabel::right(), 1, per_lane},
                      {tmc::MovementLabel::through(), 2, per_lane},
                      {tmc::MovementLabel::left(), 1, per_lane}};
    spec.noise_sigma = 2.0;
    spec.truncation_fraction = 0.2;
    spec.stop_fraction = 0.5;
    const auto scene = tmc::generate(spec);
    const auto& trajectories = scene.dataset.trajectories;

    const tmc::SimilarityConfig cfg;
    std::cout << "pairwise matrix over " << trajectories.size() << " trajectories ("
              << trajectories.size() * (trajectories.size() - 1) / 2 << " pairs)\n";
#ifdef _OPENMP
    std::cout << "openmp threads: " << omp_get_max_threads() << "\n";
#else
    std::cout << "openmp: not enabled in this build\n";
#endif

    double best_serial = 1e300;
    double best_parallel = 1e300;
    tmc::DissimilarityMatrix serial, parallel;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        serial = tmc::pairwise_dissimilarity_serial(trajectories, cfg, true);
        best_serial = std::min(best_serial, seconds_since(t0));

        t0 = std::chrono::steady_clock::now();
        parallel = tmc::pairwise_dissimilarity(trajectories, cfg, true, tmc::Execution::Parallel);
        best_parallel = std::min(best_parallel, seconds_since(t0));
    }

    if (!(serial == parallel)) {
        std::cout << "MISMATCH: parallel result differs from the serial reference\n";
        return 1;
    }
    std::cout << "serial   " << best_serial << " s\n";
    std::cout << "parallel " << best_parallel << " s\n";
    std::cout << "speedup  " << best_serial / best_parallel << "x (results bitwise identical)\n";
    return 0;
}
