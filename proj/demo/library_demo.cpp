// Traces the reference LM isocline, lists folds and equilibria, then runs the
// singular-limit flow and reports the relaxation cycle.
#include <islm/presets.hpp>
#include <islm/simulate.hpp>
#include <islm/trajectory.hpp>

#include <cstdio>

int main() {
    using namespace islm;
    const auto spec = presets::reference();
    const auto iso = trace_lm_isocline(spec, {0.0, 20.0});
    for (const auto& b : iso.branches)
        std::printf("%s %-8s Y in [%.4f, %.4f]\n", branch_label(b.id).c_str(), b.stable() ? "stable" : "unstable",
                    b.y_range.lo, b.y_range.hi);
    for (const auto& f : iso.folds) std::printf("fold at Y=%.6f R=%.6f\n", f.y_fold, f.r_fold);
    for (const auto& e : find_equilibria(spec, iso))
        std::printf("equilibrium Y=%.6f R=%.6f %s on %s\n", e.y, e.r, to_string(e.classification),
                    branch_label(e.branch).c_str());

    ReducedOptions o;
    o.stride = 0.002;
    const auto run = reduced_simulate(spec, 5.5, 0, 40.0, o);
    std::printf("%zu jumps\n", run.jumps.size());
    if (const auto c = detect_cycle(run.trajectory))
        std::printf("cycle period %.5f, %s\n", c->period, to_string(c->orientation));
    return 0;
}
