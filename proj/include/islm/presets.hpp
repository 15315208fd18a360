#pragma once

// Built-in parameter sets. The shipped YAML configs under configs/ carry the
// same numbers.

#include <islm/model.hpp>

#include <vector>

namespace islm::presets {

inline ModelParams reference_params() { return ModelParams{1.0, 1.0, 1e-3, 2.0, 0.02, 0.02}; }

/// IS curve R = 0.166 - 0.02 Y; with the one-window money block it crosses
/// only the unstable middle arc.
inline ISBlock reference_is() { return ISBlock{2.16, 0.3, 6.0, 0.5, 0.5, 4.0}; }

/// Steeper IS (R = 0.335 - 0.05 Y) crossing both outer arcs and the middle arc.
inline ISBlock steep_is() { return ISBlock{1.84, 0.3, 2.0, 0.5, 0.5, 2.0}; }

inline MoneyBlock money(std::vector<TrapWindow> windows, double l0 = 1.0, double m0 = 0.0) {
    return build_three_phase_money(0.5, 0.25, 10.0, 5.0, l0, m0, std::move(windows), 0.25);
}

/// One trap window on i in (0.04, 0.08); folds at Y = 6.1 and Y ~ 4.905.
inline ModelSpec reference() { return ModelSpec{reference_params(), reference_is(), money({{0.04, 0.08, 8.0, 6.0}})}; }

inline ModelSpec no_trap() { return ModelSpec{reference_params(), reference_is(), money({})}; }

inline ModelSpec steep() { return ModelSpec{reference_params(), steep_is(), money({{0.04, 0.08, 8.0, 6.0}})}; }

inline ModelSpec twice_bent() {
    return ModelSpec{reference_params(), reference_is(),
                     money({{0.03, 0.06, 35.0, 27.5}, {0.10, 0.13, 35.0, 27.5}}, 0.39375, 0.5)};
}

inline ModelSpec thrice_bent() {
    return ModelSpec{reference_params(), reference_is(),
                     money({{0.03, 0.06, 45.0, 35.0}, {0.10, 0.13, 9.0, 7.0}, {0.18, 0.21, 52.0, 42.0}}, 0.39375, 0.5)};
}

}  // namespace islm::presets
