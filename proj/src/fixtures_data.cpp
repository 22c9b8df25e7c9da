// Machine-readable copies of the published parameter and state tables.
#include "emq/pipeline.hpp"

namespace emq::fixtures::detail {

const char* kCqedParams = R"json({
  "description": "Parameters of the cQED system",
  "values_hz": {
    "omega_c": 7.276781e9,
    "omega_g": 7.290156e9,
    "omega_e": 7.283360e9,
    "kappa_1_upper": 200.0,
    "kappa_2": 50.0e3,
    "kappa_c": 60.0e3,
    "chi": 3.413e6,
    "omega_eg": 5.652e9,
    "omega_sb": 12.924e9,
    "anharmonicity": 340.0e6
  },
  "times_s": {"t1": 60e-6, "t2_star": 14e-6},
  "notes": "frequencies are cycle rates (divide-by-2pi convention)"
})json";

const char* kEmcParams = R"json({
  "description": "Parameters of the electromechanical device at V_dc = 5.83 V",
  "values_hz": {
    "omega_lc": 7.283360e9,
    "kappa_lc": 3.0e6,
    "kappa_ext": 2.59e6,
    "omega_m": 9.345e6,
    "kappa_m": 14.5,
    "g0": 283.0
  },
  "uncertainties_hz": {"kappa_ext": 0.01e6, "kappa_m": 1.0, "g0": 14.0},
  "occupancies": {"n_m": 42.0},
  "occupancy_uncertainties": {"n_m": 2.0}
})json";

const char* kDensityMatrices = R"json({
  "description": "Estimated density matrices used for the average fidelity (3x3 blocks of d=16 estimates, 20480 measurements each)",
  "input": [
    {"re": [[0.994, 0.007, 0.005], [0.007, 0.004, -0.000], [0.005, -0.000, 0.001]],
     "im": [[0.0, 0.005, -0.026], [-0.005, 0.0, 0.001], [0.026, -0.001, 0.0]]},
    {"re": [[0.660, -0.013, 0.030], [-0.013, 0.283, 0.040], [0.030, 0.040, 0.042]],
     "im": [[0.0, -0.039, -0.010], [0.039, 0.0, -0.021], [0.010, 0.021, 0.0]]},
    {"re": [[0.826, 0.256, 0.020], [0.256, 0.173, 0.010], [0.020, 0.010, 0.001]],
     "im": [[0.0, -0.019, -0.003], [0.019, 0.0, -0.005], [0.003, 0.005, 0.0]]},
    {"re": [[0.775, 0.0451, -0.037], [0.0451, 0.217, -0.027], [-0.037, -0.027, 0.006]],
     "im": [[0.0, 0.294, -0.015], [-0.294, 0.0, 0.018], [0.015, -0.018, 0.0]]}
  ],
  "mechanical": [
    {"re": [[0.919, 0.005, 0.010], [0.005, 0.0620, -0.016], [0.010, -0.016, 0.017]],
     "im": [[0.0, 0.001, -0.006], [-0.001, 0.0, 0.001], [0.006, -0.001, 0.0]]},
    {"re": [[0.636, 0.004, -0.034], [0.004, 0.281, 0.021], [-0.034, 0.021, 0.075]],
     "im": [[0.0, -0.016, -0.008], [0.016, 0.0, -0.012], [0.008, 0.012, 0.0]]},
    {"re": [[0.763, 0.180, 0.018], [0.180, 0.197, 0.024], [0.018, 0.024, 0.036]],
     "im": [[0.0, -0.035, -0.015], [0.035, 0.0, -0.011], [0.015, 0.011, 0.0]]},
    {"re": [[0.759, 0.000, -0.031], [0.000, 0.234, 0.019], [-0.031, 0.019, 0.004]],
     "im": [[0.0, 0.21, -0.014], [-0.21, 0.0, -0.017], [0.014, 0.017, 0.0]]}
  ]
})json";

const char* kNthSensitivity = R"json({
  "description": "Estimated diagonal elements under different assumed n_th",
  "columns": ["n_th", "e00", "e11", "e22", "m00", "m11", "m22"],
  "rows": [
    [0.08, 0.655, 0.328, 0.014, 0.694, 0.266, 0.038],
    [0.09, 0.652, 0.331, 0.014, 0.689, 0.265, 0.044],
    [0.10, 0.649, 0.334, 0.015, 0.683, 0.264, 0.050],
    [0.11, 0.645, 0.337, 0.015, 0.677, 0.264, 0.056],
    [0.12, 0.642, 0.340, 0.015, 0.672, 0.263, 0.062]
  ]
})json";

const char* kConfigPhotonCapture = R"json({
  "name": "photon-capture",
  "mode": "photon-capture",
  "seed": 20260810,
  "threads": 0,
  "state_source": {"fixture": "fig3-input"},
  "capture": {"enabled": true, "r1": 0.14, "r2": 0.95, "n_th": 0.1},
  "sampling": {"n_samples": 102400, "n_th": 0.1, "radius": 0.0},
  "tomography": {"dim": 16, "iterations": 500},
  "metrics": {"g2": true}
})json";

const char* kConfigFidelity = R"json({
  "name": "fidelity",
  "mode": "fidelity",
  "seed": 20260810,
  "threads": 0,
  "sampling": {"n_samples": 20480, "n_th": 0.1, "radius": 0.0},
  "tomography": {"dim": 16, "iterations": 500},
  "bootstrap": {"enabled": true, "n_sets": 200, "n_samples": 20480, "level": 0.9}
})json";

}  // namespace emq::fixtures::detail
