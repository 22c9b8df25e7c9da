#pragma once

namespace emq {

// One heterodyne outcome, units (quanta)^(1/2).
struct QuadratureSample {
    double x = 0.0;
    double y = 0.0;
};

}  // namespace emq
