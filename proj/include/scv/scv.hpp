#ifndef SCV_SCV_HPP
#define SCV_SCV_HPP

// Umbrella header for the sparse correlation volume library. PNG support lives
// in scv/png_io.hpp and needs libpng.

#include "scv/census.hpp"
#include "scv/corr_volume.hpp"
#include "scv/displacement.hpp"
#include "scv/encoder.hpp"
#include "scv/error.hpp"
#include "scv/estimator.hpp"
#include "scv/flow_color.hpp"
#include "scv/grid.hpp"
#include "scv/io/formats.hpp"
#include "scv/knn.hpp"
#include "scv/memory_report.hpp"
#include "scv/metrics.hpp"
#include "scv/synthetic.hpp"

#endif // SCV_SCV_HPP
