#pragma once

// Everything except the command line.
#include "zk/error.hpp"
#include "zk/grid.hpp"
#include "zk/summation.hpp"
#include "zk/field.hpp"
#include "zk/fft.hpp"
#include "zk/spectral.hpp"
#include "zk/snapshot.hpp"
#include "zk/bump.hpp"
#include "zk/projection.hpp"
#include "zk/norms.hpp"
#include "zk/trajectory.hpp"
#include "zk/mixed_norm.hpp"
#include "zk/xt_norm.hpp"
#include "zk/random.hpp"
#include "zk/initial_data.hpp"
#include "zk/solver.hpp"
#include "zk/picard.hpp"
#include "zk/report.hpp"
#include "zk/oscillatory.hpp"
#include "zk/estimates.hpp"
#include "zk/config.hpp"
