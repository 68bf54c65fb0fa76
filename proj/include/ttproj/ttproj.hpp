#pragma once

// Convenience umbrella header for the whole library.

#include "ttproj/bench.hpp"
#include "ttproj/linalg.hpp"
#include "ttproj/oracle.hpp"
#include "ttproj/projection.hpp"
#include "ttproj/rng.hpp"
#include "ttproj/tangent.hpp"
#include "ttproj/tensor3.hpp"
#include "ttproj/ttd.hpp"
