#pragma once

#include "ddgate/core.hpp"
#include "ddgate/fidelity.hpp"
#include "ddgate/harness.hpp"
#include "ddgate/io.hpp"
#include "ddgate/noise.hpp"
#include "ddgate/random.hpp"
#include "ddgate/schedule.hpp"
#include "ddgate/simulate.hpp"
#include "ddgate/tomography.hpp"
