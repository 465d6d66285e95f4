#pragma once

#include "fiberaudit/collision.hpp"
#include "fiberaudit/error.hpp"
#include "fiberaudit/fibers.hpp"
#include "fiberaudit/geometry.hpp"
#include "fiberaudit/io.hpp"
#include "fiberaudit/maps.hpp"
#include "fiberaudit/quantizer.hpp"
#include "fiberaudit/report.hpp"
#include "fiberaudit/sampling.hpp"
#include "fiberaudit/urysohn.hpp"
