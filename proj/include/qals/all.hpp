#pragma once

#include "qals/core.hpp"
#include "qals/errors.hpp"
#include "qals/harness.hpp"
#include "qals/io.hpp"
#include "qals/matrix.hpp"
#include "qals/qals.hpp"
#include "qals/remote.hpp"
#include "qals/rng.hpp"
#include "qals/samplers.hpp"
#include "qals/topology.hpp"
