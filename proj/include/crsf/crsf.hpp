#pragma once

#include "crsf/bigint.hpp"
#include "crsf/census.hpp"
#include "crsf/dyadic.hpp"
#include "crsf/errors.hpp"
#include "crsf/exact.hpp"
#include "crsf/rational.hpp"
#include "crsf/sampler.hpp"
#include "crsf/scan.hpp"
#include "crsf/svg.hpp"
#include "crsf/torus.hpp"
