#pragma once

#include "qtakagi/core.hpp"
#include "qtakagi/derivs.hpp"
#include "qtakagi/errors.hpp"
#include "qtakagi/measure.hpp"
#include "qtakagi/rational.hpp"
#include "qtakagi/sampling.hpp"
#include "qtakagi/stepfn.hpp"
#include "qtakagi/suites.hpp"
#include "qtakagi/takagi.hpp"
