#pragma once

#include "gkp/errors.hpp"
#include "gkp/hermite.hpp"
#include "gkp/fock.hpp"
#include "gkp/gaussian.hpp"
#include "gkp/breeding.hpp"
#include "gkp/targets.hpp"
#include "gkp/pipeline.hpp"
