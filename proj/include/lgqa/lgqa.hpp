#pragma once

#include "lgqa/algebra.hpp"
#include "lgqa/bath.hpp"
#include "lgqa/classical.hpp"
#include "lgqa/ensemble.hpp"
#include "lgqa/errors.hpp"
#include "lgqa/experiments.hpp"
#include "lgqa/integrate.hpp"
#include "lgqa/measure.hpp"
#include "lgqa/model.hpp"
