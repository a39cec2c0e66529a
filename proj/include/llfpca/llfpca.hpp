#pragma once

#include "dataset.hpp"
#include "errors.hpp"
#include "fpca.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "parallel.hpp"
#include "ratestudy.hpp"
#include "reproduce.hpp"
#include "rng.hpp"
#include "simgen.hpp"
#include "smooth1d.hpp"
#include "smooth2d.hpp"
