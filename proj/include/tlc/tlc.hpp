#pragma once

#include "tlc/bounds.hpp"
#include "tlc/complexity.hpp"
#include "tlc/csv.hpp"
#include "tlc/empirical_process.hpp"
#include "tlc/error.hpp"
#include "tlc/experiments.hpp"
#include "tlc/function_class.hpp"
#include "tlc/kernel_spectral.hpp"
#include "tlc/parallel.hpp"
#include "tlc/rng.hpp"
#include "tlc/split.hpp"
#include "tlc/subroot.hpp"
#include "tlc/summation.hpp"
#include "tlc/table_io.hpp"
