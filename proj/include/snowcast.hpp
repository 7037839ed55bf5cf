#pragma once

#include "snowcast/csv.hpp"
#include "snowcast/dataset.hpp"
#include "snowcast/direct.hpp"
#include "snowcast/estimation.hpp"
#include "snowcast/evaluation.hpp"
#include "snowcast/forecast.hpp"
#include "snowcast/fourier.hpp"
#include "snowcast/manifest.hpp"
#include "snowcast/optimize.hpp"
#include "snowcast/parallel.hpp"
#include "snowcast/params_io.hpp"
#include "snowcast/random.hpp"
#include "snowcast/short_term.hpp"
#include "snowcast/synthetic.hpp"
#include "snowcast/version.hpp"
#include "snowcast/weather.hpp"
#include "snowcast/whitening.hpp"
#include "snowcast/zig.hpp"
