#pragma once

#include "freeinv/errors.hpp"
#include "freeinv/harness.hpp"
#include "freeinv/homsum.hpp"
#include "freeinv/hyper.hpp"
#include "freeinv/io.hpp"
#include "freeinv/laws.hpp"
#include "freeinv/nc_core.hpp"
#include "freeinv/report.hpp"
#include "freeinv/rmt.hpp"
#include "freeinv/sparse_array.hpp"
#include "freeinv/wigner.hpp"
#include "freeinv/word_engine.hpp"
