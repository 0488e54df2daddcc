#pragma once

// Umbrella header for the whole library.

#include "waveseg/acwe.hpp"
#include "waveseg/clustering.hpp"
#include "waveseg/container_io.hpp"
#include "waveseg/core.hpp"
#include "waveseg/features.hpp"
#include "waveseg/filter_json.hpp"
#include "waveseg/filterbank.hpp"
#include "waveseg/image_io.hpp"
#include "waveseg/metrics.hpp"
#include "waveseg/phantom.hpp"
#include "waveseg/wavelet.hpp"
