#pragma once

// Umbrella header.

#include "golomb/characters.hpp"
#include "golomb/common.hpp"
#include "golomb/counting.hpp"
#include "golomb/harness.hpp"
#include "golomb/ntcore.hpp"
#include "golomb/report.hpp"
#include "golomb/verify.hpp"
