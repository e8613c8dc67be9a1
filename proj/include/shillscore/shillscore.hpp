#pragma once

// Umbrella header: domain types, ratings, the seller-collusion pipeline, the
// market simulator and the file formats.

#include "shillscore/auction.hpp"
#include "shillscore/collusion.hpp"
#include "shillscore/config_io.hpp"
#include "shillscore/dataset_io.hpp"
#include "shillscore/dot_export.hpp"
#include "shillscore/errors.hpp"
#include "shillscore/ratings.hpp"
#include "shillscore/report_io.hpp"
#include "shillscore/rng.hpp"
#include "shillscore/simulator.hpp"
#include "shillscore/version.hpp"
