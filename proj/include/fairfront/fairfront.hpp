#pragma once

// umbrella header: pulls in the whole library

#include "fairfront/bayes.hpp"
#include "fairfront/cli.hpp"
#include "fairfront/data_io.hpp"
#include "fairfront/distributions.hpp"
#include "fairfront/errors.hpp"
#include "fairfront/format.hpp"
#include "fairfront/frontier.hpp"
#include "fairfront/measures.hpp"
#include "fairfront/plugin.hpp"
#include "fairfront/rng.hpp"
#include "fairfront/svg.hpp"
#include "fairfront/version.hpp"
