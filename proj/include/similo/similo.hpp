#pragma once

#include "similo/dom.hpp"
#include "similo/xpath.hpp"
#include "similo/levenshtein.hpp"
#include "similo/similarity.hpp"
#include "similo/scoring.hpp"
#include "similo/page.hpp"
#include "similo/locators.hpp"
#include "similo/multilocator.hpp"
#include "similo/capture.hpp"
#include "similo/evaluation.hpp"
#include "similo/config.hpp"
