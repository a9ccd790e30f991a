#pragma once

#include "polyglot_forge/bidoc.hpp"
#include "polyglot_forge/census.hpp"
#include "polyglot_forge/cleanse.hpp"
#include "polyglot_forge/code_filter.hpp"
#include "polyglot_forge/corpus_model.hpp"
#include "polyglot_forge/digest.hpp"
#include "polyglot_forge/langid.hpp"
#include "polyglot_forge/mixer.hpp"
#include "polyglot_forge/parallel.hpp"
#include "polyglot_forge/pipeline.hpp"
#include "polyglot_forge/script_detect.hpp"
#include "polyglot_forge/unicode.hpp"
#include "polyglot_forge/version.hpp"
