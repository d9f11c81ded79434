#pragma once

// Convenience umbrella header for the whole toolkit.

#include "weakir/bm25.hpp"
#include "weakir/config.hpp"
#include "weakir/corpus.hpp"
#include "weakir/embedding.hpp"
#include "weakir/interaction.hpp"
#include "weakir/interaction_filter.hpp"
#include "weakir/parallel.hpp"
#include "weakir/pipeline.hpp"
#include "weakir/ranking_filter.hpp"
#include "weakir/tokenize.hpp"
#include "weakir/trec.hpp"
#include "weakir/triples.hpp"
#include "weakir/util.hpp"
