#pragma once

#include "optrend/attention.hpp"
#include "optrend/classifier.hpp"
#include "optrend/community.hpp"
#include "optrend/cooccurrence.hpp"
#include "optrend/corpus.hpp"
#include "optrend/csv.hpp"
#include "optrend/day.hpp"
#include "optrend/features.hpp"
#include "optrend/hash.hpp"
#include "optrend/hypergeometric.hpp"
#include "optrend/interaction_graph.hpp"
#include "optrend/opinion_series.hpp"
#include "optrend/pipeline.hpp"
#include "optrend/poll_align.hpp"
#include "optrend/propagation.hpp"
#include "optrend/series.hpp"
#include "optrend/stats.hpp"
#include "optrend/synth.hpp"
#include "optrend/tokenizer.hpp"
