#pragma once

#include "cas/baselines.hpp"
#include "cas/corpus.hpp"
#include "cas/cycle.hpp"
#include "cas/error.hpp"
#include "cas/evaluate.hpp"
#include "cas/greedy.hpp"
#include "cas/io.hpp"
#include "cas/metrics.hpp"
#include "cas/nmi.hpp"
#include "cas/rng.hpp"
#include "cas/similarity.hpp"
#include "cas/stats.hpp"
#include "cas/sweep.hpp"
#include "cas/synthetic.hpp"
#include "cas/text.hpp"
