#pragma once

#include "coref/chains.hpp"
#include "coref/corpus.hpp"
#include "coref/corpus_io.hpp"
#include "coref/dtree.hpp"
#include "coref/error.hpp"
#include "coref/generator.hpp"
#include "coref/harness.hpp"
#include "coref/instance_io.hpp"
#include "coref/pairgen.hpp"
#include "coref/response_io.hpp"
#include "coref/rules.hpp"
#include "coref/scorer.hpp"
#include "coref/text.hpp"
