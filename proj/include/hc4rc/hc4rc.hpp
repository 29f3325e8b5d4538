#pragma once

#include "hc4rc/baselines.hpp"
#include "hc4rc/conllu.hpp"
#include "hc4rc/corpus.hpp"
#include "hc4rc/csv_dataset.hpp"
#include "hc4rc/errors.hpp"
#include "hc4rc/eval/folds.hpp"
#include "hc4rc/eval/metrics.hpp"
#include "hc4rc/eval/report.hpp"
#include "hc4rc/eval/runner.hpp"
#include "hc4rc/hierarchy.hpp"
#include "hc4rc/model_io.hpp"
#include "hc4rc/rng.hpp"
#include "hc4rc/sr4fs.hpp"
#include "hc4rc/stopwords.hpp"
#include "hc4rc/svm.hpp"
#include "hc4rc/vectorizer.hpp"
