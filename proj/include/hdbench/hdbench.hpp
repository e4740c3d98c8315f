#pragma once

#include "hdbench/bytes.hpp"
#include "hdbench/dataio/dense.hpp"
#include "hdbench/dataio/manifest.hpp"
#include "hdbench/dataio/tabular.hpp"
#include "hdbench/dist/bench.hpp"
#include "hdbench/dist/master.hpp"
#include "hdbench/dist/protocol.hpp"
#include "hdbench/dist/worker.hpp"
#include "hdbench/error.hpp"
#include "hdbench/eval/cv.hpp"
#include "hdbench/eval/metrics.hpp"
#include "hdbench/eval/report.hpp"
#include "hdbench/eval/trainers.hpp"
#include "hdbench/gbt.hpp"
#include "hdbench/linmodels.hpp"
#include "hdbench/log.hpp"
#include "hdbench/mlp.hpp"
#include "hdbench/prep/augment.hpp"
#include "hdbench/prep/balance.hpp"
#include "hdbench/prep/http_transport.hpp"
#include "hdbench/prep/impute.hpp"
#include "hdbench/random.hpp"
#include "hdbench/textfeat.hpp"
