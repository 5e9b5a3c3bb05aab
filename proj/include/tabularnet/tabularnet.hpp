#pragma once

// Umbrella header: the full library.

#include "tabularnet/cell_graph.hpp"
#include "tabularnet/checkpoint.hpp"
#include "tabularnet/common.hpp"
#include "tabularnet/dataset_io.hpp"
#include "tabularnet/encoder.hpp"
#include "tabularnet/features.hpp"
#include "tabularnet/metrics.hpp"
#include "tabularnet/nn/autodiff.hpp"
#include "tabularnet/nn/layers.hpp"
#include "tabularnet/nn/optimizer.hpp"
#include "tabularnet/nn/tensor.hpp"
#include "tabularnet/pipeline.hpp"
#include "tabularnet/rng.hpp"
#include "tabularnet/split.hpp"
#include "tabularnet/synthetic.hpp"
#include "tabularnet/table.hpp"
#include "tabularnet/taxonomy.hpp"
#include "tabularnet/text_embedding.hpp"
