#pragma once

#include "msentinel/analysis.hpp"
#include "msentinel/annotate.hpp"
#include "msentinel/ast.hpp"
#include "msentinel/callgraph.hpp"
#include "msentinel/dataflow.hpp"
#include "msentinel/detectors.hpp"
#include "msentinel/diff.hpp"
#include "msentinel/eval.hpp"
#include "msentinel/ir.hpp"
#include "msentinel/lower.hpp"
#include "msentinel/orchestrator.hpp"
#include "msentinel/parser.hpp"
#include "msentinel/pdg.hpp"
#include "msentinel/scenario.hpp"
#include "msentinel/source.hpp"
#include "msentinel/token.hpp"
#include "msentinel/vfg.hpp"
