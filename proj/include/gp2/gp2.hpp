#pragma once

#include "gp2/bigint.hpp"
#include "gp2/constraints.hpp"
#include "gp2/elimination.hpp"
#include "gp2/errors.hpp"
#include "gp2/formula.hpp"
#include "gp2/nat_solver.hpp"
#include "gp2/normal_form.hpp"
#include "gp2/normalizer.hpp"
#include "gp2/oracle.hpp"
#include "gp2/parser.hpp"
#include "gp2/type_graph.hpp"
#include "gp2/typespace.hpp"
#include "gp2/validate.hpp"
#include "gp2/witness.hpp"
