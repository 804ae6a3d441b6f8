#pragma once

#include "ptrace_lab/matrix.hpp"
#include "ptrace_lab/random.hpp"
#include "ptrace_lab/report.hpp"
#include "ptrace_lab/tensor.hpp"
#include "ptrace_lab/norms.hpp"
#include "ptrace_lab/dilations.hpp"
#include "ptrace_lab/kappa.hpp"
#include "ptrace_lab/inequalities.hpp"
#include "ptrace_lab/applications.hpp"
#include "ptrace_lab/sweep.hpp"
#include "ptrace_lab/json_io.hpp"
