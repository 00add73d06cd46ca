#include <iomanip>
#include <sstream>

#include "saddlekit/solvers.hpp"

namespace saddlekit {

std::string trace_to_csv(const Trace& trace) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "iter,primal_err_sq,dual_err_sq,lyapunov,range_residual,rel_error\n";
  for (const TraceRecord& r : trace.records()) {
    os << r.iteration << ',';
    if (trace.has_errors()) {
      os << r.primal_err_sq << ',' << r.dual_err_sq << ',' << r.lyapunov << ',';
    } else {
      os << ",,,";
    }
    os << r.range_residual << ',';
    if (trace.has_errors()) os << r.rel_error;
    os << '\n';
  }
  return os.str();
}

}  // namespace saddlekit
